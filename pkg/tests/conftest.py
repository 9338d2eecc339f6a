import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from slh_netsim import ModeRegistry, NetworkParams, QuadraticHamiltonian, SLHModel  # noqa: E402

rate = st.floats(0.0, 5.0)
signed = st.floats(-3.0, 3.0)
loss = st.floats(0.0, 0.95)
phase = st.floats(0.0, 2 * math.pi)


@st.composite
def network_params(draw, pump=True):
    return NetworkParams(
        gamma1=draw(rate), gamma2=draw(rate), gamma3=draw(rate), gamma4=draw(rate),
        gammaL=draw(rate), kappa=draw(rate), kappaL=draw(rate),
        Delta=draw(signed), delta=draw(signed), phi=draw(phase),
        l1=draw(loss), l2=draw(loss), l3=draw(loss),
        x=draw(st.floats(-0.9, 0.9)) if pump else 0.0,
        y=draw(st.floats(-0.9, 0.9)) if pump else 0.0,
    )


def random_unitary(rng, m):
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_model(rng, registry, ports):
    n = len(registry)
    L = rng.normal(size=(ports, n)) + 1j * rng.normal(size=(ports, n))
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    pmp = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = QuadraticHamiltonian(w + w.conj().T, pmp + pmp.T)
    return SLHModel(registry, random_unitary(rng, ports), L, H)


def random_params(rng, pump=True):
    u = rng.uniform
    return NetworkParams(
        gamma1=u(0, 5), gamma2=u(0, 5), gamma3=u(0, 5), gamma4=u(0, 5), gammaL=u(0, 5),
        kappa=u(0, 5), kappaL=u(0, 5), Delta=u(-3, 3), delta=u(-3, 3),
        phi=u(0, 2 * math.pi), l1=u(0, 0.95), l2=u(0, 0.95), l3=u(0, 0.95),
        x=u(-0.9, 0.9) if pump else 0.0, y=u(-0.9, 0.9) if pump else 0.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ab():
    return ModeRegistry(("a", "b"))


@pytest.fixture
def table1():
    return NetworkParams()


_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; shown in the terminal summary."""
    def _report(label, checks):
        ok = all(c for _, c in checks)
        detail = "; ".join(f"{name}={'ok' if c else 'FAIL'}" for name, c in checks)
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
