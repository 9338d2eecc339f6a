import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import network_params, random_params
from slh_netsim import build_network, instability_threshold, stability, to_abcd
from slh_netsim.components import passive_port
from slh_netsim.errors import ParameterError
from slh_netsim.linear import DoubledUpSystem, J, doubled_up


def test_table1_drift_entry(table1):
    sys = to_abcd(build_network(table1.replace(x=0.0)))
    Gamma = math.sqrt(18e6 * 36e6) * 0.98234 * 0.85440
    assert sys.A_minus[0, 0] == pytest.approx(-65.45e6 / 2 + Gamma, rel=1e-5)
    assert sys.A_minus[0, 0].real == pytest.approx(-1.136e7, rel=1e-3)


def test_table1_drift_full(table1):
    p = table1.replace(Delta=2.0e6, delta=-3.0e6, phi=2.2, x=0.3, y=-0.2)
    sys = to_abcd(build_network(p))
    a1, a2 = p.alpha(1), p.alpha(2)
    e = np.exp(1j * p.phi)
    G = math.sqrt(p.gamma1 * p.gamma2) * a1 * a2
    expected = np.array([
        [-1j * p.Delta - p.gamma_T / 2 - G * e, -math.sqrt(p.kappa * p.gamma2) * a2 * e],
        [-math.sqrt(p.gamma1 * p.kappa) * a1, -1j * p.delta - p.kappa_T / 2],
    ])
    np.testing.assert_allclose(sys.A_minus, expected, rtol=0, atol=1e-12 * p.gamma_T)
    np.testing.assert_allclose(sys.A_plus, np.diag([p.epsilon, p.eta]), atol=1e-6)


def test_passive_cavity_block_diagonal():
    sys = to_abcd(passive_port("a", 2.0))
    assert np.all(sys.A_plus == 0)
    assert np.all(sys.A[0, 1:] == 0) and np.all(sys.A[1:, 0] == 0)


def test_doubled_up_structure(rng):
    p = random_params(rng)
    sys = to_abcd(build_network(p))
    for M, k in [(sys.A, 2), (sys.C, 8), (sys.D, 8)]:
        r, c = M.shape[0] // 2, M.shape[1] // 2
        np.testing.assert_array_equal(M[r:, c:], M[:r, :c].conj())
        np.testing.assert_array_equal(M[r:, :c], M[:r, c:].conj())


def test_realizability_random_networks(rng):
    worst = 0.0
    for _ in range(100):
        sys = to_abcd(build_network(random_params(rng)))
        worst = max(worst, *sys.realizability_residuals())
    assert worst <= 1e-9


def test_realizability_table1(table1):
    sys = to_abcd(build_network(table1.replace(x=0.32, y=0.1, phi=5.6)))
    r1, r2 = sys.realizability_residuals()
    assert r1 <= 1e-9 * table1.gamma_T and r2 <= 1e-12 * math.sqrt(table1.gamma_T)


def test_shape_validation():
    with pytest.raises(ParameterError):
        DoubledUpSystem(1, 1, np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((3, 3)))


def test_unscattered_b_breaks_realizability(rng):
    # with nontrivial S the unscattered B = -C^dag violates B = -J C^dag J D
    p = random_params(rng)
    sys = to_abcd(build_network(p))
    Lam = sys.C_minus
    B_alt = -doubled_up(Lam.conj().T, np.zeros_like(Lam.T))
    r = B_alt + J(2) @ sys.C.conj().T @ J(8) @ sys.D
    assert np.max(np.abs(r)) > 1e-3


def test_open_loop_unstable_above_one(table1):
    rep = stability(to_abcd(build_network(table1.replace(l1=1.0, l2=1.0, x=1.01))))
    assert not rep.is_hurwitz and rep.max_real_part >= 0


def test_open_loop_threshold_is_one(table1):
    at = lambda x: to_abcd(build_network(table1.replace(l1=1.0, l2=1.0, x=x)))
    assert instability_threshold(at, 0.0, 1.5) == pytest.approx(1.0, abs=1e-8)


def test_feedback_extends_stability_beyond_open_loop(table1):
    rep = stability(to_abcd(build_network(table1.replace(x=1.2))))
    assert rep.is_hurwitz


def test_closed_loop_threshold_reproducible(table1):
    at = lambda x: to_abcd(build_network(table1.replace(x=x)))
    a = instability_threshold(at, 0.0, 2.0)
    b = instability_threshold(at, 0.0, 2.0)
    assert abs(a - b) <= 1e-6
    assert 1.0 < a < 2.0


def test_threshold_bracket_errors(table1):
    at = lambda x: to_abcd(build_network(table1.replace(x=x)))
    with pytest.raises(ParameterError):
        instability_threshold(at, 1.9, 2.0)
    with pytest.raises(ParameterError):
        instability_threshold(at, 0.0, 0.5)


@settings(max_examples=40, deadline=None)
@given(network_params(pump=False))
def test_passive_networks_damped(p):
    sys = to_abcd(build_network(p))
    rep = stability(sys)
    ev = np.linalg.eigvals(sys.A_minus)
    # pump off: spectrum of A is that of A_minus and its conjugate
    assert rep.max_real_part == pytest.approx(float(np.max(ev.real)), abs=1e-12)
    assert rep.max_real_part <= 1e-12
    if min(p.gamma_T, p.kappa_T) > 1e-3:
        assert rep.is_hurwitz == (rep.max_real_part < 0)


@settings(max_examples=40, deadline=None)
@given(network_params())
def test_pump_linearity(p):
    s1 = to_abcd(build_network(p))
    s2 = to_abcd(build_network(p.replace(x=2 * p.x, y=2 * p.y)))
    np.testing.assert_allclose(s2.A_plus, 2 * s1.A_plus, atol=1e-12)
    np.testing.assert_array_equal(s2.A_minus, s1.A_minus)
    for name in "BCD":
        np.testing.assert_array_equal(getattr(s2, name), getattr(s1, name))


@settings(max_examples=40, deadline=None)
@given(network_params())
def test_hurwitz_flag_consistent(p):
    rep = stability(to_abcd(build_network(p)))
    assert rep.is_hurwitz == (rep.max_real_part < 0)
    assert len(rep.eigenvalues) == 4
