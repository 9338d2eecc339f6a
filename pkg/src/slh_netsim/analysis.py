"""Frequency-domain and steady-state analysis of a :class:`DoubledUpSystem`.

Frequencies passed in by users are in Hz; internally everything is evaluated
at the angular frequency ``omega = 2 pi f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import constants

from .components import L2_TAP_PORT, NetworkParams, build_network
from .errors import ResonanceError, ScanError, StabilityError
from .linear import DoubledUpSystem, J, stability, to_abcd

RESOLVENT_COND_MAX = 1e12
REAL_TOL = 1e-10
DEFAULT_GRID = np.linspace(0.0, 20e6, 1024)
# ~2 uW forward seed at 1064.4 nm, in sqrt(photons/s)
SEED_AMPLITUDE = math.sqrt(2e-6 / (constants.h * constants.c / 1064.4e-9))


@dataclass(frozen=True, eq=False)
class TransferBlocks:
    s_minus: np.ndarray
    s_plus: np.ndarray
    omega: float


def _transfer_stack(sys: DoubledUpSystem, omegas: np.ndarray) -> np.ndarray:
    """Xi(omega) for every entry of ``omegas``, shape (K, 2m, 2m)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    dim = sys.A.shape[0]
    resolvent = -1j * omegas[:, None, None] * np.eye(dim) - sys.A
    cond = np.linalg.cond(resolvent)
    bad = ~np.isfinite(cond) | (cond > RESOLVENT_COND_MAX)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ResonanceError(float(omegas[k]), float(cond[k]))
    return sys.D + sys.C @ np.linalg.solve(resolvent, sys.B)


def transfer_function(sys: DoubledUpSystem, omega: float) -> TransferBlocks:
    """``Xi(omega) = D + C (-i omega I - A)^-1 B`` split into its S- and S+ blocks."""
    xi = _transfer_stack(sys, [omega])[0]
    m = sys.n_ports
    return TransferBlocks(xi[:m, :m].copy(), xi[:m, m:].copy(), float(omega))


def assemble_xi(sys: DoubledUpSystem, omega: float) -> np.ndarray:
    """Rebuild the full doubled-up Xi(omega) from the blocks at +omega and -omega."""
    pos = transfer_function(sys, omega)
    neg = transfer_function(sys, -omega)
    return np.block([[pos.s_minus, pos.s_plus], [neg.s_plus.conj(), neg.s_minus.conj()]])


def unitarity_residual(xi: np.ndarray) -> float:
    Jm = J(xi.shape[0] // 2)
    return float(np.max(np.abs(xi @ Jm @ xi.conj().T - Jm)))


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    frequencies: np.ndarray
    values: np.ndarray
    port: int
    theta: float
    dc_amplitude: complex = 0j
    dc_delta_weight: float = 0.0

    @property
    def values_db(self) -> np.ndarray:
        return 10 * np.log10(self.values)

    def extremum(self, kind: str = "auto") -> tuple[float, float]:
        """Frequency (Hz) and value of the largest excursion from vacuum.

        ``kind`` is ``"min"`` (squeezing), ``"max"`` (anti-squeezing) or
        ``"auto"`` (whichever departs further from 1).
        """
        v = self.values
        if kind == "auto":
            kind = "min" if np.max(np.abs(v - 1)) == np.max(1 - v) else "max"
        k = int(np.argmin(v)) if kind == "min" else int(np.argmax(v))
        return float(self.frequencies[k]), float(v[k])


def _require_stable(sys: DoubledUpSystem, what: str):
    rep = stability(sys)
    if not rep.is_hurwitz:
        raise StabilityError(
            f"{what} undefined: drift matrix not Hurwitz (max Re eig = {rep.max_real_part:.6g} rad/s)"
        )


def quadrature_noise(sys: DoubledUpSystem, port: int, theta: float, omegas) -> np.ndarray:
    """Shot-noise-normalized quadrature spectrum at angular frequencies ``omegas``.

    ``1 + N(w) + N(-w) + e^{2i theta} M(w) + e^{-2i theta} conj(M(w))`` with
    ``N(w) = sum_k |S+_jk(w)|^2`` and ``M(w) = sum_k S-_jk(w) S+_jk(-w)``. The
    last term is written with ``conj(M(w))`` so the quadrature stays Hermitian
    when detunings make ``M`` complex; for real ``M`` it equals ``M(-w)``.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    m = sys.n_ports
    pos = _transfer_stack(sys, omegas)
    neg = _transfer_stack(sys, -omegas)
    sm_pos, sp_pos = pos[:, port, :m], pos[:, port, m:]
    sp_neg = neg[:, port, m:]
    n_pos = np.sum(np.abs(sp_pos) ** 2, axis=1)
    n_neg = np.sum(np.abs(sp_neg) ** 2, axis=1)
    mix = np.sum(sm_pos * sp_neg, axis=1)
    rot = np.exp(2j * theta)
    p = 1 + n_pos + n_neg + rot * mix + np.conj(rot * mix)
    if np.max(np.abs(p.imag), initial=0.0) > REAL_TOL:
        raise ArithmeticError("squeezing spectrum has a non-negligible imaginary part")
    return p.real


def dc_output_amplitude(sys: DoubledUpSystem, w: Sequence[complex]) -> np.ndarray:
    """Steady-state output amplitudes ``S-(0) w + S+(0) conj(w)`` for coherent input ``w``."""
    _require_stable(sys, "dc amplitude")
    w = np.asarray(w, dtype=complex)
    blocks = transfer_function(sys, 0.0)
    return blocks.s_minus @ w + blocks.s_plus @ w.conj()


def squeezing_spectrum(sys: DoubledUpSystem, port: int, theta: float, grid=None,
                       input_amplitudes: Sequence[complex] | None = None) -> SpectrumResult:
    _require_stable(sys, "squeezing spectrum")
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("frequency grid must be finite")
    values = quadrature_noise(sys, port, theta, 2 * math.pi * grid)
    dc, weight = 0j, 0.0
    if input_amplitudes is not None and np.any(np.asarray(input_amplitudes) != 0):
        dc = complex(dc_output_amplitude(sys, input_amplitudes)[port])
        weight = 4 * (np.exp(1j * theta) * dc).real ** 2
    return SpectrumResult(grid.copy(), values, port, theta, dc, float(weight))


@dataclass(frozen=True, eq=False)
class CovarianceResult:
    delta_n: np.ndarray
    residual: float

    def photon_numbers(self) -> np.ndarray:
        """Intracavity <a_k^dag a_k> for each mode."""
        n = self.delta_n.shape[0] // 2
        return np.diag(self.delta_n)[n:].real.copy()


def solve_lyapunov(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Solve ``A X + X A^dag + Q = 0`` by vectorization (column-major vec)."""
    k = A.shape[0]
    eye = np.eye(k)
    op = np.kron(eye, A) + np.kron(A.conj(), eye)
    x = np.linalg.solve(op, -Q.reshape(-1, order="F"))
    return x.reshape(k, k, order="F")


def steady_state_covariance(sys: DoubledUpSystem) -> CovarianceResult:
    _require_stable(sys, "steady-state covariance")
    n = sys.n_modes
    Cm = sys.C_minus
    Q = np.zeros((2 * n, 2 * n), dtype=complex)
    Q[:n, :n] = Cm.conj().T @ Cm
    X = solve_lyapunov(sys.A, Q)
    X = 0.5 * (X + X.conj().T)
    res = float(np.max(np.abs(sys.A @ X + X @ sys.A.conj().T + Q)))
    return CovarianceResult(X, res)


@dataclass(frozen=True)
class PowerResult:
    coherent: float
    fluctuation: float

    @property
    def total(self) -> float:
        return self.coherent + self.fluctuation


def steady_state_power(sys: DoubledUpSystem, w: Sequence[complex], port: int,
                       covariance: CovarianceResult | None = None) -> PowerResult:
    """Photon flux (photons/s) leaving ``port``: coherent ``|v_j|^2`` plus fluctuation term."""
    v = dc_output_amplitude(sys, w)
    cov = covariance if covariance is not None else steady_state_covariance(sys)
    m = sys.n_ports
    fl = (sys.C @ cov.delta_n @ sys.C.conj().T)[m + port, m + port]
    return PowerResult(float(abs(v[port]) ** 2), max(float(fl.real), 0.0))


@dataclass(frozen=True, eq=False)
class PhaseScanResult:
    phis: np.ndarray
    power: np.ndarray        # NaN where the network is unstable
    stable: np.ndarray
    phi_min: float
    port: int
    seed_port: int


def phase_scan(p: NetworkParams, phi_grid, port: int = L2_TAP_PORT, seed_port: int = 0,
               seed_amplitude: complex = SEED_AMPLITUDE) -> PhaseScanResult:
    """Steady-state power at ``port`` versus feedback phase, for a coherent seed into ``seed_port``.

    Unstable phases are recorded (power NaN, ``stable`` False) and excluded
    from the minimum search.
    """
    phis = np.asarray(phi_grid, dtype=float)
    w = np.zeros(8, dtype=complex)
    w[seed_port] = seed_amplitude
    power = np.full(phis.shape, np.nan)
    stable = np.zeros(phis.shape, dtype=bool)
    for i, phi in enumerate(phis):
        sys = to_abcd(build_network(p.replace(phi=float(phi))))
        if not stability(sys).is_hurwitz:
            continue
        stable[i] = True
        power[i] = steady_state_power(sys, w, port).total
    if not np.any(stable):
        raise ScanError("every phase on the grid gives an unstable network")
    k = int(np.nanargmin(power))
    return PhaseScanResult(phis, power, stable, float(phis[k]), port, seed_port)
