"""Doubled-up (a, a^dag) linear state-space form of an SLH model, and stability."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericError, ParameterError
from .slh import SLHModel


def doubled_up(X, Y) -> np.ndarray:
    """``[[X, Y], [conj(Y), conj(X)]]``."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    return np.block([[X, Y], [Y.conj(), X.conj()]])


def J(k: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(k), -np.ones(k)])).astype(complex)


@dataclass(frozen=True, eq=False)
class DoubledUpSystem:
    """``d a_ = A a_ dt + B dA_``, ``dA_out = C a_ dt + D dA_`` with ``a_ = (a, a^dag)``."""

    n_modes: int
    n_ports: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        n, m = self.n_modes, self.n_ports
        shapes = {"A": (2 * n, 2 * n), "B": (2 * n, 2 * m), "C": (2 * m, 2 * n), "D": (2 * m, 2 * m)}
        for name, shape in shapes.items():
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != shape:
                raise ParameterError(f"{name} has shape {arr.shape}, expected {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def A_minus(self) -> np.ndarray:
        return self.A[: self.n_modes, : self.n_modes]

    @property
    def A_plus(self) -> np.ndarray:
        return self.A[: self.n_modes, self.n_modes:]

    @property
    def C_minus(self) -> np.ndarray:
        return self.C[: self.n_ports, : self.n_modes]

    def realizability_residuals(self) -> tuple[float, float]:
        """Max-norm of ``A J + J A^dag + B J B^dag`` and of ``B + J C^dag J D``."""
        Jn, Jm = J(self.n_modes), J(self.n_ports)
        r1 = self.A @ Jn + Jn @ self.A.conj().T + self.B @ Jm @ self.B.conj().T
        r2 = self.B + Jn @ self.C.conj().T @ Jm @ self.D
        return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def to_abcd(g: SLHModel) -> DoubledUpSystem:
    S = g.scattering
    Lam = g.coupling
    H = g.hamiltonian
    A_minus = -1j * H.omega - 0.5 * Lam.conj().T @ Lam
    zeros_mn = np.zeros_like(Lam)
    return DoubledUpSystem(
        n_modes=g.n_modes,
        n_ports=g.ports,
        A=doubled_up(A_minus, H.pump),
        # -C^dag S rather than -C^dag: forced by B = -J C^dag J D when S != 1
        B=-doubled_up(Lam.conj().T @ S, zeros_mn.T),
        C=doubled_up(Lam, zeros_mn),
        D=doubled_up(S, np.zeros_like(S)),
    )


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: tuple
    max_real_part: float
    is_hurwitz: bool


def stability(sys: DoubledUpSystem) -> StabilityReport:
    try:
        ev = np.linalg.eigvals(sys.A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericError("non-finite eigenvalues")
    mr = float(np.max(ev.real))
    return StabilityReport(tuple(complex(v) for v in ev), mr, mr < 0)


def instability_threshold(system_at: Callable[[float], DoubledUpSystem], lo: float, hi: float,
                          tol: float = 1e-9, max_iter: int = 200) -> float:
    """Bisect for the smallest pump value at which ``system_at(x)`` stops being Hurwitz.

    ``lo`` must be stable and ``hi`` unstable. Returns the midpoint of the final
    bracket, which is narrower than ``tol``.
    """
    if not stability(system_at(lo)).is_hurwitz:
        raise ParameterError(f"lower bracket {lo} is already unstable")
    if stability(system_at(hi)).is_hurwitz:
        raise ParameterError(f"upper bracket {hi} is still stable")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if stability(system_at(mid)).is_hurwitz:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
