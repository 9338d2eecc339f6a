"""Numeric SLH models with linear couplings and quadratic Hamiltonians.

A model acts on a fixed, ordered set of bosonic modes (a :class:`ModeRegistry`).
Couplings are restricted to linear forms ``L = Lambda @ a`` and the Hamiltonian
to

    H = sum_ij omega_ij a_i^dag a_j + 1/(2i) sum_ij (conj(pump_ij) a_i a_j - pump_ij a_i^dag a_j^dag)

so that series and concatenation products stay inside this class and can be
carried out on plain complex matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CompositionError, EmbedError, ParameterError

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12


def _frozen(x, shape=None) -> np.ndarray:
    arr = np.array(x, dtype=complex)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


def _scale(x: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0


@dataclass(frozen=True)
class ModeRegistry:
    """Ordered collection of named modes; index ``i`` is the position of ``modes[i]``."""

    modes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if len(set(self.modes)) != len(self.modes):
            raise ParameterError(f"duplicate mode names in {self.modes}")

    def __len__(self) -> int:
        return len(self.modes)

    def __contains__(self, name) -> bool:
        return name in self.modes

    def index(self, name: str) -> int:
        try:
            return self.modes.index(name)
        except ValueError:
            raise EmbedError(f"mode '{name}' not in registry {self.modes}") from None


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """Detuning matrix ``omega`` (Hermitian) and pump matrix ``pump`` (symmetric), in rad/s."""

    omega: np.ndarray
    pump: np.ndarray

    def __post_init__(self):
        omega = np.atleast_2d(np.asarray(self.omega, dtype=complex))
        pump = np.atleast_2d(np.asarray(self.pump, dtype=complex))
        if omega.shape != pump.shape or omega.shape[0] != omega.shape[1]:
            raise ParameterError(
                f"omega {omega.shape} and pump {pump.shape} must be equal square matrices"
            )
        # tolerances are relative to the largest rate so that MHz-scale entries work
        if np.max(np.abs(omega - omega.conj().T), initial=0.0) > HERMITIAN_TOL * _scale(omega):
            raise ParameterError("omega is not Hermitian")
        if np.max(np.abs(pump - pump.T), initial=0.0) > HERMITIAN_TOL * _scale(pump):
            raise ParameterError("pump is not symmetric")
        object.__setattr__(self, "omega", _frozen(omega))
        object.__setattr__(self, "pump", _frozen(pump))

    @classmethod
    def zero(cls, n: int) -> "QuadraticHamiltonian":
        return cls(np.zeros((n, n)), np.zeros((n, n)))

    @property
    def n_modes(self) -> int:
        return self.omega.shape[0]

    def __add__(self, other: "QuadraticHamiltonian") -> "QuadraticHamiltonian":
        return QuadraticHamiltonian(self.omega + other.omega, self.pump + other.pump)


@dataclass(frozen=True, eq=False)
class SLHModel:
    registry: ModeRegistry
    scattering: np.ndarray
    coupling: np.ndarray
    hamiltonian: QuadraticHamiltonian = field(default=None)

    def __post_init__(self):
        n = len(self.registry)
        S = np.asarray(self.scattering, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ParameterError(f"scattering matrix must be square, got {S.shape}")
        m = S.shape[0]
        L = np.asarray(self.coupling, dtype=complex).reshape(m, n)
        if m and np.max(np.abs(S @ S.conj().T - np.eye(m))) > UNITARY_TOL:
            raise ParameterError("scattering matrix is not unitary")
        H = self.hamiltonian if self.hamiltonian is not None else QuadraticHamiltonian.zero(n)
        if H.n_modes != n:
            raise ParameterError(
                f"Hamiltonian acts on {H.n_modes} modes, registry has {n}"
            )
        object.__setattr__(self, "scattering", _frozen(S))
        object.__setattr__(self, "coupling", _frozen(L))
        object.__setattr__(self, "hamiltonian", H)

    @property
    def ports(self) -> int:
        return self.scattering.shape[0]

    @property
    def n_modes(self) -> int:
        return len(self.registry)

    def isclose(self, other: "SLHModel", atol: float = 1e-12) -> bool:
        if self.registry != other.registry or self.ports != other.ports:
            return False
        pairs = [
            (self.scattering, other.scattering),
            (self.coupling, other.coupling),
            (self.hamiltonian.omega, other.hamiltonian.omega),
            (self.hamiltonian.pump, other.hamiltonian.pump),
        ]
        return all(np.allclose(x, y, rtol=0, atol=atol) for x, y in pairs)

    def __repr__(self):
        return f"SLHModel(modes={self.registry.modes}, ports={self.ports})"


def passthrough(registry: ModeRegistry, ports: int = 0) -> SLHModel:
    """Identity model with ``ports`` uncoupled channels (``ports=0`` is the unit of concatenation)."""
    n = len(registry)
    return SLHModel(registry, np.eye(ports), np.zeros((ports, n)))


def _check_registry(g1: SLHModel, g2: SLHModel):
    if g1.registry != g2.registry:
        raise CompositionError(
            f"registry mismatch: {g1.registry.modes} vs {g2.registry.modes}; embed first"
        )


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def concatenate(g1: SLHModel, g2: SLHModel) -> SLHModel:
    """Parallel composition; ports of ``g1`` come first."""
    _check_registry(g1, g2)
    m1, m2 = g1.ports, g2.ports
    S = np.zeros((m1 + m2, m1 + m2), dtype=complex)
    S[:m1, :m1] = g1.scattering
    S[m1:, m1:] = g2.scattering
    L = np.vstack([g1.coupling, g2.coupling])
    return SLHModel(g1.registry, S, L, g1.hamiltonian + g2.hamiltonian)


def concatenate_all(models: Sequence[SLHModel]) -> SLHModel:
    out = models[0]
    for g in models[1:]:
        out = concatenate(out, g)
    return out


def series(g2: SLHModel, g1: SLHModel) -> SLHModel:
    """Feed the outputs of ``g1`` into the inputs of ``g2``."""
    _check_registry(g1, g2)
    if g1.ports != g2.ports:
        raise CompositionError(
            f"series product needs equal port counts, got {g2.ports} (outer) and {g1.ports} (inner)"
        )
    S1, S2 = g1.scattering, g2.scattering
    L1, L2 = g1.coupling, g2.coupling
    cross = L2.conj().T @ S2 @ L1
    # (L2^dag S2 L1 - h.c.)/(2i) is Hermitian; symmetrize to remove rounding asymmetry
    omega = _hermitian_part(g1.hamiltonian.omega + g2.hamiltonian.omega
                            + (cross - cross.conj().T) / 2j)
    pump = g1.hamiltonian.pump + g2.hamiltonian.pump
    pump = 0.5 * (pump + pump.T)
    return SLHModel(g1.registry, S2 @ S1, L2 + S2 @ L1, QuadraticHamiltonian(omega, pump))


def series_chain(*models: SLHModel) -> SLHModel:
    """``series_chain(gN, ..., g2, g1)`` is ``gN <| ... <| g2 <| g1`` (signal flows right to left)."""
    out = models[-1]
    for g in reversed(models[:-1]):
        out = series(g, out)
    return out


def embed(g: SLHModel, target: ModeRegistry) -> SLHModel:
    """Re-express ``g`` over the (larger) registry ``target``, zero-padding unused modes."""
    missing = [name for name in g.registry.modes if name not in target]
    if missing:
        raise EmbedError(f"modes {missing} missing from target registry {target.modes}")
    idx = [target.index(name) for name in g.registry.modes]
    n = len(target)
    L = np.zeros((g.ports, n), dtype=complex)
    L[:, idx] = g.coupling
    omega = np.zeros((n, n), dtype=complex)
    pump = np.zeros((n, n), dtype=complex)
    omega[np.ix_(idx, idx)] = g.hamiltonian.omega
    pump[np.ix_(idx, idx)] = g.hamiltonian.pump
    return SLHModel(target, g.scattering, L, QuadraticHamiltonian(omega, pump))


def permutation(perm: Sequence[int], registry: ModeRegistry) -> SLHModel:
    """Static channel permutation: input ``k`` leaves through output ``perm[k]``."""
    perm = list(perm)
    if sorted(perm) != list(range(len(perm))):
        raise ParameterError(f"{perm} is not a permutation")
    S = np.zeros((len(perm), len(perm)))
    S[perm, range(len(perm))] = 1.0
    return SLHModel(registry, S, np.zeros((len(perm), len(registry))))


def lift(g: SLHModel, channels: Sequence[int], n_ports: int) -> SLHModel:
    """Place ``g`` on the listed channels of an ``n_ports``-wide bus; other channels pass through.

    Equivalent to conjugating ``g`` concatenated with a passthrough by a channel permutation.
    """
    channels = list(channels)
    if len(channels) != g.ports or len(set(channels)) != len(channels):
        raise CompositionError(f"need {g.ports} distinct channels, got {channels}")
    if any(c < 0 or c >= n_ports for c in channels):
        raise CompositionError(f"channels {channels} out of range for {n_ports} ports")
    S = np.eye(n_ports, dtype=complex)
    S[np.ix_(channels, channels)] = g.scattering
    L = np.zeros((n_ports, g.n_modes), dtype=complex)
    L[channels] = g.coupling
    return SLHModel(g.registry, S, L, g.hamiltonian)
