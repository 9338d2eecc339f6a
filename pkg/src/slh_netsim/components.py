"""Component factories and the two-OPO coherent-feedback network.

Rates are angular (rad/s). The default parameter set is the empty-cavity
destructive-feedback fit, where "18 MHz/2pi" is read as 18e6 rad/s; this gives
a plant half-linewidth gamma_T / (4 pi) of about 5.2 MHz.
"""
from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .slh import (
    ModeRegistry,
    QuadraticHamiltonian,
    SLHModel,
    concatenate_all,
    lift,
    permutation,
    series_chain,
)

PLANT_CONTROLLER = ModeRegistry(("a", "b"))

N_PORTS = 8
# output (row) order of the composed network
PORT_NAMES = (
    "homodyne",    # plant output after the homodyne loss l3
    "l3_tap",
    "l2_tap",      # controller -> plant path; stands in for the 10% monitor
    "l1_tap",
    "plant_m3",
    "plant_m4",
    "plant_loss",
    "controller_loss",
)
# input (column) order: plant mirror 1 input, then the three idle beam-splitter inputs
INPUT_NAMES = (
    "plant_m1",
    "l1_idle",
    "l2_idle",
    "l3_idle",
    "plant_m3",
    "plant_m4",
    "plant_loss",
    "controller_loss",
)
HOMODYNE_PORT = 0
L2_TAP_PORT = 2


def _mode_registry(mode, registry):
    if registry is None:
        return ModeRegistry((mode,))
    if mode not in registry:
        raise ParameterError(f"mode '{mode}' not in registry {registry.modes}")
    return registry


def opo_port(mode: str, gamma: float, detuning: float = 0.0, pump_amplitude: complex = 0.0,
             registry: ModeRegistry | None = None) -> SLHModel:
    """Single-port degenerate OPO ``(1, sqrt(gamma) a, detuning a^dag a + (eps* a^2 - eps a^dag^2)/2i)``."""
    if gamma < 0:
        raise ParameterError(f"coupling rate must be nonnegative, got {gamma}")
    reg = _mode_registry(mode, registry)
    n = len(reg)
    k = reg.index(mode)
    L = np.zeros((1, n), dtype=complex)
    L[0, k] = math.sqrt(gamma)
    omega = np.zeros((n, n), dtype=complex)
    pump = np.zeros((n, n), dtype=complex)
    omega[k, k] = detuning
    pump[k, k] = pump_amplitude
    return SLHModel(reg, np.eye(1), L, QuadraticHamiltonian(omega, pump))


def passive_port(mode: str, gamma: float, registry: ModeRegistry | None = None) -> SLHModel:
    return opo_port(mode, gamma, 0.0, 0.0, registry)


def phase_shifter(phi: float, registry: ModeRegistry = PLANT_CONTROLLER) -> SLHModel:
    n = len(registry)
    return SLHModel(registry, np.array([[np.exp(1j * phi)]]), np.zeros((1, n)))


def loss_beamsplitter(l: float, registry: ModeRegistry = PLANT_CONTROLLER) -> SLHModel:
    """Two-port loss element ``S = [[alpha, beta], [-beta, alpha]]``, alpha = sqrt(1-l), beta = sqrt(l).

    Port 0 carries the idle input and the tap output, port 1 the through path:
    the through output is ``alpha * main - beta * idle`` and the tap output
    ``beta * main + alpha * idle``.
    """
    if not 0.0 <= l < 1.0:
        raise ParameterError(f"loss out of range [0, 1): {l}")
    a, b = math.sqrt(1.0 - l), math.sqrt(l)
    n = len(registry)
    return SLHModel(registry, np.array([[a, b], [-b, a]]), np.zeros((2, n)))


@dataclass(frozen=True)
class NetworkParams:
    """All physical parameters of the plant/controller feedback network.

    Rates in rad/s, losses as power fractions, phases in rad. ``x`` and ``y``
    are the plant and controller pump parameters (pump amplitude over its
    threshold value); the sign of ``y`` relative to ``x`` is the pump parity.
    """

    gamma1: float = 18e6
    gamma2: float = 36e6
    gamma3: float = 2e6
    gamma4: float = 0.45e6
    gammaL: float = 9e6
    kappa: float = 61e6
    kappaL: float = 5.7e6
    Delta: float = 0.0
    delta: float = 0.0
    phi: float = math.pi
    l1: float = 0.035
    l2: float = 0.27
    l3: float = 0.30
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    input_amplitudes: tuple = field(default=(0j,) * N_PORTS)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name != "input_amplitudes" and not math.isfinite(v):
                raise ParameterError(f"{f.name}: must be finite, got {v}")
        for name in ("gamma1", "gamma2", "gamma3", "gamma4", "gammaL", "kappa", "kappaL"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name}: rate must be nonnegative")
        # l = 1 fully opens a path; the beam-splitter itself requires l < 1
        for name in ("l1", "l2", "l3"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ParameterError(f"{name}: loss out of range")
        w = tuple(complex(v) for v in self.input_amplitudes)
        if not all(cmath.isfinite(v) for v in w):
            raise ParameterError("input_amplitudes: must be finite")
        if len(w) != N_PORTS:
            raise ParameterError(f"input_amplitudes needs {N_PORTS} entries, got {len(w)}")
        object.__setattr__(self, "input_amplitudes", w)

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)

    @property
    def gamma_T(self) -> float:
        return self.gamma1 + self.gamma2 + self.gamma3 + self.gamma4 + self.gammaL

    @property
    def kappa_T(self) -> float:
        return self.kappa + self.kappaL

    @property
    def epsilon(self) -> float:
        return self.x * self.gamma_T / 2

    @property
    def eta(self) -> float:
        return self.y * self.kappa_T / 2

    def alpha(self, j: int) -> float:
        return math.sqrt(1.0 - getattr(self, f"l{j}"))

    def beta(self, j: int) -> float:
        return math.sqrt(getattr(self, f"l{j}"))


def controller_detuning(freq_hz: float) -> float:
    """Convert a controller cavity detuning quoted in Hz to rad/s."""
    return 2 * math.pi * freq_hz


def _loss(l: float) -> SLHModel:
    # a fully open path (l = 1) is a swap of through and tap; keep the generic form
    if l >= 1.0:
        return SLHModel(PLANT_CONTROLLER, np.array([[0.0, 1.0], [-1.0, 0.0]]), np.zeros((2, 2)))
    return loss_beamsplitter(l)


def build_network(p: NetworkParams) -> SLHModel:
    """Compose the 8-port, 2-mode SLH model of the lossy plant/controller loop.

    Signal path on a 4-channel bus (channel 0 = main path, 1..3 = idle/tap of
    l1, l2, l3)::

        P1 -> l1 -> C1 -> phi -> l2 -> P2 -> l3 -> homodyne

    followed by a channel swap so the taps come out in the order l3, l2, l1,
    then concatenation with the vacuum-only ports (plant mirrors 3, 4, plant
    loss, controller loss).
    """
    reg = PLANT_CONTROLLER
    bus = 4
    P1 = opo_port("a", p.gamma1, p.Delta, p.epsilon, reg)
    P2 = passive_port("a", p.gamma2, reg)
    C1 = opo_port("b", p.kappa, p.delta, p.eta, reg)
    loop = series_chain(
        permutation([0, 3, 2, 1], reg),
        lift(_loss(p.l3), [3, 0], bus),
        lift(P2, [0], bus),
        lift(_loss(p.l2), [2, 0], bus),
        lift(phase_shifter(p.phi, reg), [0], bus),
        lift(C1, [0], bus),
        lift(_loss(p.l1), [1, 0], bus),
        lift(P1, [0], bus),
    )
    rest = [
        passive_port("a", p.gamma3, reg),
        passive_port("a", p.gamma4, reg),
        passive_port("a", p.gammaL, reg),
        passive_port("b", p.kappaL, reg),
    ]
    return concatenate_all([loop] + rest)


def single_opo(gamma: float, x: float, detuning: float = 0.0) -> SLHModel:
    """Lossless one-port OPO with pump parameter ``x = 2 eps / gamma``."""
    return opo_port("a", gamma, detuning, x * gamma / 2)


def mirror_network(p: NetworkParams) -> SLHModel:
    """The feedback loop with the controller cavity replaced by a perfect mirror.

    This is the far-detuned limit: a cavity detuned far off resonance reflects
    with unit amplitude, so light from l1 goes straight into l2. The controller
    mode is decoupled from the loop (it still decays through its loss port and
    therefore stays stable, but never reaches the homodyne output).
    """
    return build_network(p.replace(kappa=0.0, y=0.0))
