"""Linear quantum-optical network simulator for a two-OPO coherent-feedback loop."""

__version__ = "0.1.0"

from .slh import (  # noqa: E402
    ModeRegistry,
    QuadraticHamiltonian,
    SLHModel,
    concatenate,
    embed,
    lift,
    passthrough,
    permutation,
    series,
    series_chain,
)
from .components import (  # noqa: E402
    NetworkParams,
    build_network,
    loss_beamsplitter,
    mirror_network,
    opo_port,
    passive_port,
    phase_shifter,
    single_opo,
)
from .linear import DoubledUpSystem, StabilityReport, instability_threshold, stability, to_abcd  # noqa: E402
from .analysis import (  # noqa: E402
    dc_output_amplitude,
    phase_scan,
    squeezing_spectrum,
    steady_state_covariance,
    steady_state_power,
    transfer_function,
)
