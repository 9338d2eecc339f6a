"""Exception hierarchy shared across the package."""


class NetSimError(Exception):
    """Base class for all errors raised by slh_netsim."""


class CompositionError(NetSimError):
    """Two SLH models cannot be combined (registry or port mismatch)."""


class EmbedError(NetSimError):
    """A model cannot be embedded into the requested mode registry."""


class ParameterError(NetSimError, ValueError):
    """A physical parameter is outside its admissible range."""


class NumericError(NetSimError):
    """A linear-algebra routine failed."""


class StabilityError(NetSimError):
    """The drift matrix is not Hurwitz, so steady-state quantities are undefined."""


class ResonanceError(NetSimError):
    """The resolvent is (numerically) singular at the requested frequency."""

    def __init__(self, omega, cond):
        self.omega = omega
        self.cond = cond
        super().__init__(
            f"resolvent near-singular at omega={omega:.6g} rad/s (condition {cond:.3g})"
        )


class ScanError(NetSimError):
    """A parameter scan produced no usable points."""


class ConfigError(NetSimError):
    """An experiment configuration is malformed or invalid."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ExperimentError(NetSimError):
    """An experiment run failed; the underlying error is chained as ``__cause__``."""
