"""Exception taxonomy shared across the package."""


class ParameterError(ValueError):
    """Invalid parameter or domain violation."""


class StabilityError(ParameterError):
    """The branching condition alpha * mu < 1 fails (or mu < 1 in the linear case)."""


class ConfigError(ValueError):
    """Malformed configuration: unknown section/key, bad value, missing entry."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge or lost accuracy."""


class HorizonError(ValueError):
    """A lookup needs values beyond the tabulated horizon."""

    def __init__(self, msg, required_horizon=None):
        super().__init__(msg)
        self.required_horizon = required_horizon


class SimulationError(RuntimeError):
    """Runtime failure inside a simulation loop."""

    def __init__(self, msg, time=None):
        super().__init__(msg)
        self.time = time


class TruncationError(SimulationError):
    """The truncated mark strip was exceeded; the run result is invalid."""

    def __init__(self, msg, time=None, exceedance=None):
        super().__init__(msg, time=time)
        self.exceedance = exceedance


class StatisticalError(ValueError):
    """Too few samples for a statistically meaningful estimate."""
