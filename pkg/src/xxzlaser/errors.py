"""Exception hierarchy shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class DomainError(SimulationError, ValueError):
    """Invalid argument value (site out of range, bad operator kind, ...)."""


class DimensionMismatchError(DomainError):
    """Operands live on incompatible Hilbert spaces."""


class BudgetExceededError(SimulationError):
    """A construction or solve would exceed the configured memory budget."""


class ConvergenceError(SimulationError):
    """An iterative solve stopped above its residual target."""

    def __init__(self, message: str, achieved_residual: float | None = None):
        super().__init__(message)
        self.achieved_residual = achieved_residual


class DegenerateSteadyStateError(SimulationError):
    """The bordered steady-state system is singular (non-unique NESS)."""


class UndefinedStatisticError(SimulationError):
    """A ratio-type observable has a vanishing denominator."""


class StepSizeError(SimulationError):
    """Trajectory norm underflowed within a single step (dt too large)."""


class WindowLeakError(SimulationError):
    """Amplitude leaked outside the tracked Fock window beyond tolerance."""


class ConfigError(SimulationError):
    """Invalid run configuration."""
