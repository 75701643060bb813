"""Exception types shared across the package."""


class MonitorError(Exception):
    """Base class for all package errors."""


class ArgumentError(MonitorError, ValueError):
    """An argument is out of its admissible range."""


class DomainError(MonitorError, ValueError):
    """Input contains non-finite values or lies outside the numeric domain."""


class SymmetryError(MonitorError, ValueError):
    """A matrix expected to be symmetric is not, beyond tolerance."""


class ConvergenceError(MonitorError, RuntimeError):
    """An iterative solver exhausted its iteration budget.

    Parameters
    ----------
    message : str
        Human readable description.
    residual : float
        Off-diagonal Frobenius mass left when the solver stopped.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ConfigError(MonitorError, ValueError):
    """A detector or run configuration violates its invariants."""


class FormatError(MonitorError, ValueError):
    """A data file does not follow the expected layout."""
