"""Exception types shared across the package."""


class FibermemError(Exception):
    """Base class for all package errors."""


class DomainError(FibermemError, ValueError):
    """Input outside the mathematical domain of an operation."""


class RangeError(FibermemError, ValueError):
    """Query outside a tabulated or supported range (no extrapolation)."""


class InfeasibleError(FibermemError, ValueError):
    """Requested quantity is not physically attainable (e.g. R > 1)."""


class InsufficientDataError(FibermemError, ValueError):
    """Too few usable data points for a fit."""


class NonDecayingError(FibermemError, ValueError):
    """Ring-down data does not decay; no lifetime can be extracted."""


class FitFailureError(FibermemError, RuntimeError):
    """Nonlinear fit did not converge or the data cannot constrain it."""


class ConfigError(FibermemError, ValueError):
    """Malformed or inconsistent configuration."""
