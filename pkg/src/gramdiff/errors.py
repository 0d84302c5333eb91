"""Exception types shared across the package."""


class GramdiffError(Exception):
    """Base class for all package errors."""


class DomainError(GramdiffError, ValueError):
    """Invalid model parameters (degree, derivative order, window)."""


class RangeError(GramdiffError, ValueError):
    """Argument outside the interval on which a quantity is defined."""


class ConfigurationError(GramdiffError, ValueError):
    """Data or settings that cannot support the requested estimate."""


class NumericalError(GramdiffError, ArithmeticError):
    """Singular or ill-conditioned numerics."""


class ExcitationError(NumericalError):
    """Regressor Gramian lacks persistent excitation."""

    def __init__(self, message, direction=None, metric=None):
        super().__init__(message)
        self.direction = direction
        self.metric = metric


class InitializationError(NumericalError):
    """Information-filter state is not invertible; warm-start first."""
