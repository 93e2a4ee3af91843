"""Exception hierarchy shared by every module."""


class MixHypoError(Exception):
    """Base class for all library errors."""


class DomainError(MixHypoError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConstructionError(MixHypoError, ValueError):
    """A mixture or family was built from inconsistent ingredients."""


class SeparationError(ConstructionError):
    """Two parameters that must be distinct are too close together."""


class PositivityError(ConstructionError):
    """A parameter that must be strictly positive is not."""


class MomentDoesNotExist(MixHypoError, ArithmeticError):
    """The requested raw moment is infinite for at least one component."""

    def __init__(self, message, component=None, max_order=None):
        super().__init__(message)
        self.component = component
        self.max_order = max_order


class AccuracyError(MixHypoError, ArithmeticError):
    """Quadrature could not reach the requested tolerance."""

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InsufficientData(MixHypoError, ValueError):
    """Too few observations for the number of free parameters."""


class NoConvergence(MixHypoError, RuntimeError):
    """An optimiser stopped without meeting its convergence criterion."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
