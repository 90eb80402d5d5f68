"""Exception types raised by ggmselect."""


class GGMError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GGMError, ValueError):
    """Input violates a documented precondition (shape, range, index)."""


class DegenerateMatrixError(GGMError, ValueError):
    """A matrix is not positive definite or a derived quantity vanishes.

    Parameters
    ----------
    message : str
        Human-readable description.
    minor : int or None
        Order of the first leading principal minor that is not positive,
        when known.
    """

    def __init__(self, message, minor=None):
        super().__init__(message)
        self.minor = minor


class NumericalError(GGMError, ArithmeticError):
    """An iterative routine failed to converge."""
