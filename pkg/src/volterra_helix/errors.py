"""Exception hierarchy.

Validation-type failures subclass :class:`ValueError`; numerical failures
subclass :class:`ArithmeticError`. The CLI maps the two families to exit
codes 1 and 2.
"""


class VolterraError(Exception):
    """Base class for all package errors."""


class DomainError(VolterraError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(DomainError):
    """A process specification or configuration failed validation."""


class RegimeError(DomainError):
    """The requested check does not apply in the theoretical regime."""


class DataError(DomainError):
    """Degenerate input data (e.g. a zero entry in an increment table)."""


class NumericalError(VolterraError, ArithmeticError):
    """Base class for failures of a numerical method."""


class AccuracyError(NumericalError):
    """Quadrature did not reach the requested tolerance.

    ``best`` carries the best available estimate (a ``QuadResult`` or a
    partial ``MomentBreakdown``).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConditioningError(NumericalError):
    """Cholesky factorization failed even after maximal diagonal jitter."""

    def __init__(self, message, min_eigenvalue=float("nan")):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
