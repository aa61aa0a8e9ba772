"""Exception types shared across the package."""


class HalfspaceError(Exception):
    """Base class for all package errors."""


class DomainError(HalfspaceError, ValueError):
    """An argument lies outside the domain where the object is defined."""


class NonConvergence(HalfspaceError, ArithmeticError):
    """Adaptive quadrature or root finding ran out of budget.

    ``partial`` carries the last estimate when one is available.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GeometryError(HalfspaceError):
    """The fiber map has no mountain-pass shape (E - lambda*P <= 0)."""


class SingularFit(HalfspaceError, ArithmeticError):
    """Least-squares basis is numerically rank deficient."""


class IllConditionedGram(HalfspaceError, ArithmeticError):
    """Ritz Gram matrix is too ill conditioned to trust."""


class DegenerateDenominator(HalfspaceError, ArithmeticError):
    """A Rayleigh quotient has a zero (or non-finite) denominator."""


class SoundnessError(HalfspaceError):
    """Existence and nonexistence clauses fired for the same point."""
