"""Exception types raised across the package."""


class WceError(Exception):
    """Base class for all package errors."""


class DimensionError(WceError, ValueError):
    """A function or matrix does not match the ambient space."""


class UnsupportedExponentError(WceError, ValueError):
    """The operation is not defined for the operator's exponent."""


class NotInvertibleError(WceError, ArithmeticError):
    """I - T cannot be inverted by the Neumann closed form."""


class SingularMatrixError(WceError, ArithmeticError):
    """Dense inversion hit a pivot below tolerance."""


class PreconditionError(WceError, ValueError):
    """An oracle routine was handed a matrix violating its contract."""
