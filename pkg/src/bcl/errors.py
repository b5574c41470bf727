"""Exception hierarchy shared by every module."""


class BCLError(Exception):
    """Base class for all library errors."""


class NonPositiveArgument(BCLError, ValueError):
    pass


class OutOfRange(BCLError, ValueError):
    pass


class AllZero(BCLError, ValueError):
    """Every polynomial in the input set is zero."""


class CapExceeded(BCLError):
    """An enumeration, support-size or precision cap was hit."""


class UndecidableAtPrecision(BCLError):
    """Two quantities could not be separated before the precision cap."""


class ScaleNotRational(UndecidableAtPrecision):
    pass


class PreconditionUnmet(BCLError, ValueError):
    pass


class NoRootInRange(BCLError):
    """No root was found within a bound that the theory guarantees."""
