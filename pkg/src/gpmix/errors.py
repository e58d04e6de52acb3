"""Exception types raised across the package."""


class GpmixError(Exception):
    """Base class for all package errors."""


class NonPrimeDimension(GpmixError, ValueError):
    pass


class ConstructionFailure(GpmixError, RuntimeError):
    """Numerical self-check of a constructed object failed (an implementation bug)."""


class IndexOutOfRange(GpmixError, IndexError):
    pass


class InvalidDistribution(GpmixError, ValueError):
    pass


class InvalidState(GpmixError, ValueError):
    pass


class NonHermitianInput(GpmixError, ValueError):
    pass


class InvalidWeights(GpmixError, ValueError):
    pass


class OutOfTableRange(GpmixError, ValueError):
    pass


class ComponentSingular(GpmixError, ArithmeticError):
    """The component eigenvalue reached zero, so Gamma(t) = -ln lambda(t) diverges."""


class SingularRateOnGrid(GpmixError, ArithmeticError):
    pass


class UnsupportedFamily(GpmixError, ValueError):
    pass


class StepTooLarge(GpmixError, ValueError):
    pass


class GridMismatch(GpmixError, ValueError):
    pass


class SpecParseError(GpmixError, ValueError):
    """Malformed textual spec (eigenfunction, kernel, weights)."""
