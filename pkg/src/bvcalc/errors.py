"""Exception types shared across the package."""


class BvcalcError(Exception):
    pass


class UnknownGenerator(BvcalcError, KeyError):
    """Name is not a generator or parameter of the chart."""


class ParseError(BvcalcError, ValueError):
    """Expression text fails to parse; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ParityMismatch(BvcalcError, ValueError):
    """An operand has the wrong parity for the requested operation."""


class TableMismatch(BvcalcError, ValueError):
    """Operands live over different generator tables."""


class NotExpressible(BvcalcError, ValueError):
    """The exact result leaves the representable class (roots, logs, ...)."""


class NotGaussian(BvcalcError, ValueError):
    """Integrand exponent is not negative-definite quadratic plus nilpotent."""


class WeightMismatch(BvcalcError, ValueError):
    """Density weight does not fit the requested operation."""


class InverseMismatch(BvcalcError, ValueError):
    """Declared inverse does not compose to the identity."""


class NotSymplectic(BvcalcError, ValueError):
    """The map fails to preserve the canonical two-form."""
