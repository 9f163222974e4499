"""Exception types raised by condspec."""


class CondSpecError(Exception):
    """Base class for all condspec errors."""


class AttractiveSingularity(CondSpecError, ValueError):
    """The inverse-square term is too attractive; the reduced operator is undefined."""


class InvalidRange(CondSpecError, ValueError):
    """A frequency range whose endpoints are not positive and ordered."""


class RootCountMismatch(CondSpecError, ArithmeticError):
    """Fewer real truncation roots than expected were found at working precision."""


class NotTruncated(CondSpecError, ValueError):
    """A series that was expected to terminate does not."""


class IllConditionedOverlap(CondSpecError, ArithmeticError):
    """The overlap matrix could not be factorized at the working precision."""


class DomainTooSmall(CondSpecError, ArithmeticError):
    """An eigenfunction has not decayed at the outer edge of the grid."""
