"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class NilzetaError(Exception):
    exit_code = 1


class InputError(NilzetaError, ValueError):
    exit_code = 2


class InsufficientPrecision(InputError):
    pass


class SingularInput(InputError):
    pass


class NotSublattice(InputError):
    pass


class InvalidPresentation(InputError):
    pass


class ContextMismatch(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class UnsupportedVariant(InputError):
    pass


class BudgetExceeded(NilzetaError):
    exit_code = 3


# the residue oracle calls its budget failure TooLarge
TooLarge = BudgetExceeded


class NoStabilization(NilzetaError):
    exit_code = 4


class InvariantViolation(NilzetaError):
    """Two independent computations disagree. Always a bug."""

    exit_code = 5
