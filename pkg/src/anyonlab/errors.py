"""Exception hierarchy shared by all modules.

Validation problems (bad user input) derive from :class:`ValidationError`,
numerical breakdowns derive from :class:`NumericalError`; the command line
maps them to exit codes 2 and 3 respectively.
"""


class AnyonLabError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(AnyonLabError, ValueError):
    pass


class NumericalError(AnyonLabError, ArithmeticError):
    pass


class InvalidParam(ValidationError):
    """A model parameter violates one of its invariants."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"invalid parameter {field!r}: {reason}")


class NotNormalized(ValidationError):
    pass


class UnsupportedSign(ValidationError):
    pass


class OddSize(ValidationError):
    pass


class ModeMismatch(ValidationError):
    pass


class ZeroFrequency(ValidationError):
    pass


class SingularSynthesis(ValidationError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class NoDoublonBand(NumericalError):
    pass


class NoMinimum(NumericalError):
    pass


class AmbiguousParity(NumericalError):
    pass


class GapClosed(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass
