"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); numerical
breakdowns derive from :class:`NumericalError`. The CLI maps the two
families to distinct exit codes.
"""


class ThetaNullError(Exception):
    """Base class for all package errors."""


class InputError(ThetaNullError, ValueError):
    pass


class NumericalError(ThetaNullError, ArithmeticError):
    pass


class NotSymmetric(InputError):
    pass


class NotPositiveDefinite(InputError):
    pass


class NotSymplectic(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class GenusTooLarge(InputError):
    pass


class WrongGenus(InputError):
    pass


class ParseError(InputError):
    pass


class SingularDenominator(NumericalError):
    pass


class NonConvergent(NumericalError):
    def __init__(self, message, characteristic=None):
        super().__init__(message)
        self.characteristic = characteristic


class AllConstantsTiny(NumericalError):
    pass


class NotOnDivisor(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BasePoint(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass
