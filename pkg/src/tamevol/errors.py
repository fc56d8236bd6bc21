"""Exception hierarchy shared by every module in the package."""


class TamevolError(Exception):
    """Base class for all package errors."""


class InputError(TamevolError):
    """Malformed user input (CLI exit code 2)."""


class NumericalError(TamevolError):
    """A computation could not be completed (CLI exit code 3)."""


class ExprSyntaxError(InputError):
    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnknownVariable(InputError):
    pass


class InvalidCell(InputError):
    """Inconsistent cell construction (ambient mismatch, lower >= upper, ...)."""


class EmptySet(InputError):
    pass


class OverlapError(InputError):
    """Two cells of a set share a point."""


class DimensionMismatch(InputError):
    pass


class TangentEscapesNeighborhood(InputError):
    pass


class DomainError(NumericalError, ArithmeticError):
    """log of a nonpositive number, division by zero, sqrt of a negative number."""


class DegenerateCell(NumericalError):
    pass


class NonFiniteIntegrand(NumericalError):
    pass


class BudgetExceeded(NumericalError):
    pass


class CoverBudgetExceeded(BudgetExceeded):
    pass


class NotAGraph(NumericalError):
    pass


class InsufficientData(NumericalError):
    pass


class ZeroVolume(NumericalError):
    pass
