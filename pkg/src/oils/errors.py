"""Exception hierarchy shared by the solver modules."""


class OilsError(Exception):
    """Base class for all errors raised by this package."""


class EmptyOperand(OilsError):
    pass


class DivisionByZeroInterval(OilsError):
    pass


class InfiniteBound(OilsError):
    pass


class ShapeMismatch(OilsError, ValueError):
    pass


class SingularMatrix(OilsError):
    pass


class SingularMidpoint(SingularMatrix):
    """The midpoint of a square subsystem cannot be inverted."""


class NotContracting(OilsError):
    """The preconditioned system admits no a-priori bound."""


class DiagonalContainsZero(OilsError):
    pass


class InvalidOverlap(OilsError, ValueError):
    pass


class BudgetExceeded(OilsError):
    pass


class AllSubsquaresInconclusive(OilsError):
    pass


class DimensionCap(OilsError):
    pass


class SystemFileError(OilsError, ValueError):
    """Malformed system file; carries the offending line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
