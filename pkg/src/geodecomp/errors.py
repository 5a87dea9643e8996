"""Exception hierarchy shared by every module of the package."""


class GeodecompError(Exception):
    """Base class for all errors raised by geodecomp."""


class UnknownIdentifier(GeodecompError, KeyError):
    pass


class CycleDetected(GeodecompError):
    pass


class DimensionMismatch(GeodecompError, ValueError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class SingularMatrix(GeodecompError, ArithmeticError):
    pass


class NotLowerSet(GeodecompError, ValueError):
    pass


class NotMaximal(GeodecompError, ValueError):
    pass


class NotLocalOperator(GeodecompError, ValueError):
    pass


class NotCompatible(GeodecompError):
    pass


class InvalidFamily(GeodecompError):
    """Raised when an extension family fails verification where validity is required."""

    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:3])
        more = "" if len(self.violations) <= 3 else f" (+{len(self.violations) - 3} more)"
        super().__init__(f"invalid extension family: {head}{more}")


class MissingDecomposition(GeodecompError, KeyError):
    pass


class InvalidDagger(GeodecompError, ValueError):
    pass


class NotInSpace(GeodecompError, ValueError):
    pass


class UnknownFace(GeodecompError, KeyError):
    pass


class DuplicateVertexInCell(GeodecompError, ValueError):
    pass


class IndexOutOfRange(GeodecompError, IndexError):
    pass


class MissingEm(GeodecompError, KeyError):
    pass


class NoSuitableFacePair(GeodecompError):
    pass


class ParseError(GeodecompError, ValueError):
    pass


class ValidationError(GeodecompError, ValueError):
    pass
