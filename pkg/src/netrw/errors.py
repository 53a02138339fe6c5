"""Exception hierarchy for the net rewriting engine."""


class NetError(Exception):
    """Base class for every error raised by netrw."""


class ValidationError(NetError):
    pass


class DuplicatePortOccupancy(ValidationError):
    pass


class UnknownPort(ValidationError):
    pass


class FrontierArityViolation(ValidationError):
    pass


class GluingConflict(NetError):
    pass


class InvalidPosition(NetError):
    pass


class BudgetExceeded(NetError):
    pass


class SizeBudgetExceeded(BudgetExceeded):
    pass


class DomainGap(NetError):
    """A symbol or frontier letter has no image under a morphism."""


class DanglingEnvironment(NetError):
    """A rewrite would cut a live environment link without permission."""


class BlockMismatch(NetError):
    pass


class NotANBH(NetError):
    pass


class NotReversible(NetError):
    pass


class NotCompilable(NetError):
    pass


class EmptyIntersection(NetError):
    pass


class InconsistentOccupancy(NetError):
    pass


class NoInducedPreimage(NetError):
    pass


class UnattachedVertex(NetError):
    pass


class InterfaceMismatch(NetError):
    pass


class MissingMacro(NetError):
    pass


class NotDistinctive(NetError):
    pass


class ParseError(NetError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
