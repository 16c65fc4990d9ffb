"""Exception hierarchy shared by all posop modules."""


class PosopError(Exception):
    """Base class for every error raised by posop."""


class DomainError(PosopError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ModeError(DomainError):
    """A probe kind is not supported by the requested experiment."""


class UnsupportedFamilyError(DomainError):
    """The requested family has no representation in the chosen route."""


class NumericFailure(PosopError, ArithmeticError):
    """A numerical procedure could not deliver its contract."""


class NonConvergenceError(NumericFailure):
    """A series did not satisfy its stopping rule within ``max_terms``."""


class QuadratureError(NumericFailure):
    """An integral did not reach its tolerance within the subdivision budget."""


class GuardError(NumericFailure):
    """A user function returned a non-finite or out-of-range value."""


class FitError(NumericFailure):
    """Too few usable points for a least-squares order fit."""


class ParseError(PosopError, ValueError):
    """Syntax or identifier error in a probe expression."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
