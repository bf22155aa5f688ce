"""Exception hierarchy shared by all modules."""


class FSimpleError(Exception):
    """Base class for every error raised by the engine."""


class ContextMismatchError(FSimpleError, ValueError):
    """Raised when objects from different ring contexts are combined."""


class UnitIdealError(FSimpleError, ValueError):
    """Raised when an operation requires a proper ideal but got (1)."""


class NotGradedError(FSimpleError, ValueError):
    """Raised when an operation needs graded input (under some positive weights)."""


class ExponentOverflowError(FSimpleError, OverflowError):
    """Raised when q = p^e (or q times a degree) exceeds the exponent cap."""


class ZeroDivisorError(FSimpleError, ZeroDivisionError):
    """Raised for colon by the zero ideal or division by zero."""


class RankMismatchError(FSimpleError, ValueError):
    """Raised when free-module elements or matrices have incompatible shapes."""


class TruncatedResolutionError(FSimpleError):
    """A free resolution did not terminate within the requested length."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or []


class NoTestElementFound(FSimpleError):
    """Every Jacobian minor lies in the defining ideal."""


class HypothesisError(FSimpleError, ValueError):
    """A required hypothesis on the ring (such as being a domain) is not met."""


class UnsupportedError(FSimpleError):
    """The requested construction is outside what the engine handles."""


class InternalError(FSimpleError, RuntimeError):
    """A step that cannot fail for correct input failed anyway."""


class ScriptError(FSimpleError):
    """Parse error in a session script, carrying a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
