"""Exception hierarchy shared by all workbench modules."""


class LexforgeError(Exception):
    """Base class for every error raised by this package."""


class MarkupError(LexforgeError):
    """Malformed markup input; carries line/column when the parser knows them."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class CorpusValidationError(LexforgeError):
    """A structurally parsed corpus violates an invariant; names the offender."""

    def __init__(self, message, offender=None):
        super().__init__(message)
        self.offender = offender


class StoreError(LexforgeError):
    """Project store failure: lock conflicts, corrupt files, unknown artifacts."""


class PatternSyntaxError(LexforgeError):
    """Pattern text could not be parsed; `position` is a character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class MatchError(LexforgeError):
    """The pattern is well-formed but cannot be evaluated on this corpus."""


class FitError(LexforgeError):
    """Curve fitting got degenerate input."""


class AbstractionError(LexforgeError):
    """A term cannot be abstracted into a paradigm (uncategorized content word)."""
