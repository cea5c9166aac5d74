"""Exception hierarchy shared by every glava module."""

from __future__ import annotations


class GLavaError(Exception):
    """Base class for all library errors."""


class ParseError(GLavaError, ValueError):
    """A stream line, pattern line or table file could not be parsed."""

    def __init__(self, message: str, line: str | None = None, lineno: int | None = None):
        self.line = line
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        shown = f" ({line!r})" if line is not None else ""
        super().__init__(f"{where}{message}{shown}")


class InvalidParameterError(GLavaError, ValueError):
    pass


class InvalidShapeError(InvalidParameterError):
    pass


class UnknownLabelError(GLavaError, KeyError):
    """A table hash was asked for a label it does not list."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown label"


class InvalidDeletionError(GLavaError, ValueError):
    pass


class UnsupportedOperationError(GLavaError):
    pass


class DirectionError(GLavaError, ValueError):
    pass


class IncompatibleSummaryError(GLavaError, ValueError):
    pass


class CorruptPayloadError(GLavaError, ValueError):
    pass


class FormatVersionError(GLavaError, ValueError):
    pass


class UnsupportedPatternError(GLavaError, ValueError):
    pass


class ComplexityGuardError(GLavaError, ValueError):
    pass


class MissingCompanionError(GLavaError):
    pass
