"""Source spans, diagnostics, and the error type shared by every stage."""

from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    """A contiguous region of source text.

    Lines and columns are 1-based. The offset counts characters from the
    start of the input; length is the number of characters covered.
    """

    line: int
    column: int
    offset: int
    length: int

    @staticmethod
    def point(line: int, column: int, offset: int) -> "SourceSpan":
        return SourceSpan(line, column, offset, 1)

    def end_offset(self) -> int:
        return self.offset + self.length


def join_spans(first: SourceSpan, last: SourceSpan) -> SourceSpan:
    """Span covering everything from the start of first to the end of last."""
    length = max(last.end_offset() - first.offset, 1)
    return SourceSpan(first.line, first.column, first.offset, length)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: SourceSpan

    def render(self, filename: str = "<input>") -> str:
        return (
            f"{filename}:{self.span.line}:{self.span.column}: "
            f"{self.severity}[{self.code}]: {self.message}"
        )


def error(code: str, message: str, span: SourceSpan) -> Diagnostic:
    return Diagnostic(ERROR, code, message, span)


def warning(code: str, message: str, span: SourceSpan) -> Diagnostic:
    return Diagnostic(WARNING, code, message, span)


def has_errors(diagnostics) -> bool:
    return any(d.severity == ERROR for d in diagnostics)


class JaqalError(Exception):
    """Raised by library entry points that cannot collect diagnostics."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic

    @staticmethod
    def at(code: str, message: str, span: SourceSpan | None = None) -> "JaqalError":
        return JaqalError(error(code, message, span or SourceSpan.point(1, 1, 0)))
