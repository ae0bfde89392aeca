"""Tokenizer for Jaqal source text.

Comments are blanked out character by character before scanning, keeping
newlines, so token spans always agree with the original text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .diagnostics import Diagnostic, SourceSpan, error

KEYWORDS = frozenset({"register", "map", "let", "macro", "loop"})

IDENT_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Numbers carry an optional sign, no exponent, and no bare leading dot.
_NUMBER = re.compile(r"-?[0-9]+(\.[0-9]+)?")

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "<": "LANGLE",
    ">": "RANGLE",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ":": "COLON",
    ";": "SEMICOLON",
    "|": "PIPE",
}


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    INT_LITERAL = "integer literal"
    FLOAT_LITERAL = "float literal"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LANGLE = "'<'"
    RANGLE = "'>'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    COLON = "':'"
    SEMICOLON = "';'"
    PIPE = "'|'"
    NEWLINE = "end of line"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan


@dataclass(frozen=True)
class LexResult:
    tokens: list
    diagnostics: list


def is_identifier(text: str) -> bool:
    """True iff text is a legal Jaqal identifier (and not a keyword)."""
    return bool(IDENT_PATTERN.match(text)) and text not in KEYWORDS


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - text.rfind("\n", 0, offset)
    return line, column


def _blank_comments(text: str) -> tuple[str, list]:
    """Replace comment characters with spaces, preserving newlines."""
    out = list(text)
    diagnostics = []
    i, n = 0, len(text)
    while i < n:
        if text[i] == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                out[i] = " "
                i += 1
        elif text[i] == "/" and i + 1 < n and text[i + 1] == "*":
            end = text.find("*/", i + 2)
            if end == -1:
                line, column = _position(text, i)
                diagnostics.append(
                    error(
                        "UNTERMINATED_BLOCK_COMMENT",
                        "block comment is never closed",
                        SourceSpan(line, column, i, 2),
                    )
                )
                end = n
            else:
                end += 2
            while i < end:
                if text[i] != "\n":
                    out[i] = " "
                i += 1
        else:
            i += 1
    return "".join(out), diagnostics


def _is_ident_start(c: str) -> bool:
    return "A" <= c <= "Z" or "a" <= c <= "z" or c == "_"


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or "0" <= c <= "9"


def tokenize(source) -> LexResult:
    """Scan source text into tokens, collecting lexical diagnostics."""
    if isinstance(source, bytes):
        source = source.decode("utf-8", errors="replace")
    text, diagnostics = _blank_comments(source)
    tokens = []
    line = 1
    line_start = 0
    i, n = 0, len(text)

    def span(start: int, length: int) -> SourceSpan:
        return SourceSpan(line, start - line_start + 1, start, length)

    while i < n:
        c = text[i]
        if c == "\r" and i + 1 < n and text[i + 1] == "\n":
            tokens.append(Token(TokenKind.NEWLINE, text[i : i + 2], span(i, 2)))
            i += 2
            line += 1
            line_start = i
            continue
        if c == "\n":
            tokens.append(Token(TokenKind.NEWLINE, c, span(i, 1)))
            i += 1
            line += 1
            line_start = i
            continue
        if c in " \t\f\v\r":
            i += 1
            continue
        if _is_ident_start(c):
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, span(i, j - i)))
            i = j
            continue
        if "0" <= c <= "9" or c == "-" or c == ".":
            match = _NUMBER.match(text, i)
            if match is None:
                # A sign or dot that does not begin a number.
                j = i + 1
                while j < n and (text[j] == "." or _is_ident_char(text[j])):
                    j += 1
                diagnostics.append(
                    error(
                        "MALFORMED_NUMBER",
                        f"'{text[i:j]}' is not a valid numeric literal",
                        span(i, j - i),
                    )
                )
                i = j
                continue
            j = match.end()
            if j < n and (text[j] == "." or _is_ident_start(text[j])):
                # Things like 1., 1.2.3, or 10q are never valid.
                k = j
                while k < n and (text[k] == "." or _is_ident_char(text[k])):
                    k += 1
                diagnostics.append(
                    error(
                        "MALFORMED_NUMBER",
                        f"'{text[i:k]}' is not a valid numeric literal",
                        span(i, k - i),
                    )
                )
                i = k
                continue
            word = match.group()
            kind = (
                TokenKind.FLOAT_LITERAL if "." in word else TokenKind.INT_LITERAL
            )
            tokens.append(Token(kind, word, span(i, j - i)))
            i = j
            continue
        if c in _PUNCT:
            tokens.append(Token(TokenKind[_PUNCT[c]], c, span(i, 1)))
            i += 1
            continue
        diagnostics.append(
            error(
                "ILLEGAL_CHARACTER",
                f"character {c!r} is not allowed here",
                span(i, 1),
            )
        )
        i += 1

    tokens.append(
        Token(TokenKind.EOF, "", SourceSpan(line, n - line_start + 1, n, 0))
    )
    return LexResult(tokens, diagnostics)
