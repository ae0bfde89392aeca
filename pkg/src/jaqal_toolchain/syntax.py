"""Syntax tree and recursive-descent parser for Jaqal programs.

Structural equality of AST nodes ignores spans, so reparsing formatted
output can be compared against the original tree directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import Diagnostic, SourceSpan, error, has_errors, join_spans
from .lexing import LexResult, Token, TokenKind, tokenize

NumberOrName = Union[int, float, str]


@dataclass(frozen=True)
class SliceExpr:
    start: Optional[NumberOrName]
    stop: Optional[NumberOrName]
    step: Optional[NumberOrName]


@dataclass(frozen=True)
class RegisterDecl:
    name: str
    size: NumberOrName
    span: SourceSpan = field(compare=False)
    size_span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class MapDecl:
    name: str
    target: str
    index: Optional[NumberOrName]
    slice: Optional[SliceExpr]
    span: SourceSpan = field(compare=False)
    target_span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class LetDecl:
    name: str
    value: Union[int, float]
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class NameArg:
    name: str
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class IndexedArg:
    name: str
    index: NumberOrName
    span: SourceSpan = field(compare=False)
    index_span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class IntArg:
    value: int
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class FloatArg:
    value: float
    span: SourceSpan = field(compare=False)


ArgExpr = Union[NameArg, IndexedArg, IntArg, FloatArg]


@dataclass(frozen=True)
class GateCall:
    name: str
    args: tuple
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class SeqBlock:
    statements: tuple
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class ParBlock:
    statements: tuple
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class Loop:
    count: NumberOrName
    body: SeqBlock
    span: SourceSpan = field(compare=False)
    count_span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class MacroDef:
    name: str
    params: tuple
    body: SeqBlock
    span: SourceSpan = field(compare=False)
    param_spans: tuple = field(compare=False, default=())


HeaderStatement = Union[RegisterDecl, MapDecl, LetDecl]


@dataclass(frozen=True)
class AstProgram:
    headers: tuple
    body: tuple


@dataclass(frozen=True)
class ParseResult:
    program: Optional[AstProgram]
    diagnostics: list


_HEADER_KEYWORDS = {"register", "map", "let"}

_STATEMENT_END = {
    TokenKind.NEWLINE,
    TokenKind.SEMICOLON,
    TokenKind.PIPE,
    TokenKind.RBRACE,
    TokenKind.RANGLE,
    TokenKind.EOF,
}

_VALUE_KINDS = {
    TokenKind.IDENT,
    TokenKind.INT_LITERAL,
    TokenKind.FLOAT_LITERAL,
}


def _literal_value(token: Token) -> Union[int, float]:
    if token.kind is TokenKind.INT_LITERAL:
        return int(token.text)
    return float(token.text)


def _value_of(token: Token) -> NumberOrName:
    if token.kind is TokenKind.IDENT:
        return token.text
    return _literal_value(token)


class _Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = []

    # Token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        index = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def check(self, kind: TokenKind) -> bool:
        return self.peek().kind is kind

    def error_at(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(error(code, message, span))

    def unexpected(self, expected: str) -> None:
        token = self.peek()
        found = token.kind.value if token.text == "" else f"'{token.text}'"
        self.error_at(
            "UNEXPECTED_TOKEN", f"expected {expected}, found {found}", token.span
        )

    def expect(self, kind: TokenKind, expected: str) -> Optional[Token]:
        if self.check(kind):
            return self.advance()
        self.unexpected(expected)
        return None

    def resync(self) -> None:
        """Skip to the next statement boundary without eating closers."""
        while self.peek().kind not in _STATEMENT_END:
            self.advance()

    # Program structure -------------------------------------------------

    def parse_program(self) -> AstProgram:
        headers = []
        body = []
        body_seen = False
        while True:
            self.skip_separators(parallel=False)
            token = self.peek()
            if token.kind is TokenKind.EOF:
                break
            if token.kind is TokenKind.KEYWORD and token.text in _HEADER_KEYWORDS:
                if body_seen:
                    self.error_at(
                        "HEADER_AFTER_BODY",
                        f"'{token.text}' must appear before all body statements",
                        token.span,
                    )
                stmt = self.parse_header()
                if stmt is not None:
                    headers.append(stmt)
            elif token.kind is TokenKind.KEYWORD and token.text == "macro":
                stmt = self.parse_macro()
                if stmt is not None:
                    body.append(stmt)
            else:
                stmt = self.parse_sequential_statement(top_level=True)
                if stmt is not None:
                    body.append(stmt)
                    body_seen = True
            self.expect_statement_end()
        return AstProgram(tuple(headers), tuple(body))

    def skip_separators(self, parallel: bool) -> None:
        while True:
            token = self.peek()
            if token.kind is TokenKind.NEWLINE:
                self.advance()
            elif token.kind is TokenKind.SEMICOLON:
                if parallel:
                    self.error_at(
                        "SEMICOLON_IN_PARALLEL",
                        "';' cannot separate statements in a parallel block; use '|'",
                        token.span,
                    )
                self.advance()
            elif token.kind is TokenKind.PIPE:
                if not parallel:
                    self.error_at(
                        "PIPE_IN_SEQUENTIAL",
                        "'|' may only separate statements in a parallel block",
                        token.span,
                    )
                self.advance()
            else:
                return

    def expect_statement_end(self) -> None:
        if self.peek().kind in _STATEMENT_END:
            return
        self.unexpected("end of statement")
        self.resync()

    # Header statements --------------------------------------------------

    def parse_header(self):
        keyword = self.advance()
        if keyword.text == "register":
            return self.parse_register(keyword)
        if keyword.text == "map":
            return self.parse_map(keyword)
        return self.parse_let(keyword)

    def parse_register(self, keyword: Token) -> Optional[RegisterDecl]:
        name = self.expect(TokenKind.IDENT, "a register name")
        if name is None:
            self.resync()
            return None
        if self.expect(TokenKind.LBRACKET, "'[' after the register name") is None:
            self.resync()
            return None
        size = self.parse_value("the register size")
        if size is None:
            self.resync()
            return None
        closer = self.expect(TokenKind.RBRACKET, "']'")
        if closer is None:
            self.resync()
            return None
        return RegisterDecl(
            name.text,
            _value_of(size),
            join_spans(keyword.span, closer.span),
            size.span,
        )

    def parse_map(self, keyword: Token) -> Optional[MapDecl]:
        name = self.expect(TokenKind.IDENT, "an alias name")
        if name is None:
            self.resync()
            return None
        target = self.expect(TokenKind.IDENT, "the name being aliased")
        if target is None:
            self.resync()
            return None
        index = None
        slice_expr = None
        last = target
        if self.check(TokenKind.LBRACKET):
            self.advance()
            fields = [self.parse_optional_value()]
            colons = 0
            while self.check(TokenKind.COLON):
                self.advance()
                colons += 1
                if colons > 2:
                    self.unexpected("']' (a slice has at most three fields)")
                    self.resync()
                    return None
                fields.append(self.parse_optional_value())
            closer = self.expect(TokenKind.RBRACKET, "']'")
            if closer is None:
                self.resync()
                return None
            last = closer
            values = [None if f is None else _value_of(f) for f in fields]
            if colons == 0:
                if values[0] is None:
                    self.error_at(
                        "UNEXPECTED_TOKEN",
                        "an index or slice is required between '[' and ']'",
                        closer.span,
                    )
                    return None
                index = values[0]
            else:
                values += [None] * (3 - len(values))
                slice_expr = SliceExpr(values[0], values[1], values[2])
        return MapDecl(
            name.text,
            target.text,
            index,
            slice_expr,
            join_spans(keyword.span, last.span),
            target.span,
        )

    def parse_let(self, keyword: Token) -> Optional[LetDecl]:
        name = self.expect(TokenKind.IDENT, "a constant name")
        if name is None:
            self.resync()
            return None
        token = self.peek()
        if token.kind not in (TokenKind.INT_LITERAL, TokenKind.FLOAT_LITERAL):
            self.unexpected("a numeric literal")
            self.resync()
            return None
        self.advance()
        return LetDecl(
            name.text, _literal_value(token), join_spans(keyword.span, token.span)
        )

    def parse_value(self, expected: str) -> Optional[Token]:
        if self.peek().kind in _VALUE_KINDS:
            return self.advance()
        self.unexpected(expected)
        return None

    def parse_optional_value(self) -> Optional[Token]:
        if self.peek().kind in _VALUE_KINDS:
            return self.advance()
        return None

    # Body statements ----------------------------------------------------

    def parse_sequential_statement(self, top_level: bool):
        """One statement in sequential context (top level or inside {})."""
        token = self.peek()
        if token.kind is TokenKind.IDENT:
            return self.parse_gate_call()
        if token.kind is TokenKind.KEYWORD and token.text == "loop":
            return self.parse_loop()
        if token.kind is TokenKind.LANGLE:
            return self.parse_par_block()
        if token.kind is TokenKind.LBRACE:
            return self.parse_seq_block()
        if token.kind is TokenKind.KEYWORD:
            where = "at the top level" if top_level else "inside a gate block"
            self.error_at(
                "UNEXPECTED_TOKEN",
                f"'{token.text}' is not allowed {where}",
                token.span,
            )
            self.advance()
            self.resync()
            return None
        self.unexpected("a statement")
        self.advance()
        self.resync()
        return None

    def parse_gate_call(self) -> GateCall:
        name = self.advance()
        args = []
        last = name
        while self.peek().kind in _VALUE_KINDS:
            token = self.advance()
            last = token
            if token.kind is TokenKind.IDENT and self.check(TokenKind.LBRACKET):
                self.advance()
                index = self.parse_value("an index")
                if index is None:
                    self.resync()
                    break
                closer = self.expect(TokenKind.RBRACKET, "']'")
                if closer is None:
                    self.resync()
                    break
                last = closer
                args.append(
                    IndexedArg(
                        token.text,
                        _value_of(index),
                        join_spans(token.span, closer.span),
                        index.span,
                    )
                )
            elif token.kind is TokenKind.IDENT:
                args.append(NameArg(token.text, token.span))
            elif token.kind is TokenKind.INT_LITERAL:
                args.append(IntArg(int(token.text), token.span))
            else:
                args.append(FloatArg(float(token.text), token.span))
        return GateCall(name.text, tuple(args), join_spans(name.span, last.span))

    def parse_loop(self) -> Optional[Loop]:
        keyword = self.advance()
        count = self.parse_value("a repetition count")
        if count is None:
            self.resync()
            return None
        body = self.parse_required_block(keyword, "loop")
        if body is None:
            return None
        return Loop(
            _value_of(count),
            body,
            join_spans(keyword.span, body.span),
            count.span,
        )

    def parse_macro(self) -> Optional[MacroDef]:
        keyword = self.advance()
        name = self.expect(TokenKind.IDENT, "a macro name")
        if name is None:
            self.resync()
            return None
        params = []
        param_spans = []
        while self.check(TokenKind.IDENT):
            token = self.advance()
            params.append(token.text)
            param_spans.append(token.span)
        body = self.parse_required_block(keyword, "macro")
        if body is None:
            return None
        return MacroDef(
            name.text,
            tuple(params),
            body,
            join_spans(keyword.span, body.span),
            tuple(param_spans),
        )

    def parse_required_block(self, keyword: Token, construct: str):
        """A '{' block that must open on the same line as its construct."""
        if self.check(TokenKind.LBRACE):
            return self.parse_seq_block()
        if self.check(TokenKind.NEWLINE):
            ahead = 0
            while self.peek(ahead).kind is TokenKind.NEWLINE:
                ahead += 1
            if self.peek(ahead).kind is TokenKind.LBRACE:
                self.error_at(
                    "BRACE_ON_NEXT_LINE",
                    f"'{{' must open on the same line as '{construct}'",
                    self.peek(ahead).span,
                )
                while not self.check(TokenKind.LBRACE):
                    self.advance()
                return self.parse_seq_block()
        self.error_at(
            "BARE_STATEMENT_AFTER_LOOP_OR_MACRO",
            f"'{construct}' requires a '{{' gate block, not a bare statement",
            self.peek().span if self.peek().kind is not TokenKind.EOF else keyword.span,
        )
        self.resync()
        return None

    def parse_seq_block(self) -> SeqBlock:
        opener = self.advance()
        statements = []
        closer = opener
        while True:
            self.skip_separators(parallel=False)
            token = self.peek()
            if token.kind is TokenKind.RBRACE:
                closer = self.advance()
                break
            if token.kind in (TokenKind.EOF, TokenKind.RANGLE):
                self.unexpected("'}'")
                if token.kind is TokenKind.RANGLE:
                    self.advance()
                break
            if token.kind is TokenKind.LBRACE:
                self.error_at(
                    "SAME_TYPE_NESTING",
                    "a sequential block cannot directly contain another '{' block",
                    token.span,
                )
                statements.append(self.parse_seq_block())
            else:
                stmt = self.parse_sequential_statement(top_level=False)
                if stmt is not None:
                    statements.append(stmt)
            self.expect_block_statement_end("'}'")
        span = join_spans(opener.span, closer.span)
        if not statements:
            self.error_at("EMPTY_BLOCK", "gate blocks cannot be empty", span)
        return SeqBlock(tuple(statements), span)

    def parse_par_block(self) -> ParBlock:
        opener = self.advance()
        statements = []
        closer = opener
        while True:
            self.skip_separators(parallel=True)
            token = self.peek()
            if token.kind is TokenKind.RANGLE:
                closer = self.advance()
                break
            if token.kind in (TokenKind.EOF, TokenKind.RBRACE):
                self.unexpected("'>'")
                if token.kind is TokenKind.RBRACE:
                    self.advance()
                break
            if token.kind is TokenKind.LANGLE:
                self.error_at(
                    "SAME_TYPE_NESTING",
                    "a parallel block cannot directly contain another '<' block",
                    token.span,
                )
                statements.append(self.parse_par_block())
            elif token.kind is TokenKind.KEYWORD and token.text == "loop":
                self.error_at(
                    "LOOP_IN_PARALLEL",
                    "loops are not allowed inside parallel blocks",
                    token.span,
                )
                loop = self.parse_loop()
                if loop is not None:
                    statements.append(loop)
            elif token.kind is TokenKind.LBRACE:
                statements.append(self.parse_seq_block())
            elif token.kind is TokenKind.IDENT:
                statements.append(self.parse_gate_call())
            else:
                self.unexpected("a gate or a '{' block")
                self.advance()
                self.resync()
            self.expect_block_statement_end("'>'")
        span = join_spans(opener.span, closer.span)
        if not statements:
            self.error_at("EMPTY_BLOCK", "gate blocks cannot be empty", span)
        return ParBlock(tuple(statements), span)

    def expect_block_statement_end(self, closer: str) -> None:
        if self.peek().kind in _STATEMENT_END:
            return
        self.unexpected(f"end of statement or {closer}")
        self.resync()


def parse_tokens(tokens: list) -> ParseResult:
    parser = _Parser(tokens)
    program = parser.parse_program()
    return ParseResult(program, parser.diagnostics)


def parse(source) -> ParseResult:
    """Tokenize and parse; on lexical errors, parsing is not attempted."""
    lexed = tokenize(source)
    if has_errors(lexed.diagnostics):
        return ParseResult(None, lexed.diagnostics)
    result = parse_tokens(lexed.tokens)
    return ParseResult(result.program, lexed.diagnostics + result.diagnostics)
