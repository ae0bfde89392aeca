"""Symbol table construction and static checking of parsed programs.

Names live in one global namespace: the register, aliases, constants,
macros, and built-in gates may not collide. Macro bodies may reference
any global name; macro calls may only reference macros defined earlier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import syntax
from .diagnostics import Diagnostic, JaqalError, SourceSpan, error, warning

# Resolved argument kinds.
QUBIT = "qubit"
NUMBER = "number"
ARRAY = "array"
UNKNOWN = "unknown"  # macro parameter, bound only at expansion


@dataclass(frozen=True)
class AliasEntry:
    indices: tuple
    is_single: bool


@dataclass(frozen=True)
class MacroInfo:
    name: str
    params: tuple
    body: syntax.SeqBlock
    index: int
    span: SourceSpan


@dataclass
class SymbolTable:
    register_name: Optional[str] = None
    register_size: Optional[int] = None
    register_span: Optional[SourceSpan] = None
    aliases: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    macros: dict = field(default_factory=dict)

    def category_of(self, name: str) -> Optional[str]:
        if name == self.register_name:
            return "register"
        if name in self.aliases:
            return "alias"
        if name in self.constants:
            return "constant"
        if name in self.macros:
            return "macro"
        return None

    def register_indices(self) -> tuple:
        size = self.register_size or 0
        return tuple(range(size))


@dataclass(frozen=True)
class AnalysisResult:
    table: SymbolTable
    diagnostics: list

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


def resolve_argument(table: SymbolTable, arg, env=None, diagnostics=None):
    """Resolve a gate argument to (kind, value).

    env maps macro parameter names to (kind, value) pairs; during static
    analysis parameters map to (UNKNOWN, None). Returns None after
    appending a diagnostic when the argument cannot be resolved.
    """
    diags = diagnostics if diagnostics is not None else []
    if isinstance(arg, (syntax.IntArg, syntax.FloatArg)):
        return (NUMBER, arg.value)
    if isinstance(arg, syntax.NameArg):
        if env is not None and arg.name in env:
            return env[arg.name]
        category = table.category_of(arg.name)
        if category == "register":
            return (ARRAY, table.register_indices())
        if category == "alias":
            entry = table.aliases[arg.name]
            if entry.is_single:
                return (QUBIT, entry.indices[0])
            return (ARRAY, entry.indices)
        if category == "constant":
            return (NUMBER, table.constants[arg.name])
        if category == "macro":
            diags.append(
                error(
                    "KIND_MISMATCH",
                    f"macro '{arg.name}' cannot be used as a gate argument",
                    arg.span,
                )
            )
            return None
        diags.append(
            error("UNDEFINED_NAME", f"'{arg.name}' is not defined", arg.span)
        )
        return None
    # IndexedArg
    index = _resolve_index(table, arg, env, diags)
    if index is _BAD:
        return None
    if env is not None and arg.name in env:
        diags.append(
            error(
                "NOT_AN_ARRAY",
                f"macro parameter '{arg.name}' binds a single value and "
                "cannot be indexed",
                arg.span,
            )
        )
        return None
    category = table.category_of(arg.name)
    if category == "register":
        if index is None or table.register_size is None:
            return (QUBIT, None)
        if not 0 <= index < table.register_size:
            diags.append(
                error(
                    "INDEX_OUT_OF_RANGE",
                    f"index {index} is outside '{arg.name}' of size "
                    f"{table.register_size}",
                    arg.index_span,
                )
            )
            return None
        return (QUBIT, index)
    if category == "alias":
        entry = table.aliases[arg.name]
        if entry.is_single:
            diags.append(
                error(
                    "NOT_AN_ARRAY",
                    f"'{arg.name}' names a single qubit and cannot be indexed",
                    arg.span,
                )
            )
            return None
        if index is None:
            return (QUBIT, None)
        if not 0 <= index < len(entry.indices):
            diags.append(
                error(
                    "INDEX_OUT_OF_RANGE",
                    f"index {index} is outside '{arg.name}' of size "
                    f"{len(entry.indices)}",
                    arg.index_span,
                )
            )
            return None
        return (QUBIT, entry.indices[index])
    if category in ("constant", "macro"):
        diags.append(
            error(
                "NOT_AN_ARRAY",
                f"'{arg.name}' is a {category} and cannot be indexed",
                arg.span,
            )
        )
        return None
    diags.append(error("UNDEFINED_NAME", f"'{arg.name}' is not defined", arg.span))
    return None


_BAD = object()


def _resolve_index(table, arg, env, diags):
    """Index of an IndexedArg as an int, None if deferred, _BAD on error."""
    index = arg.index
    if isinstance(index, int):
        return index
    if isinstance(index, float):
        diags.append(
            error(
                "NON_INTEGER_COUNT",
                f"index {index} must be an integer",
                arg.index_span,
            )
        )
        return _BAD
    if env is not None and index in env:
        kind, value = env[index]
        if kind == UNKNOWN:
            return None
        if kind == NUMBER:
            if isinstance(value, int):
                return value
            diags.append(
                error(
                    "NON_INTEGER_COUNT",
                    f"index '{index}' must be an integer, not {value}",
                    arg.index_span,
                )
            )
            return _BAD
        diags.append(
            error(
                "KIND_MISMATCH",
                f"'{index}' is a qubit and cannot be used as an index",
                arg.index_span,
            )
        )
        return _BAD
    if index in table.constants:
        value = table.constants[index]
        if isinstance(value, int):
            return value
        diags.append(
            error(
                "NON_INTEGER_COUNT",
                f"index '{index}' must be an integer, not {value}",
                arg.index_span,
            )
        )
        return _BAD
    category = table.category_of(index)
    if category is not None:
        diags.append(
            error(
                "KIND_MISMATCH",
                f"'{index}' is a {category} and cannot be used as an index",
                arg.index_span,
            )
        )
        return _BAD
    diags.append(
        error("UNDEFINED_NAME", f"'{index}' is not defined", arg.index_span)
    )
    return _BAD


def resolve_qubit(table: SymbolTable, expr, macro_env=None) -> int:
    """Resolve an argument expression to one physical qubit index."""
    diags = []
    resolved = resolve_argument(table, expr, macro_env, diags)
    if resolved is None:
        raise JaqalError(diags[0])
    kind, value = resolved
    if kind == QUBIT and value is not None:
        return value
    if kind == ARRAY:
        raise JaqalError(
            error(
                "UNINDEXED_ARRAY",
                "an array alias cannot be used where a single qubit is required",
                expr.span,
            )
        )
    raise JaqalError(
        error("KIND_MISMATCH", "a single qubit is required here", expr.span)
    )


class _Analyzer:
    def __init__(self, program: syntax.AstProgram, library):
        self.program = program
        self.library = library
        self.table = SymbolTable()
        self.diagnostics = []
        # Every name declared anywhere, to tell use-before-definition
        # apart from plain undefined names.
        self.declared_names = set()
        for header in program.headers:
            self.declared_names.add(header.name)
        self.macro_order = {}
        for position, stmt in enumerate(program.body):
            if isinstance(stmt, syntax.MacroDef):
                self.declared_names.add(stmt.name)
                self.macro_order.setdefault(stmt.name, position)

    def fail(self, code, message, span):
        self.diagnostics.append(error(code, message, span))

    def warn(self, code, message, span):
        self.diagnostics.append(warning(code, message, span))

    # Declarations -------------------------------------------------------

    def run(self) -> AnalysisResult:
        for header in self.program.headers:
            if isinstance(header, syntax.RegisterDecl):
                self.declare_register(header)
            elif isinstance(header, syntax.MapDecl):
                self.declare_alias(header)
            else:
                self.declare_constant(header)
        for position, stmt in enumerate(self.program.body):
            if isinstance(stmt, syntax.MacroDef):
                self.declare_macro(stmt, position)
            else:
                self.check_statement(stmt, macro=None)
        return AnalysisResult(self.table, self.diagnostics)

    def name_is_free(self, name: str, span: SourceSpan) -> bool:
        if self.library.has(name):
            self.fail(
                "DUPLICATE_NAME",
                f"'{name}' is already the name of a built-in gate",
                span,
            )
            return False
        category = self.table.category_of(name)
        if category is not None:
            self.fail(
                "DUPLICATE_NAME",
                f"'{name}' is already defined as a {category}",
                span,
            )
            return False
        return True

    def missing_name(self, name: str, span: SourceSpan, what: str) -> None:
        if name in self.declared_names:
            self.fail(
                "USE_BEFORE_DEFINITION",
                f"'{name}' is used before its definition",
                span,
            )
        else:
            self.fail("UNDEFINED_NAME", f"{what} '{name}' is not defined", span)

    def static_int(self, value, span: SourceSpan, what: str) -> Optional[int]:
        """An integer from a literal or an integer-valued constant."""
        if isinstance(value, int):
            return value
        if isinstance(value, float):
            self.fail(
                "NON_INTEGER_COUNT", f"{what} must be an integer, not {value}", span
            )
            return None
        if value in self.table.constants:
            constant = self.table.constants[value]
            if isinstance(constant, int):
                return constant
            self.fail(
                "NON_INTEGER_COUNT",
                f"{what} must be an integer; '{value}' is {constant}",
                span,
            )
            return None
        category = self.table.category_of(value)
        if category is not None or self.library.has(value):
            self.fail(
                "KIND_MISMATCH",
                f"{what} must be an integer constant, not the "
                f"{category or 'gate'} '{value}'",
                span,
            )
            return None
        self.missing_name(value, span, what)
        return None

    def declare_register(self, decl: syntax.RegisterDecl) -> None:
        if self.table.register_name is not None:
            self.fail(
                "MULTIPLE_REGISTERS",
                "only one register may be declared",
                decl.span,
            )
            return
        if not self.name_is_free(decl.name, decl.span):
            return
        size = self.static_int(decl.size, decl.size_span, "the register size")
        if size is not None and size < 1:
            self.fail(
                "NONPOSITIVE_REGISTER_SIZE",
                f"a register must hold at least one qubit, not {size}",
                decl.size_span,
            )
            size = None
        self.table.register_name = decl.name
        self.table.register_size = size
        self.table.register_span = decl.span

    def declare_alias(self, decl: syntax.MapDecl) -> None:
        if not self.name_is_free(decl.name, decl.span):
            return
        target = decl.target
        if target == self.table.register_name:
            base = self.table.register_indices()
            base_single = False
            if self.table.register_size is None:
                return
        elif target in self.table.aliases:
            entry = self.table.aliases[target]
            base = entry.indices
            base_single = entry.is_single
        elif target in self.table.constants or target in self.macro_order:
            what = "constant" if target in self.table.constants else "macro"
            self.fail(
                "KIND_MISMATCH",
                f"'{target}' is a {what} and cannot be aliased",
                decl.target_span,
            )
            return
        else:
            self.missing_name(target, decl.target_span, "map target")
            return
        if decl.index is None and decl.slice is None:
            self.table.aliases[decl.name] = AliasEntry(base, base_single)
            return
        if base_single:
            self.fail(
                "NOT_AN_ARRAY",
                f"'{target}' names a single qubit and cannot be indexed",
                decl.target_span,
            )
            return
        if decl.index is not None:
            index = self.static_int(decl.index, decl.span, "the alias index")
            if index is None:
                return
            if not 0 <= index < len(base):
                self.fail(
                    "INDEX_OUT_OF_RANGE",
                    f"index {index} is outside '{target}' of size {len(base)}",
                    decl.span,
                )
                return
            self.table.aliases[decl.name] = AliasEntry((base[index],), True)
            return
        indices = self.resolve_slice(decl.slice, len(base), decl.span)
        if indices is None:
            return
        self.table.aliases[decl.name] = AliasEntry(
            tuple(base[k] for k in indices), False
        )

    def resolve_slice(self, spec: syntax.SliceExpr, length: int, span: SourceSpan):
        fields = []
        for value, fallback, what in (
            (spec.start, 0, "slice start"),
            (spec.stop, length, "slice stop"),
            (spec.step, 1, "slice step"),
        ):
            if value is None:
                fields.append(fallback)
                continue
            resolved = self.static_int(value, span, f"the {what}")
            if resolved is None:
                return None
            fields.append(resolved)
        start, stop, step = fields
        if start < 0 or stop < 0:
            self.fail(
                "NEGATIVE_SLICE_FIELD",
                "slice bounds cannot be negative",
                span,
            )
            return None
        if step < 1:
            self.fail(
                "NEGATIVE_SLICE_FIELD",
                f"the slice step must be at least 1, not {step}",
                span,
            )
            return None
        return range(start, min(stop, length), step)

    def declare_constant(self, decl: syntax.LetDecl) -> None:
        if not self.name_is_free(decl.name, decl.span):
            return
        self.table.constants[decl.name] = decl.value

    def declare_macro(self, decl: syntax.MacroDef, position: int) -> None:
        named = self.name_is_free(decl.name, decl.span)
        env = {}
        for param, span in zip(decl.params, decl.param_spans):
            if param in env:
                self.fail(
                    "DUPLICATE_NAME",
                    f"parameter '{param}' is declared twice",
                    span,
                )
                continue
            if self.table.category_of(param) is not None or self.library.has(param):
                self.warn(
                    "SHADOWED_NAME",
                    f"parameter '{param}' shadows a global name",
                    span,
                )
            env[param] = (UNKNOWN, None)
        for stmt in decl.body.statements:
            self.check_statement(stmt, macro=decl, env=env, position=position)
        if named:
            self.table.macros[decl.name] = MacroInfo(
                decl.name, decl.params, decl.body, position, decl.span
            )

    # Body checking --------------------------------------------------------

    def check_statement(self, stmt, macro, env=None, position=None) -> None:
        if isinstance(stmt, syntax.GateCall):
            self.check_call(stmt, macro, env, position)
        elif isinstance(stmt, (syntax.SeqBlock, syntax.ParBlock)):
            for child in stmt.statements:
                self.check_statement(child, macro, env, position)
        elif isinstance(stmt, syntax.Loop):
            self.check_count(stmt, env)
            for child in stmt.body.statements:
                self.check_statement(child, macro, env, position)

    def check_count(self, loop: syntax.Loop, env) -> None:
        count = loop.count
        if isinstance(count, str) and env is not None and count in env:
            return  # bound at expansion
        if isinstance(count, str) and count in self.table.constants:
            count = self.table.constants[count]
        elif isinstance(count, str):
            category = self.table.category_of(count)
            if category is not None or self.library.has(count):
                self.fail(
                    "KIND_MISMATCH",
                    f"the loop count must be an integer constant, not the "
                    f"{category or 'gate'} '{count}'",
                    loop.count_span,
                )
            else:
                self.missing_name(count, loop.count_span, "loop count")
            return
        if isinstance(count, float):
            self.fail(
                "NON_INTEGER_COUNT",
                f"the loop count must be an integer, not {count}",
                loop.count_span,
            )
        elif count < 1:
            self.fail(
                "NONPOSITIVE_LOOP_COUNT",
                f"a loop must run at least once, not {count} times",
                loop.count_span,
            )

    def check_call(self, call: syntax.GateCall, macro, env, position) -> None:
        if env is not None and call.name in env:
            self.fail(
                "KIND_MISMATCH",
                f"macro parameter '{call.name}' cannot be called as a gate",
                call.span,
            )
            return
        if self.library.has(call.name):
            self.check_native_call(call, env)
            return
        if macro is not None and call.name == macro.name:
            self.fail(
                "MACRO_SELF_OR_FORWARD_REFERENCE",
                f"macro '{call.name}' cannot call itself",
                call.span,
            )
            return
        if call.name in self.table.macros:
            info = self.table.macros[call.name]
            if len(call.args) != len(info.params):
                self.fail(
                    "ARITY_MISMATCH",
                    f"macro '{call.name}' expects {len(info.params)} "
                    f"argument(s), got {len(call.args)}",
                    call.span,
                )
            for arg in call.args:
                resolved = resolve_argument(
                    self.table, arg, env, self.diagnostics
                )
                if resolved is not None and resolved[0] == ARRAY:
                    self.fail(
                        "UNINDEXED_ARRAY",
                        "an array alias cannot be passed to a macro; "
                        "index a single qubit",
                        arg.span,
                    )
            return
        if call.name in self.macro_order:
            if macro is not None:
                self.fail(
                    "MACRO_SELF_OR_FORWARD_REFERENCE",
                    f"macro '{call.name}' is defined later in the file; "
                    "macros may only call earlier macros",
                    call.span,
                )
            else:
                self.fail(
                    "USE_BEFORE_DEFINITION",
                    f"macro '{call.name}' is called before its definition",
                    call.span,
                )
            return
        category = self.table.category_of(call.name)
        if category is not None:
            self.fail(
                "KIND_MISMATCH",
                f"'{call.name}' is a {category}, not a gate",
                call.span,
            )
            return
        self.fail(
            "UNDEFINED_NAME", f"gate '{call.name}' is not defined", call.span
        )

    def check_native_call(self, call: syntax.GateCall, env) -> None:
        signature = self.library.signature(call.name)
        if len(call.args) != len(signature.params):
            self.fail(
                "ARITY_MISMATCH",
                f"gate '{call.name}' expects {len(signature.params)} "
                f"argument(s), got {len(call.args)}",
                call.span,
            )
            return
        for expected, arg in zip(signature.params, call.args):
            resolved = resolve_argument(self.table, arg, env, self.diagnostics)
            if resolved is None:
                continue
            kind, _ = resolved
            if kind == UNKNOWN:
                continue
            if expected == "qubit":
                if kind == NUMBER:
                    self.fail(
                        "KIND_MISMATCH",
                        f"gate '{call.name}' expects a qubit here, got a number",
                        arg.span,
                    )
                elif kind == ARRAY:
                    self.fail(
                        "UNINDEXED_ARRAY",
                        "an array alias cannot be used where a single qubit "
                        "is required",
                        arg.span,
                    )
            else:  # angle
                if kind in (QUBIT, ARRAY):
                    self.fail(
                        "KIND_MISMATCH",
                        f"gate '{call.name}' expects a number here, got a qubit",
                        arg.span,
                    )


def analyze(program: syntax.AstProgram, library=None) -> AnalysisResult:
    """Build the symbol table and run every static check."""
    if library is None:
        from .gates import builtin_library

        library = builtin_library()
    return _Analyzer(program, library).run()
