"""Canonical pretty-printer for parsed Jaqal programs."""

from __future__ import annotations

import math
import re

from . import syntax

_PLAIN_FLOAT = re.compile(r"-?[0-9]+\.[0-9]+\Z")


def float_to_source(value: float) -> str:
    """Render a float so the tokenizer reads back the identical value.

    Jaqal has no exponent notation, so values whose repr uses one are
    expanded to the shortest fixed-point form that round-trips.
    """
    if not math.isfinite(value):
        raise ValueError(f"cannot render non-finite value {value!r}")
    text = repr(float(value))
    if _PLAIN_FLOAT.match(text):
        return text
    for digits in range(1, 40):
        text = f"{value:.{digits}f}"
        if float(text) == value:
            return text
    # Tiny magnitudes need enough leading fractional zeros to keep all
    # significant digits; subnormals can require several hundred.
    floor = max(1, -math.floor(math.log10(abs(value))) + 17)
    for digits in range(floor, floor + 25):
        text = f"{value:.{digits}f}"
        if float(text) == value:
            return text
    raise ValueError(f"cannot render {value!r} without exponent notation")


def _number_or_name(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return float_to_source(value)
    return str(value)


def _slice_text(spec: syntax.SliceExpr) -> str:
    start = "" if spec.start is None else _number_or_name(spec.start)
    stop = "" if spec.stop is None else _number_or_name(spec.stop)
    text = f"{start}:{stop}"
    if spec.step is not None:
        text += f":{_number_or_name(spec.step)}"
    return text


def _arg_text(arg) -> str:
    if isinstance(arg, syntax.NameArg):
        return arg.name
    if isinstance(arg, syntax.IndexedArg):
        return f"{arg.name}[{_number_or_name(arg.index)}]"
    if isinstance(arg, syntax.IntArg):
        return str(arg.value)
    return float_to_source(arg.value)


def _header_text(stmt) -> str:
    if isinstance(stmt, syntax.RegisterDecl):
        return f"register {stmt.name}[{_number_or_name(stmt.size)}]"
    if isinstance(stmt, syntax.MapDecl):
        if stmt.index is not None:
            return f"map {stmt.name} {stmt.target}[{_number_or_name(stmt.index)}]"
        if stmt.slice is not None:
            return f"map {stmt.name} {stmt.target}[{_slice_text(stmt.slice)}]"
        return f"map {stmt.name} {stmt.target}"
    return f"let {stmt.name} {_number_or_name(stmt.value)}"


def _emit_statement(stmt, indent: int, lines: list) -> None:
    pad = "    " * indent
    if isinstance(stmt, syntax.GateCall):
        parts = [stmt.name] + [_arg_text(a) for a in stmt.args]
        lines.append(pad + " ".join(parts))
    elif isinstance(stmt, syntax.SeqBlock):
        lines.append(pad + "{")
        for child in stmt.statements:
            _emit_statement(child, indent + 1, lines)
        lines.append(pad + "}")
    elif isinstance(stmt, syntax.ParBlock):
        lines.append(pad + "<")
        for child in stmt.statements:
            _emit_statement(child, indent + 1, lines)
        lines.append(pad + ">")
    elif isinstance(stmt, syntax.Loop):
        lines.append(pad + f"loop {_number_or_name(stmt.count)} {{")
        for child in stmt.body.statements:
            _emit_statement(child, indent + 1, lines)
        lines.append(pad + "}")
    elif isinstance(stmt, syntax.MacroDef):
        head = " ".join(["macro", stmt.name, *stmt.params])
        lines.append(pad + head + " {")
        for child in stmt.body.statements:
            _emit_statement(child, indent + 1, lines)
        lines.append(pad + "}")
    else:
        raise TypeError(f"cannot format {type(stmt).__name__}")


def format_program(program: syntax.AstProgram) -> str:
    """Deterministic canonical rendering with a trailing newline."""
    lines = []
    for stmt in program.headers:
        lines.append(_header_text(stmt))
    if program.headers and program.body:
        lines.append("")
    for stmt in program.body:
        _emit_statement(stmt, 0, lines)
    return "\n".join(lines) + "\n" if lines else ""
