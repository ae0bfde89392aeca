"""Flattening: macro expansion, loop unrolling, and timed slice scheduling.

A flattened program is an ordered list of time slices. Each slice holds
one or more primitive gate instances with start offsets relative to the
slice start. A plain gate statement becomes a singleton slice; a
parallel block becomes one slice whose branches all start together
(or, with align="end", all finish together). A sequential block inside
a parallel block contributes a chain of entries that occupy its qubits
one after another within the same slice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .diagnostics import SourceSpan, error
from .formatting import float_to_source
from .gates import GateLibrary
from .symbols import ARRAY, NUMBER, QUBIT, SymbolTable, resolve_argument
from .syntax import AstProgram, GateCall, Loop, MacroDef, ParBlock, SeqBlock

DEFAULT_MAX_SLICES = 10_000_000


@dataclass(frozen=True)
class GateInstance:
    gate_name: str
    qubits: tuple  # physical indices, pairwise distinct
    numeric_args: tuple  # angle values in radians
    origin_span: SourceSpan


@dataclass(frozen=True)
class SliceEntry:
    gate: GateInstance
    start: float  # relative to the slice start
    duration: float


@dataclass(frozen=True)
class TimeSlice:
    entries: tuple  # SliceEntry, ordered by (start, qubits, name)
    duration: float


@dataclass(frozen=True)
class Schedule:
    slices: tuple
    register_size: int
    measure_count: int


@dataclass(frozen=True)
class TimelineEvent:
    qubit: int
    name: str
    start: float  # absolute time from program start
    duration: float


@dataclass(frozen=True)
class Timeline:
    events: tuple


@dataclass
class _Branch:
    entries: list  # SliceEntry with starts relative to the branch start
    duration: float
    qubits: set


class _TooLarge(Exception):
    def __init__(self, span: SourceSpan):
        super().__init__("schedule too large")
        self.span = span


class _Flattener:
    def __init__(self, table, library, align, max_slices):
        self.table = table
        self.library = library
        self.align = align
        self.max_slices = max_slices
        self.diagnostics = []
        self.slices = []
        self.failed = False

    def fail(self, code, message, span):
        self.diagnostics.append(error(code, message, span))
        self.failed = True

    # -- size pre-guard ----------------------------------------------

    def check_size(self, statements):
        try:
            self._count_all(statements, None)
        except _TooLarge as exc:
            self.fail(
                "SCHEDULE_TOO_LARGE",
                f"expansion exceeds the {self.max_slices} slice limit",
                exc.span,
            )
            return False
        return True

    def _count_all(self, statements, env):
        slices = instances = 0
        for statement in statements:
            s, g = self._count_one(statement, env)
            slices += s
            instances += g
            if slices > self.max_slices or instances > self.max_slices:
                raise _TooLarge(statement.span)
        return slices, instances

    def _count_one(self, statement, env):
        if isinstance(statement, MacroDef):
            return 0, 0
        if isinstance(statement, GateCall):
            macro = self.table.macros.get(statement.name)
            if macro is None or (env is not None and statement.name in env):
                return 1, 1
            bound = self._bind_silently(macro, statement, env)
            return self._count_all(macro.body.statements, bound)
        if isinstance(statement, Loop):
            count = self._count_silently(statement, env)
            if count is None:
                count = 1
            s, g = self._count_one(statement.body, env)
            s, g = s * count, g * count
            if s > self.max_slices or g > self.max_slices:
                raise _TooLarge(statement.span)
            return s, g
        if isinstance(statement, SeqBlock):
            return self._count_all(statement.statements, env)
        if isinstance(statement, ParBlock):
            _, g = self._count_all(statement.statements, env)
            return 1, g
        return 0, 0

    def _bind_silently(self, macro, call, env):
        scratch = []
        bound = {}
        for param, arg in zip(macro.params, call.args):
            resolved = resolve_argument(self.table, arg, env, scratch)
            if resolved is not None:
                bound[param] = resolved
        return bound

    def _count_silently(self, loop, env):
        scratch = []
        return self._loop_count(loop, env, scratch)

    # -- loop counts --------------------------------------------------

    def _loop_count(self, loop, env, diags):
        count = loop.count
        if isinstance(count, str):
            if env is not None and count in env:
                kind, value = env[count]
                if kind != NUMBER:
                    diags.append(
                        error(
                            "KIND_MISMATCH",
                            f"loop count '{count}' must be a number, "
                            f"got a {kind}",
                            loop.count_span,
                        )
                    )
                    return None
                count = value
            elif count in self.table.constants:
                count = self.table.constants[count]
            else:
                diags.append(
                    error(
                        "UNDEFINED_NAME",
                        f"loop count '{count}' is not defined",
                        loop.count_span,
                    )
                )
                return None
        if isinstance(count, float):
            diags.append(
                error(
                    "NON_INTEGER_COUNT",
                    f"loop count must be an integer, got {count}",
                    loop.count_span,
                )
            )
            return None
        if count < 1:
            diags.append(
                error(
                    "NONPOSITIVE_LOOP_COUNT",
                    f"loop count must be at least 1, got {count}",
                    loop.count_span,
                )
            )
            return None
        return count

    def resolve_count(self, loop, env):
        before = len(self.diagnostics)
        count = self._loop_count(loop, env, self.diagnostics)
        if count is None and len(self.diagnostics) > before:
            self.failed = True
        return count

    # -- slice emission ------------------------------------------------

    def emit_statements(self, statements, env):
        for statement in statements:
            self.emit_statement(statement, env)

    def emit_statement(self, statement, env):
        if isinstance(statement, MacroDef):
            return
        if isinstance(statement, GateCall):
            macro = self._macro_for(statement, env)
            if macro is not None:
                bound = self._bind_macro(macro, statement, env)
                if bound is not None:
                    self.emit_statements(macro.body.statements, bound)
                return
            branch = self._gate_branch(statement, env)
            if branch is not None:
                self._finish_slice(branch.entries, branch.duration)
            return
        if isinstance(statement, Loop):
            count = self.resolve_count(statement, env)
            if count is None:
                return
            for _ in range(count):
                self.emit_statement(statement.body, env)
            return
        if isinstance(statement, SeqBlock):
            self.emit_statements(statement.statements, env)
            return
        if isinstance(statement, ParBlock):
            group = self._par_group(statement, env)
            if group is not None:
                self._finish_slice(group.entries, group.duration)
            return

    def _macro_for(self, call, env):
        # A macro parameter shadows an outer macro of the same name.
        if env is not None and call.name in env:
            return None
        return self.table.macros.get(call.name)

    def _bind_macro(self, macro, call, env):
        if len(call.args) != len(macro.params):
            self.fail(
                "ARITY_MISMATCH",
                f"macro '{macro.name}' takes {len(macro.params)} "
                f"argument(s), got {len(call.args)}",
                call.span,
            )
            return None
        bound = {}
        ok = True
        for param, arg in zip(macro.params, call.args):
            resolved = resolve_argument(self.table, arg, env, self.diagnostics)
            if resolved is None:
                ok = False
                continue
            kind, value = resolved
            if kind == ARRAY:
                self.fail(
                    "UNINDEXED_ARRAY",
                    f"argument for '{param}' names a whole array; "
                    "pass a single qubit",
                    arg.span,
                )
                ok = False
                continue
            bound[param] = (kind, value)
        if not ok:
            self.failed = True
            return None
        return bound

    # -- branch building (within one slice) ----------------------------

    def _build_branch(self, statement, env):
        if isinstance(statement, GateCall):
            macro = self._macro_for(statement, env)
            if macro is not None:
                bound = self._bind_macro(macro, statement, env)
                if bound is None:
                    return None
                return self._chain(macro.body.statements, bound)
            return self._gate_branch(statement, env)
        if isinstance(statement, SeqBlock):
            return self._chain(statement.statements, env)
        if isinstance(statement, ParBlock):
            return self._par_group(statement, env)
        if isinstance(statement, Loop):
            count = self.resolve_count(statement, env)
            if count is None:
                return None
            body = self._build_branch(statement.body, env)
            if body is None:
                return None
            entries = []
            for k in range(count):
                offset = k * body.duration
                entries.extend(
                    SliceEntry(e.gate, e.start + offset, e.duration)
                    for e in body.entries
                )
            return _Branch(entries, count * body.duration, body.qubits)
        return None

    def _chain(self, statements, env):
        entries = []
        qubits = set()
        elapsed = 0.0
        ok = True
        for statement in statements:
            if isinstance(statement, MacroDef):
                continue
            branch = self._build_branch(statement, env)
            if branch is None:
                ok = False
                continue
            entries.extend(
                SliceEntry(e.gate, e.start + elapsed, e.duration)
                for e in branch.entries
            )
            qubits |= branch.qubits
            elapsed += branch.duration
        if not ok:
            return None
        return _Branch(entries, elapsed, qubits)

    def _par_group(self, par, env):
        branches = []
        ok = True
        for statement in par.statements:
            branch = self._build_branch(statement, env)
            if branch is None:
                ok = False
            else:
                branches.append(branch)
        if not ok:
            return None
        used = set()
        for branch in branches:
            overlap = used & branch.qubits
            if overlap:
                self.fail(
                    "QUBIT_CONFLICT_IN_PARALLEL",
                    f"qubit {min(overlap)} is used by more than one "
                    "parallel branch",
                    par.span,
                )
                return None
            used |= branch.qubits
        duration = max((b.duration for b in branches), default=0.0)
        entries = []
        for branch in branches:
            offset = duration - branch.duration if self.align == "end" else 0.0
            entries.extend(
                SliceEntry(e.gate, e.start + offset, e.duration)
                for e in branch.entries
            )
        return _Branch(entries, duration, used)

    def _gate_branch(self, call, env):
        """A single primitive gate as a one-entry branch."""
        if not self.library.has(call.name):
            self.fail(
                "UNDEFINED_NAME", f"'{call.name}' is not defined", call.span
            )
            return None
        signature = self.library.signature(call.name)
        if len(call.args) != len(signature.params):
            self.fail(
                "ARITY_MISMATCH",
                f"gate '{call.name}' takes {len(signature.params)} "
                f"argument(s), got {len(call.args)}",
                call.span,
            )
            return None
        qubits = []
        angles = []
        ok = True
        for expected, arg in zip(signature.params, call.args):
            resolved = resolve_argument(self.table, arg, env, self.diagnostics)
            if resolved is None:
                ok = False
                continue
            kind, value = resolved
            if expected == "qubit":
                if kind == ARRAY:
                    self.fail(
                        "UNINDEXED_ARRAY",
                        f"gate '{call.name}' needs a single qubit here; "
                        "index the array",
                        arg.span,
                    )
                    ok = False
                elif kind != QUBIT:
                    self.fail(
                        "KIND_MISMATCH",
                        f"gate '{call.name}' expects a qubit here, "
                        f"got a number",
                        arg.span,
                    )
                    ok = False
                else:
                    qubits.append(value)
            else:
                if kind != NUMBER:
                    self.fail(
                        "KIND_MISMATCH",
                        f"gate '{call.name}' expects a number here, "
                        f"got a {kind}",
                        arg.span,
                    )
                    ok = False
                else:
                    angles.append(value)
        if not ok:
            self.failed = True
            return None
        if len(set(qubits)) != len(qubits):
            self.fail(
                "DUPLICATE_QUBIT_ARG",
                f"gate '{call.name}' was given the same qubit twice",
                call.span,
            )
            return None
        duration = self.library.duration(call.name, angles)
        instance = GateInstance(
            call.name, tuple(qubits), tuple(angles), call.span
        )
        return _Branch([SliceEntry(instance, 0.0, duration)], duration, set(qubits))

    # -- slice assembly -------------------------------------------------

    def _finish_slice(self, entries, duration):
        entries = sorted(
            entries, key=lambda e: (e.start, e.gate.qubits, e.gate.gate_name)
        )
        ok = True
        if len(entries) > 1:
            for entry in entries:
                signature = self.library.signature(entry.gate.gate_name)
                if len(entry.gate.qubits) >= 2:
                    self.fail(
                        "TWO_QUBIT_NOT_ALONE",
                        f"two-qubit gate '{entry.gate.gate_name}' cannot "
                        "share a parallel block with other gates",
                        entry.gate.origin_span,
                    )
                    ok = False
                elif signature.is_prepare or signature.is_measure:
                    self.fail(
                        "PREP_OR_MEASURE_IN_PARALLEL",
                        f"'{entry.gate.gate_name}' acts on every qubit and "
                        "cannot share a parallel block",
                        entry.gate.origin_span,
                    )
                    ok = False
        if ok:
            self.slices.append(TimeSlice(tuple(entries), duration))

    # -- prepare/measure automaton ---------------------------------------

    def check_automaton(self):
        prepared = False
        measure_count = 0
        reported = set()
        for time_slice in self.slices:
            is_prepare = any(
                self.library.signature(e.gate.gate_name).is_prepare
                for e in time_slice.entries
            )
            is_measure = any(
                self.library.signature(e.gate.gate_name).is_measure
                for e in time_slice.entries
            )
            if is_prepare:
                prepared = True
                continue
            if not prepared:
                origin = time_slice.entries[0].gate.origin_span
                key = (origin.offset, origin.length)
                if key not in reported:
                    reported.add(key)
                    what = "measured" if is_measure else "acted on"
                    self.fail(
                        "UNPREPARED_GATE",
                        f"qubits cannot be {what} before 'prepare_all' "
                        "(or after 'measure_all' without preparing again)",
                        origin,
                    )
            if is_measure:
                measure_count += 1
                prepared = False
        return measure_count


def flatten(
    program: AstProgram,
    table: SymbolTable,
    library: GateLibrary,
    align: str = "start",
    max_slices: int = DEFAULT_MAX_SLICES,
):
    """Expand a checked program into a Schedule.

    Returns (schedule, diagnostics); schedule is None when flattening
    found errors.
    """
    if align not in ("start", "end"):
        raise ValueError(f"align must be 'start' or 'end', not {align!r}")
    flattener = _Flattener(table, library, align, max_slices)
    if not flattener.check_size(program.body):
        return None, flattener.diagnostics
    flattener.emit_statements(program.body, None)
    if flattener.failed:
        # Slices may already be missing; the automaton would only add noise.
        return None, flattener.diagnostics
    measure_count = flattener.check_automaton()
    if flattener.failed:
        return None, flattener.diagnostics
    register_size = table.register_size or 0
    if flattener.slices and register_size == 0:
        first = flattener.slices[0].entries[0].gate.origin_span
        flattener.fail(
            "NO_REGISTER",
            "the program has gate statements but no register declaration",
            first,
        )
        return None, flattener.diagnostics
    schedule = Schedule(tuple(flattener.slices), register_size, measure_count)
    return schedule, flattener.diagnostics


def _touched_qubits(entry: SliceEntry, library, register_size):
    signature = library.signature(entry.gate.gate_name)
    if signature.is_prepare or signature.is_measure:
        return range(register_size)
    return entry.gate.qubits


def _idle_name(library: GateLibrary, gap: float) -> str:
    for name in library.names():
        signature = library.signature(name)
        if (
            signature.is_idle
            and not signature.scales_with_rotation
            and abs(signature.duration - gap) <= 1e-9
        ):
            return name
    return "idle"


def compute_timeline(schedule: Schedule, library: GateLibrary) -> Timeline:
    """Per-qubit busy/idle events with absolute start times.

    Within each slice, every participating qubit is padded with idle
    events so its busy time covers the whole slice.
    """
    events = []
    offset = 0.0
    for time_slice in schedule.slices:
        per_qubit = {}
        for entry in time_slice.entries:
            for qubit in _touched_qubits(entry, library, schedule.register_size):
                per_qubit.setdefault(qubit, []).append(entry)
        for qubit in sorted(per_qubit):
            cursor = 0.0
            for entry in sorted(per_qubit[qubit], key=lambda e: e.start):
                gap = entry.start - cursor
                if gap > 1e-12:
                    events.append(
                        TimelineEvent(
                            qubit, _idle_name(library, gap), offset + cursor, gap
                        )
                    )
                events.append(
                    TimelineEvent(
                        qubit,
                        entry.gate.gate_name,
                        offset + entry.start,
                        entry.duration,
                    )
                )
                cursor = entry.start + entry.duration
            gap = time_slice.duration - cursor
            if gap > 1e-12:
                events.append(
                    TimelineEvent(
                        qubit, _idle_name(library, gap), offset + cursor, gap
                    )
                )
        offset += time_slice.duration
    return Timeline(tuple(events))


def _number_text(value) -> str:
    if isinstance(value, int):
        return str(value)
    return float_to_source(value)


def _entry_text(entry: SliceEntry) -> str:
    parts = [entry.gate.gate_name]
    parts.extend(str(q) for q in entry.gate.qubits)
    parts.extend(_number_text(a) for a in entry.gate.numeric_args)
    return " ".join(parts)


def emit_flat(schedule: Schedule, fmt: str = "text") -> bytes:
    """Render a schedule: one line per slice, or a JSON document."""
    if fmt == "text":
        lines = []
        for time_slice in schedule.slices:
            lines.append(" | ".join(_entry_text(e) for e in time_slice.entries))
        text = "".join(line + "\n" for line in lines)
        return text.encode("utf-8")
    if fmt in ("structured", "json"):
        payload = {
            "register_size": schedule.register_size,
            "slices": [
                {
                    "duration": time_slice.duration,
                    "entries": [
                        {
                            "gate": entry.gate.gate_name,
                            "qubits": list(entry.gate.qubits),
                            "args": list(entry.gate.numeric_args),
                            "start": entry.start,
                        }
                        for entry in time_slice.entries
                    ],
                }
                for time_slice in schedule.slices
            ],
        }
        return (json.dumps(payload) + "\n").encode("utf-8")
    raise ValueError(f"unknown schedule format {fmt!r}")
