"""End-to-end drivers shared by the command line and the HTTP service.

Every driver runs the same staged pipeline (lex, parse, analyze,
flatten) and stops at the first stage that reports errors, so a later
stage never sees input that an earlier stage rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import JaqalError, error, has_errors
from .formatting import format_program
from .gates import builtin_library
from .scheduling import DEFAULT_MAX_SLICES, Schedule, emit_flat, flatten
from .simulator import DEFAULT_MAX_QUBITS, RunOutput, run_schedule
from .symbols import SymbolTable, analyze
from .syntax import AstProgram, parse


@dataclass
class PipelineOutcome:
    diagnostics: list = field(default_factory=list)
    program: AstProgram = None
    table: SymbolTable = None
    schedule: Schedule = None

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)


def process(
    source,
    library=None,
    align: str = "start",
    max_qubits: int = DEFAULT_MAX_QUBITS,
    max_slices: int = DEFAULT_MAX_SLICES,
) -> PipelineOutcome:
    outcome = PipelineOutcome()
    parsed = parse(source)
    outcome.diagnostics.extend(parsed.diagnostics)
    outcome.program = parsed.program
    if has_errors(outcome.diagnostics) or parsed.program is None:
        return outcome
    if library is None:
        library = builtin_library()
    analysis = analyze(parsed.program, library)
    outcome.diagnostics.extend(analysis.diagnostics)
    outcome.table = analysis.table
    if has_errors(outcome.diagnostics):
        return outcome
    table = analysis.table
    if table.register_size is not None and table.register_size > max_qubits:
        outcome.diagnostics.append(
            error(
                "REGISTER_TOO_LARGE",
                f"a register of {table.register_size} qubits exceeds the "
                f"maximum of {max_qubits}",
                table.register_span,
            )
        )
        return outcome
    schedule, flat_diagnostics = flatten(
        parsed.program, table, library, align=align, max_slices=max_slices
    )
    outcome.diagnostics.extend(flat_diagnostics)
    outcome.schedule = schedule
    return outcome


def check_source(source, **options) -> PipelineOutcome:
    """Full static validation without execution."""
    return process(source, **options)


def format_source(source):
    """Reprint a parseable program in canonical layout.

    Returns (text, diagnostics); text is None when parsing failed.
    """
    parsed = parse(source)
    if has_errors(parsed.diagnostics) or parsed.program is None:
        return None, parsed.diagnostics
    return format_program(parsed.program), parsed.diagnostics


def expand_source(source, fmt: str = "text", **options):
    """Flatten a program and render the schedule.

    Returns (rendered bytes, outcome); bytes is None on any error.
    """
    outcome = process(source, **options)
    if not outcome.ok or outcome.schedule is None:
        return None, outcome
    return emit_flat(outcome.schedule, fmt), outcome


def run_source(
    source,
    seed: int = 0,
    library=None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    **options,
):
    """Check, flatten, and execute a program.

    Returns (RunOutput, outcome); RunOutput is None on any error.
    """
    if library is None:
        library = builtin_library()
    outcome = process(
        source, library=library, max_qubits=max_qubits, **options
    )
    if not outcome.ok or outcome.schedule is None:
        return None, outcome
    try:
        result = run_schedule(
            outcome.schedule, library, seed=seed, max_qubits=max_qubits
        )
    except JaqalError as exc:
        outcome.diagnostics.append(exc.diagnostic)
        return None, outcome
    return result, outcome
