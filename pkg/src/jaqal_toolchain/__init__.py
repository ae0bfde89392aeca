"""Jaqal toolchain: parse, check, flatten, and simulate Jaqal programs."""

from .diagnostics import (
    Diagnostic,
    JaqalError,
    SourceSpan,
    has_errors,
)
from .formatting import format_program
from .gates import GateLibrary, GateSignature, builtin_library, load_gatedefs
from .lexing import tokenize
from .pipeline import (
    PipelineOutcome,
    check_source,
    expand_source,
    format_source,
    process,
    run_source,
)
from .prng import ALGORITHM_NAME, RandomStream
from .scheduling import (
    GateInstance,
    Schedule,
    TimeSlice,
    Timeline,
    TimelineEvent,
    compute_timeline,
    emit_flat,
    flatten,
)
from .simulator import QuantumState, RunOutput, run_schedule
from .symbols import SymbolTable, analyze
from .syntax import parse

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_NAME",
    "Diagnostic",
    "GateInstance",
    "GateLibrary",
    "GateSignature",
    "JaqalError",
    "PipelineOutcome",
    "QuantumState",
    "RandomStream",
    "RunOutput",
    "Schedule",
    "SourceSpan",
    "SymbolTable",
    "TimeSlice",
    "Timeline",
    "TimelineEvent",
    "__version__",
    "analyze",
    "builtin_library",
    "check_source",
    "compute_timeline",
    "emit_flat",
    "expand_source",
    "flatten",
    "format_program",
    "format_source",
    "has_errors",
    "load_gatedefs",
    "parse",
    "process",
    "run_schedule",
    "run_source",
    "tokenize",
]
