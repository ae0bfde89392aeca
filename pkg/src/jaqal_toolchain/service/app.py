"""FastAPI application wrapping the pipeline drivers."""

from __future__ import annotations

import json

from fastapi import FastAPI

from .. import __version__
from ..diagnostics import JaqalError
from ..gates import builtin_library, load_gatedefs
from ..pipeline import check_source, format_source, process, run_source
from ..scheduling import emit_flat
from .models import (
    CheckResponse,
    DiagnosticModel,
    ExpandResponse,
    FormatRequest,
    FormatResponse,
    GateInfo,
    GatesResponse,
    HealthResponse,
    ProgramRequest,
    RunRequest,
    RunResponse,
)


def _models(diagnostics) -> list:
    return [DiagnosticModel.from_diagnostic(d) for d in diagnostics]


def _library_for(request: ProgramRequest):
    """Library per request; returns (library, diagnostic-on-failure)."""
    try:
        if request.gate_defs is not None:
            library = load_gatedefs(
                request.gate_defs,
                sxx_literal=request.sxx_literal,
                quantize_angles=request.quantize_angles,
            )
        else:
            library = builtin_library(
                sxx_literal=request.sxx_literal,
                quantize_angles=request.quantize_angles,
            )
    except JaqalError as exc:
        return None, exc.diagnostic
    return library, None


def create_app() -> FastAPI:
    app = FastAPI(title="jaqal-toolchain", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/gates", response_model=GatesResponse)
    def gates() -> GatesResponse:
        library = builtin_library()
        return GatesResponse(
            gates=[
                GateInfo(
                    name=s.name,
                    params=list(s.params),
                    duration=s.duration,
                    num_qubits=s.num_qubits,
                    is_idle=s.is_idle,
                    is_prepare=s.is_prepare,
                    is_measure=s.is_measure,
                    scales_with_rotation=s.scales_with_rotation,
                )
                for s in library.signatures()
            ]
        )

    @app.post("/check", response_model=CheckResponse)
    def check(request: ProgramRequest) -> CheckResponse:
        library, failure = _library_for(request)
        if failure is not None:
            return CheckResponse(ok=False, diagnostics=_models([failure]))
        outcome = check_source(
            request.source,
            library=library,
            align=request.align,
            max_qubits=request.max_qubits,
        )
        return CheckResponse(
            ok=outcome.ok, diagnostics=_models(outcome.diagnostics)
        )

    @app.post("/format", response_model=FormatResponse)
    def format_(request: FormatRequest) -> FormatResponse:
        text, diagnostics = format_source(request.source)
        return FormatResponse(
            ok=text is not None,
            formatted=text,
            diagnostics=_models(diagnostics),
        )

    @app.post("/expand", response_model=ExpandResponse)
    def expand(request: ProgramRequest) -> ExpandResponse:
        library, failure = _library_for(request)
        if failure is not None:
            return ExpandResponse(ok=False, diagnostics=_models([failure]))
        outcome = process(
            request.source,
            library=library,
            align=request.align,
            max_qubits=request.max_qubits,
        )
        if not outcome.ok or outcome.schedule is None:
            return ExpandResponse(
                ok=False, diagnostics=_models(outcome.diagnostics)
            )
        return ExpandResponse(
            ok=True,
            text=emit_flat(outcome.schedule, "text").decode("utf-8"),
            schedule=json.loads(emit_flat(outcome.schedule, "json")),
            diagnostics=_models(outcome.diagnostics),
        )

    @app.post("/run", response_model=RunResponse)
    def run(request: RunRequest) -> RunResponse:
        library, failure = _library_for(request)
        if failure is not None:
            return RunResponse(ok=False, diagnostics=_models([failure]))
        result, outcome = run_source(
            request.source,
            seed=request.seed,
            library=library,
            align=request.align,
            max_qubits=request.max_qubits,
        )
        if result is None:
            return RunResponse(
                ok=False, diagnostics=_models(outcome.diagnostics)
            )
        return RunResponse(
            ok=True,
            register_size=outcome.schedule.register_size,
            seed=result.seed,
            prng=result.prng,
            records=[list(record) for record in result.records],
            output=result.rendered.decode("ascii"),
            diagnostics=_models(outcome.diagnostics),
        )

    return app


app = create_app()
