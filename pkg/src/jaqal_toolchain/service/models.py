"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..diagnostics import Diagnostic


class DiagnosticModel(BaseModel):
    severity: str
    code: str
    message: str
    line: int
    column: int
    offset: int
    length: int

    @classmethod
    def from_diagnostic(cls, diagnostic: Diagnostic) -> "DiagnosticModel":
        return cls(
            severity=diagnostic.severity,
            code=diagnostic.code,
            message=diagnostic.message,
            line=diagnostic.span.line,
            column=diagnostic.span.column,
            offset=diagnostic.span.offset,
            length=diagnostic.span.length,
        )


class ProgramRequest(BaseModel):
    source: str
    gate_defs: Optional[dict] = None
    sxx_literal: bool = False
    quantize_angles: bool = False
    align: Literal["start", "end"] = "start"
    max_qubits: int = Field(default=16, ge=1)


class CheckResponse(BaseModel):
    ok: bool
    diagnostics: list[DiagnosticModel]


class FormatRequest(BaseModel):
    source: str


class FormatResponse(BaseModel):
    ok: bool
    formatted: Optional[str] = None
    diagnostics: list[DiagnosticModel]


class ExpandResponse(BaseModel):
    ok: bool
    text: Optional[str] = None
    schedule: Optional[dict] = None
    diagnostics: list[DiagnosticModel]


class RunRequest(ProgramRequest):
    seed: int = 0


class RunResponse(BaseModel):
    ok: bool
    register_size: Optional[int] = None
    seed: Optional[int] = None
    prng: Optional[str] = None
    records: Optional[list[list[int]]] = None
    output: Optional[str] = None
    diagnostics: list[DiagnosticModel]


class GateInfo(BaseModel):
    name: str
    params: list[str]
    duration: float
    num_qubits: int
    is_idle: bool
    is_prepare: bool
    is_measure: bool
    scales_with_rotation: bool


class GatesResponse(BaseModel):
    gates: list[GateInfo]


class HealthResponse(BaseModel):
    status: str
    version: str
