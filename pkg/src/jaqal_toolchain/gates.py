"""The native trapped-ion gate set: signatures, durations, and unitaries.

The default library holds the 15 named unitary gates (R, Rx, Ry, Rz,
Px, Py, Pz, Sx, Sy, Sz, Sxd, Syd, Szd, MS, Sxx), prepare_all and
measure_all, and an I_<g> idle twin for every 1- and 2-qubit gate.
Additional gates can be loaded from a JSON gate-definition file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .diagnostics import JaqalError
from .lexing import is_identifier

UNITARITY_TOLERANCE = 1e-12

# Default durations in abstract time units. Z-axis gates are virtual
# and take no time; rotation gates scale with the rotation angle so a
# pi/2 pulse costs one unit.
SINGLE_QUBIT_PULSE = 1.0
VIRTUAL_Z = 0.0
TWO_QUBIT_PULSE = 10.0
PREPARE_DURATION = 100.0
MEASURE_DURATION = 100.0

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
IDENTITY_4 = np.eye(4, dtype=complex)


def rotation_matrix(axis_angle: float, rotation_angle: float) -> np.ndarray:
    """Rotation by rotation_angle about the equatorial axis at axis_angle."""
    half = rotation_angle / 2.0
    c = math.cos(half)
    s = math.sin(half)
    phase = complex(math.cos(axis_angle), math.sin(axis_angle))
    return np.array(
        [[c, -1j * s / phase], [-1j * s * phase, c]], dtype=complex
    )


def z_rotation_matrix(rotation_angle: float) -> np.ndarray:
    half = rotation_angle / 2.0
    return np.array(
        [
            [complex(math.cos(half), -math.sin(half)), 0],
            [0, complex(math.cos(half), math.sin(half))],
        ],
        dtype=complex,
    )


def ms_matrix(axis_angle: float, rotation_angle: float) -> np.ndarray:
    """Two-qubit Molmer-Sorensen gate exp(-i(theta/2) A x A).

    A = cos(axis_angle) X + sin(axis_angle) Y squares to the identity,
    so the exponential reduces to cos(theta/2) I - i sin(theta/2) A x A.
    """
    axis = math.cos(axis_angle) * PAULI_X + math.sin(axis_angle) * PAULI_Y
    half = rotation_angle / 2.0
    return math.cos(half) * IDENTITY_4 - 1j * math.sin(half) * np.kron(axis, axis)


def sxx_matrix() -> np.ndarray:
    """The XX-type two-qubit gate, exp(-i(pi/4) X x X)."""
    return ms_matrix(0.0, math.pi / 2)


def sxx_literal_matrix() -> np.ndarray:
    """Alternative XX normalization exp(-i(pi/2) X x X), i.e. -i X x X."""
    return ms_matrix(0.0, math.pi)


@dataclass(frozen=True)
class GateSignature:
    name: str
    params: tuple  # each entry "qubit" or "angle"
    duration: float
    num_qubits: int
    is_idle: bool = False
    is_prepare: bool = False
    is_measure: bool = False
    # When set, the actual duration is |last angle| / (pi/2) * duration.
    scales_with_rotation: bool = False

    @property
    def num_angles(self) -> int:
        return len(self.params) - self.num_qubits


def _signature(name, params, duration, scales=False, **flags) -> GateSignature:
    params = tuple(params)
    return GateSignature(
        name=name,
        params=params,
        duration=duration,
        num_qubits=params.count("qubit"),
        scales_with_rotation=scales,
        **flags,
    )


class GateLibrary:
    """Immutable mapping from gate names to signatures and unitaries."""

    def __init__(self, signatures, constructors, quantize_angles: bool = False):
        self._signatures = dict(signatures)
        self._constructors = dict(constructors)
        self.quantize_angles = quantize_angles

    def has(self, name: str) -> bool:
        return name in self._signatures

    def names(self):
        return sorted(self._signatures)

    def signatures(self):
        return [self._signatures[name] for name in self.names()]

    def signature(self, name: str) -> GateSignature:
        try:
            return self._signatures[name]
        except KeyError:
            raise JaqalError.at(
                "UNKNOWN_GATE", f"gate '{name}' is not in the library"
            ) from None

    def unitary(self, name: str, angles=()) -> np.ndarray:
        signature = self.signature(name)
        constructor = self._constructors.get(name)
        if constructor is None:
            raise JaqalError.at(
                "UNKNOWN_GATE", f"gate '{name}' has no unitary"
            )
        angles = [float(a) for a in angles]
        if len(angles) != signature.num_angles:
            raise JaqalError.at(
                "ANGLE_COUNT_MISMATCH",
                f"gate '{name}' takes {signature.num_angles} angle(s), "
                f"got {len(angles)}",
            )
        if self.quantize_angles:
            angles = [_quantize_angle(a) for a in angles]
        matrix = constructor(*angles)
        deviation = np.abs(
            matrix.conj().T @ matrix - np.eye(matrix.shape[0])
        ).max()
        if deviation > UNITARITY_TOLERANCE:
            raise JaqalError.at(
                "NONUNITARY",
                f"gate '{name}' produced a non-unitary matrix "
                f"(deviation {deviation:.3e})",
            )
        return matrix

    def duration(self, name: str, angles=()) -> float:
        signature = self.signature(name)
        if signature.scales_with_rotation and angles:
            return abs(float(angles[-1])) / (math.pi / 2) * signature.duration
        return signature.duration


def _quantize_angle(angle: float) -> float:
    """Round to the nearest step of a 40-bit grid over [0, 2*pi)."""
    two_pi = 2.0 * math.pi
    steps = 1 << 40
    k = round((angle % two_pi) / two_pi * steps) % steps
    return k / steps * two_pi


def _core_entries(sxx_literal: bool):
    """Signatures and constructors for the named gates, without idles."""
    pi = math.pi
    entries = [
        (_signature("prepare_all", (), PREPARE_DURATION, is_prepare=True), None),
        (
            _signature("R", ("qubit", "angle", "angle"), SINGLE_QUBIT_PULSE, True),
            rotation_matrix,
        ),
        (
            _signature("Rx", ("qubit", "angle"), SINGLE_QUBIT_PULSE, True),
            lambda theta: rotation_matrix(0.0, theta),
        ),
        (
            _signature("Ry", ("qubit", "angle"), SINGLE_QUBIT_PULSE, True),
            lambda theta: rotation_matrix(pi / 2, theta),
        ),
        (_signature("Rz", ("qubit", "angle"), VIRTUAL_Z), z_rotation_matrix),
        (
            _signature("Px", ("qubit",), SINGLE_QUBIT_PULSE),
            lambda: rotation_matrix(0.0, pi),
        ),
        (
            _signature("Py", ("qubit",), SINGLE_QUBIT_PULSE),
            lambda: rotation_matrix(pi / 2, pi),
        ),
        (_signature("Pz", ("qubit",), VIRTUAL_Z), lambda: z_rotation_matrix(pi)),
        (
            _signature("Sx", ("qubit",), SINGLE_QUBIT_PULSE),
            lambda: rotation_matrix(0.0, pi / 2),
        ),
        (
            _signature("Sy", ("qubit",), SINGLE_QUBIT_PULSE),
            lambda: rotation_matrix(pi / 2, pi / 2),
        ),
        (
            _signature("Sz", ("qubit",), VIRTUAL_Z),
            lambda: z_rotation_matrix(pi / 2),
        ),
        (
            _signature("Sxd", ("qubit",), SINGLE_QUBIT_PULSE),
            lambda: rotation_matrix(0.0, -pi / 2),
        ),
        (
            _signature("Syd", ("qubit",), SINGLE_QUBIT_PULSE),
            lambda: rotation_matrix(pi / 2, -pi / 2),
        ),
        (
            _signature("Szd", ("qubit",), VIRTUAL_Z),
            lambda: z_rotation_matrix(-pi / 2),
        ),
        (
            _signature(
                "MS", ("qubit", "qubit", "angle", "angle"), TWO_QUBIT_PULSE
            ),
            ms_matrix,
        ),
        (
            _signature("Sxx", ("qubit", "qubit"), TWO_QUBIT_PULSE),
            sxx_literal_matrix if sxx_literal else sxx_matrix,
        ),
        (_signature("measure_all", (), MEASURE_DURATION, is_measure=True), None),
    ]
    return entries


def _add_idles(signatures: dict, constructors: dict) -> None:
    """Give every 1- and 2-qubit gate an identity twin of equal duration."""
    for name in list(signatures):
        signature = signatures[name]
        if signature.num_qubits == 0 or signature.is_idle:
            continue
        idle_name = f"I_{name}"
        if idle_name in signatures:
            continue
        signatures[idle_name] = GateSignature(
            name=idle_name,
            params=signature.params,
            duration=signature.duration,
            num_qubits=signature.num_qubits,
            is_idle=True,
            scales_with_rotation=signature.scales_with_rotation,
        )
        identity = IDENTITY_2 if signature.num_qubits == 1 else IDENTITY_4
        constructors[idle_name] = _constant(identity, signature.num_angles)


def _constant(matrix: np.ndarray, num_angles: int) -> Callable:
    def build(*angles):
        if len(angles) != num_angles:
            raise JaqalError.at(
                "ANGLE_COUNT_MISMATCH",
                f"expected {num_angles} angle(s), got {len(angles)}",
            )
        return matrix

    return build


def builtin_library(
    sxx_literal: bool = False, quantize_angles: bool = False
) -> GateLibrary:
    signatures = {}
    constructors = {}
    for signature, constructor in _core_entries(sxx_literal):
        signatures[signature.name] = signature
        if constructor is not None:
            constructors[signature.name] = constructor
    _add_idles(signatures, constructors)
    return GateLibrary(signatures, constructors, quantize_angles)


def _gatedef_error(message: str) -> JaqalError:
    return JaqalError.at("GATEDEF_PARSE_ERROR", message)


def _parse_matrix(rows, name: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise _gatedef_error(f"gate '{name}': matrix must be a list of rows")
    dim = len(rows)
    matrix = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise _gatedef_error(
                f"gate '{name}': matrix must be square, row {i} is not"
            )
        for j, cell in enumerate(row):
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(part, (int, float)) for part in cell)
            ):
                raise _gatedef_error(
                    f"gate '{name}': entries must be [re, im] number pairs"
                )
            matrix[i, j] = complex(cell[0], cell[1])
    return matrix


def _load_entry(entry, signatures, constructors, builtin_ctors) -> None:
    if not isinstance(entry, dict):
        raise _gatedef_error("every gate entry must be an object")
    name = entry.get("name")
    if not isinstance(name, str) or not is_identifier(name):
        raise _gatedef_error(f"{name!r} is not a legal gate name")
    params = entry.get("params")
    if not isinstance(params, list) or any(
        p not in ("qubit", "angle") for p in params
    ):
        raise _gatedef_error(
            f"gate '{name}': params must be a list of 'qubit'/'angle'"
        )
    duration = entry.get("duration")
    if not isinstance(duration, (int, float)) or duration < 0:
        raise _gatedef_error(
            f"gate '{name}': duration must be a nonnegative number"
        )
    unitary = entry.get("unitary")
    if not isinstance(unitary, dict) or len(unitary) != 1:
        raise _gatedef_error(
            f"gate '{name}': unitary must be one of "
            "{'builtin': ...}, {'matrix': ...}, {'identity': ...}"
        )
    num_qubits = params.count("qubit")
    num_angles = len(params) - num_qubits
    if num_qubits not in (1, 2):
        raise JaqalError.at(
            "GATEDEF_BAD_ARITY",
            f"gate '{name}': gates must act on 1 or 2 qubits, not {num_qubits}",
        )
    kind, value = next(iter(unitary.items()))
    is_idle = False
    if kind == "builtin":
        constructor = builtin_ctors.get(value)
        reference = signatures.get(value) if constructor else None
        if constructor is None or reference is None:
            raise _gatedef_error(
                f"gate '{name}': '{value}' is not a built-in unitary gate"
            )
        if reference.num_angles != num_angles or reference.num_qubits != num_qubits:
            raise JaqalError.at(
                "GATEDEF_BAD_ARITY",
                f"gate '{name}': params do not match built-in '{value}'",
            )
    elif kind == "matrix":
        matrix = _parse_matrix(value, name)
        if num_angles != 0:
            raise JaqalError.at(
                "GATEDEF_BAD_ARITY",
                f"gate '{name}': a fixed matrix cannot take angle parameters",
            )
        if matrix.shape[0] != 2**num_qubits:
            raise JaqalError.at(
                "GATEDEF_BAD_ARITY",
                f"gate '{name}': a {matrix.shape[0]}x{matrix.shape[0]} matrix "
                f"does not fit {num_qubits} qubit(s)",
            )
        deviation = np.abs(
            matrix.conj().T @ matrix - np.eye(matrix.shape[0])
        ).max()
        if deviation > UNITARITY_TOLERANCE:
            raise JaqalError.at(
                "GATEDEF_NONUNITARY",
                f"gate '{name}': matrix is not unitary "
                f"(deviation {deviation:.3e})",
            )
        constructor = _constant(matrix, 0)
    elif kind == "identity":
        if value not in (2, 4):
            raise _gatedef_error(
                f"gate '{name}': identity dimension must be 2 or 4"
            )
        if value != 2**num_qubits:
            raise JaqalError.at(
                "GATEDEF_BAD_ARITY",
                f"gate '{name}': identity of dimension {value} does not fit "
                f"{num_qubits} qubit(s)",
            )
        constructor = _constant(np.eye(value, dtype=complex), num_angles)
        is_idle = True
    else:
        raise _gatedef_error(
            f"gate '{name}': unknown unitary form '{kind}'"
        )
    signatures[name] = GateSignature(
        name=name,
        params=tuple(params),
        duration=float(duration),
        num_qubits=num_qubits,
        is_idle=is_idle,
    )
    constructors[name] = constructor


def load_gatedefs(
    source, sxx_literal: bool = False, quantize_angles: bool = False
) -> GateLibrary:
    """Build a library from a gate-definition file layered over the built-ins.

    source may be a path, JSON text/bytes, or an already-parsed dict.
    """
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, (str, Path)):
        text = str(source)
    else:
        text = None
    if text is not None:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise _gatedef_error(f"invalid JSON: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict) or not isinstance(data.get("gates"), list):
        raise _gatedef_error("the top level must be {\"gates\": [...]}")

    signatures = {}
    constructors = {}
    builtin_ctors = {}
    for signature, constructor in _core_entries(sxx_literal):
        signatures[signature.name] = signature
        if constructor is not None:
            constructors[signature.name] = constructor
            builtin_ctors[signature.name] = constructor
    for entry in data["gates"]:
        _load_entry(entry, signatures, constructors, builtin_ctors)
    _add_idles(signatures, constructors)
    return GateLibrary(signatures, constructors, quantize_angles)
