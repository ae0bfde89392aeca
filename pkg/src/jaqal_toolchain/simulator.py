"""Dense state-vector execution of flattened schedules.

The state holds 2^n complex amplitudes with qubit i addressing bit i of
the amplitude index, so measurement records read little-endian: the
character at position i of an output line is the outcome of qubit i.
Measurement invalidates the state; it must be prepared again before any
further gates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import JaqalError
from .gates import GateLibrary
from .prng import ALGORITHM_NAME, RandomStream
from .scheduling import Schedule

DEFAULT_MAX_QUBITS = 16
NORM_TOLERANCE = 1e-10


class QuantumState:
    """Dense 2^n state vector over num_qubits qubits."""

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self.amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
        self.prepared = False

    def prepare(self) -> None:
        """Reset to |0...0> and mark the state usable."""
        self.amplitudes[:] = 0
        self.amplitudes[0] = 1
        self.prepared = True

    def apply(self, matrix, qubits) -> None:
        if not self.prepared:
            raise JaqalError.at(
                "UNPREPARED_GATE", "gate applied to an unprepared state"
            )
        qubits = list(qubits)
        k = len(qubits)
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (2**k, 2**k):
            raise JaqalError.at(
                "DIMENSION_MISMATCH",
                f"a {matrix.shape[0]}x{matrix.shape[-1]} matrix does not "
                f"act on {k} qubit(s)",
            )
        if len(set(qubits)) != k or any(
            not 0 <= q < self.num_qubits for q in qubits
        ):
            raise JaqalError.at(
                "DIMENSION_MISMATCH",
                f"{qubits} are not distinct indices into "
                f"{self.num_qubits} qubit(s)",
            )
        n = self.num_qubits
        # Axis j of the reshaped tensor carries bit n-1-j of the index,
        # so qubit q lives on axis n-1-q. The first qubit argument maps
        # to the most significant bit of the matrix index.
        axes = [n - 1 - q for q in qubits]
        tensor = self.amplitudes.reshape([2] * n)
        tensor = np.moveaxis(tensor, axes, range(k))
        flat = matrix @ tensor.reshape(2**k, -1)
        tensor = np.moveaxis(flat.reshape([2] * n), range(k), axes)
        self.amplitudes = tensor.reshape(-1)
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise JaqalError.at(
                "NONUNITARY",
                f"state norm drifted to {norm!r} after a gate application",
            )

    def probabilities(self) -> np.ndarray:
        if not self.prepared:
            raise JaqalError.at(
                "UNPREPARED_GATE", "cannot read an unprepared state"
            )
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class RunOutput:
    records: tuple  # one tuple of 0/1 ints per measure_all
    rendered: bytes  # '0'/'1' lines, LF endings, trailing LF
    seed: int
    prng: str


def _sample(state: QuantumState, stream: RandomStream) -> tuple:
    """Draw one basis index from the Born distribution."""
    if not state.prepared:
        raise JaqalError.at(
            "UNPREPARED_GATE", "measurement of an unprepared state"
        )
    draw = stream.next_double()
    cumulative = np.cumsum(np.abs(state.amplitudes) ** 2)
    index = int(np.searchsorted(cumulative, draw, side="right"))
    if index >= state.amplitudes.size:
        index = state.amplitudes.size - 1
    state.prepared = False
    return tuple((index >> i) & 1 for i in range(state.num_qubits))


def render_records(records) -> bytes:
    text = "".join(
        "".join("1" if bit else "0" for bit in record) + "\n"
        for record in records
    )
    return text.encode("ascii")


def run_schedule(
    schedule: Schedule,
    library: GateLibrary,
    seed: int = 0,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> RunOutput:
    """Execute every slice in order and collect measurement records."""
    n = schedule.register_size
    if n > max_qubits:
        raise JaqalError.at(
            "REGISTER_TOO_LARGE",
            f"a register of {n} qubits exceeds the maximum of {max_qubits}",
        )
    stream = RandomStream(seed)
    state = QuantumState(n)
    records = []
    for time_slice in schedule.slices:
        for entry in time_slice.entries:
            signature = library.signature(entry.gate.gate_name)
            if signature.is_prepare:
                state.prepare()
            elif signature.is_measure:
                records.append(_sample(state, stream))
            elif signature.is_idle:
                continue
            else:
                matrix = library.unitary(
                    entry.gate.gate_name, entry.gate.numeric_args
                )
                state.apply(matrix, entry.gate.qubits)
    return RunOutput(
        tuple(records), render_records(records), stream.seed, ALGORITHM_NAME
    )
