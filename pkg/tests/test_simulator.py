"""State-vector simulator tests.

Gate application is verified against an independent oracle that builds
the full 2^n x 2^n operator by explicit basis enumeration and applies
it with a plain matrix-vector product. The simulator's axis-shuffling
path never touches that code.
"""

import math

import numpy as np
import pytest

from jaqal_toolchain.diagnostics import JaqalError
from jaqal_toolchain.gates import builtin_library
from jaqal_toolchain.pipeline import process, run_source
from jaqal_toolchain.prng import RandomStream
from jaqal_toolchain.simulator import (
    QuantumState,
    render_records,
    run_schedule,
)

ORACLE_TOLERANCE = 1e-10


def embed(matrix, qubits, num_qubits):
    """Full-space operator for a k-qubit gate, built index by index.

    Qubit i is bit i of the basis index; the first listed qubit is the
    most significant bit of the small matrix's index.
    """
    dim = 2**num_qubits
    k = len(qubits)
    full = np.zeros((dim, dim), dtype=complex)
    for source in range(dim):
        bits = [(source >> q) & 1 for q in range(num_qubits)]
        small_in = 0
        for qubit in qubits:
            small_in = (small_in << 1) | bits[qubit]
        for small_out in range(2**k):
            out_bits = list(bits)
            for position, qubit in enumerate(qubits):
                out_bits[qubit] = (small_out >> (k - 1 - position)) & 1
            target = sum(bit << q for q, bit in enumerate(out_bits))
            full[target, source] += matrix[small_out, small_in]
    return full


def schedule_of(source):
    outcome = process(source)
    assert outcome.ok, [d.code for d in outcome.diagnostics]
    return outcome.schedule


# -- state mechanics -----------------------------------------------------------


def test_prepare_resets_to_the_ground_state():
    state = QuantumState(2)
    state.prepare()
    assert state.amplitudes[0] == 1
    assert np.count_nonzero(state.amplitudes) == 1
    state.apply(builtin_library().unitary("Px"), [0])
    state.prepare()
    assert state.amplitudes[0] == 1
    assert np.count_nonzero(state.amplitudes) == 1


def test_gates_demand_a_prepared_state():
    state = QuantumState(1)
    with pytest.raises(JaqalError) as info:
        state.apply(np.eye(2), [0])
    assert info.value.diagnostic.code == "UNPREPARED_GATE"
    with pytest.raises(JaqalError):
        state.probabilities()


def test_dimension_checks():
    state = QuantumState(2)
    state.prepare()
    with pytest.raises(JaqalError) as info:
        state.apply(np.eye(2), [0, 1])
    assert info.value.diagnostic.code == "DIMENSION_MISMATCH"
    with pytest.raises(JaqalError):
        state.apply(np.eye(4), [0, 0])
    with pytest.raises(JaqalError):
        state.apply(np.eye(2), [2])


def test_nonunitary_matrices_are_caught_by_norm_drift():
    state = QuantumState(1)
    state.prepare()
    with pytest.raises(JaqalError) as info:
        state.apply(np.array([[0.5, 0], [0, 0.5]]), [0])
    assert info.value.diagnostic.code == "NONUNITARY"


# -- bit order and phases --------------------------------------------------------


def test_qubit_index_is_the_bit_position():
    library = builtin_library()
    for qubit in range(3):
        state = QuantumState(3)
        state.prepare()
        state.apply(library.unitary("Px"), [qubit])
        index = int(np.argmax(np.abs(state.amplitudes)))
        assert index == 1 << qubit


def test_pauli_pulse_keeps_its_global_phase():
    state = QuantumState(1)
    state.prepare()
    state.apply(builtin_library().unitary("Px"), [0])
    assert abs(state.amplitudes[1] - (-1j)) < 1e-15


def test_xx_gate_entangles_the_ground_state():
    state = QuantumState(2)
    state.prepare()
    state.apply(builtin_library().unitary("Sxx"), [0, 1])
    expected = np.array([1, 0, 0, -1j]) / math.sqrt(2)
    assert np.abs(state.amplitudes - expected).max() < 1e-15


def test_two_qubit_argument_order_matters():
    library = builtin_library()
    asym = library.unitary("MS", [0.4, 0.9])
    first = QuantumState(2)
    first.prepare()
    first.apply(library.unitary("Px"), [0])
    first.apply(asym, [0, 1])
    second = QuantumState(2)
    second.prepare()
    second.apply(library.unitary("Px"), [0])
    second.apply(asym, [1, 0])
    # MS is symmetric, so force asymmetry with a controlled-ish compose.
    probe = embed(asym, [0, 1], 2) @ embed(
        library.unitary("Px"), [0], 2
    )
    flipped = embed(asym, [1, 0], 2) @ embed(
        library.unitary("Px"), [0], 2
    )
    assert np.abs(first.amplitudes - probe[:, 0]).max() < ORACLE_TOLERANCE
    assert np.abs(second.amplitudes - flipped[:, 0]).max() < ORACLE_TOLERANCE


def test_probabilities_of_simple_states():
    library = builtin_library()
    state = QuantumState(2)
    state.prepare()
    assert np.allclose(state.probabilities(), [1, 0, 0, 0])
    state.apply(library.unitary("Sx"), [0])
    assert np.allclose(state.probabilities(), [0.5, 0.5, 0, 0])


# -- random-circuit agreement with the oracle -------------------------------------

GATE_MENU = [
    ("R", 1, 2),
    ("Rx", 1, 1),
    ("Ry", 1, 1),
    ("Rz", 1, 1),
    ("Px", 1, 0),
    ("Py", 1, 0),
    ("Sx", 1, 0),
    ("Syd", 1, 0),
    ("MS", 2, 2),
    ("Sxx", 2, 0),
]


def random_circuit(stream, num_qubits, length):
    circuit = []
    for _ in range(length):
        name, qubit_count, angle_count = GATE_MENU[
            stream.next_word() % len(GATE_MENU)
        ]
        qubits = []
        while len(qubits) < qubit_count:
            qubit = stream.next_word() % num_qubits
            if qubit not in qubits:
                qubits.append(qubit)
        angles = [
            (stream.next_double() - 0.5) * 4.0 * math.pi
            for _ in range(angle_count)
        ]
        circuit.append((name, qubits, angles))
    return circuit


def test_random_circuits_match_the_oracle():
    library = builtin_library()
    stream = RandomStream(414243)
    for _ in range(12):
        circuit = random_circuit(stream, 3, 10)
        state = QuantumState(3)
        state.prepare()
        vector = np.zeros(8, dtype=complex)
        vector[0] = 1
        for name, qubits, angles in circuit:
            matrix = library.unitary(name, angles)
            state.apply(matrix, qubits)
            vector = embed(matrix, qubits, 3) @ vector
        assert np.abs(state.amplitudes - vector).max() < ORACLE_TOLERANCE


def test_norm_is_conserved_through_long_circuits():
    library = builtin_library()
    stream = RandomStream(777)
    state = QuantumState(4)
    state.prepare()
    for name, qubits, angles in random_circuit(stream, 4, 200):
        state.apply(library.unitary(name, angles), qubits)
    assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10


# -- whole-schedule runs ------------------------------------------------------------


def test_deterministic_states_measure_deterministically():
    schedule = schedule_of(
        "register q[2]\nprepare_all\nPx q[1]\nmeasure_all\n"
    )
    output = run_schedule(schedule, builtin_library(), seed=5)
    assert output.records == ((0, 1),)
    assert output.rendered == b"01\n"


def test_record_count_matches_measure_count(corpus_dir):
    expectations = {"bell_loop.jaqal": 1024, "gst.jaqal": 9}
    for name, count in expectations.items():
        outcome = process((corpus_dir / name).read_bytes())
        output = run_schedule(outcome.schedule, builtin_library(), seed=1)
        assert len(output.records) == count, name


def test_runs_are_reproducible_and_seed_sensitive():
    source = (
        "register q[1]\n"
        "loop 64 { prepare_all; Sx q[0]; measure_all }\n"
    )
    schedule = schedule_of(source)
    library = builtin_library()
    first = run_schedule(schedule, library, seed=11)
    again = run_schedule(schedule, library, seed=11)
    other = run_schedule(schedule, library, seed=12)
    assert first.records == again.records
    assert first.rendered == again.rendered
    assert first.records != other.records


def test_one_draw_per_measurement():
    # A fair coin measured 8 times must reproduce the PRNG's doubles.
    source = (
        "register q[1]\n"
        "loop 8 { prepare_all; Sx q[0]; measure_all }\n"
    )
    schedule = schedule_of(source)
    output = run_schedule(schedule, builtin_library(), seed=99)
    stream = RandomStream(99)
    expected = tuple(
        (1,) if stream.next_double() >= 0.5 else (0,) for _ in range(8)
    )
    assert output.records == expected


def test_virtual_and_idle_gates_do_not_disturb_the_state():
    base = schedule_of(
        "register q[1]\nprepare_all\nSx q[0]\nmeasure_all\n"
    )
    padded = schedule_of(
        "register q[1]\nprepare_all\nSx q[0]\nI_Px q[0]\nmeasure_all\n"
    )
    library = builtin_library()
    assert (
        run_schedule(base, library, seed=3).records
        == run_schedule(padded, library, seed=3).records
    )


def test_register_size_is_capped():
    outcome = process(
        "register q[17]\nprepare_all\nmeasure_all\n", max_qubits=17
    )
    assert outcome.ok
    schedule = outcome.schedule
    with pytest.raises(JaqalError) as info:
        run_schedule(schedule, builtin_library(), seed=0, max_qubits=16)
    assert info.value.diagnostic.code == "REGISTER_TOO_LARGE"
    run_schedule(schedule, builtin_library(), seed=0, max_qubits=17)


def test_rendering_is_ascii_bits():
    records = ((0, 1), (1, 1))
    assert render_records(records) == b"01\n11\n"


def test_macro_corpus_program_keeps_qubit_one_grounded(corpus_dir):
    # That program applies its controlled gate with the control still
    # in |0>, so qubit 1 never flips and qubit 0 is an even coin.
    outcome = process((corpus_dir / "bell_macro.jaqal").read_bytes())
    library = builtin_library()
    records = {
        run_schedule(outcome.schedule, library, seed=seed).records[0]
        for seed in range(64)
    }
    assert records == {(0, 0), (1, 0)}


def test_bell_pairs_correlate_perfectly():
    schedule = schedule_of(
        "register q[2]\nloop 64 { prepare_all; Sxx q[0] q[1]; measure_all }\n"
    )
    output = run_schedule(schedule, builtin_library(), seed=21)
    assert len(output.records) == 64
    assert set(output.records) == {(0, 0), (1, 1)}


def test_golden_bell_run(corpus_dir, golden_dir):
    outcome = process((corpus_dir / "bell_loop.jaqal").read_bytes())
    output = run_schedule(outcome.schedule, builtin_library(), seed=0)
    assert output.rendered == (golden_dir / "bell_loop_seed0.txt").read_bytes()


def test_run_source_wires_the_pipeline_together():
    output, outcome = run_source(
        "register q[2]\nprepare_all\nPx q[0]\nmeasure_all\n", seed=4
    )
    assert outcome.ok
    assert output.records == ((1, 0),)
    assert output.seed == 4
    assert "xoshiro256**" in output.prng
