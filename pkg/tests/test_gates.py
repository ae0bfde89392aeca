"""Gate library tests.

Unitaries are verified against an independent oracle: scipy.linalg.expm
applied to locally constructed Pauli generators. The library itself
never goes through expm, so agreement within 1e-12 is meaningful.
"""

import json
import math

import numpy as np
import pytest
import scipy.linalg

from jaqal_toolchain.diagnostics import JaqalError
from jaqal_toolchain.gates import (
    UNITARITY_TOLERANCE,
    builtin_library,
    load_gatedefs,
)
from jaqal_toolchain.prng import RandomStream

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

MATRIX_TOLERANCE = 1e-12


def random_angles(count, seed=2024):
    stream = RandomStream(seed)
    return [(stream.next_double() * 6.0 - 2.0) * math.pi for _ in range(count)]


def assert_close(actual, expected, tolerance=MATRIX_TOLERANCE):
    deviation = np.abs(np.asarray(actual) - np.asarray(expected)).max()
    assert deviation <= tolerance, f"max deviation {deviation:.3e}"


@pytest.fixture(scope="module")
def library():
    return builtin_library()


# -- closed forms against the expm oracle -----------------------------------


def test_equatorial_rotation_matches_expm(library):
    angles = random_angles(40)
    for axis_angle, rotation in zip(angles[::2], angles[1::2]):
        generator = math.cos(axis_angle) * X + math.sin(axis_angle) * Y
        expected = scipy.linalg.expm(-0.5j * rotation * generator)
        assert_close(library.unitary("R", [axis_angle, rotation]), expected)


def test_z_rotation_matches_expm(library):
    for rotation in random_angles(20):
        expected = scipy.linalg.expm(-0.5j * rotation * Z)
        assert_close(library.unitary("Rz", [rotation]), expected)


def test_ms_gate_matches_expm(library):
    angles = random_angles(40, seed=55)
    for axis_angle, rotation in zip(angles[::2], angles[1::2]):
        generator = math.cos(axis_angle) * X + math.sin(axis_angle) * Y
        expected = scipy.linalg.expm(-0.5j * rotation * np.kron(generator, generator))
        assert_close(library.unitary("MS", [axis_angle, rotation]), expected)


def test_axis_rotations_are_r_specializations(library):
    for rotation in random_angles(10, seed=7):
        assert_close(
            library.unitary("Rx", [rotation]),
            library.unitary("R", [0.0, rotation]),
        )
        assert_close(
            library.unitary("Ry", [rotation]),
            library.unitary("R", [math.pi / 2, rotation]),
        )


def test_fixed_pulses_are_fixed_angle_rotations(library):
    half_pi = math.pi / 2
    cases = {
        "Px": ("R", [0.0, math.pi]),
        "Py": ("R", [half_pi, math.pi]),
        "Sx": ("R", [0.0, half_pi]),
        "Sy": ("R", [half_pi, half_pi]),
        "Sxd": ("R", [0.0, -half_pi]),
        "Syd": ("R", [half_pi, -half_pi]),
        "Pz": ("Rz", [math.pi]),
        "Sz": ("Rz", [half_pi]),
        "Szd": ("Rz", [-half_pi]),
    }
    for name, (base, args) in cases.items():
        assert_close(library.unitary(name), library.unitary(base, args))


def test_pauli_pulses_are_paulis_up_to_global_phase(library):
    assert_close(library.unitary("Px"), -1j * X)
    assert_close(library.unitary("Py"), -1j * Y)
    assert_close(library.unitary("Pz"), -1j * Z)


def test_square_root_pulses_invert_their_daggers(library):
    for name, dagger in (("Sx", "Sxd"), ("Sy", "Syd"), ("Sz", "Szd")):
        product = library.unitary(name) @ library.unitary(dagger)
        assert_close(product, I2)


def test_default_xx_gate_is_the_quarter_turn(library):
    assert_close(
        library.unitary("Sxx"), library.unitary("MS", [0.0, math.pi / 2])
    )
    expected = (np.eye(4) - 1j * np.kron(X, X)) / math.sqrt(2)
    assert_close(library.unitary("Sxx"), expected)


def test_literal_xx_variant_is_minus_i_xx():
    library = builtin_library(sxx_literal=True)
    assert_close(library.unitary("Sxx"), -1j * np.kron(X, X))


def test_every_gate_is_unitary_at_random_angles(library):
    angles = random_angles(60, seed=99)
    cursor = 0
    for name in library.names():
        signature = library.signature(name)
        args = angles[cursor : cursor + signature.num_angles]
        cursor = (cursor + signature.num_angles) % 40
        if signature.is_prepare or signature.is_measure:
            continue
        matrix = library.unitary(name, args)
        deviation = np.abs(
            matrix.conj().T @ matrix - np.eye(matrix.shape[0])
        ).max()
        assert deviation <= UNITARITY_TOLERANCE, name


# -- composed macros ---------------------------------------------------------


def phase_insensitive_overlap(u, v):
    dim = u.shape[0]
    return abs(np.trace(u.conj().T @ v)) / dim


def test_sy_then_px_composes_to_hadamard(library):
    composed = library.unitary("Px") @ library.unitary("Sy")
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    assert phase_insensitive_overlap(composed, hadamard) >= 1 - 1e-10


def test_standard_cnot_composition(library):
    # Control is the first argument, i.e. the most significant bit.
    on_control = lambda u: np.kron(u, I2)
    on_target = lambda u: np.kron(I2, u)
    composed = (
        on_control(library.unitary("Syd"))
        @ (np.kron(library.unitary("Sxd"), library.unitary("Sxd")))
        @ library.unitary("Sxx")
        @ on_control(library.unitary("Sy"))
    )
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=complex,
    )
    assert phase_insensitive_overlap(composed, cnot) >= 1 - 1e-10


# -- durations ----------------------------------------------------------------


def test_fixed_durations(library):
    assert library.duration("Px") == 1.0
    assert library.duration("Sy") == 1.0
    assert library.duration("Rz", [2.0]) == 0.0
    assert library.duration("Pz") == 0.0
    assert library.duration("MS", [0.0, 1.0]) == 10.0
    assert library.duration("Sxx") == 10.0
    assert library.duration("prepare_all") == 100.0
    assert library.duration("measure_all") == 100.0


def test_rotation_durations_scale_with_the_angle(library):
    half_pi = math.pi / 2
    assert library.duration("Rx", [half_pi]) == pytest.approx(1.0)
    assert library.duration("Rx", [0.1]) == pytest.approx(0.1 / half_pi)
    assert library.duration("Rx", [-math.pi]) == pytest.approx(2.0)
    assert library.duration("R", [0.7, math.pi]) == pytest.approx(2.0)
    assert library.duration("Ry", [0.0]) == 0.0


def test_idle_twins_mirror_durations(library):
    assert library.duration("I_Px") == library.duration("Px")
    assert library.duration("I_MS", [0.0, 1.0]) == library.duration(
        "MS", [0.0, 1.0]
    )
    assert library.duration("I_Rx", [0.1]) == library.duration("Rx", [0.1])


def test_idle_twins_are_identities(library):
    assert_close(library.unitary("I_Px"), I2)
    assert_close(library.unitary("I_Rx", [0.3]), I2)
    assert_close(library.unitary("I_Sxx"), np.eye(4))
    assert library.signature("I_Sxx").num_qubits == 2
    assert library.signature("I_Px").is_idle


def test_prepare_and_measure_have_no_idle_twins(library):
    assert not library.has("I_prepare_all")
    assert not library.has("I_measure_all")


def test_library_inventory(library):
    named = [
        name
        for name in library.names()
        if not name.startswith("I_")
        and name not in ("prepare_all", "measure_all")
    ]
    assert named == [
        "MS",
        "Px",
        "Py",
        "Pz",
        "R",
        "Rx",
        "Ry",
        "Rz",
        "Sx",
        "Sxd",
        "Sxx",
        "Sy",
        "Syd",
        "Sz",
        "Szd",
    ]
    assert len(named) == 15


# -- error paths ---------------------------------------------------------------


def test_unknown_gate_is_an_error(library):
    with pytest.raises(JaqalError) as info:
        library.unitary("Nope")
    assert info.value.diagnostic.code == "UNKNOWN_GATE"


def test_angle_count_is_checked(library):
    with pytest.raises(JaqalError) as info:
        library.unitary("Rx", [])
    assert info.value.diagnostic.code == "ANGLE_COUNT_MISMATCH"
    with pytest.raises(JaqalError):
        library.unitary("Px", [1.0])


def test_prepare_and_measure_have_no_unitaries(library):
    for name in ("prepare_all", "measure_all"):
        with pytest.raises(JaqalError) as info:
            library.unitary(name)
        assert info.value.diagnostic.code == "UNKNOWN_GATE"


# -- angle quantization ----------------------------------------------------------


def test_quantized_angles_snap_to_the_grid():
    library = builtin_library(quantize_angles=True)
    plain = builtin_library()
    step = 2.0 * math.pi / 2**40
    angle = 0.3
    snapped = round(angle / step) * step
    assert_close(
        library.unitary("Rx", [angle]), plain.unitary("Rx", [snapped])
    )


def test_grid_points_pass_through_quantization():
    library = builtin_library(quantize_angles=True)
    plain = builtin_library()
    step = 2.0 * math.pi / 2**40
    for k in (0, 1, 12345, 2**39):
        assert_close(
            library.unitary("Rz", [k * step]),
            plain.unitary("Rz", [k * step]),
            tolerance=1e-9,
        )


def test_quantization_error_is_bounded():
    # Angles stay inside one period; wrapping flips the global phase,
    # which is invisible to measurement but not to entrywise comparison.
    library = builtin_library(quantize_angles=True)
    plain = builtin_library()
    step = 2.0 * math.pi / 2**40
    stream = RandomStream(3)
    for _ in range(10):
        angle = 0.1 + stream.next_double() * (2.0 * math.pi - 0.2)
        deviation = np.abs(
            library.unitary("Rx", [angle]) - plain.unitary("Rx", [angle])
        ).max()
        assert deviation <= step


# -- gate-definition files ----------------------------------------------------------


GOOD_DEFS = {
    "gates": [
        {
            "name": "Hx",
            "params": ["qubit"],
            "duration": 2.5,
            "unitary": {
                "matrix": [
                    [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
                    [[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]],
                ]
            },
        },
        {
            "name": "SlowSx",
            "params": ["qubit"],
            "duration": 4.0,
            "unitary": {"builtin": "Sx"},
        },
        {
            "name": "Wait",
            "params": ["qubit"],
            "duration": 7.0,
            "unitary": {"identity": 2},
        },
    ]
}


def test_gatedefs_add_gates_over_the_builtins():
    library = load_gatedefs(GOOD_DEFS)
    assert library.has("Hx") and library.has("Sx")
    assert library.duration("Hx") == 2.5
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    assert_close(library.unitary("Hx"), hadamard)
    assert_close(library.unitary("SlowSx"), library.unitary("Sx"))
    assert library.duration("SlowSx") == 4.0
    assert library.signature("Wait").is_idle


def test_gatedefs_accept_json_text_and_bytes():
    text = json.dumps(GOOD_DEFS)
    assert load_gatedefs(text).has("Hx")
    assert load_gatedefs(text.encode()).has("Hx")


def test_gatedefs_load_from_a_file(tmp_path):
    path = tmp_path / "defs.json"
    path.write_text(json.dumps(GOOD_DEFS))
    assert load_gatedefs(path).has("Hx")
    assert load_gatedefs(str(path)).has("Hx")


def test_custom_gates_get_idle_twins():
    library = load_gatedefs(GOOD_DEFS)
    assert library.has("I_Hx")
    assert library.duration("I_Hx") == 2.5
    assert_close(library.unitary("I_Hx"), I2)


def gatedef_error(defs):
    with pytest.raises(JaqalError) as info:
        load_gatedefs(defs)
    return info.value.diagnostic.code


def entry(**fields):
    base = {
        "name": "G",
        "params": ["qubit"],
        "duration": 1.0,
        "unitary": {"identity": 2},
    }
    base.update(fields)
    return {"gates": [base]}


def test_gatedef_parse_errors():
    assert gatedef_error("{ not json") == "GATEDEF_PARSE_ERROR"
    assert gatedef_error({"gates": "x"}) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error({}) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error(entry(name="2x")) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error(entry(name="loop")) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error(entry(params=["spin"])) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error(entry(duration=-1.0)) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error(entry(duration=None)) == "GATEDEF_PARSE_ERROR"
    assert gatedef_error(entry(unitary={"wat": 1})) == "GATEDEF_PARSE_ERROR"
    assert (
        gatedef_error(entry(unitary={"builtin": "missing"}))
        == "GATEDEF_PARSE_ERROR"
    )
    assert gatedef_error(entry(unitary={"identity": 3})) == "GATEDEF_PARSE_ERROR"


def test_gatedef_arity_errors():
    identity4 = [
        [[1.0, 0.0] if i == j else [0.0, 0.0] for j in range(4)]
        for i in range(4)
    ]
    assert (
        gatedef_error(entry(unitary={"matrix": identity4}))
        == "GATEDEF_BAD_ARITY"
    )
    assert (
        gatedef_error(entry(params=["qubit", "angle"], unitary={"matrix": [
            [[1.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [1.0, 0.0]],
        ]}))
        == "GATEDEF_BAD_ARITY"
    )
    assert (
        gatedef_error(entry(params=["qubit"], unitary={"builtin": "Rx"}))
        == "GATEDEF_BAD_ARITY"
    )
    assert (
        gatedef_error(entry(params=["qubit", "qubit", "qubit"]))
        == "GATEDEF_BAD_ARITY"
    )
    assert (
        gatedef_error(entry(params=["qubit", "qubit"], unitary={"identity": 2}))
        == "GATEDEF_BAD_ARITY"
    )


def test_gatedef_nonunitary_matrix_is_rejected():
    bad = entry(
        unitary={
            "matrix": [
                [[1.0, 0.0], [0.0, 0.0]],
                [[0.0, 0.0], [0.5, 0.0]],
            ]
        }
    )
    assert gatedef_error(bad) == "GATEDEF_NONUNITARY"
