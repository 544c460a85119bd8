import cmath
import json
import math
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfactor.compiler import (
    CNOT,
    NCPHASE,
    RZ,
    Circuit,
    Gate,
    H,
    UnloweredGateError,
    X,
    assemble_search,
    circuit_from_dict,
    circuit_to_dict,
    compile_phase_oracle,
    compile_zero_phase,
    export_qasm,
    lower,
)
from qfactor.hamiltonian import ZHamiltonian, diagonal
from qfactor.searchplan import plan
from qfactor.simulator import StateVector, circuit_unitary, run

GOLDEN = Path(__file__).parent / "golden"


def exact_oracle(h, theta):
    return np.diag(np.exp(-1j * theta * diagonal(h).eigenvalues))


def test_two_qubit_oracle_gates(biprime_4088459):
    c = compile_phase_oracle(biprime_4088459.hamiltonian, math.pi / 2)
    assert c.gates == [CNOT(0, 1), RZ(-math.pi / 2, 1), CNOT(0, 1)]
    assert c.global_phase == pytest.approx(-math.pi / 4)


def test_three_term_oracle_order(triprime_175):
    theta = 1.1
    c = compile_phase_oracle(triprime_175.hamiltonian, theta)
    assert [g.kind for g in c.gates] == ["RZ", "RZ", "CNOT", "RZ", "CNOT"]
    assert c.gates[0] == RZ(-theta / 2, 0) and c.gates[1] == RZ(-theta / 2, 1)
    assert c.gates[3] == RZ(theta / 2, 1)
    assert c.global_phase == pytest.approx(-theta / 4)


def test_zero_hamiltonian_compiles_to_nothing():
    c = compile_phase_oracle(ZHamiltonian(3), 0.7)
    assert c.gates == [] and c.global_phase == 0


def test_ladder_targets_highest_qubit():
    c = compile_phase_oracle(ZHamiltonian(4, {0b1011: F(1)}), 0.3)
    assert c.gates == [CNOT(0, 2), CNOT(2, 3), RZ(0.6, 3), CNOT(2, 3), CNOT(0, 2)]


@pytest.mark.parametrize("n, mu", [(2, math.pi / 2), (4, 3 * 0.7), (1, 0.0), (3, -1.3)])
def test_zero_phase(n, mu):
    U = circuit_unitary(compile_zero_phase(n, mu))
    expected = np.eye(1 << n, dtype=complex)
    expected[0, 0] = cmath.exp(1j * mu)
    assert np.allclose(U, expected, atol=1e-12)


def test_search_structure(biprime_4088459, biprime_966887):
    c = assemble_search(biprime_4088459.hamiltonian, plan(biprime_4088459.spectrum))
    kinds = [g.kind for g in c.gates]
    assert kinds == ["H", "H", "CNOT", "RZ", "CNOT", "H", "H", "X", "X", "NCPHASE", "X", "X", "H", "H"]
    paper = assemble_search(biprime_966887.hamiltonian, plan(biprime_966887.spectrum, "paper"))
    exact = assemble_search(biprime_966887.hamiltonian, plan(biprime_966887.spectrum))
    assert paper.count_ops()["NCPHASE"] == 1 and exact.count_ops()["NCPHASE"] == 2


def test_plan_size_must_match(biprime_4088459, biprime_966887):
    with pytest.raises(ValueError):
        assemble_search(biprime_4088459.hamiltonian, plan(biprime_966887.spectrum))


def test_lower_single_control_is_cphase():
    c = lower(Circuit(2, [NCPHASE(0.4, [0], 1)]))
    assert [g.kind for g in c.gates] == ["CPHASE"] and c.gates[0].angle == 0.4


def test_lower_three_controls_matches_dense_matrix():
    mu = 1.234
    c = lower(Circuit(4, [NCPHASE(mu, [0, 1, 2], 3)]))
    assert c.is_lowered()
    expected = np.eye(16, dtype=complex)
    expected[15, 15] = cmath.exp(1j * mu)
    assert np.abs(circuit_unitary(c) - expected).max() < 1e-10


def test_lowered_search_reaches_same_state(biprime_4088459):
    c = assemble_search(biprime_4088459.hamiltonian, plan(biprime_4088459.spectrum))
    a, b = run(c), run(lower(c))
    assert abs(abs(a.overlap(b)) - 1) < 1e-10


def test_relative_phase_table(biprime_966887):
    theta = 0.37
    U = circuit_unitary(compile_phase_oracle(biprime_966887.hamiltonian, theta))
    rel = np.angle(np.diag(U) / U[0, 0]) / theta
    pattern = {}
    for b, r in enumerate(np.round(rel).astype(int)):
        pattern.setdefault(int(r), []).append(format(b, "04b"))
    assert np.allclose(rel, np.round(rel), atol=1e-9)
    assert {k: len(v) for k, v in pattern.items()} == {0: 8, 3: 2, -1: 6}
    assert pattern[3] == ["0111", "1000"]


z_hamiltonians = st.integers(1, 6).flatmap(
    lambda n: st.builds(
        lambda terms: ZHamiltonian(n, terms),
        st.dictionaries(st.integers(0, (1 << n) - 1), st.fractions(-5, 5, max_denominator=8), max_size=12),
    )
)


@settings(max_examples=100)
@given(z_hamiltonians, st.floats(-7, 7))
def test_oracle_equals_exact_diagonal(h, theta):
    U = circuit_unitary(compile_phase_oracle(h, theta))
    assert np.abs(U - exact_oracle(h, theta)).max() < 1e-10


@settings(max_examples=40)
@given(st.integers(1, 6), st.floats(-7, 7), st.integers(0, 2**32 - 1))
def test_lowering_preserves_action(n, mu, seed):
    c = compile_zero_phase(n, mu)
    c.append(H(0))
    c.extend(compile_zero_phase(n, -mu / 3))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi = StateVector(n, v / np.linalg.norm(v))
    assert abs(abs(run(c, psi).overlap(run(lower(c), psi))) - 1) < 1e-10


def test_qasm_golden(biprime_4088459):
    c = lower(assemble_search(biprime_4088459.hamiltonian, plan(biprime_4088459.spectrum)))
    assert export_qasm(c) == (GOLDEN / "4088459.qasm").read_text()


def test_qasm_empty_circuit():
    text = export_qasm(Circuit(3))
    assert text.splitlines()[-2:] == ["qreg q[3];", "creg c[3];"]
    assert "global phase dropped: 0 rad" in text


def test_qasm_angles_have_twelve_digits(triprime_175):
    c = lower(assemble_search(triprime_175.hamiltonian, plan(triprime_175.spectrum)))
    # theta / 2 = asin(1 / sqrt(3)) = 0.61547970867038...; %.12g drops the trailing zero
    assert "rz(-0.61547970867) q[0];" in export_qasm(c)


def test_qasm_requires_lowering():
    with pytest.raises(UnloweredGateError):
        export_qasm(compile_zero_phase(3, 1.0))


def test_circuit_json_round_trip(biprime_966887):
    c = assemble_search(biprime_966887.hamiltonian, plan(biprime_966887.spectrum))
    back = circuit_from_dict(json.loads(json.dumps(circuit_to_dict(c))))
    assert back == c


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValueError):
        Gate("RZ", (0, 1), 0.1)
    with pytest.raises(ValueError):
        Circuit(2, [X(2)])
