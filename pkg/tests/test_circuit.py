"""Circuit IR, evaluators, inversion, and resource counting."""

import random

import numpy as np
import pytest

from cvrptw_gas.circuit import (
    Circuit,
    CircuitError,
    count_resources,
    enumeration_columns,
    eval_basis,
    eval_basis_batch,
    eval_basis_int,
    eval_statevector,
    inverse,
    register_values,
)


def random_permutation_circuit(rng, qubits, gates):
    c = Circuit(qubit_count=qubits)
    for _ in range(gates):
        kind = rng.choice(("x", "mcx", "mcx"))
        target = rng.randrange(qubits)
        if kind == "x":
            c.x(target)
        else:
            arity = rng.randint(1, min(3, qubits - 1))
            pool = [q for q in range(qubits) if q != target]
            controls = [(q, rng.random() < 0.5) for q in rng.sample(pool, arity)]
            c.mcx(controls, target)
    return c


def test_empty_circuit_is_identity():
    c = Circuit(qubit_count=4)
    assert eval_basis(c, "0110") == "0110"


def test_x_flips_leftmost_convention():
    c = Circuit(qubit_count=4)
    c.x(0)
    assert eval_basis(c, "0000") == "1000"


def test_toffoli_truth_table():
    c = Circuit(qubit_count=3)
    c.ccx(0, 1, 2)
    assert eval_basis(c, "110") == "111"
    assert eval_basis(c, "100") == "100"
    assert eval_basis(c, "111") == "110"


def test_negative_controls():
    c = Circuit(qubit_count=2)
    c.mcx([(0, False)], 1)
    assert eval_basis(c, "00") == "01"
    assert eval_basis(c, "10") == "10"


def test_basis_eval_rejects_h():
    c = Circuit(qubit_count=1)
    c.h(0)
    with pytest.raises(CircuitError, match="permutation"):
        eval_basis(c, "0")


def test_gate_validation():
    c = Circuit(qubit_count=2)
    with pytest.raises(CircuitError):
        c.x(5)
    with pytest.raises(CircuitError):
        c.mcx([(0, True), (0, False)], 1)
    with pytest.raises(CircuitError):
        c.mcx([(1, True)], 1)


def test_inverse_reverses_gates():
    c = Circuit(qubit_count=2)
    c.x(0)
    c.cx(0, 1)
    inv = inverse(c)
    assert [g.kind for g in inv.gates] == ["mcx", "x"]
    assert inverse(inverse(c)).gates == c.gates
    assert inverse(Circuit(qubit_count=1)).gates == []


def test_inverse_composition_is_identity():
    rng = random.Random(11)
    for _ in range(1000):
        c = random_permutation_circuit(rng, 12, rng.randint(1, 30))
        state = rng.getrandbits(12)
        roundtrip = Circuit(qubit_count=12, gates=c.gates + inverse(c).gates)
        assert eval_basis_int(roundtrip, state) == state


def test_permutation_circuits_are_bijections():
    rng = random.Random(5)
    for qubits in (8, 12, 16):
        c = random_permutation_circuit(rng, qubits, 60)
        n_states = 1 << qubits
        out = eval_basis_batch(c, enumeration_columns(qubits), n_states)
        images = np.zeros(n_states, dtype=np.int64)
        for j in range(qubits):
            from cvrptw_gas.circuit import column_bits

            images |= column_bits(out[j], n_states).astype(np.int64) << j
        assert len(np.unique(images)) == n_states


def test_batch_matches_single_state_eval():
    rng = random.Random(3)
    c = random_permutation_circuit(rng, 10, 40)
    states = [rng.getrandbits(10) for _ in range(50)]
    from cvrptw_gas.circuit import columns_from_indices

    cols = columns_from_indices(np.array(states), 10)
    out = eval_basis_batch(c, cols, len(states))
    for s_i, state in enumerate(states):
        expected = eval_basis_int(c, state)
        got = sum(((out[j] >> s_i) & 1) << j for j in range(10))
        assert got == expected


def test_statevector_hadamard():
    c = Circuit(qubit_count=1)
    c.h(0)
    out = eval_statevector(c, np.array([1, 0], dtype=complex))
    assert np.allclose(out, [2**-0.5, 2**-0.5], atol=1e-12)


def test_statevector_x():
    c = Circuit(qubit_count=1)
    c.x(0)
    out = eval_statevector(c, np.array([1, 0], dtype=complex))
    assert np.allclose(out, [0, 1], atol=1e-12)


def test_statevector_h_self_inverse():
    c = Circuit(qubit_count=1)
    c.h(0)
    c.h(0)
    out = eval_statevector(c, np.array([1, 0], dtype=complex))
    assert np.allclose(out, [1, 0], atol=1e-12)


def test_statevector_norm_and_cap_checks():
    c = Circuit(qubit_count=1)
    with pytest.raises(CircuitError, match="normalized"):
        eval_statevector(c, np.array([1, 1], dtype=complex))
    big = Circuit(qubit_count=27)
    with pytest.raises(CircuitError, match="capped"):
        eval_statevector(big, np.zeros(2**27, dtype=complex))


def test_statevector_agrees_with_basis_eval():
    rng = random.Random(9)
    for _ in range(20):
        qubits = rng.randint(2, 8)
        c = random_permutation_circuit(rng, qubits, 25)
        state = rng.getrandbits(qubits)
        amps = np.zeros(1 << qubits, dtype=complex)
        amps[state] = 1.0
        out = eval_statevector(c, amps)
        expected = eval_basis_int(c, state)
        assert abs(out[expected] - 1.0) < 1e-12
        assert abs(np.linalg.norm(out) - 1.0) < 1e-12


def test_count_resources_empty():
    rep = count_resources(Circuit(qubit_count=3))
    assert rep.gate_total == 0
    assert rep.mcx_by_arity == {}


def test_count_resources_tallies():
    c = Circuit(qubit_count=3)
    c.x(0)
    c.cx(0, 1)
    c.ccx(0, 1, 2)
    rep = count_resources(c)
    assert rep.gate_total == 3
    assert rep.x_count == 1
    assert rep.mcx_by_arity == {1: 1, 2: 1}
    assert rep.x_count + rep.h_count + rep.mcx_total == rep.gate_total


def test_register_values_roundtrip():
    c = Circuit()
    r = c.add_register("v", 4)
    cols = enumeration_columns(4)
    vals = register_values(cols, r, 16)
    assert list(vals) == list(range(16))


def test_dump_format():
    c = Circuit(qubit_count=8)
    c.mcx([(3, True), (5, False)], 7)
    c.x(0)
    assert c.dump().splitlines() == ["MCX c+3 c-5 t7", "X t0"]
