"""Exhaustive checks of the arithmetic builders against integer semantics.

Each builder runs over every operand value via the bit-sliced evaluator; the
expected values come straight from Python integer arithmetic.
"""

import random

import numpy as np
import pytest

from cvrptw_gas.circuit import (
    Circuit,
    CircuitError,
    count_resources,
    enumeration_columns,
    eval_basis_batch,
    inverse,
    register_values,
)
from cvrptw_gas.qarith import (
    build_add_const,
    build_adder,
    build_and_reduce,
    build_conditional_encoder,
    build_leq_const,
    build_leq_register,
    build_lt_const,
    build_lt_register,
    build_max_with_const,
    build_pair_neq,
)


def run_exhaustive(host: Circuit, block: Circuit, input_bits: int):
    """Evaluate a block over all assignments of the first ``input_bits`` qubits."""
    count = 1 << input_bits
    cols = enumeration_columns(input_bits) + [0] * (host.qubit_count - input_bits)
    return eval_basis_batch(block, cols, count), count


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5])
def test_adder_exhaustive(width):
    host = Circuit()
    a = host.add_register("a", width)
    b = host.add_register("b", width)
    anc = host.add_register("anc", 1)
    z = host.add_register("z", 1)
    block = build_adder(a, b, anc, carry_out=z.qubit(0), qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, block, 2 * width)
    idx = np.arange(count)
    a_in, b_in = idx & ((1 << width) - 1), idx >> width
    assert (register_values(out, a, count) == a_in).all()
    assert (register_values(out, b, count) == (a_in + b_in) % (1 << width)).all()
    assert (register_values(out, z, count) == (a_in + b_in) // (1 << width)).all()
    assert (register_values(out, anc, count) == 0).all()


def test_adder_small_cases():
    host = Circuit()
    a = host.add_register("a", 4)
    b = host.add_register("b", 4)
    anc = host.add_register("anc", 1)
    block = build_adder(a, b, anc, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, block, 8)
    bv = register_values(out, b, count)
    assert bv[3 | (5 << 4)] == 8  # 3 + 5
    host3 = Circuit()
    a3 = host3.add_register("a", 3)
    b3 = host3.add_register("b", 3)
    anc3 = host3.add_register("anc", 1)
    blk3 = build_adder(a3, b3, anc3, qubit_count=host3.qubit_count)
    out3, count3 = run_exhaustive(host3, blk3, 6)
    assert register_values(out3, b3, count3)[5 | (6 << 3)] == 3  # 5 + 6 mod 8


def test_adder_width_mismatch():
    host = Circuit()
    a = host.add_register("a", 3)
    b = host.add_register("b", 4)
    anc = host.add_register("anc", 1)
    with pytest.raises(CircuitError, match="equal widths"):
        build_adder(a, b, anc)


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5])
def test_add_const_exhaustive(width):
    for k in range(1 << width):
        host = Circuit()
        b = host.add_register("b", width)
        anc = host.add_register("anc", width + 1)
        block = build_add_const(b, k, anc, qubit_count=host.qubit_count)
        if k == 0:
            assert block.gates == []
        out, count = run_exhaustive(host, block, width)
        idx = np.arange(count)
        assert (register_values(out, b, count) == (idx + k) % (1 << width)).all()
        assert (register_values(out, anc, count) == 0).all()


def test_add_const_range_check():
    host = Circuit()
    b = host.add_register("b", 3)
    anc = host.add_register("anc", 4)
    with pytest.raises(CircuitError, match="fit"):
        build_add_const(b, 8, anc)


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5, 6])
def test_leq_and_lt_const_exhaustive(width):
    for k in range(1 << width):
        for build, op in ((build_leq_const, np.less_equal), (build_lt_const, np.less)):
            host = Circuit()
            a = host.add_register("a", width)
            anc = host.add_register("anc", width + 1)
            flag = host.add_register("flag", 1)
            block = build(a, k, flag.qubit(0), anc, qubit_count=host.qubit_count)
            out, count = run_exhaustive(host, block, width)
            idx = np.arange(count)
            assert (register_values(out, flag, count) == op(idx, k)).all(), (build.__name__, width, k)
            assert (register_values(out, a, count) == idx).all(), "operand modified"
            assert (register_values(out, anc, count) == 0).all()


def test_comparator_boundaries():
    host = Circuit()
    a = host.add_register("a", 3)
    anc = host.add_register("anc", 4)
    flag = host.add_register("flag", 1)
    lt5 = build_lt_const(a, 5, flag.qubit(0), anc, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, lt5, 3)
    fv = register_values(out, flag, count)
    assert fv[5] == 0 and fv[4] == 1  # strictness at the boundary
    assert build_lt_const(a, 0, flag.qubit(0), anc, qubit_count=host.qubit_count).gates == []
    always = build_lt_const(a, 8, flag.qubit(0), anc, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, always, 3)
    assert register_values(out, flag, count).all()


@pytest.mark.parametrize("width", [2, 3, 4, 5])
def test_max_with_const_exhaustive(width):
    for k in range(1 << width):
        host = Circuit()
        t = host.add_register("t", width)
        anc = host.add_register("anc", 2 * width + 1)
        choice = host.add_register("choice", 1)
        block = build_max_with_const(t, k, choice.qubit(0), anc, qubit_count=host.qubit_count)
        out, count = run_exhaustive(host, block, width)
        idx = np.arange(count)
        assert (register_values(out, t, count) == np.maximum(idx, k)).all()
        assert (register_values(out, choice, count) == (idx < k)).all()
        # spill holds the displaced value exactly when the choice flag fired
        spill = register_values(out, anc.slice(width, width), count)
        assert (spill == np.where(idx < k, idx, 0)).all()
        assert (register_values(out, anc.slice(0, width), count) == 0).all()


def test_max_small_cases():
    host = Circuit()
    t = host.add_register("t", 4)
    anc = host.add_register("anc", 9)
    choice = host.add_register("choice", 1)
    block = build_max_with_const(t, 7, choice.qubit(0), anc, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, block, 4)
    tv = register_values(out, t, count)
    cv = register_values(out, choice, count)
    assert tv[3] == 7 and cv[3] == 1
    assert tv[9] == 9 and cv[9] == 0


@pytest.mark.parametrize("idx_width", [2, 3, 4])
def test_conditional_encoder_exhaustive(idx_width):
    rng = random.Random(idx_width)
    out_width = 4
    table = [rng.randrange(1 << out_width) for _ in range(1 << idx_width)]
    host = Circuit()
    idx_reg = host.add_register("idx", idx_width)
    out_reg = host.add_register("out", out_width)
    block = build_conditional_encoder(idx_reg, table, out_reg, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, block, idx_width)
    assert (register_values(out, out_reg, count) == np.array(table)).all()
    assert (register_values(out, idx_reg, count) == np.arange(count)).all()
    # gate budget: one MCX of arity idx_width per set table bit
    rep = count_resources(block)
    popcount = sum(bin(v).count("1") for v in table)
    assert rep.gate_total == popcount
    assert set(rep.mcx_by_arity) <= {idx_width}


def test_encoder_zero_table_is_identity():
    host = Circuit()
    idx_reg = host.add_register("idx", 3)
    out_reg = host.add_register("out", 3)
    assert build_conditional_encoder(idx_reg, [0] * 8, out_reg).gates == []


def test_encoder_demand_lookup(example6):
    # demand table over position codes: code 4 encodes customer 4, demand 3
    host = Circuit()
    idx_reg = host.add_register("idx", 3)
    out_reg = host.add_register("out", 3)
    table = [0] + list(example6.q[1:]) + [0]
    block = build_conditional_encoder(idx_reg, table, out_reg, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, block, 3)
    assert register_values(out, out_reg, count)[4] == 3


def test_encoder_value_overflow():
    host = Circuit()
    idx_reg = host.add_register("idx", 2)
    out_reg = host.add_register("out", 2)
    with pytest.raises(CircuitError, match="fit"):
        build_conditional_encoder(idx_reg, [0, 4], out_reg)


@pytest.mark.parametrize("width", [1, 2, 3, 4])
def test_pair_neq_exhaustive(width):
    host = Circuit()
    a = host.add_register("a", width)
    b = host.add_register("b", width)
    anc = host.add_register("anc", width)
    flag = host.add_register("flag", 1)
    block = build_pair_neq(a, b, flag.qubit(0), anc, qubit_count=host.qubit_count)
    out, count = run_exhaustive(host, block, 2 * width)
    idx = np.arange(count)
    a_in, b_in = idx & ((1 << width) - 1), idx >> width
    assert (register_values(out, flag, count) == (a_in != b_in)).all()
    assert (register_values(out, a, count) == a_in).all()
    assert (register_values(out, b, count) == b_in).all()
    assert (register_values(out, anc, count) == 0).all()


@pytest.mark.parametrize("flags", [1, 2, 4, 8])
def test_and_reduce_exhaustive(flags):
    host = Circuit()
    f = host.add_register("f", flags)
    out = host.add_register("out", 1)
    block = build_and_reduce(list(f.qubits()), out.qubit(0), qubit_count=host.qubit_count)
    res, count = run_exhaustive(host, block, flags)
    expected = np.arange(count) == count - 1  # only the all-ones pattern
    assert (register_values(res, out, count) == expected).all()


def test_and_reduce_rejects_empty():
    with pytest.raises(CircuitError):
        build_and_reduce([], 0)


@pytest.mark.parametrize("width", [2, 3])
def test_register_comparators_exhaustive(width):
    for build, op in ((build_lt_register, np.less), (build_leq_register, np.less_equal)):
        host = Circuit()
        a = host.add_register("a", width)
        b = host.add_register("b", width)
        seed = host.add_register("seed", 1)
        flag = host.add_register("flag", 1)
        block = build(a, b, flag.qubit(0), seed, qubit_count=host.qubit_count)
        out, count = run_exhaustive(host, block, 2 * width)
        idx = np.arange(count)
        a_in, b_in = idx & ((1 << width) - 1), idx >> width
        assert (register_values(out, flag, count) == op(a_in, b_in)).all(), build.__name__
        assert (register_values(out, a, count) == a_in).all()
        assert (register_values(out, b, count) == b_in).all()
        assert (register_values(out, seed, count) == 0).all()


def test_every_builder_mirrors_to_identity():
    """Composing any block with its inverse is the identity on all inputs."""
    host = Circuit()
    a = host.add_register("a", 3)
    b = host.add_register("b", 3)
    anc = host.add_register("anc", 7)
    flag = host.add_register("flag", 1)
    qc = host.qubit_count
    blocks = [
        build_adder(a, b, anc, qubit_count=qc),
        build_add_const(b, 5, anc, qubit_count=qc),
        build_leq_const(a, 4, flag.qubit(0), anc, qubit_count=qc),
        build_max_with_const(a, 6, flag.qubit(0), anc, qubit_count=qc),
        build_pair_neq(a, b, flag.qubit(0), anc, qubit_count=qc),
        build_conditional_encoder(a, [1, 3, 0, 7, 2, 2, 4, 5], b, qubit_count=qc),
    ]
    total_bits = qc
    for block in blocks:
        roundtrip = Circuit(qubit_count=qc, gates=block.gates + inverse(block).gates)
        cols = enumeration_columns(10) + [0] * (total_bits - 10)
        out = eval_basis_batch(roundtrip, cols, 1 << 10)
        assert out[:10] == cols[:10]
        assert all(col == 0 for col in out[10:])
