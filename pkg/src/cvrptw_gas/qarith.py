"""Builders for the reversible arithmetic blocks the marking oracle needs.

Everything is built from the MAJ/UMA ripple-carry pieces of Cuccaro-style
addition, a per-index fan-out encoder, and plain multi-controlled X gates.
Each builder returns a standalone block circuit over absolute qubit indices
so blocks can be concatenated into a host circuit and mirrored for
uncomputation.

Ancilla conventions (widths the caller must provide, all returned to zero
unless noted):

* ``build_adder``           1 qubit (carry seed)
* ``build_add_const``       width + 1 (constant image + carry seed)
* ``build_leq_const``/``build_lt_const``  width + 1
* ``build_max_with_const``  2 * width + 1 (constant image + spill + seed);
  the spill slice keeps the overwritten register value whenever the choice
  flag fires -- that residue is information the overwrite cannot destroy, so
  only a mirrored uncompute can clear it.
* ``build_pair_neq``        width (xor scratch)
"""

from __future__ import annotations

from collections.abc import Sequence

from .circuit import Circuit, CircuitError, RegisterRef


def _blank(qubit_count: int | None, *refs: RegisterRef | int) -> Circuit:
    """Empty block circuit wide enough for every referenced qubit."""
    top = 0
    for r in refs:
        top = max(top, r + 1 if isinstance(r, int) else r.stop)
    return Circuit(qubit_count=max(qubit_count or 0, top))


def _maj(c: Circuit, x: int, y: int, z: int) -> None:
    c.cx(z, y)
    c.cx(z, x)
    c.ccx(x, y, z)


def _uma(c: Circuit, x: int, y: int, z: int) -> None:
    c.ccx(x, y, z)
    c.cx(z, x)
    c.cx(x, y)


def _maj_chain(c: Circuit, seed: int, carry_reg: RegisterRef, other: RegisterRef) -> None:
    """Ripple the carry of ``carry_reg + other`` into the top wire of carry_reg."""
    _maj(c, seed, other.qubit(0), carry_reg.qubit(0))
    for i in range(1, carry_reg.width):
        _maj(c, carry_reg.qubit(i - 1), other.qubit(i), carry_reg.qubit(i))


def _maj_chain_inverse(c: Circuit, seed: int, carry_reg: RegisterRef, other: RegisterRef) -> None:
    for i in range(carry_reg.width - 1, 0, -1):
        x, y, z = carry_reg.qubit(i - 1), other.qubit(i), carry_reg.qubit(i)
        c.ccx(x, y, z)
        c.cx(z, x)
        c.cx(z, y)
    x, y, z = seed, other.qubit(0), carry_reg.qubit(0)
    c.ccx(x, y, z)
    c.cx(z, x)
    c.cx(z, y)


def build_adder(
    a: RegisterRef,
    b: RegisterRef,
    ancilla: RegisterRef,
    *,
    carry_out: int | None = None,
    qubit_count: int | None = None,
) -> Circuit:
    """In-place modular addition ``b := (b + a) mod 2**width``; ``a`` is restored.

    ``ancilla`` supplies the carry seed (1 qubit, returned to zero). When
    ``carry_out`` is given, that qubit is XORed with the final carry, turning
    the modular sum into an exact two-part result.
    """
    if a.width != b.width:
        raise CircuitError("adder operands must have equal widths")
    extra = [carry_out] if carry_out is not None else []
    c = _blank(qubit_count, a, b, ancilla, *extra)
    seed = ancilla.qubit(0)
    _maj(c, seed, b.qubit(0), a.qubit(0))
    for i in range(1, a.width):
        _maj(c, a.qubit(i - 1), b.qubit(i), a.qubit(i))
    if carry_out is not None:
        c.cx(a.qubit(a.width - 1), carry_out)
    for i in range(a.width - 1, 0, -1):
        _uma(c, a.qubit(i - 1), b.qubit(i), a.qubit(i))
    _uma(c, seed, b.qubit(0), a.qubit(0))
    return c


def _load_const(c: Circuit, reg: RegisterRef, k: int) -> None:
    for j in range(reg.width):
        if (k >> j) & 1:
            c.x(reg.qubit(j))


def build_add_const(
    b: RegisterRef,
    k: int,
    ancilla: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``b := (b + k) mod 2**width`` for a classical addend.

    The constant is imaged into the ancilla (width + 1 qubits: value slice
    plus carry seed), added with the ripple adder, then cleared.
    """
    if not 0 <= k < (1 << b.width):
        raise CircuitError(f"constant {k} does not fit {b.width} bits")
    if ancilla.width < b.width + 1:
        raise CircuitError("constant adder needs width + 1 ancilla qubits")
    c = _blank(qubit_count, b, ancilla)
    if k == 0:
        return c
    image = ancilla.slice(0, b.width)
    _load_const(c, image, k)
    c.extend(build_adder(image, b, ancilla.slice(b.width, 1), qubit_count=c.qubit_count))
    _load_const(c, image, k)
    return c


def _carry_flag(c: Circuit, carry_reg: RegisterRef, other: RegisterRef, seed: int, flag: int) -> None:
    """flag ^= carry-out of ``carry_reg + other``; both registers restored."""
    _maj_chain(c, seed, carry_reg, other)
    c.cx(carry_reg.qubit(carry_reg.width - 1), flag)
    _maj_chain_inverse(c, seed, carry_reg, other)


def build_leq_const(
    a: RegisterRef,
    k: int,
    flag: int,
    ancilla: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``flag ^= (a <= k)`` without modifying ``a``.

    Carry-chain subtraction: the carry of ``a + (2**w - 1 - k)`` reads
    ``a > k``, and the flag is set on its negation. Needs width + 1 ancilla
    qubits (complement image + carry seed), all restored.
    """
    w = a.width
    if not 0 <= k < (1 << w):
        raise CircuitError(f"comparison constant {k} does not fit {w} bits")
    c = _blank(qubit_count, a, ancilla, flag)
    m = (1 << w) - 1 - k
    if m == 0:
        c.x(flag)  # nothing exceeds the register maximum
        return c
    if ancilla.width < w + 1:
        raise CircuitError("comparator needs width + 1 ancilla qubits")
    image = ancilla.slice(0, w)
    _load_const(c, image, m)
    _carry_flag(c, image, a, ancilla.qubit(w), flag)
    _load_const(c, image, m)
    c.x(flag)
    return c


def build_lt_const(
    a: RegisterRef,
    k: int,
    flag: int,
    ancilla: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``flag ^= (a < k)``; ``k`` may be ``2**width`` to mean "always"."""
    w = a.width
    if not 0 <= k <= (1 << w):
        raise CircuitError(f"comparison constant {k} out of range for {w} bits")
    if k == 0:
        return _blank(qubit_count, a, ancilla, flag)  # nothing is below zero
    if k == (1 << w):
        c = _blank(qubit_count, a, ancilla, flag)
        c.x(flag)
        return c
    return build_leq_const(a, k - 1, flag, ancilla, qubit_count=qubit_count)


def build_lt_register(
    a: RegisterRef,
    b: RegisterRef,
    flag: int,
    seed: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``flag ^= (a < b)`` for two registers; both restored, seed is 1 qubit.

    The carry of ``NOT(a) + b`` is exactly ``b > a``.
    """
    if a.width != b.width:
        raise CircuitError("comparator operands must have equal widths")
    c = _blank(qubit_count, a, b, seed, flag)
    for qb in a.qubits():
        c.x(qb)
    _carry_flag(c, a, b, seed.qubit(0), flag)
    for qb in a.qubits():
        c.x(qb)
    return c


def build_leq_register(
    a: RegisterRef,
    b: RegisterRef,
    flag: int,
    seed: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``flag ^= (a <= b)`` via the negated carry of ``NOT(b) + a``."""
    if a.width != b.width:
        raise CircuitError("comparator operands must have equal widths")
    c = _blank(qubit_count, a, b, seed, flag)
    for qb in b.qubits():
        c.x(qb)
    _carry_flag(c, b, a, seed.qubit(0), flag)
    for qb in b.qubits():
        c.x(qb)
    c.x(flag)
    return c


def build_max_with_register(
    t: RegisterRef,
    value: RegisterRef,
    choice: int,
    spill: RegisterRef,
    seed: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``choice ^= (t < value)``; when the flag fires, ``t := value``.

    The displaced register contents move into ``spill`` (same width as ``t``),
    which therefore ends dirty exactly when ``choice`` is set. ``value`` is
    only read.
    """
    if t.width != value.width or spill.width != t.width:
        raise CircuitError("max operands and spill must share one width")
    c = _blank(qubit_count, t, value, spill, seed, choice)
    c.extend(build_lt_register(t, value, choice, seed, qubit_count=c.qubit_count))
    for j in range(t.width):
        c.ccx(choice, t.qubit(j), spill.qubit(j))
    for j in range(t.width):
        c.ccx(choice, spill.qubit(j), t.qubit(j))
    for j in range(t.width):
        c.ccx(choice, value.qubit(j), t.qubit(j))
    return c


def build_max_with_const(
    t: RegisterRef,
    k: int,
    choice: int,
    ancilla: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """In-place ``t := max(t, k)`` with ``choice ^= (t < k)``.

    Ancilla layout: ``[0, w)`` images the constant, ``[w, 2w)`` is the spill
    slice (dirty iff the overwrite fired), ``2w`` is the comparator seed.
    """
    w = t.width
    if not 0 <= k < (1 << w):
        raise CircuitError(f"constant {k} does not fit {w} bits")
    c = _blank(qubit_count, t, ancilla, choice)
    if k == 0:
        return c  # max(t, 0) = t
    if ancilla.width < 2 * w + 1:
        raise CircuitError("max gadget needs 2 * width + 1 ancilla qubits")
    image = ancilla.slice(0, w)
    spill = ancilla.slice(w, w)
    seed = ancilla.slice(2 * w, 1)
    _load_const(c, image, k)
    c.extend(build_max_with_register(t, image, choice, spill, seed, qubit_count=c.qubit_count))
    _load_const(c, image, k)
    return c


def build_conditional_encoder(
    idx: RegisterRef,
    table: Sequence[int],
    out: RegisterRef,
    *,
    controls: Sequence[tuple[int, bool]] = (),
    qubit_count: int | None = None,
) -> Circuit:
    """``out ^= table[idx]``: one MCX per set bit of each table entry.

    Every gate carries the full bit pattern of its index as polarity-typed
    controls (plus any extra ``controls``); entries beyond the table default
    to zero, so unlisted index values leave ``out`` untouched.
    """
    if len(table) > (1 << idx.width):
        raise CircuitError("table longer than the index register can address")
    extra = [q for q, _ in controls]
    c = _blank(qubit_count, idx, out, *extra)
    for v, entry in enumerate(table):
        if entry == 0:
            continue
        if not 0 <= entry < (1 << out.width):
            raise CircuitError(f"table value {entry} does not fit {out.width} bits")
        pattern = [(idx.qubit(j), bool((v >> j) & 1)) for j in range(idx.width)]
        pattern.extend(controls)
        for j in range(out.width):
            if (entry >> j) & 1:
                c.mcx(pattern, out.qubit(j))
    return c


def build_pair_matrix_encoder(
    idx_a: RegisterRef,
    idx_b: RegisterRef,
    matrix: Sequence[Sequence[int]],
    valid: range,
    out: RegisterRef,
    *,
    controls: Sequence[tuple[int, bool]] = (),
    qubit_count: int | None = None,
) -> Circuit:
    """``out ^= matrix[idx_a][idx_b]`` over pairs of distinct valid indices.

    Pairs with a repeated index are skipped: repeats are rejected elsewhere,
    so their encoded value never matters.
    """
    extra = [q for q, _ in controls]
    c = _blank(qubit_count, idx_a, idx_b, out, *extra)
    for u in valid:
        for v in valid:
            if u == v or matrix[u][v] == 0:
                continue
            entry = matrix[u][v]
            if not 0 <= entry < (1 << out.width):
                raise CircuitError(f"matrix value {entry} does not fit {out.width} bits")
            pattern = [(idx_a.qubit(j), bool((u >> j) & 1)) for j in range(idx_a.width)]
            pattern += [(idx_b.qubit(j), bool((v >> j) & 1)) for j in range(idx_b.width)]
            pattern.extend(controls)
            for j in range(out.width):
                if (entry >> j) & 1:
                    c.mcx(pattern, out.qubit(j))
    return c


def build_pair_neq(
    a: RegisterRef,
    b: RegisterRef,
    flag: int,
    ancilla: RegisterRef,
    *,
    qubit_count: int | None = None,
) -> Circuit:
    """``flag ^= (a != b)``; operands untouched, scratch (width of a) restored.

    XORs both registers into the scratch and flips the flag unless every
    scratch bit reads zero.
    """
    if a.width != b.width:
        raise CircuitError("pair inequality needs equal widths")
    if ancilla.width < a.width:
        raise CircuitError("pair inequality needs a scratch as wide as the operands")
    c = _blank(qubit_count, a, b, ancilla, flag)
    scratch = ancilla.slice(0, a.width)
    for j in range(a.width):
        c.cx(a.qubit(j), scratch.qubit(j))
        c.cx(b.qubit(j), scratch.qubit(j))
    c.mcx([(q, False) for q in scratch.qubits()], flag)  # fires iff a == b
    c.x(flag)
    for j in range(a.width):
        c.cx(b.qubit(j), scratch.qubit(j))
        c.cx(a.qubit(j), scratch.qubit(j))
    return c


def build_and_reduce(flags: Sequence[int], out: int, *, qubit_count: int | None = None) -> Circuit:
    """``out ^= AND(flags)`` as a single MCX with all-positive controls."""
    if not flags:
        raise CircuitError("and-reduce needs at least one flag")
    c = _blank(qubit_count, out, *flags)
    c.mcx([(f, True) for f in flags], out)
    return c
