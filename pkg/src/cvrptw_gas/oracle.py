"""The full marking oracle: an explicit reversible circuit that flags tour/split
assignments which are valid, feasible, and strictly cheaper than a threshold.

The compute phase builds, over a fixed register layout, the tour-validity
network, the load chain, the clock chain, and the cost accumulator; a single
multi-controlled X folds every flag into the output qubit; a mirrored copy of
the compute phase then returns all working registers to zero. Only the
decision registers (tour positions and split bits) and the output qubit
survive.

Two bookkeeping details go beyond the obvious translation of the recurrences:

* The load and clock registers are sized for their *checked* maxima, but one
  more chained addition can exceed that before the violation is caught, so
  each chained adder writes its carry into a dedicated overflow flag. The
  final AND requires every overflow flag clear (negative controls). Feasible
  assignments never set one; the first infeasible step always trips either
  the comparator or the carry.
* The in-place max against the window opening cannot erase the displaced
  clock value (two clocks below the opening would collapse to one state), so
  it swaps the loser into a per-position spill register that stays dirty
  until the mirror phase clears it.

``mark_predicate`` is the pure classical twin of the circuit and is kept
structurally independent of both the circuit and the other classical
references so equivalence scans are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import (
    Circuit,
    RegisterRef,
    column_bits,
    columns_from_indices,
    enumeration_columns,
    eval_basis_batch,
    inverse,
)
from .instance import Instance
from .qarith import (
    build_adder,
    build_and_reduce,
    build_conditional_encoder,
    build_leq_const,
    build_leq_register,
    build_lt_const,
    build_max_with_register,
    build_pair_matrix_encoder,
    build_pair_neq,
)
from .resources import RegisterWidths, register_widths

EXHAUSTIVE_SCAN_CAP_BITS = 26


class LayoutError(ValueError):
    """Instance values do not fit the registers the width policy assigns."""


@dataclass(frozen=True)
class OracleLayout:
    """Deterministic qubit assignment for one instance and threshold.

    The decision block (tour positions, then split bits) always starts at
    qubit 0, so assignment index bit j is decision qubit j.
    """

    inst: Instance
    k: int
    widths: RegisterWidths
    qubit_count: int
    tour: tuple[RegisterRef, ...]
    split: RegisterRef
    in_range: RegisterRef
    distinct: RegisterRef | None
    valid_tour: int
    load: tuple[RegisterRef, ...]
    load_ok: RegisterRef
    load_overflow: RegisterRef | None
    clock: tuple[RegisterRef, ...]
    waited: RegisterRef
    clock_spill: tuple[RegisterRef, ...]
    time_ok: RegisterRef
    clock_overflow: RegisterRef | None
    cost: RegisterRef
    cost_ok: int
    marked: int
    pool: RegisterRef
    registers: dict[str, RegisterRef]

    @property
    def decision_bits(self) -> int:
        return self.inst.n * self.widths.b_node + self.inst.n

    def decision_qubits(self) -> range:
        return range(self.decision_bits)

    def empty_circuit(self) -> Circuit:
        return Circuit(self.qubit_count, dict(self.registers))

    def pool_value(self, width: int) -> RegisterRef:
        return self.pool.slice(0, width)

    def pool_seed(self, offset: int) -> RegisterRef:
        return self.pool.slice(offset, 1)


def build_layout(inst: Instance, k: int) -> OracleLayout:
    """Allocate every register; same instance and threshold give identical
    indices. Raises :class:`LayoutError` when a travel time cannot be encoded
    in the clock width implied by the windows."""
    if k < 0:
        raise LayoutError("threshold must be nonnegative")
    n = inst.n
    widths = register_widths(inst)
    clock_limit = (1 << widths.w_time) - 1
    worst_travel = inst.max_travel
    if worst_travel > clock_limit:
        raise LayoutError(
            f"travel time {worst_travel} does not fit the {widths.w_time}-bit clock "
            "implied by the delivery windows"
        )

    alloc = Circuit()
    tour = tuple(alloc.add_register(f"pos{i}", widths.b_node) for i in range(1, n + 1))
    split = alloc.add_register("split", n)
    in_range = alloc.add_register("in_range", n)
    distinct = alloc.add_register("distinct", n * (n - 1) // 2) if n > 1 else None
    valid_tour = alloc.add_register("valid_tour", 1).qubit(0)
    load = tuple(alloc.add_register(f"load{i}", widths.w_cap) for i in range(1, n + 1))
    load_ok = alloc.add_register("load_ok", n)
    load_overflow = alloc.add_register("load_overflow", n - 1) if n > 1 else None
    clock = tuple(alloc.add_register(f"clock{i}", widths.w_time) for i in range(1, n + 1))
    waited = alloc.add_register("waited", n)
    clock_spill = tuple(alloc.add_register(f"clock_spill{i}", widths.w_time) for i in range(1, n + 1))
    time_ok = alloc.add_register("time_ok", n)
    clock_overflow = alloc.add_register("clock_overflow", n - 1) if n > 1 else None
    cost = alloc.add_register("cost", widths.w_cost)
    cost_ok = alloc.add_register("cost_ok", 1).qubit(0)
    marked = alloc.add_register("marked", 1).qubit(0)
    pool_width = max(widths.b_node, widths.w_cap, widths.w_time, widths.w_cost) + 1
    pool = alloc.add_register("pool", pool_width)

    return OracleLayout(
        inst=inst,
        k=k,
        widths=widths,
        qubit_count=alloc.qubit_count,
        tour=tour,
        split=split,
        in_range=in_range,
        distinct=distinct,
        valid_tour=valid_tour,
        load=load,
        load_ok=load_ok,
        load_overflow=load_overflow,
        clock=clock,
        waited=waited,
        clock_spill=clock_spill,
        time_ok=time_ok,
        clock_overflow=clock_overflow,
        cost=cost,
        cost_ok=cost_ok,
        marked=marked,
        pool=pool,
        registers=dict(alloc.registers),
    )


def _customer_table(inst: Instance, value) -> list[int]:
    """Encoder table over raw position-register values: 0 for the depot code
    and for out-of-range codes, the customer's value otherwise."""
    table = [0] * (1 << register_widths(inst).b_node)
    for v in inst.customers:
        table[v] = value(v)
    return table


def build_uniqueness(layout: OracleLayout) -> Circuit:
    """Range flags for every position, inequality flags for every pair, and
    their conjunction in the tour-validity qubit."""
    inst = layout.inst
    n = inst.n
    c = layout.empty_circuit()
    valid_code = _customer_table(inst, lambda v: 1)
    for i in range(n):
        c.extend(
            build_conditional_encoder(
                layout.tour[i], valid_code, layout.in_range.slice(i, 1), qubit_count=c.qubit_count
            )
        )
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            c.extend(
                build_pair_neq(
                    layout.tour[i],
                    layout.tour[j],
                    layout.distinct.qubit(idx),
                    layout.pool_value(layout.widths.b_node),
                    qubit_count=c.qubit_count,
                )
            )
            idx += 1
    flags = list(layout.in_range.qubits())
    if layout.distinct is not None:
        flags.extend(layout.distinct.qubits())
    c.extend(build_and_reduce(flags, layout.valid_tour, qubit_count=c.qubit_count))
    return c


def build_capacity_chain(layout: OracleLayout, inst: Instance | None = None) -> Circuit:
    """Per position: encode the demand, add the previous load unless the
    previous split bit is set, then flag ``load <= capacity``."""
    inst = inst or layout.inst
    n = inst.n
    w = layout.widths.w_cap
    c = layout.empty_circuit()
    demand = _customer_table(inst, lambda v: inst.q[v])
    for i in range(n):
        c.extend(
            build_conditional_encoder(layout.tour[i], demand, layout.load[i], qubit_count=c.qubit_count)
        )
        if i > 0:
            carry_gate = (layout.split.qubit(i - 1), False)
            scratch = layout.pool_value(w)
            for j in range(w):
                c.ccx(carry_gate, (layout.load[i - 1].qubit(j), True), scratch.qubit(j))
            c.extend(
                build_adder(
                    scratch,
                    layout.load[i],
                    layout.pool_seed(w),
                    carry_out=layout.load_overflow.qubit(i - 1),
                    qubit_count=c.qubit_count,
                )
            )
            for j in range(w):
                c.ccx(carry_gate, (layout.load[i - 1].qubit(j), True), scratch.qubit(j))
        c.extend(
            build_leq_const(
                layout.load[i],
                inst.c_max,
                layout.load_ok.qubit(i),
                layout.pool.slice(0, w + 1),
                qubit_count=c.qubit_count,
            )
        )
    return c


def build_time_chain(layout: OracleLayout, inst: Instance | None = None) -> Circuit:
    """Per position: seed the clock from the depot on a fresh route, otherwise
    carry the previous clock forward and add the leg time; lift to the window
    opening with the max gadget; flag ``clock <= window close``."""
    inst = inst or layout.inst
    n = inst.n
    w = layout.widths.w_time
    c = layout.empty_circuit()
    from_depot = _customer_table(inst, lambda v: inst.T[0][v])
    opening = _customer_table(inst, lambda v: inst.windows[v][0])
    closing = _customer_table(inst, lambda v: inst.windows[v][1])
    for i in range(n):
        if i == 0:
            c.extend(
                build_conditional_encoder(layout.tour[0], from_depot, layout.clock[0], qubit_count=c.qubit_count)
            )
        else:
            restart = (layout.split.qubit(i - 1), True)
            carry_on = (layout.split.qubit(i - 1), False)
            c.extend(
                build_conditional_encoder(
                    layout.tour[i], from_depot, layout.clock[i], controls=[restart], qubit_count=c.qubit_count
                )
            )
            for j in range(w):
                c.ccx(carry_on, (layout.clock[i - 1].qubit(j), True), layout.clock[i].qubit(j))
            leg = build_pair_matrix_encoder(
                layout.tour[i - 1],
                layout.tour[i],
                inst.T,
                inst.customers,
                layout.pool_value(w),
                controls=[carry_on],
                qubit_count=c.qubit_count,
            )
            c.extend(leg)
            c.extend(
                build_adder(
                    layout.pool_value(w),
                    layout.clock[i],
                    layout.pool_seed(w),
                    carry_out=layout.clock_overflow.qubit(i - 1),
                    qubit_count=c.qubit_count,
                )
            )
            c.extend(leg)  # XOR encoders are their own inverse
        open_enc = build_conditional_encoder(
            layout.tour[i], opening, layout.pool_value(w), qubit_count=c.qubit_count
        )
        c.extend(open_enc)
        c.extend(
            build_max_with_register(
                layout.clock[i],
                layout.pool_value(w),
                layout.waited.qubit(i),
                layout.clock_spill[i],
                layout.pool_seed(w),
                qubit_count=c.qubit_count,
            )
        )
        c.extend(open_enc)
        close_enc = build_conditional_encoder(
            layout.tour[i], closing, layout.pool_value(w), qubit_count=c.qubit_count
        )
        c.extend(close_enc)
        c.extend(
            build_leq_register(
                layout.clock[i],
                layout.pool_value(w),
                layout.time_ok.qubit(i),
                layout.pool_seed(w),
                qubit_count=c.qubit_count,
            )
        )
        c.extend(close_enc)
    return c


def build_cost_accumulator(layout: OracleLayout, inst: Instance | None = None, k: int | None = None) -> Circuit:
    """Accumulate the objective legs into the cost register and flag
    ``cost < k``. Split legs return through the depot; direct legs use the
    pair matrix. The cost register is sized so no assignment can wrap it."""
    inst = inst or layout.inst
    k = layout.k if k is None else k
    n = inst.n
    w = layout.widths.w_cost
    c = layout.empty_circuit()
    to_first = _customer_table(inst, lambda v: inst.D[0][v])
    back_home = _customer_table(inst, lambda v: inst.D[v][0])

    def add_encoded(encoder: Circuit) -> None:
        c.extend(encoder)
        c.extend(
            build_adder(layout.pool_value(w), layout.cost, layout.pool_seed(w), qubit_count=c.qubit_count)
        )
        c.extend(encoder)

    add_encoded(
        build_conditional_encoder(layout.tour[0], to_first, layout.pool_value(w), qubit_count=c.qubit_count)
    )
    for i in range(1, n):
        restart = (layout.split.qubit(i - 1), True)
        carry_on = (layout.split.qubit(i - 1), False)
        add_encoded(
            build_conditional_encoder(
                layout.tour[i - 1], back_home, layout.pool_value(w), controls=[restart], qubit_count=c.qubit_count
            )
        )
        add_encoded(
            build_conditional_encoder(
                layout.tour[i], to_first, layout.pool_value(w), controls=[restart], qubit_count=c.qubit_count
            )
        )
        add_encoded(
            build_pair_matrix_encoder(
                layout.tour[i - 1],
                layout.tour[i],
                inst.D,
                inst.customers,
                layout.pool_value(w),
                controls=[carry_on],
                qubit_count=c.qubit_count,
            )
        )
    add_encoded(
        build_conditional_encoder(layout.tour[n - 1], back_home, layout.pool_value(w), qubit_count=c.qubit_count)
    )
    # Any threshold above the register range marks every cost.
    k_eff = min(k, 1 << w)
    c.extend(
        build_lt_const(layout.cost, k_eff, layout.cost_ok, layout.pool.slice(0, w + 1), qubit_count=c.qubit_count)
    )
    return c


def _mark_controls(layout: OracleLayout) -> list[tuple[int, bool]]:
    n = layout.inst.n
    controls: list[tuple[int, bool]] = [(layout.valid_tour, True)]
    controls.append((layout.split.qubit(n - 1), True))  # last split bit must close the tour
    controls.extend((layout.load_ok.qubit(i), True) for i in range(n))
    controls.extend((layout.time_ok.qubit(i), True) for i in range(n))
    controls.append((layout.cost_ok, True))
    if layout.load_overflow is not None:
        controls.extend((q, False) for q in layout.load_overflow.qubits())
    if layout.clock_overflow is not None:
        controls.extend((q, False) for q in layout.clock_overflow.qubits())
    return controls


def build_oracle(inst: Instance, k: int) -> Circuit:
    """Compute every constraint flag, AND them into the output qubit, then
    mirror the computation so only the decision registers and the output
    change."""
    layout = build_layout(inst, k)
    compute = layout.empty_circuit()
    compute.extend(build_uniqueness(layout))
    compute.extend(build_capacity_chain(layout))
    compute.extend(build_time_chain(layout))
    compute.extend(build_cost_accumulator(layout))

    full = layout.empty_circuit()
    full.extend(compute)
    full.mcx(_mark_controls(layout), layout.marked)
    full.extend(inverse(compute))
    return full


def build_phase_oracle(inst: Instance, k: int) -> Circuit:
    """Phase-flip variant: the output qubit is conjugated into the |-> state
    so marking becomes a sign flip on marked decision assignments."""
    layout = build_layout(inst, k)
    marking = build_oracle(inst, k)
    c = layout.empty_circuit()
    c.x(layout.marked)
    c.h(layout.marked)
    c.extend(marking)
    c.h(layout.marked)
    c.x(layout.marked)
    return c


# ---------------------------------------------------------------------------
# Classical twin


@dataclass(frozen=True)
class MarkResult:
    """Outcome of the oracle predicate on one raw decision assignment."""

    marked: bool
    cost: int | None
    failure: str | None  # "range" | "uniqueness" | "capacity" | "time" | "threshold"


def mark_predicate(inst: Instance, k, P, y) -> MarkResult:
    """Ground-truth twin of :func:`build_oracle`.

    Takes raw register decodings: tour entries may be any codes the position
    registers can hold. Invalid codes, repeats, a clear final split bit,
    overloads, missed windows, and costs at or above the threshold all leave
    the assignment unmarked, in that order of reporting.
    """
    n = inst.n
    P = list(P)
    y = list(y)
    if len(P) != n or len(y) != n:
        raise ValueError("assignment must have n tour entries and n split bits")
    if y[n - 1] != 1 or any(not 1 <= v <= n for v in P):
        return MarkResult(False, None, "range")
    if len(set(P)) != n:
        return MarkResult(False, None, "uniqueness")
    load = 0
    clock = 0
    for i in range(n):
        node = P[i]
        fresh = i == 0 or y[i - 1] == 1
        load = inst.q[node] + (0 if fresh else load)
        if load > inst.c_max:
            return MarkResult(False, None, "capacity")
        arrive = inst.T[0][node] if fresh else clock + inst.T[P[i - 1]][node]
        open_at, close_at = inst.windows[node]
        clock = max(open_at, arrive)
        if clock > close_at:
            return MarkResult(False, None, "time")
    total = inst.D[0][P[0]]
    for i in range(1, n):
        total += inst.D[P[i - 1]][0] + inst.D[0][P[i]] if y[i - 1] else inst.D[P[i - 1]][P[i]]
    total += inst.D[P[n - 1]][0]
    if not total < k:
        return MarkResult(False, total, "threshold")
    return MarkResult(True, total, None)


def pack_assignment(n: int, b_node: int, P, y) -> int:
    idx = 0
    for i, v in enumerate(P):
        idx |= int(v) << (b_node * i)
    for i, bit in enumerate(y):
        idx |= int(bit) << (n * b_node + i)
    return idx


def unpack_assignment(n: int, b_node: int, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    mask = (1 << b_node) - 1
    P = tuple((index >> (b_node * i)) & mask for i in range(n))
    y = tuple((index >> (n * b_node + i)) & 1 for i in range(n))
    return P, y


# ---------------------------------------------------------------------------
# Circuit-vs-predicate verification


@dataclass(frozen=True)
class ScanReport:
    assignments_checked: int
    mismatches: int
    dirty_ancillas: int
    decision_changed: int

    @property
    def clean(self) -> bool:
        return self.mismatches == 0 and self.dirty_ancillas == 0 and self.decision_changed == 0


def equivalence_scan(inst: Instance, k: int, indices=None) -> ScanReport:
    """Run the oracle over basis states and compare with the predicate.

    ``indices`` selects the assignments to check; None means all of them
    (refused above :data:`EXHAUSTIVE_SCAN_CAP_BITS` decision bits). Working
    registers start at zero; afterwards every one of them must read zero and
    the decision bits must be unchanged.
    """
    layout = build_layout(inst, k)
    circuit = build_oracle(inst, k)
    bits = layout.decision_bits
    if indices is None:
        if bits > EXHAUSTIVE_SCAN_CAP_BITS:
            raise ValueError(f"exhaustive scan refused beyond {EXHAUSTIVE_SCAN_CAP_BITS} decision bits")
        count = 1 << bits
        decision_cols = enumeration_columns(bits)
        index_list = np.arange(count, dtype=np.int64)
    else:
        index_list = np.asarray(list(indices), dtype=np.int64)
        count = len(index_list)
        decision_cols = columns_from_indices(index_list, bits)

    columns = decision_cols + [0] * (layout.qubit_count - bits)
    out_cols = eval_basis_batch(circuit, columns, count)

    circuit_marks = column_bits(out_cols[layout.marked], count)
    predicted = np.zeros(count, dtype=bool)
    n, b_node = inst.n, layout.widths.b_node
    for s, idx in enumerate(index_list):
        P, y = unpack_assignment(n, b_node, int(idx))
        predicted[s] = mark_predicate(inst, k, P, y).marked
    mismatches = int((circuit_marks != predicted).sum())

    dirty = 0
    for qb in range(bits, layout.qubit_count):
        if qb != layout.marked:
            dirty |= out_cols[qb]
    changed = 0
    for qb in range(bits):
        changed |= out_cols[qb] ^ columns[qb]
    full = (1 << count) - 1
    return ScanReport(
        assignments_checked=count,
        mismatches=mismatches,
        dirty_ancillas=int(dirty & full).bit_count(),
        decision_changed=int(changed & full).bit_count(),
    )
