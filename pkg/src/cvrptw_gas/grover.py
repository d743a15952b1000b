"""Exact simulation of Grover-amplified threshold search and the adaptive
minimization loop built on it.

Amplification is simulated analytically: with the marked count M known
exactly, the success probability after m rounds is sin^2((2m+1) asin(sqrt(M/N)))
and an ideal measurement lands uniformly on the marked set. The full oracle
needs far more qubits than a dense statevector can hold even for toy
instances, so the statevector path exists only to validate that closed form
on small synthetic oracles.

Marked counts come from a classical sweep of the decision space. The sweep is
vectorized and cached per instance as a (feasible index, cost) table; every
threshold count and every uniform marked-state draw derives from that one
scan. The scalar :func:`cvrptw_gas.oracle.mark_predicate` stays the ground
truth the vectorized sweep is tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import (
    Circuit,
    column_bits,
    enumeration_columns,
    eval_basis_batch,
    eval_statevector,
)
from .classical import InfeasibleError, feasible_and_cost
from .instance import Instance, RouteSet, decode_assignment
from .oracle import unpack_assignment
from .resources import cost_upper_bound, register_widths

ENUMERATION_CAP_BITS = 26
_SCAN_CHUNK_BITS = 20


class BudgetExhaustedError(RuntimeError):
    """The oracle-call budget ran out before the search could finish."""


@dataclass(frozen=True)
class SearchSpace:
    decision_bits: int

    @property
    def N(self) -> int:
        return 1 << self.decision_bits


def search_space(inst: Instance) -> SearchSpace:
    return SearchSpace(inst.n * register_widths(inst).b_node + inst.n)


@dataclass(frozen=True)
class GasConfig:
    rng_seed: int
    lam: float = 8 / 7  # growth factor of the exponential search schedule
    max_oracle_calls: int | None = None
    initial_k: int | None = None

    def __post_init__(self) -> None:
        if not 1.0 < self.lam < 4 / 3:
            raise ValueError("growth factor must lie strictly between 1 and 4/3")


def success_probability(N: int, M: int, m: int) -> float:
    """Probability that m Grover rounds over N states with M marked succeed."""
    if not 0 <= M <= N or N < 1 or m < 0:
        raise ValueError("need 0 <= M <= N, N >= 1, m >= 0")
    if M == 0:
        return 0.0
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * m + 1) * theta) ** 2


# ---------------------------------------------------------------------------
# Exact marked counts via a vectorized sweep of the decision space


def _feasible_chunk(inst: Instance, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """(feasible mask, cost) for assignment indices start..start+count-1."""
    n = inst.n
    b_node = register_widths(inst).b_node
    mask = (1 << b_node) - 1
    idx = np.arange(start, start + count, dtype=np.int64)
    P = [(idx >> (b_node * i)) & mask for i in range(n)]
    y = [((idx >> (n * b_node + i)) & 1).astype(bool) for i in range(n)]

    ok = y[n - 1].copy()
    for i in range(n):
        ok &= (P[i] >= 1) & (P[i] <= n)
    occupied = np.zeros(count, dtype=np.int64)
    for i in range(n):
        occupied |= np.int64(1) << P[i]
    ok &= np.bitwise_count(occupied).astype(np.int64) == n

    demand = np.zeros(mask + 1, dtype=np.int64)
    demand[1 : n + 1] = inst.q[1:]
    load = demand[P[0]]
    ok &= load <= inst.c_max
    for i in range(1, n):
        load = demand[P[i]] + np.where(y[i - 1], 0, load)
        ok &= load <= inst.c_max

    if not inst.windows_vacuous:
        side = mask + 1
        from_depot = np.zeros(side, dtype=np.int64)
        opening = np.zeros(side, dtype=np.int64)
        closing = np.zeros(side, dtype=np.int64)
        for v in inst.customers:
            from_depot[v] = inst.T[0][v]
            opening[v], closing[v] = inst.windows[v]
        leg = np.zeros(side * side, dtype=np.int64)
        for u in inst.customers:
            for v in inst.customers:
                leg[u * side + v] = inst.T[u][v]
        clock = np.maximum(opening[P[0]], from_depot[P[0]])
        ok &= clock <= closing[P[0]]
        for i in range(1, n):
            direct = clock + leg[P[i - 1] * side + P[i]]
            arrive = np.where(y[i - 1], from_depot[P[i]], direct)
            clock = np.maximum(opening[P[i]], arrive)
            ok &= clock <= closing[P[i]]

    side = mask + 1
    to_first = np.zeros(side, dtype=np.int64)
    back_home = np.zeros(side, dtype=np.int64)
    for v in inst.customers:
        to_first[v] = inst.D[0][v]
        back_home[v] = inst.D[v][0]
    pair = np.zeros(side * side, dtype=np.int64)
    for u in inst.customers:
        for v in inst.customers:
            pair[u * side + v] = inst.D[u][v]
    cost = to_first[P[0]]
    for i in range(1, n):
        cost = cost + np.where(y[i - 1], back_home[P[i - 1]] + to_first[P[i]], pair[P[i - 1] * side + P[i]])
    cost = cost + back_home[P[n - 1]]
    return ok, cost


@dataclass(frozen=True)
class FeasibleTable:
    """Indices and costs of every feasible assignment of one instance."""

    decision_bits: int
    indices: np.ndarray
    costs: np.ndarray

    @property
    def N(self) -> int:
        return 1 << self.decision_bits

    def count(self, k) -> int:
        return int((self.costs < k).sum())

    def sample(self, k, rng: np.random.Generator) -> tuple[int, int]:
        """A uniform draw (assignment index, cost) from the marked set."""
        sel = self.costs < k
        marked = self.indices[sel]
        costs = self.costs[sel]
        pick = int(rng.integers(0, len(marked)))
        return int(marked[pick]), int(costs[pick])


@lru_cache(maxsize=8)
def feasible_table(inst: Instance) -> FeasibleTable:
    space = search_space(inst)
    if space.decision_bits > ENUMERATION_CAP_BITS:
        raise ValueError(f"decision space beyond the {ENUMERATION_CAP_BITS}-bit enumeration cap")
    chunk = 1 << min(_SCAN_CHUNK_BITS, space.decision_bits)
    kept_idx = []
    kept_cost = []
    for start in range(0, space.N, chunk):
        ok, cost = _feasible_chunk(inst, start, min(chunk, space.N - start))
        where = np.nonzero(ok)[0]
        kept_idx.append(where + start)
        kept_cost.append(cost[where])
    return FeasibleTable(
        decision_bits=space.decision_bits,
        indices=np.concatenate(kept_idx),
        costs=np.concatenate(kept_cost),
    )


def count_marked(inst: Instance, k, sample_limit: int = 0):
    """Exact number of assignments the oracle would mark at threshold ``k``,
    plus up to ``sample_limit`` of them decoded in index order."""
    table = feasible_table(inst)
    sel = table.costs < k
    M = int(sel.sum())
    samples = []
    if sample_limit:
        b_node = register_widths(inst).b_node
        for idx in table.indices[sel][:sample_limit]:
            samples.append(unpack_assignment(inst.n, b_node, int(idx)))
    return M, samples


# ---------------------------------------------------------------------------
# Threshold search and adaptive minimization


@dataclass(frozen=True)
class Trial:
    m: int
    success: bool


@dataclass(frozen=True)
class ThresholdRecord:
    k: int
    M: int
    trials: tuple[Trial, ...]
    oracle_calls: int


@dataclass(frozen=True)
class QSearchOutcome:
    assignment_index: int | None
    cost: int | None
    record: ThresholdRecord
    certified_empty: bool
    budget_exhausted: bool


def qsearch(
    inst: Instance,
    k: int,
    cfg: GasConfig,
    rng: np.random.Generator,
    *,
    calls_before: int = 0,
) -> QSearchOutcome:
    """One exponential-search pass at a fixed threshold.

    Each trial draws a round count m below the current bound, succeeds with
    the exact closed-form probability, and costs m oracle calls. On success
    the measurement is a uniform marked assignment. An empty marked set is
    certified immediately from the exact count.
    """
    table = feasible_table(inst)
    N = table.N
    M = table.count(k)
    if M == 0:
        return QSearchOutcome(None, None, ThresholdRecord(k, 0, (), 0), True, False)
    sqrt_n = math.sqrt(N)
    bound = 1.0
    trials: list[Trial] = []
    calls = 0
    while True:
        m = int(rng.integers(0, math.ceil(bound)))
        calls += m
        hit = bool(rng.random() < success_probability(N, M, m))
        trials.append(Trial(m, hit))
        if hit:
            index, cost = table.sample(k, rng)
            return QSearchOutcome(index, cost, ThresholdRecord(k, M, tuple(trials), calls), False, False)
        bound = min(cfg.lam * bound, sqrt_n)
        if cfg.max_oracle_calls is not None and calls_before + calls >= cfg.max_oracle_calls:
            return QSearchOutcome(None, None, ThresholdRecord(k, M, tuple(trials), calls), False, True)


@dataclass(frozen=True)
class SearchTrace:
    seed: int
    thresholds: tuple[ThresholdRecord, ...]

    @property
    def total_oracle_calls(self) -> int:
        return sum(t.oracle_calls for t in self.thresholds)

    def to_dict(self, best: dict | None = None) -> dict:
        doc = {
            "seed": self.seed,
            "thresholds": [
                {
                    "k": t.k,
                    "M": t.M,
                    "trials": [{"m": tr.m, "success": tr.success} for tr in t.trials],
                    "oracle_calls": t.oracle_calls,
                }
                for t in self.thresholds
            ],
        }
        if best is not None:
            doc["best"] = best
        return doc


@dataclass(frozen=True)
class GasResult:
    P: tuple[int, ...]
    y: tuple[int, ...]
    cost: int
    routes: RouteSet
    trace: SearchTrace

    def best_dict(self) -> dict:
        return {
            "P": list(self.P),
            "y": list(self.y),
            "cost": self.cost,
            "routes": self.routes.as_lists(),
        }

    def trace_dict(self) -> dict:
        return self.trace.to_dict(self.best_dict())


def _initial_threshold(inst: Instance) -> int:
    """Cost of the everyone-gets-a-vehicle tour plus one, when feasible;
    otherwise just above the cost bound so every feasible assignment counts."""
    identity = tuple(range(1, inst.n + 1))
    ones = (1,) * inst.n
    report = feasible_and_cost(inst, identity, ones)
    if report.feasible:
        return report.cost + 1
    return cost_upper_bound(inst) + 1


def gas_minimize(inst: Instance, cfg: GasConfig) -> GasResult:
    """Adaptive minimization: threshold search, lower the threshold to each
    newly found cost, stop at a certified empty marked set.

    With exact counts the final certification means no assignment beats the
    last threshold, so the returned cost is the global optimum.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    k = cfg.initial_k if cfg.initial_k is not None else _initial_threshold(inst)
    records: list[ThresholdRecord] = []
    best_index: int | None = None
    best_cost: int | None = None
    calls = 0
    while True:
        outcome = qsearch(inst, k, cfg, rng, calls_before=calls)
        records.append(outcome.record)
        calls += outcome.record.oracle_calls
        if outcome.certified_empty:
            break
        if outcome.budget_exhausted:
            raise BudgetExhaustedError(f"oracle-call budget {cfg.max_oracle_calls} exhausted at threshold {k}")
        best_index, best_cost = outcome.assignment_index, outcome.cost
        k = outcome.cost
    if best_index is None:
        if cfg.initial_k is not None:
            raise InfeasibleError(f"no feasible solution costs less than the initial threshold {cfg.initial_k}")
        raise InfeasibleError("no feasible solution exists")
    P, y = unpack_assignment(inst.n, register_widths(inst).b_node, best_index)
    routes = decode_assignment(inst, P, y)
    return GasResult(P, y, best_cost, routes, SearchTrace(cfg.rng_seed, tuple(records)))


# ---------------------------------------------------------------------------
# Statevector cross-validation on toy oracles


def synthetic_marking_oracle(decision_bits: int, marked_patterns) -> Circuit:
    """A toy oracle over ``decision_bits`` qubits: one MCX per marked pattern
    flips the output qubit."""
    c = Circuit()
    decision = c.add_register("decision", decision_bits)
    marked = c.add_register("marked", 1)
    for pattern in marked_patterns:
        controls = [(decision.qubit(j), bool((pattern >> j) & 1)) for j in range(decision_bits)]
        c.mcx(controls, marked.qubit(0))
    return c


def statevector_grover(oracle: Circuit, decision_registers, m: int) -> float:
    """Measured probability of the marked decision patterns after m rounds.

    ``oracle`` must be a marking circuit (permutation gates only) with a
    one-qubit ``marked`` register; ``decision_registers`` names the registers
    spanning the search space. The uniform superposition is prepared over
    those qubits, each round applies the phase oracle then inversion about
    the mean, and the returned value is the total probability mass whose
    decision projection is marked.
    """
    decision_qubits: list[int] = []
    for name in decision_registers:
        decision_qubits.extend(oracle.registers[name].qubits())
    out = oracle.registers["marked"].qubit(0)
    nq = oracle.qubit_count
    bits = len(decision_qubits)

    # Marked set from the oracle itself, all work qubits zero.
    cols = [0] * nq
    for q, col in zip(decision_qubits, enumeration_columns(bits)):
        cols[q] = col
    marked_patterns = column_bits(eval_basis_batch(oracle, cols, 1 << bits)[out], 1 << bits)

    g = Circuit(nq, dict(oracle.registers))
    for q in decision_qubits:
        g.h(q)
    for _ in range(m):
        g.x(out)
        g.h(out)
        g.extend(oracle)
        g.h(out)
        g.x(out)
        # inversion about the mean over the decision qubits
        for q in decision_qubits:
            g.h(q)
        for q in decision_qubits:
            g.x(q)
        if bits == 1:
            g.h(decision_qubits[0])
            g.x(decision_qubits[0])
            g.h(decision_qubits[0])  # Z on the lone qubit
        else:
            g.h(decision_qubits[-1])
            g.mcx([(q, True) for q in decision_qubits[:-1]], decision_qubits[-1])
            g.h(decision_qubits[-1])
        for q in decision_qubits:
            g.x(q)
        for q in decision_qubits:
            g.h(q)

    start = np.zeros(1 << nq, dtype=complex)
    start[0] = 1.0
    probs = np.abs(eval_statevector(g, start)) ** 2
    idx = np.arange(1 << nq)
    dec = np.zeros(1 << nq, dtype=np.int64)
    for j, q in enumerate(decision_qubits):
        dec |= ((idx >> q) & 1) << j
    return float(probs[marked_patterns[dec]].sum())
