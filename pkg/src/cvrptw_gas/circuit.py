"""Gate-level IR for reversible circuits with three evaluation backends.

Gates are X, H and MCX with per-control polarities (an MCX with one control
is a CX, with two a Toffoli). The basis-state evaluator handles permutation
circuits (no H) one state at a time; the column evaluator runs the same
circuit over many basis states at once, one big-integer bit column per qubit;
the dense statevector evaluator covers small circuits that do contain H.

Bit-order convention, binding everywhere in this package: qubit ``start + j``
of a register is bit ``j`` (the least significant) of the integer it encodes.
In string form, the character at position ``i`` is qubit ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STATEVECTOR_QUBIT_CAP = 26


class CircuitError(ValueError):
    """Raised for malformed gates, registers, or unsupported evaluation."""


@dataclass(frozen=True)
class Gate:
    kind: str  # "x" | "h" | "mcx"
    target: int
    controls: tuple[tuple[int, bool], ...] = ()


@dataclass(frozen=True)
class RegisterRef:
    """A named contiguous span of qubits inside some circuit."""

    name: str
    start: int
    width: int

    @property
    def stop(self) -> int:
        return self.start + self.width

    def qubit(self, j: int = 0) -> int:
        if not 0 <= j < self.width:
            raise CircuitError(f"bit {j} outside register {self.name!r} of width {self.width}")
        return self.start + j

    def qubits(self) -> range:
        return range(self.start, self.stop)

    def slice(self, offset: int, width: int, name: str = "") -> "RegisterRef":
        if offset < 0 or offset + width > self.width:
            raise CircuitError(f"slice [{offset}, {offset + width}) outside register {self.name!r}")
        return RegisterRef(name or self.name, self.start + offset, width)


@dataclass
class Circuit:
    """An ordered gate list over a fixed qubit array with named registers.

    Circuits are built once and treated as immutable afterwards; the
    evaluators never modify them.
    """

    qubit_count: int = 0
    registers: dict[str, RegisterRef] = field(default_factory=dict)
    gates: list[Gate] = field(default_factory=list)

    def add_register(self, name: str, width: int) -> RegisterRef:
        if width < 1:
            raise CircuitError("register width must be at least 1")
        if name in self.registers:
            raise CircuitError(f"register {name!r} already exists")
        ref = RegisterRef(name, self.qubit_count, width)
        self.registers[name] = ref
        self.qubit_count += width
        return ref

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.qubit_count:
            raise CircuitError(f"qubit {q} outside circuit of {self.qubit_count} qubits")

    def x(self, target: int) -> None:
        self._check_qubit(target)
        self.gates.append(Gate("x", target))

    def h(self, target: int) -> None:
        self._check_qubit(target)
        self.gates.append(Gate("h", target))

    def mcx(self, controls, target: int) -> None:
        ctl = tuple((int(q), bool(p)) for q, p in controls)
        if not ctl:
            raise CircuitError("mcx needs at least one control; use x for none")
        self._check_qubit(target)
        seen = set()
        for q, _ in ctl:
            self._check_qubit(q)
            if q == target or q in seen:
                raise CircuitError("mcx controls must be distinct and differ from the target")
            seen.add(q)
        self.gates.append(Gate("mcx", target, ctl))

    def cx(self, control: int, target: int) -> None:
        self.mcx([(control, True)], target)

    def ccx(self, c1, c2, target: int) -> None:
        """Controls may be ints (positive) or (qubit, polarity) pairs."""
        pair = lambda c: c if isinstance(c, tuple) else (c, True)
        self.mcx([pair(c1), pair(c2)], target)

    def extend(self, block: "Circuit") -> None:
        if block.qubit_count > self.qubit_count:
            raise CircuitError("block references more qubits than the host circuit")
        self.gates.extend(block.gates)

    def dump(self) -> str:
        """Debug text, one gate per line, e.g. ``MCX c+3 c-5 t7``."""
        lines = []
        for g in self.gates:
            if g.kind == "mcx":
                ctl = " ".join(f"c{'+' if p else '-'}{q}" for q, p in g.controls)
                lines.append(f"MCX {ctl} t{g.target}")
            else:
                lines.append(f"{g.kind.upper()} t{g.target}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ResourceReport:
    qubit_count: int
    gate_total: int
    x_count: int
    h_count: int
    mcx_by_arity: dict[int, int]

    @property
    def mcx_total(self) -> int:
        return sum(self.mcx_by_arity.values())


def count_resources(c: Circuit) -> ResourceReport:
    """Exact gate tallies; MCX gates are binned by control count, any polarity."""
    x = h = 0
    by_arity: dict[int, int] = {}
    for g in c.gates:
        if g.kind == "x":
            x += 1
        elif g.kind == "h":
            h += 1
        else:
            arity = len(g.controls)
            by_arity[arity] = by_arity.get(arity, 0) + 1
    return ResourceReport(c.qubit_count, len(c.gates), x, h, by_arity)


def inverse(c: Circuit) -> Circuit:
    """Reverse the gate order; X, H and MCX are all self-inverse."""
    return Circuit(c.qubit_count, dict(c.registers), list(reversed(c.gates)))


# ---------------------------------------------------------------------------
# Basis-state evaluation


def _apply_to_int(gates, state: int) -> int:
    for g in gates:
        if g.kind == "x":
            state ^= 1 << g.target
        elif g.kind == "mcx":
            for q, pol in g.controls:
                if bool(state & (1 << q)) != pol:
                    break
            else:
                state ^= 1 << g.target
        else:
            raise CircuitError("basis evaluator handles permutation gates only (no H)")
    return state


def bits_to_int(bits: str) -> int:
    return sum(1 << i for i, ch in enumerate(bits) if ch == "1")


def int_to_bits(state: int, qubit_count: int) -> str:
    return "".join("1" if state & (1 << i) else "0" for i in range(qubit_count))


def eval_basis(c: Circuit, bits: str) -> str:
    """Image of one basis state under an H-free circuit.

    ``bits`` is a string with qubit 0 leftmost; the result uses the same
    convention.
    """
    if len(bits) != c.qubit_count:
        raise CircuitError(f"state has {len(bits)} bits, circuit has {c.qubit_count} qubits")
    return int_to_bits(_apply_to_int(c.gates, bits_to_int(bits)), c.qubit_count)


def eval_basis_int(c: Circuit, state: int) -> int:
    """Integer-mask variant of :func:`eval_basis` (bit i = qubit i)."""
    if state < 0 or state >> c.qubit_count:
        raise CircuitError("state outside the circuit's qubit range")
    return _apply_to_int(c.gates, state)


# ---------------------------------------------------------------------------
# Bit-sliced batch evaluation: one arbitrary-size integer per qubit, where bit
# s of column j is the value of qubit j in the s-th basis state. Gates act on
# all states at once through bitwise big-integer arithmetic.


def enumeration_columns(bit_count: int) -> list[int]:
    """Columns enumerating all ``2**bit_count`` assignments of the given bits.

    Bit s of column j equals bit j of the integer s, so state s carries the
    binary expansion of its own index.
    """
    total = 1 << bit_count
    full = (1 << total) - 1
    cols = []
    for j in range(bit_count):
        period = 1 << j
        cols.append((full // ((1 << period) + 1)) << period)
    return cols


def columns_from_indices(indices: np.ndarray, bit_count: int) -> list[int]:
    """Columns whose s-th bit is bit j of ``indices[s]``."""
    indices = np.asarray(indices, dtype=np.int64)
    cols = []
    for j in range(bit_count):
        bits = ((indices >> j) & 1).astype(np.uint8)
        cols.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
    return cols


def column_bits(column: int, count: int) -> np.ndarray:
    """Unpack a column into a boolean vector of length ``count``."""
    nbytes = (count + 7) // 8
    raw = np.frombuffer(column.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:count].astype(bool)


def eval_basis_batch(c: Circuit, columns: list[int], count: int) -> list[int]:
    """Run an H-free circuit over ``count`` basis states encoded as bit columns.

    ``columns`` must list one integer per circuit qubit; missing high bits are
    zeros. Returns new columns, inputs untouched.
    """
    if len(columns) != c.qubit_count:
        raise CircuitError("one column per qubit required")
    full = (1 << count) - 1
    cols = list(columns)
    for g in c.gates:
        if g.kind == "x":
            cols[g.target] ^= full
        elif g.kind == "mcx":
            acc = full
            for q, pol in g.controls:
                acc &= cols[q] if pol else cols[q] ^ full
                if not acc:
                    break
            cols[g.target] ^= acc
        else:
            raise CircuitError("basis evaluator handles permutation gates only (no H)")
    return cols


def register_values(columns: list[int], ref: RegisterRef, count: int) -> np.ndarray:
    """Per-state integer value of a register, from bit columns."""
    values = np.zeros(count, dtype=np.int64)
    for j in range(ref.width):
        values |= column_bits(columns[ref.start + j], count).astype(np.int64) << j
    return values


# ---------------------------------------------------------------------------
# Dense statevector evaluation


def eval_statevector(c: Circuit, amplitudes: np.ndarray) -> np.ndarray:
    """Apply every gate as its unitary to a dense state of 2**n amplitudes.

    Amplitude index s is the basis state whose qubit i reads bit i of s.
    """
    n = c.qubit_count
    if n > STATEVECTOR_QUBIT_CAP:
        raise CircuitError(f"statevector evaluation capped at {STATEVECTOR_QUBIT_CAP} qubits")
    state = np.asarray(amplitudes, dtype=complex)
    if state.shape != (1 << n,):
        raise CircuitError("amplitude vector length must be 2**qubit_count")
    if abs(np.linalg.norm(state) - 1.0) > 1e-12:
        raise CircuitError("input state is not normalized")
    state = state.copy().reshape([2] * n)

    def axis(q: int) -> int:
        return n - 1 - q  # C-order reshape puts qubit 0 in the last axis

    inv_sqrt2 = 2.0**-0.5
    for g in c.gates:
        if g.kind == "x":
            state = np.flip(state, axis=axis(g.target))
        elif g.kind == "h":
            ax = axis(g.target)
            lo = np.take(state, 0, axis=ax)
            hi = np.take(state, 1, axis=ax)
            state = np.stack(((lo + hi) * inv_sqrt2, (lo - hi) * inv_sqrt2), axis=ax)
        else:
            sel: list = [slice(None)] * n
            for q, pol in g.controls:
                sel[axis(q)] = 1 if pol else 0
            i0, i1 = list(sel), list(sel)
            i0[axis(g.target)] = 0
            i1[axis(g.target)] = 1
            i0, i1 = tuple(i0), tuple(i1)
            tmp = state[i0].copy()
            state[i0] = state[i1]
            state[i1] = tmp
    return state.reshape(-1)
