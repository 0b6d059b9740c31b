"""Reversible arithmetic building blocks with exact Toffoli accounting.

All multi-bit predicates are computed through temporary AND ancillas: each
AND costs one Toffoli to compute and is retired for free by an X-basis
measurement plus a classically-conditioned CZ.  That is what makes an
equality test cost `w - 1` Toffolis and a ripple comparator cost `w`, the
same as a ripple-carry adder.

Cost functions (`*_toffoli_cost`) are the single source of truth for the
resource model; tests pin them against the measured gate tallies.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .sim import Register, Simulator


class WidthMismatch(Exception):
    """Two registers that must have equal widths do not."""


class UncomputeMode(Enum):
    """How `uncompute_bit` clears an ancilla known to equal a predicate.

    CLEAN recomputes the predicate into the bit (deterministic, full cost).
    MEASURE_FIXUP measures the bit in the X basis and applies the predicate's
    phase-flip realization on the |-> outcome, so the predicate cost is paid
    only half the time in expectation.
    """

    CLEAN = "clean"
    MEASURE_FIXUP = "measure"


def _require_same_width(a: Register, b: Register):
    if a.width != b.width:
        raise WidthMismatch(f"{a.width} != {b.width}")


def _and(sim: Simulator, x: int, y: int, t: int):
    """Computes `t ^= x & y` (t must start at 0 when used as a temp AND)."""
    sim.toffoli(x, y, t)


def _unand(sim: Simulator, x: int, y: int, t: int):
    """Retires temp ancilla t == x & y by measurement; no Toffoli cost."""
    if sim.measure_x(t) == 1:
        sim.fixup_cz(x, y)


def _ladder_and_into(sim: Simulator, bits: list[int], target: int):
    """Performs `target ^= AND(bits)` using a temporary-AND ladder."""
    w = len(bits)
    if w == 0:
        sim.x(target)
        return
    if w == 1:
        sim.cnot(bits[0], target)
        return
    if w == 2:
        _and(sim, bits[0], bits[1], target)
        return
    ladder = []
    acc = sim.alloc(1)
    _and(sim, bits[0], bits[1], acc[0])
    ladder.append((acc, bits[0], bits[1]))
    for b in bits[2:-1]:
        nxt = sim.alloc(1)
        _and(sim, ladder[-1][0][0], b, nxt[0])
        ladder.append((nxt, ladder[-1][0][0], b))
    _and(sim, ladder[-1][0][0], bits[-1], target)
    for reg, x, y in reversed(ladder):
        _unand(sim, x, y, reg[0])
        sim.free(reg)


def _ladder_phase_on_and(sim: Simulator, bits: list[int]):
    """Negates amplitudes of terms where AND(bits) is 1."""
    w = len(bits)
    if w == 0:
        return  # global phase
    if w == 1:
        sim.z(bits[0])
        return
    if w == 2:
        sim.cz(bits[0], bits[1])
        return
    ladder = []
    acc = sim.alloc(1)
    _and(sim, bits[0], bits[1], acc[0])
    ladder.append((acc, bits[0], bits[1]))
    for b in bits[2:-1]:
        nxt = sim.alloc(1)
        _and(sim, ladder[-1][0][0], b, nxt[0])
        ladder.append((nxt, ladder[-1][0][0], b))
    sim.cz(ladder[-1][0][0], bits[-1])
    for reg, x, y in reversed(ladder):
        _unand(sim, x, y, reg[0])
        sim.free(reg)


# ---- equality ----


def equals_toffoli_cost(w: int) -> int:
    return max(0, w - 1)


def compute_equals(sim: Simulator, a: Register, b: Register, target: Register):
    """Performs `target ^= (a == b)`, restoring a and b.

    XORs b into a, complements, ANDs the w bits into the target through a
    temporary ladder, then unwinds.  Costs `w - 1` Toffolis.
    """
    _require_same_width(a, b)
    for i in range(a.width):
        sim.cnot(b[i], a[i])
    for q in a:
        sim.x(q)
    _ladder_and_into(sim, list(a), target[0])
    for q in a:
        sim.x(q)
    for i in range(a.width):
        sim.cnot(b[i], a[i])


def equals_phase_toffoli_cost(w: int) -> int:
    return max(0, w - 2)


def phase_flip_equals(sim: Simulator, a: Register, b: Register):
    """Negates amplitudes of terms where a == b, restoring both."""
    _require_same_width(a, b)
    for i in range(a.width):
        sim.cnot(b[i], a[i])
    for q in a:
        sim.x(q)
    _ladder_phase_on_and(sim, list(a))
    for q in a:
        sim.x(q)
    for i in range(a.width):
        sim.cnot(b[i], a[i])


# ---- zero test ----


def is_zero_toffoli_cost(w: int) -> int:
    return max(0, w - 1)


def is_zero(sim: Simulator, reg: Register, target: Register):
    """Performs `target ^= (reg == 0)`, restoring reg."""
    for q in reg:
        sim.x(q)
    _ladder_and_into(sim, list(reg), target[0])
    for q in reg:
        sim.x(q)


def phase_flip_zero_toffoli_cost(w: int) -> int:
    return max(0, w - 2)


def phase_flip_zero(sim: Simulator, reg: Register):
    """Negates amplitudes of terms where reg == 0."""
    for q in reg:
        sim.x(q)
    _ladder_phase_on_and(sim, list(reg))
    for q in reg:
        sim.x(q)


# ---- comparison ----


def _gt_carry_chain(sim: Simulator, a: Register, b: Register):
    """Builds the borrow chain of a - b; the top carry reads `a > b`.

    Complements b in place and computes carries of a + ~b with carry-in 0.
    Returns (carry registers, list of (carry, x, y) uncompute records); the
    caller must call `_gt_carry_unwind` with the result.
    """
    w = a.width
    for q in b:
        sim.x(q)
    carries: list[Register] = []
    records = []
    for k in range(w):
        if k > 0:
            prev = carries[-1][0]
            sim.cnot(prev, a[k])
            sim.cnot(prev, b[k])
        c = sim.alloc(1)
        _and(sim, a[k], b[k], c[0])
        if k > 0:
            sim.cnot(carries[-1][0], c[0])
        carries.append(c)
        records.append((c, a[k], b[k]))
    return carries, records


def _gt_carry_unwind(sim: Simulator, a: Register, b: Register, carries, records):
    w = a.width
    for k in reversed(range(w)):
        c, x, y = records[k]
        if k > 0:
            sim.cnot(carries[k - 1][0], c[0])
        _unand(sim, x, y, c[0])
        sim.free(c)
        if k > 0:
            prev = carries[k - 1][0]
            sim.cnot(prev, a[k])
            sim.cnot(prev, b[k])
    for q in b:
        sim.x(q)


def gt_bit_toffoli_cost(w: int) -> int:
    return w


def compare_gt_bit(sim: Simulator, a: Register, b: Register, target: Register):
    """Performs `target ^= (a > b)` (unsigned), restoring a and b.

    Ripple-carry comparator: the carry out of a + ~b is 1 exactly when
    a > b.  Costs `w` Toffolis, the same as the adder.
    """
    _require_same_width(a, b)
    carries, records = _gt_carry_chain(sim, a, b)
    sim.cnot(carries[-1][0], target[0])
    _gt_carry_unwind(sim, a, b, carries, records)


def gt_phase_toffoli_cost(w: int) -> int:
    return w


def compare_gt_phase(sim: Simulator, a: Register, b: Register):
    """Negates amplitudes of terms where a > b, restoring both.

    Same ripple as `compare_gt_bit` with the target write replaced by a
    phase kickback on the top carry.
    """
    _require_same_width(a, b)
    carries, records = _gt_carry_chain(sim, a, b)
    sim.z(carries[-1][0])
    _gt_carry_unwind(sim, a, b, carries, records)


# ---- addition ----


def add_toffoli_cost(w: int) -> int:
    return max(0, w - 1)


def add_into(sim: Simulator, src: Register, dst: Register):
    """Performs `dst += src (mod 2^w)`, restoring src.

    Ripple-carry adder with temporary-AND carries: `w - 1` Toffolis.
    """
    _require_same_width(src, dst)
    w = src.width
    carries: list[Register] = []
    records = []
    for k in range(w - 1):
        if k > 0:
            prev = carries[-1][0]
            sim.cnot(prev, src[k])
            sim.cnot(prev, dst[k])
        c = sim.alloc(1)
        _and(sim, src[k], dst[k], c[0])
        if k > 0:
            sim.cnot(carries[-1][0], c[0])
        carries.append(c)
        records.append((c, src[k], dst[k]))
    if w > 1:
        sim.cnot(carries[-1][0], dst[w - 1])
    sim.cnot(src[w - 1], dst[w - 1])
    for k in reversed(range(w - 1)):
        c, x, y = records[k]
        if k > 0:
            sim.cnot(carries[k - 1][0], c[0])
        _unand(sim, x, y, c[0])
        sim.free(c)
        if k > 0:
            prev = carries[k - 1][0]
            sim.cnot(prev, src[k])
        sim.cnot(src[k], dst[k])

# ---- swaps ----


def swap_registers(sim: Simulator, a: Register, b: Register):
    """Exchanges a and b (3 CNOTs per bit pair; no Toffoli cost)."""
    _require_same_width(a, b)
    for i in range(a.width):
        sim.cnot(a[i], b[i])
        sim.cnot(b[i], a[i])
        sim.cnot(a[i], b[i])


def cswap_toffoli_cost(w: int) -> int:
    return w


def controlled_swap_registers(sim: Simulator, ctrl: Register, a: Register,
                              b: Register):
    """Exchanges a and b in terms where ctrl is 1 (one Fredkin per bit)."""
    _require_same_width(a, b)
    for i in range(a.width):
        sim.cnot(b[i], a[i])
        sim.toffoli(ctrl[0], a[i], b[i])
        sim.cnot(b[i], a[i])


# ---- predicates for uncomputation ----


@dataclass(frozen=True)
class EqualsRegister:
    """Predicate `a == b` over two equal-width registers."""

    a: Register
    b: Register

    def compute_into(self, sim: Simulator, target: Register):
        compute_equals(sim, self.a, self.b, target)

    def phase_flip(self, sim: Simulator):
        phase_flip_equals(sim, self.a, self.b)

    def phase_toffoli_cost(self) -> int:
        return equals_phase_toffoli_cost(self.a.width)

    def evaluate(self, read) -> bool:
        return read(self.a) == read(self.b)


@dataclass(frozen=True)
class EqualsConstant:
    """Predicate `reg == value` for a classical constant."""

    reg: Register
    value: int

    def compute_into(self, sim: Simulator, target: Register):
        for i, q in enumerate(self.reg):
            if not (self.value >> i) & 1:
                sim.x(q)
        _ladder_and_into(sim, list(self.reg), target[0])
        for i, q in enumerate(self.reg):
            if not (self.value >> i) & 1:
                sim.x(q)

    def phase_flip(self, sim: Simulator):
        for i, q in enumerate(self.reg):
            if not (self.value >> i) & 1:
                sim.x(q)
        _ladder_phase_on_and(sim, list(self.reg))
        for i, q in enumerate(self.reg):
            if not (self.value >> i) & 1:
                sim.x(q)

    def phase_toffoli_cost(self) -> int:
        return max(0, self.reg.width - 2)

    def evaluate(self, read) -> bool:
        return read(self.reg) == self.value


@dataclass(frozen=True)
class GreaterThan:
    """Predicate `a > b` (unsigned) over two equal-width registers."""

    a: Register
    b: Register

    def compute_into(self, sim: Simulator, target: Register):
        compare_gt_bit(sim, self.a, self.b, target)

    def phase_flip(self, sim: Simulator):
        compare_gt_phase(sim, self.a, self.b)

    def phase_toffoli_cost(self) -> int:
        return gt_phase_toffoli_cost(self.a.width)

    def evaluate(self, read) -> bool:
        return read(self.a) > read(self.b)


PredicateSpec = EqualsRegister | EqualsConstant | GreaterThan


def uncompute_bit(sim: Simulator, q: Register, pred: PredicateSpec,
                  mode: UncomputeMode):
    """Clears ancilla `q`, which must equal `pred` in every nonzero term.

    CLEAN recomputes the predicate into q.  MEASURE_FIXUP measures q in the
    X basis and, on the |-> outcome, applies the predicate's phase flip; the
    expectation accumulator is charged half the phase cost unconditionally.
    The caller frees q afterwards; a violated precondition surfaces there as
    NonZeroRelease (CLEAN) or as phase corruption.
    """
    if mode is UncomputeMode.CLEAN:
        pred.compute_into(sim, q)
        return
    sim.stats.add_deferred_fixup(pred.phase_toffoli_cost())
    if sim.measure_x(q[0]) == 1:
        with sim.stats.expected_already_charged():
            pred.phase_flip(sim)
        sim.stats.fixups_applied += 1
