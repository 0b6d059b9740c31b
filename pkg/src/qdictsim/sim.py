"""Sparse state-vector simulator for reversible circuits.

The state is a map from basis assignments to complex amplitudes, so circuits
built from X / CNOT / Toffoli / phase flips cost time proportional to the
number of nonzero terms rather than 2^n.  The only non-permutation operation
is the X-basis measurement used to retire ancilla qubits.
"""

from __future__ import annotations

import math
import random
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

DEFAULT_PRUNE_EPS = 1e-14


class DuplicateQubit(Exception):
    """A gate was given the same qubit twice."""


class UnallocatedQubit(Exception):
    """An operation referenced a qubit that is not currently allocated."""


class NonZeroRelease(Exception):
    """A register was freed while some term still had a nonzero bit in it.

    This is the signature of a failed uncomputation.
    """


class LayoutMismatch(Exception):
    """Two states cover different qubit sets and cannot be compared."""


@dataclass(frozen=True)
class Register:
    """An ordered list of qubit ids holding a little-endian integer.

    Bit i of the register's value lives on ``qubits[i]`` and has weight 2**i.
    """

    qubits: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise DuplicateQubit(f"register repeats a qubit: {self.qubits}")

    @property
    def width(self) -> int:
        return len(self.qubits)

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, i: int) -> int:
        return self.qubits[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self.qubits)

    def mask(self) -> int:
        m = 0
        for q in self.qubits:
            m |= 1 << q
        return m

    def bits_for(self, value: int) -> int:
        """Key bits that encode `value` in this register."""
        if not 0 <= value < (1 << self.width):
            raise ValueError(f"value {value} does not fit in {self.width} bits")
        bits = 0
        for i, q in enumerate(self.qubits):
            if (value >> i) & 1:
                bits |= 1 << q
        return bits

    def value_from_key(self, key: int) -> int:
        """Little-endian integer held by this register in basis key `key`."""
        v = 0
        for i, q in enumerate(self.qubits):
            if (key >> q) & 1:
                v |= 1 << i
        return v


@dataclass
class GateStats:
    """Exact gate tallies for one simulator instance.

    `toffoli` counts Toffolis and Fredkins (a Fredkin is emitted as
    1 Toffoli + 2 CNOTs).  `cnot` and `single_qubit` track Clifford work but
    are free in the headline metric.  `expected_toffoli` accumulates in exact
    half-units: a normal Toffoli adds 1, while a deferred measurement fixup
    adds half its circuit cost regardless of the sampled outcome, so one run
    reports the analytic expectation.  Classically-conditioned Clifford
    fixups (the CZs that retire temporary-AND ancillas) are not tallied;
    charging them would make the Clifford counts depend on measurement
    outcomes instead of circuit structure.
    """

    toffoli: int = 0
    cnot: int = 0
    single_qubit: int = 0
    x_measurements: int = 0
    fixups_applied: int = 0
    ancilla_high_water: int = 0
    expected_half_toffolis: int = 0
    _suppress_expected: int = field(default=0, repr=False)

    @property
    def expected_toffoli(self) -> float:
        return self.expected_half_toffolis / 2

    def add_toffoli(self):
        self.toffoli += 1
        if not self._suppress_expected:
            self.expected_half_toffolis += 2

    def add_deferred_fixup(self, toffoli_cost: int):
        """Charge half of `toffoli_cost` to the expectation accumulator."""
        self.expected_half_toffolis += toffoli_cost

    @contextmanager
    def expected_already_charged(self):
        """Scope whose Toffolis were pre-charged to the expectation at weight 1/2."""
        self._suppress_expected += 1
        try:
            yield
        finally:
            self._suppress_expected -= 1

    def copy(self) -> "GateStats":
        return replace(self)

    def as_dict(self) -> dict:
        return {
            "toffoli": self.toffoli,
            "cnot": self.cnot,
            "single_qubit": self.single_qubit,
            "x_measurements": self.x_measurements,
            "fixups_applied": self.fixups_applied,
            "ancilla_high_water": self.ancilla_high_water,
            "expected_toffoli": self.expected_toffoli,
        }


@dataclass(frozen=True)
class SparseState:
    """Immutable snapshot of a simulator state."""

    terms: dict[int, complex]
    qubits: tuple[int, ...]


def fidelity(a: SparseState, b: SparseState) -> float:
    """Returns |<a|b>|^2.  Raises LayoutMismatch if qubit sets differ."""
    if a.qubits != b.qubits:
        raise LayoutMismatch(f"{a.qubits} vs {b.qubits}")
    overlap = 0j
    for key, amp in a.terms.items():
        other = b.terms.get(key)
        if other is not None:
            overlap += amp.conjugate() * other
    return abs(overlap) ** 2


class Simulator:
    """Sparse simulator over an allocatable qubit pool.

    Gate set: X, CNOT, Toffoli, Z, CZ, arbitrary phase flips on classical
    predicates, and X-basis measurement.  All measurement randomness comes
    from the seed given at construction, so replaying a circuit with the same
    seed reproduces states, outcomes and stats bit for bit.
    """

    def __init__(self, seed: int = 0, prune_eps: float = DEFAULT_PRUNE_EPS,
                 trace: list[str] | None = None):
        self.rng = random.Random(seed)
        self.prune_eps = prune_eps
        self.trace = trace
        self.stats = GateStats()
        self.terms: dict[int, complex] = {0: 1.0 + 0j}
        self._allocated: set[int] = set()
        self._free_pool: list[int] = []
        self._next_id = 0
        self._ancilla_baseline = 0

    # ---- allocation ----

    def alloc(self, n: int, initial: int = 0) -> Register:
        """Allocates a fresh n-qubit register initialized to `initial`."""
        if n < 1:
            raise ValueError("register width must be >= 1")
        if not 0 <= initial < (1 << n):
            raise ValueError(f"initial value {initial} does not fit in {n} bits")
        ids = []
        for _ in range(n):
            q = self._free_pool.pop() if self._free_pool else self._next_id
            if q == self._next_id:
                self._next_id += 1
            ids.append(q)
            self._allocated.add(q)
        reg = Register(tuple(ids))
        bits = reg.bits_for(initial)
        if bits:
            self.terms = {key | bits: amp for key, amp in self.terms.items()}
        depth = len(self._allocated) - self._ancilla_baseline
        if depth > self.stats.ancilla_high_water:
            self.stats.ancilla_high_water = depth
        return reg

    def free(self, reg: Register):
        """Releases a register.  Every term must have its bits at 0."""
        self._require_allocated(reg.qubits)
        mask = reg.mask()
        for key, amp in self.terms.items():
            if key & mask:
                raise NonZeroRelease(
                    f"register {reg.qubits} is not cleared: term {key:b} has "
                    f"amplitude {amp}")
        for q in reg.qubits:
            self._allocated.discard(q)
            self._free_pool.append(q)

    def reset_stats(self):
        """Zeroes all counters and rebases the ancilla high-water mark."""
        self.stats = GateStats()
        self._ancilla_baseline = len(self._allocated)

    @property
    def allocated_count(self) -> int:
        return len(self._allocated)

    def _require_allocated(self, qs):
        for q in qs:
            if q not in self._allocated:
                raise UnallocatedQubit(f"qubit {q} is not allocated")

    def _emit(self, line: str):
        if self.trace is not None:
            self.trace.append(line)

    # ---- permutation gates ----

    def x(self, q: int):
        """Performs `q ^= 1`."""
        self._require_allocated((q,))
        bit = 1 << q
        self.terms = {key ^ bit: amp for key, amp in self.terms.items()}
        self.stats.single_qubit += 1
        self._emit(f"GATE X {q}")

    def cnot(self, c: int, t: int):
        """Performs `t ^= c`."""
        if c == t:
            raise DuplicateQubit(f"cnot control equals target: {c}")
        self._require_allocated((c, t))
        cbit, tbit = 1 << c, 1 << t
        self.terms = {
            (key ^ tbit if key & cbit else key): amp
            for key, amp in self.terms.items()
        }
        self.stats.cnot += 1
        self._emit(f"GATE CNOT {c} {t}")

    def toffoli(self, c1: int, c2: int, t: int):
        """Performs `t ^= c1 & c2`."""
        if len({c1, c2, t}) != 3:
            raise DuplicateQubit(f"toffoli operands coincide: {c1} {c2} {t}")
        self._require_allocated((c1, c2, t))
        cbits = (1 << c1) | (1 << c2)
        tbit = 1 << t
        self.terms = {
            (key ^ tbit if key & cbits == cbits else key): amp
            for key, amp in self.terms.items()
        }
        self.stats.add_toffoli()
        self._emit(f"GATE TOFFOLI {c1} {c2} {t}")

    # ---- phase gates ----

    def z(self, q: int):
        """Negates the amplitude of terms where q is 1."""
        self._require_allocated((q,))
        bit = 1 << q
        for key in self.terms:
            if key & bit:
                self.terms[key] = -self.terms[key]
        self.stats.single_qubit += 1
        self._emit(f"GATE Z {q}")

    def cz(self, a: int, b: int):
        """Negates the amplitude of terms where both a and b are 1."""
        if a == b:
            raise DuplicateQubit(f"cz operands coincide: {a}")
        self._require_allocated((a, b))
        bits = (1 << a) | (1 << b)
        for key in self.terms:
            if key & bits == bits:
                self.terms[key] = -self.terms[key]
        self.stats.cnot += 1
        self._emit(f"GATE CZ {a} {b}")

    def phase_flip_where(self, pred: Callable[[Callable[[Register], int]], bool]):
        """Negates amplitudes of terms satisfying `pred`.

        `pred` receives a reader: a function mapping a Register to its integer
        value in the current term.  This is the abstract (uncharged) phase
        primitive; counted circuits realize their phases with gates instead.
        """
        for key in self.terms:
            read = lambda reg, _k=key: reg.value_from_key(_k)
            if pred(read):
                self.terms[key] = -self.terms[key]

    def fixup_cz(self, a: int, b: int):
        """Classically-conditioned CZ used to retire a measured AND ancilla.

        Traced but not tallied: whether it runs depends on a measurement
        outcome, not on circuit structure.
        """
        if a == b:
            raise DuplicateQubit(f"cz operands coincide: {a}")
        self._require_allocated((a, b))
        bits = (1 << a) | (1 << b)
        for key in self.terms:
            if key & bits == bits:
                self.terms[key] = -self.terms[key]
        self._emit(f"GATE CZ {a} {b}")

    def fixup_z(self, q: int):
        """Classically-conditioned Z partner of `fixup_cz`."""
        self._require_allocated((q,))
        bit = 1 << q
        for key in self.terms:
            if key & bit:
                self.terms[key] = -self.terms[key]
        self._emit(f"GATE Z {q}")

    # ---- measurement ----

    def measure_x(self, q: int) -> int:
        """X-basis measurement of q; leaves q in |0> so it can be freed.

        Equivalent to H, a computational-basis measurement, and a conditional
        X, applied as one exact step: writing the state as
        |0>a + |1>b, outcome 0 collapses onto (a+b) and outcome 1 onto (a-b),
        renormalized, with q forced back to |0>.  Returns 0 for the |+>
        outcome and 1 for |->.
        """
        self._require_allocated((q,))
        bit = 1 << q
        plus: dict[int, complex] = {}
        minus: dict[int, complex] = {}
        for key, amp in self.terms.items():
            base = key & ~bit
            if key & bit:
                plus[base] = plus.get(base, 0j) + amp
                minus[base] = minus.get(base, 0j) - amp
            else:
                plus[base] = plus.get(base, 0j) + amp
                minus[base] = minus.get(base, 0j) + amp
        s_plus = math.fsum(abs(a) ** 2 for a in plus.values())
        s_minus = math.fsum(abs(a) ** 2 for a in minus.values())
        p_minus = s_minus / (s_plus + s_minus)
        outcome = 1 if self.rng.random() < p_minus else 0
        chosen, s = (minus, s_minus) if outcome else (plus, s_plus)
        norm = math.sqrt(s)
        eps = self.prune_eps
        self.terms = {k: a / norm for k, a in chosen.items() if abs(a) > eps}
        self.stats.x_measurements += 1
        self._emit(f"XMEAS {q} -> {outcome}")
        return outcome

    # ---- inspection ----

    def snapshot(self) -> SparseState:
        return SparseState(dict(self.terms), tuple(sorted(self._allocated)))

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.terms.values())

    def register_values(self, reg: Register) -> set[int]:
        """Set of values `reg` takes across all nonzero terms."""
        self._require_allocated(reg.qubits)
        return {reg.value_from_key(key) for key in self.terms}

    def read_register(self, reg: Register) -> int:
        """Value of `reg`, which must be classical across every term."""
        vals = self.register_values(reg)
        if len(vals) != 1:
            raise ValueError(f"register {reg.qubits} is in superposition: {vals}")
        return vals.pop()

    def load_terms(self, terms: dict[int, complex]):
        """Replaces the state with the given (key -> amplitude) map.

        Keys may only set bits of currently allocated qubits.  Amplitudes are
        normalized.  Test and state-preparation instrumentation; arbitrary
        superpositions cannot be reached through the gate set alone.
        """
        if not terms:
            raise ValueError("state must have at least one term")
        allowed = 0
        for q in self._allocated:
            allowed |= 1 << q
        for key in terms:
            if key & ~allowed:
                raise UnallocatedQubit(f"key {key:b} sets bits outside {allowed:b}")
        norm = math.sqrt(math.fsum(abs(a) ** 2 for a in terms.values()))
        if norm == 0:
            raise ValueError("state must have nonzero norm")
        self.terms = {k: complex(a) / norm for k, a in terms.items()
                      if abs(a) > 0}
