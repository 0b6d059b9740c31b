"""A quantum dictionary stored as a sorted list of (address, value) pairs.

The dictionary has fixed capacity C, address width A and value width V.
Unused slots hold the sentinel pair (MAX_ADDRESS, 0), where MAX_ADDRESS is
the all-ones address.  Because the pair list is kept sorted and real
addresses cannot repeat, every mapping has exactly one encoding, so no
information about operation history can leak into the registers and spoil
interference.

The primitive operation is `extract`: pull an addressed value out of the
dictionary into a zeroed output register.  `inject` is its structural
reverse, and the remaining operations are built from the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .arith import (
    EqualsRegister,
    GreaterThan,
    UncomputeMode,
    add_into,
    compare_gt_bit,
    compute_equals,
    controlled_swap_registers,
    is_zero,
    swap_registers,
    uncompute_bit,
)
from .sim import Register, Simulator


class CapacityExceeded(Exception):
    """More entries than the dictionary's capacity."""


class ReservedAddress(Exception):
    """The all-ones address is reserved for the empty-slot sentinel."""


class ZeroValue(Exception):
    """Value 0 means "absent" and cannot be stored explicitly."""


class NonZeroOutput(Exception):
    """extract requires the output register to be 0 in every term."""


@dataclass(frozen=True)
class ClassicalDict:
    """A classical mapping obeying the dictionary's encoding bounds.

    Addresses lie in [0, 2^A - 2] (the all-ones address is the sentinel),
    values in [1, 2^V - 1] (zero means absent), and at most `capacity`
    entries are present.
    """

    capacity: int
    address_bits: int
    value_bits: int
    entries: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if min(self.capacity, self.address_bits, self.value_bits) < 1:
            raise ValueError("capacity and widths must be >= 1")
        if len(self.entries) > self.capacity:
            raise CapacityExceeded(
                f"{len(self.entries)} entries > capacity {self.capacity}")
        max_address = (1 << self.address_bits) - 1
        for a, v in self.entries.items():
            if not 0 <= a < max_address:
                raise ReservedAddress(
                    f"address {a} outside [0, {max_address - 1}]")
            if not 1 <= v < (1 << self.value_bits):
                if v == 0:
                    raise ZeroValue(f"address {a} maps to 0")
                raise ValueError(f"value {v} does not fit in {self.value_bits} bits")

    @property
    def max_address(self) -> int:
        return (1 << self.address_bits) - 1

    def get(self, address: int) -> int:
        """Value at `address`, with 0 meaning absent."""
        return self.entries.get(address, 0)

    def with_entries(self, entries: dict[int, int]) -> "ClassicalDict":
        return ClassicalDict(self.capacity, self.address_bits,
                             self.value_bits, dict(entries))

    def canonical_pairs(self) -> list[tuple[int, int]]:
        """The unique sorted, sentinel-padded pair list for this mapping."""
        pairs = sorted(self.entries.items())
        pairs += [(self.max_address, 0)] * (self.capacity - len(pairs))
        return pairs


def has_space(d: ClassicalDict) -> bool:
    """True when at least one slot is still a sentinel pair."""
    return len(d.entries) < d.capacity


@dataclass(frozen=True)
class QuantumDict:
    """Register layout of an encoded dictionary: C address/value slot pairs."""

    addrs: tuple[Register, ...]
    vals: tuple[Register, ...]
    capacity: int
    address_bits: int
    value_bits: int

    @property
    def max_address(self) -> int:
        return (1 << self.address_bits) - 1

    def register_mask(self) -> int:
        m = 0
        for reg in self.addrs + self.vals:
            m |= reg.mask()
        return m

    def bits_for(self, d: ClassicalDict) -> int:
        """Basis-key bits encoding the canonical pair list of `d`."""
        bits = 0
        for (a, v), areg, vreg in zip(d.canonical_pairs(), self.addrs, self.vals):
            bits |= areg.bits_for(a) | vreg.bits_for(v)
        return bits


def encode(sim: Simulator, d: ClassicalDict) -> QuantumDict:
    """Allocates registers holding the canonical basis state of `d`."""
    addrs, vals = [], []
    for a, v in d.canonical_pairs():
        addrs.append(sim.alloc(d.address_bits, a))
        vals.append(sim.alloc(d.value_bits, v))
    return QuantumDict(tuple(addrs), tuple(vals), d.capacity,
                       d.address_bits, d.value_bits)


class ViolationKind(Enum):
    SORTED = "sorted"
    DISTINCT = "distinct"
    SENTINEL_PAIRING = "sentinel_pairing"


@dataclass(frozen=True)
class InvalidEncoding:
    """A basis term that breaks an encoding invariant, and where."""

    kind: ViolationKind
    index: int


def classify_pairs(pairs: list[tuple[int, int]], max_address: int):
    """Returns the decoded entries dict, or the first invariant violation."""
    for i, (a, v) in enumerate(pairs):
        if i + 1 < len(pairs) and a > pairs[i + 1][0]:
            return InvalidEncoding(ViolationKind.SORTED, i)
        if (i + 1 < len(pairs) and a == pairs[i + 1][0]
                and a != max_address):
            return InvalidEncoding(ViolationKind.DISTINCT, i)
        if (v == 0) != (a == max_address):
            return InvalidEncoding(ViolationKind.SENTINEL_PAIRING, i)
    return {a: v for a, v in pairs if a != max_address}


def decode(sim: Simulator, qd: QuantumDict):
    """Reads each basis term's dictionary registers.

    Returns a list of (ClassicalDict | InvalidEncoding, amplitude), one entry
    per nonzero term, ordered by basis key.  Terms equal on the dictionary
    registers but differing elsewhere appear separately.
    """
    out = []
    for key in sorted(sim.terms):
        pairs = [(areg.value_from_key(key), vreg.value_from_key(key))
                 for areg, vreg in zip(qd.addrs, qd.vals)]
        decoded = classify_pairs(pairs, qd.max_address)
        if isinstance(decoded, dict):
            decoded = ClassicalDict(qd.capacity, qd.address_bits,
                                    qd.value_bits, decoded)
        out.append((decoded, sim.terms[key]))
    return out


def superpose_dicts(sim: Simulator, qd: QuantumDict,
                    dicts: list[ClassicalDict],
                    amplitudes: list[complex] | None = None):
    """Replaces the dictionary registers with a superposition of mappings.

    The simulator must currently hold a single basis term; all other
    registers keep their values in every branch.
    """
    if len(sim.terms) != 1:
        raise ValueError("state must be a single basis term")
    (base_key,) = sim.terms
    base = base_key & ~qd.register_mask()
    if amplitudes is None:
        amplitudes = [1.0] * len(dicts)
    terms = {}
    for d, amp in zip(dicts, amplitudes):
        terms[base | qd.bits_for(d)] = terms.get(base | qd.bits_for(d), 0j) + amp
    sim.load_terms(terms)


def _check_extract_preconditions(sim: Simulator, qd: QuantumDict,
                                 address: Register, output: Register):
    for key in sim.terms:
        if output.value_from_key(key) != 0:
            raise NonZeroOutput(
                f"output register holds {output.value_from_key(key)} in some term")
        if address.value_from_key(key) == qd.max_address:
            raise ReservedAddress(
                "querying the all-ones address is not supported: it is "
                "indistinguishable from an empty slot")


def _clear_or_load_appended_address(sim: Simulator, qd: QuantumDict,
                                    address: Register, extra: Register,
                                    marker: Register):
    """XORs into `extra`: MAX_ADDRESS where marker == 0, else `address`.

    Self-inverse.  `marker` must already hold [value register == 0].  Used
    both to clear the leftover appended address at the end of extraction and
    to load it at the start of injection.
    """
    for q in extra:
        sim.cnot(marker[0], q)
    sim.x(marker[0])
    for i in range(extra.width):
        sim.toffoli(marker[0], address[i], extra[i])
    sim.x(marker[0])


def extract(sim: Simulator, qd: QuantumDict, address: Register,
            output: Register, mode: UncomputeMode = UncomputeMode.MEASURE_FIXUP,
            validate: bool = True, _drop_value_swap_at: int | None = None):
    """Moves the addressed value out of the dictionary.

    Performs: swap output, dict[address]
    Requires: output == 0 in every term; address below the sentinel.
    Ensures: dict[address] == 0; output == 0 or the dictionary gained a slot.

    A sentinel pair is appended (fresh all-ones address register; the output
    register doubles as its value), then one pass walks the list comparing
    the query address with each slot and pushing any match one slot toward
    the end.  The per-slot match bit is cleared against the sort-order
    violation the push leaves behind, using `mode`.  Afterwards the appended
    address holds the query address on a hit and the sentinel on a miss,
    which the final block erases conditioned on whether the output is zero.

    `_drop_value_swap_at` deliberately skips one value swap; it exists so
    verification tooling can prove it notices a corrupted circuit.
    """
    if validate:
        _check_extract_preconditions(sim, qd, address, output)
    extra = sim.alloc(qd.address_bits, qd.max_address)
    addrs = list(qd.addrs) + [extra]
    vals = list(qd.vals) + [output]
    for k in range(qd.capacity):
        eq = sim.alloc(1)
        compute_equals(sim, address, addrs[k], eq)
        if _drop_value_swap_at != k:
            controlled_swap_registers(sim, eq, vals[k], vals[k + 1])
        controlled_swap_registers(sim, eq, addrs[k], addrs[k + 1])
        uncompute_bit(sim, eq, GreaterThan(addrs[k], addrs[k + 1]), mode)
        sim.free(eq)
    z = sim.alloc(1)
    is_zero(sim, output, z)
    _clear_or_load_appended_address(sim, qd, address, extra, z)
    is_zero(sim, output, z)
    sim.free(z)
    sim.free(extra)


def inject(sim: Simulator, qd: QuantumDict, address: Register,
           value: Register, mode: UncomputeMode = UncomputeMode.MEASURE_FIXUP):
    """Moves a value into the dictionary at an absent address.

    Performs: swap value, dict[address]
    Requires: dict[address] == 0 in every term; a free slot or value == 0.
    Ensures: value == 0.

    Structural reverse of `extract` with the two per-slot predicates
    exchanged: the match bit is computed from the sort-order violation and
    cleared against equality with the query address.  Precondition
    violations are not detectable per-gate; they surface when the appended
    address register fails to clear (NonZeroRelease, in CLEAN mode).
    """
    extra = sim.alloc(qd.address_bits)
    z = sim.alloc(1)
    is_zero(sim, value, z)
    _clear_or_load_appended_address(sim, qd, address, extra, z)
    is_zero(sim, value, z)
    sim.free(z)
    addrs = list(qd.addrs) + [extra]
    vals = list(qd.vals) + [value]
    for k in reversed(range(qd.capacity)):
        eq = sim.alloc(1)
        compare_gt_bit(sim, addrs[k], addrs[k + 1], eq)
        controlled_swap_registers(sim, eq, addrs[k], addrs[k + 1])
        controlled_swap_registers(sim, eq, vals[k], vals[k + 1])
        uncompute_bit(sim, eq, EqualsRegister(address, addrs[k]), mode)
        sim.free(eq)
    for q in extra:
        sim.x(q)
    sim.free(extra)


def swap_value(sim: Simulator, qd: QuantumDict, address: Register,
               value: Register, mode: UncomputeMode = UncomputeMode.MEASURE_FIXUP,
               validate: bool = True):
    """Performs: swap dict[address], value.

    Requires a free slot unless the swap cannot grow the entry count
    (value == 0 implies dict[address] must be absent or the swap shrinks it).
    """
    temp = sim.alloc(qd.value_bits)
    extract(sim, qd, address, temp, mode, validate)
    swap_registers(sim, value, temp)
    inject(sim, qd, address, temp, mode)
    sim.free(temp)


def add_value_into_dict(sim: Simulator, value: Register, qd: QuantumDict,
                        address: Register,
                        mode: UncomputeMode = UncomputeMode.MEASURE_FIXUP,
                        validate: bool = True):
    """Performs: dict[address] += value (mod 2^V); value is unchanged.

    A sum of 0 deletes the entry, keeping the zero-means-absent convention.
    """
    temp = sim.alloc(qd.value_bits)
    extract(sim, qd, address, temp, mode, validate)
    add_into(sim, value, temp)
    inject(sim, qd, address, temp, mode)
    sim.free(temp)


def add_dict_into_value(sim: Simulator, qd: QuantumDict, address: Register,
                        value: Register,
                        mode: UncomputeMode = UncomputeMode.MEASURE_FIXUP,
                        validate: bool = True):
    """Performs: value += dict[address] (mod 2^V); the dictionary is unchanged."""
    temp = sim.alloc(qd.value_bits)
    extract(sim, qd, address, temp, mode, validate)
    add_into(sim, temp, value)
    inject(sim, qd, address, temp, mode)
    sim.free(temp)
