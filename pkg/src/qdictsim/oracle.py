"""Classical executable semantics of every dictionary operation.

`oracle_apply` is the ground truth the circuits are tested against: it runs
the documented state transition directly on a ClassicalDict and classifies
precondition violations instead of guessing at undefined behavior.
`check_permutation` sweeps every valid dictionary and operand assignment at
small bounds and asserts the circuit maps each basis state to exactly the
basis state the oracle predicts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product

from . import qdict as qd_ops
from .arith import UncomputeMode
from .qdict import ClassicalDict, InvalidEncoding, QuantumDict, has_space
from .sim import NonZeroRelease, Simulator

EXHAUSTION_GUARD_QUBITS = 20


class TooLarge(Exception):
    """The requested bounds exceed the exhaustive-sweep guard."""


class OpKind(Enum):
    EXTRACT = "extract"
    INJECT = "inject"
    SWAP_VALUE = "swap_value"
    ADD_INTO_DICT = "add_into_dict"
    ADD_INTO_VALUE = "add_into_value"


# Which operations take a classical value operand (extract's output must be 0).
VALUE_OPERAND_OPS = (OpKind.INJECT, OpKind.SWAP_VALUE, OpKind.ADD_INTO_DICT,
                     OpKind.ADD_INTO_VALUE)


@dataclass(frozen=True)
class OpDescriptor:
    """One dictionary operation with classical operands."""

    kind: OpKind
    address: int
    value: int = 0

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "address": self.address,
                "value": self.value}


@dataclass(frozen=True)
class PreconditionViolation:
    """A requirement the operation's contract states, found unsatisfied."""

    requirement: str


@dataclass(frozen=True)
class OracleResult:
    """Post-state of a classical run: the mapping plus the value register."""

    dict: ClassicalDict
    value: int


def oracle_apply(op: OpDescriptor, d: ClassicalDict):
    """Runs `op` classically.  Returns OracleResult or PreconditionViolation.

    The value register convention matches the circuits: for extract it is the
    output (starts at `op.value`, must be 0), for the other operations it is
    the value operand's register content after the operation.
    """
    a = op.address
    v = op.value
    if not 0 <= a < d.max_address:
        return PreconditionViolation("address < MAX_ADDRESS")
    cur = d.get(a)
    if op.kind is OpKind.EXTRACT:
        if v != 0:
            return PreconditionViolation("output == 0")
        entries = {k: x for k, x in d.entries.items() if k != a}
        return OracleResult(d.with_entries(entries), cur)
    if op.kind is OpKind.INJECT:
        if cur != 0:
            return PreconditionViolation("dict[address] == 0")
        if not (has_space(d) or v == 0):
            return PreconditionViolation("HasSpace(dict) or value == 0")
        entries = dict(d.entries)
        if v != 0:
            entries[a] = v
        return OracleResult(d.with_entries(entries), 0)
    if op.kind is OpKind.SWAP_VALUE:
        if not (has_space(d) or (v != 0) <= (cur != 0)):
            return PreconditionViolation(
                "HasSpace(dict) or ((value != 0) <= (dict[address] != 0))")
        entries = {k: x for k, x in d.entries.items() if k != a}
        if v != 0:
            entries[a] = v
        return OracleResult(d.with_entries(entries), cur)
    if op.kind is OpKind.ADD_INTO_DICT:
        new = (cur + v) % (1 << d.value_bits)
        if not (has_space(d) or (new != 0) <= (cur != 0)):
            return PreconditionViolation(
                "HasSpace(dict) or ((value + dict[address] != 0) <= "
                "(dict[address] != 0))")
        entries = {k: x for k, x in d.entries.items() if k != a}
        if new != 0:
            entries[a] = new
        return OracleResult(d.with_entries(entries), v)
    if op.kind is OpKind.ADD_INTO_VALUE:
        return OracleResult(d, (v + cur) % (1 << d.value_bits))
    raise ValueError(f"unknown op kind {op.kind}")


def oracle_extract(d: ClassicalDict, address: int):
    return oracle_apply(OpDescriptor(OpKind.EXTRACT, address), d)


def oracle_inject(d: ClassicalDict, address: int, value: int):
    return oracle_apply(OpDescriptor(OpKind.INJECT, address, value), d)


def enumerate_valid_dicts(capacity: int, address_bits: int,
                          value_bits: int) -> list[ClassicalDict]:
    """All mappings the encoding can represent, in a deterministic order."""
    if capacity * (address_bits + value_bits) > EXHAUSTION_GUARD_QUBITS:
        raise TooLarge(
            f"{capacity}*({address_bits}+{value_bits}) qubits exceeds the "
            f"{EXHAUSTION_GUARD_QUBITS}-qubit exhaustion guard")
    addresses = range((1 << address_bits) - 1)
    values = range(1, 1 << value_bits)
    out = [ClassicalDict(capacity, address_bits, value_bits, {})]
    for k in range(1, capacity + 1):
        for addrs in combinations(addresses, k):
            for vals in product(values, repeat=k):
                out.append(ClassicalDict(capacity, address_bits, value_bits,
                                         dict(zip(addrs, vals))))
    return out


@dataclass
class Failure:
    dict: ClassicalDict
    op: OpDescriptor
    expected: str
    got: str

    def as_dict(self) -> dict:
        return {
            "dict": {str(a): v for a, v in sorted(self.dict.entries.items())},
            "op": self.op.as_dict(),
            "expected": self.expected,
            "got": self.got,
        }


@dataclass
class Report:
    """Outcome of an exhaustive permutation-equivalence sweep."""

    kind: OpKind
    capacity: int
    address_bits: int
    value_bits: int
    mode: UncomputeMode
    cases: int = 0
    skipped: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "op": self.kind.value,
            "capacity": self.capacity,
            "address_bits": self.address_bits,
            "value_bits": self.value_bits,
            "mode": self.mode.value,
            "cases": self.cases,
            "skipped": self.skipped,
            "failures": [f.as_dict() for f in self.failures],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)


def _run_case(op: OpDescriptor, d: ClassicalDict, mode: UncomputeMode,
              seed: int, drop_value_swap_at: int | None):
    sim = Simulator(seed=seed)
    qd = qd_ops.encode(sim, d)
    address = sim.alloc(d.address_bits, op.address)
    value = sim.alloc(d.value_bits, op.value)
    if op.kind is OpKind.EXTRACT:
        fn = lambda: qd_ops.extract(sim, qd, address, value, mode,
                                    _drop_value_swap_at=drop_value_swap_at)
    elif op.kind is OpKind.INJECT:
        fn = lambda: qd_ops.inject(sim, qd, address, value, mode)
    elif op.kind is OpKind.SWAP_VALUE:
        fn = lambda: qd_ops.swap_value(sim, qd, address, value, mode)
    elif op.kind is OpKind.ADD_INTO_DICT:
        fn = lambda: qd_ops.add_value_into_dict(sim, value, qd, address, mode)
    else:
        fn = lambda: qd_ops.add_dict_into_value(sim, qd, address, value, mode)
    fn()
    return sim, qd, address, value


def check_permutation(kind: OpKind, capacity: int, address_bits: int,
                      value_bits: int,
                      mode: UncomputeMode = UncomputeMode.CLEAN,
                      seed: int = 0,
                      _drop_value_swap_at: int | None = None) -> Report:
    """Checks the circuit against the oracle on every valid basis input.

    For each valid dictionary and each operand assignment whose
    preconditions hold, encodes the dictionary, runs the operation, and
    requires the final state to be the single basis state the oracle
    predicts: amplitude +1 within 1e-12 (exact in CLEAN mode up to float
    rounding of superposition-free arithmetic), the decoded mapping equal,
    the value register equal, and the address register unchanged.
    """
    report = Report(kind, capacity, address_bits, value_bits, mode)
    value_range = range(1 << value_bits) if kind in VALUE_OPERAND_OPS else (0,)
    rng_counter = 0
    for d in enumerate_valid_dicts(capacity, address_bits, value_bits):
        for address in range((1 << address_bits) - 1):
            for value in value_range:
                op = OpDescriptor(kind, address, value)
                expected = oracle_apply(op, d)
                if isinstance(expected, PreconditionViolation):
                    report.skipped += 1
                    continue
                report.cases += 1
                rng_counter += 1
                try:
                    sim, qd, address_reg, value_reg = _run_case(
                        op, d, mode, seed * 1_000_003 + rng_counter,
                        _drop_value_swap_at)
                except NonZeroRelease as exc:
                    report.failures.append(Failure(
                        d, op, _describe_expected(expected),
                        f"NonZeroRelease: {exc}"))
                    continue
                got = _describe_actual(sim, qd, value_reg, address_reg, op)
                want = _describe_expected(expected)
                ok = (
                    len(sim.terms) == 1
                    and abs(next(iter(sim.terms.values())) - 1) <= 1e-12
                    and got == want
                )
                if not ok:
                    report.failures.append(Failure(d, op, want, got))
    return report


def _describe_expected(res: OracleResult) -> str:
    return f"dict={sorted(res.dict.entries.items())} value={res.value}"


def _describe_actual(sim: Simulator, qd: QuantumDict, value_reg, address_reg,
                     op: OpDescriptor) -> str:
    decoded = qd_ops.decode(sim, qd)
    if len(decoded) != 1:
        return f"{len(decoded)} terms: " + "; ".join(
            str(x[0]) for x in decoded[:4])
    state, amp = decoded[0]
    if isinstance(state, InvalidEncoding):
        return f"invalid({state.kind.value}@{state.index}) amp={amp:.6g}"
    vals = sim.register_values(value_reg)
    addrs = sim.register_values(address_reg)
    if addrs != {op.address}:
        return f"address register changed: {addrs}"
    if len(vals) != 1:
        return f"value register in superposition: {vals}"
    return f"dict={sorted(state.entries.items())} value={vals.pop()}"
