"""Cost model, measured gate counts, and leading-coefficient fits.

"Expected" counts are expectations over measurement randomness at fixed
inputs; the circuits' coin flips are fair regardless of the data, so the
weight-1/2 accumulator in GateStats reports the expectation exactly in a
single run.  The model functions here are the package's published cost
formulas; the test suite pins them against measured tallies, so any circuit
change that shifts a constant must update them (and is then visible in the
version history).

Per-slot Toffoli costs, with A = address bits and V = value bits:

    extract, expected:  2.5*A + V - 1        clean:  3*A + V - 1
    inject,  expected:  2.5*A + V - 1 (A>=2) clean:  3*A + V - 1
    value-editing ops (extract + inject):    the sum of both passes

plus a boundary overhead of A + 2*(V - 1) per extraction or injection for
conditionally erasing the appended address register.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass

import numpy as np

from . import qdict as qd_ops
from .arith import (
    UncomputeMode,
    add_toffoli_cost,
    cswap_toffoli_cost,
    equals_phase_toffoli_cost,
    equals_toffoli_cost,
    gt_bit_toffoli_cost,
    gt_phase_toffoli_cost,
    is_zero_toffoli_cost,
)
from .oracle import (
    OpDescriptor,
    OpKind,
    OracleResult,
    TooLarge,
    enumerate_valid_dicts,
    oracle_apply,
)
from .qdict import ClassicalDict
from .sim import Simulator

SUPERPOSITION_QUBIT_LIMIT = 20
SUPERPOSITION_DICT_LIMIT = 128


class InsufficientGrid(Exception):
    """Fewer than three distinct values along the swept parameter."""


# ---- analytic model ----


def _boundary_toffoli_cost(address_bits: int, value_bits: int) -> int:
    """Erasing (or preparing) the appended address: two zero tests plus an
    address-controlled XOR."""
    return address_bits + 2 * is_zero_toffoli_cost(value_bits)


def extract_loop_toffoli_cost(address_bits: int, value_bits: int,
                              mode: UncomputeMode) -> float:
    a, v = address_bits, value_bits
    swaps = cswap_toffoli_cost(a) + cswap_toffoli_cost(v)
    if mode is UncomputeMode.CLEAN:
        return equals_toffoli_cost(a) + swaps + gt_bit_toffoli_cost(a)
    return equals_toffoli_cost(a) + swaps + gt_phase_toffoli_cost(a) / 2


def inject_loop_toffoli_cost(address_bits: int, value_bits: int,
                             mode: UncomputeMode) -> float:
    a, v = address_bits, value_bits
    swaps = cswap_toffoli_cost(a) + cswap_toffoli_cost(v)
    if mode is UncomputeMode.CLEAN:
        return gt_bit_toffoli_cost(a) + swaps + equals_toffoli_cost(a)
    return gt_bit_toffoli_cost(a) + swaps + equals_phase_toffoli_cost(a) / 2


def predict_extract_cost(capacity: int, address_bits: int, value_bits: int,
                         mode: UncomputeMode) -> float:
    """Toffoli count of one extraction: exact in CLEAN mode, expectation in
    MEASURE_FIXUP mode."""
    return (capacity * extract_loop_toffoli_cost(address_bits, value_bits, mode)
            + _boundary_toffoli_cost(address_bits, value_bits))


def predict_inject_cost(capacity: int, address_bits: int, value_bits: int,
                        mode: UncomputeMode) -> float:
    return (capacity * inject_loop_toffoli_cost(address_bits, value_bits, mode)
            + _boundary_toffoli_cost(address_bits, value_bits))


def predict_op_cost(kind: OpKind, capacity: int, address_bits: int,
                    value_bits: int, mode: UncomputeMode) -> float:
    ext = predict_extract_cost(capacity, address_bits, value_bits, mode)
    inj = predict_inject_cost(capacity, address_bits, value_bits, mode)
    if kind is OpKind.EXTRACT:
        return ext
    if kind is OpKind.INJECT:
        return inj
    if kind is OpKind.SWAP_VALUE:
        return ext + inj
    if kind in (OpKind.ADD_INTO_DICT, OpKind.ADD_INTO_VALUE):
        return ext + inj + add_toffoli_cost(value_bits)
    raise ValueError(f"unknown op kind {kind}")


def predict_extract_ancilla(address_bits: int, value_bits: int) -> int:
    """Peak ancilla count of one extraction (capacity-independent).

    The appended address (A) plus the match bit, plus the larger of the
    comparator's carry chain (A) and the zero test's ladder (V - 2).
    """
    a, v = address_bits, value_bits
    return a + 1 + max(a, max(0, v - 2))


# ---- measurement ----


@dataclass
class CostRecord:
    """Measured Toffoli statistics for one (C, A, V, mode) grid point."""

    capacity: int
    address_bits: int
    value_bits: int
    mode: UncomputeMode
    trials: int
    toffoli_mean: float
    toffoli_min: int
    toffoli_max: int
    expected_analytic: float
    ancilla_high_water: int
    seed: int
    op: OpKind = OpKind.EXTRACT

    def as_dict(self) -> dict:
        return {
            "C": self.capacity,
            "A": self.address_bits,
            "V": self.value_bits,
            "mode": self.mode.value,
            "trials": self.trials,
            "toffoli_mean": self.toffoli_mean,
            "toffoli_min": self.toffoli_min,
            "toffoli_max": self.toffoli_max,
            "expected_analytic": self.expected_analytic,
            "ancilla_high_water": self.ancilla_high_water,
            "seed": self.seed,
        }


CSV_HEADER = ["C", "A", "V", "mode", "trials", "toffoli_mean", "toffoli_min",
              "toffoli_max", "expected_analytic", "ancilla_high_water", "seed"]


def records_to_csv(records: list[CostRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.as_dict())
    return buf.getvalue()


def records_to_json(records: list[CostRecord], **kw) -> str:
    return json.dumps([r.as_dict() for r in records], **kw)


def _random_valid_dict(rng: random.Random, capacity: int, address_bits: int,
                       value_bits: int) -> ClassicalDict:
    n = rng.randint(0, capacity)
    addrs = rng.sample(range((1 << address_bits) - 1), n)
    entries = {a: rng.randint(1, (1 << value_bits) - 1) for a in addrs}
    return ClassicalDict(capacity, address_bits, value_bits, entries)


def _random_valid_operands(rng: random.Random, kind: OpKind,
                           d: ClassicalDict) -> OpDescriptor:
    while True:
        a = rng.randrange(d.max_address)
        v = 0
        if kind in (OpKind.INJECT, OpKind.SWAP_VALUE, OpKind.ADD_INTO_DICT,
                    OpKind.ADD_INTO_VALUE):
            v = rng.randrange(1 << d.value_bits)
        op = OpDescriptor(kind, a, v)
        if isinstance(oracle_apply(op, d), OracleResult):
            return op


def _run_op(sim: Simulator, kind: OpKind, qd, address, value, mode):
    if kind is OpKind.EXTRACT:
        qd_ops.extract(sim, qd, address, value, mode, validate=False)
    elif kind is OpKind.INJECT:
        qd_ops.inject(sim, qd, address, value, mode)
    elif kind is OpKind.SWAP_VALUE:
        qd_ops.swap_value(sim, qd, address, value, mode, validate=False)
    elif kind is OpKind.ADD_INTO_DICT:
        qd_ops.add_value_into_dict(sim, value, qd, address, mode, validate=False)
    else:
        qd_ops.add_dict_into_value(sim, qd, address, value, mode, validate=False)


def _use_superposition(kind: OpKind, capacity: int, address_bits: int,
                       value_bits: int) -> bool:
    if kind is not OpKind.EXTRACT:
        return False
    if capacity * (address_bits + value_bits) > SUPERPOSITION_QUBIT_LIMIT:
        return False
    try:
        return len(enumerate_valid_dicts(
            capacity, address_bits, value_bits)) <= SUPERPOSITION_DICT_LIMIT
    except TooLarge:
        return False


def measure_costs(grid: list[tuple[int, int, int]],
                  mode: UncomputeMode = UncomputeMode.MEASURE_FIXUP,
                  trials: int = 1, seed: int = 0,
                  op: OpKind = OpKind.EXTRACT) -> list[CostRecord]:
    """Runs `op` on each grid point and records exact gate tallies.

    Extraction at small bounds runs on the uniform superposition of every
    valid mapping (with a fresh random legal address per trial); larger
    bounds and the other operations run on random precondition-satisfying
    basis states.  Ancilla high-water is the maximum over trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    records = []
    for capacity, address_bits, value_bits in grid:
        if capacity * (address_bits + value_bits) > 40:
            raise TooLarge(
                f"grid point ({capacity},{address_bits},{value_bits}) is not "
                f"simulatable at desk scale")
        rng = random.Random(f"{seed}:{capacity}:{address_bits}:{value_bits}")
        superpose = _use_superposition(op, capacity, address_bits, value_bits)
        if superpose:
            all_dicts = enumerate_valid_dicts(capacity, address_bits, value_bits)
        counts = []
        expected = set()
        high_water = 0
        for _ in range(trials):
            sim = Simulator(seed=rng.getrandbits(64))
            if superpose:
                qd = qd_ops.encode(sim, ClassicalDict(
                    capacity, address_bits, value_bits, {}))
                address = sim.alloc(address_bits,
                                    rng.randrange((1 << address_bits) - 1))
                value = sim.alloc(value_bits, 0)
                qd_ops.superpose_dicts(sim, qd, all_dicts)
            else:
                d = _random_valid_dict(rng, capacity, address_bits, value_bits)
                case = _random_valid_operands(rng, op, d)
                qd = qd_ops.encode(sim, d)
                address = sim.alloc(address_bits, case.address)
                value = sim.alloc(value_bits, case.value)
            sim.reset_stats()
            _run_op(sim, op, qd, address, value, mode)
            counts.append(sim.stats.toffoli)
            expected.add(sim.stats.expected_toffoli)
            high_water = max(high_water, sim.stats.ancilla_high_water)
        if len(expected) != 1:
            raise RuntimeError(
                f"expectation accumulator varied across trials: {expected}")
        records.append(CostRecord(
            capacity, address_bits, value_bits, mode, trials,
            sum(counts) / trials, min(counts), max(counts), expected.pop(),
            high_water, seed, op))
    return records


# ---- fits ----


@dataclass(frozen=True)
class FitRow:
    """Least-squares slope of mean Toffoli count along one swept parameter."""

    parameter: str
    fixed: tuple[tuple[str, int], ...]
    slope: float
    intercept: float
    residual: float
    predicted_slope: float | None = None

    def as_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "fixed": dict(self.fixed),
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "predicted_slope": self.predicted_slope,
        }


@dataclass
class FitResult:
    rows: list[FitRow]

    def slope_in(self, parameter: str, **fixed) -> FitRow:
        for row in self.rows:
            if row.parameter == parameter and dict(row.fixed) == fixed:
                return row
        raise KeyError((parameter, fixed))

    def as_dict(self) -> dict:
        return {"rows": [r.as_dict() for r in self.rows]}


def _fit_line(xs: list[int], ys: list[float]) -> tuple[float, float, float]:
    coeffs, residuals, *_ = np.polyfit(xs, ys, 1, full=True)
    resid = float(residuals[0]) if len(residuals) else 0.0
    return float(coeffs[0]), float(coeffs[1]), resid


def _predicted_slope(op: OpKind, parameter: str, fixed: dict,
                     mode: UncomputeMode) -> float:
    """Exact model slope via finite differencing of the prediction."""
    def cost(**kw):
        return predict_op_cost(op, kw["C"], kw["A"], kw["V"], mode)

    base = {parameter: 3, **fixed}
    step = {parameter: 4, **fixed}
    return cost(**step) - cost(**base)


def fit_coefficients(records: list[CostRecord]) -> FitResult:
    """Per-parameter least-squares slopes of the mean Toffoli count.

    Produces one row per (swept parameter, fixed bounds, mode, op) group with
    at least three distinct sweep values, along with the exact model slope
    for comparison.  Raises InsufficientGrid if no parameter can be fitted.
    """
    rows = []
    sweeps = {"C": ("capacity", ("A", "V")),
              "A": ("address_bits", ("C", "V")),
              "V": ("value_bits", ("C", "A"))}
    attr_of = {"C": "capacity", "A": "address_bits", "V": "value_bits"}
    for param, (attr, fixed_names) in sweeps.items():
        groups: dict[tuple, list[CostRecord]] = {}
        for r in records:
            fixed_key = tuple(
                (name, getattr(r, attr_of[name])) for name in fixed_names)
            groups.setdefault((fixed_key, r.mode, r.op), []).append(r)
        for (fixed_key, mode, op), rs in groups.items():
            xs = [getattr(r, attr) for r in rs]
            if len(set(xs)) < 3:
                continue
            slope, intercept, resid = _fit_line(xs, [r.toffoli_mean for r in rs])
            rows.append(FitRow(
                param, fixed_key, slope, intercept, resid,
                _predicted_slope(op, param, dict(fixed_key), mode)))
    if not rows:
        raise InsufficientGrid(
            "need >= 3 distinct values along some swept parameter")
    return FitResult(rows)


def fixup_sigma(capacity: int, address_bits: int, trials: int) -> float:
    """Standard error of the mean extraction Toffoli count, MEASURE_FIXUP mode.

    Each of the `capacity` fixups is a fair Bernoulli draw costing the phase
    comparator, so one trial has variance C * cost^2 / 4.
    """
    cost = gt_phase_toffoli_cost(address_bits)
    return cost * math.sqrt(capacity / (4 * trials))


def op_fixup_sigma(kind: OpKind, capacity: int, address_bits: int,
                   trials: int) -> float:
    """Standard error of the mean Toffoli count for any operation.

    An extraction pass carries C phase-comparator fixups, an injection pass
    C phase-equality fixups; each is an independent fair coin.
    """
    per_slot = []
    if kind in (OpKind.EXTRACT, OpKind.SWAP_VALUE, OpKind.ADD_INTO_DICT,
                OpKind.ADD_INTO_VALUE):
        per_slot.append(gt_phase_toffoli_cost(address_bits))
    if kind is not OpKind.EXTRACT:
        per_slot.append(equals_phase_toffoli_cost(address_bits))
    variance = capacity * sum(c * c for c in per_slot) / 4
    return math.sqrt(variance / trials)
