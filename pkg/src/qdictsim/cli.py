"""Command-line front end.

Subcommands:

    simulate   run one dictionary operation on a classical input and print
               the decoded final state plus gate statistics
    verify     exhaustively check the circuits against the classical oracle
    estimate   measure Toffoli costs over a (C, A, V) grid, CSV/JSON tables
    trace      emit the gate-by-gate log of one operation

Exit codes: 0 success, 1 malformed input or unsimulatable bounds,
2 precondition violation, 3 verification failures.

The default seed is the fixed constant 0xD1C7 (53703) so published tables
reproduce byte for byte; override with --seed or the QDICTSIM_SEED
environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from itertools import product

from .arith import UncomputeMode
from .oracle import (
    OpDescriptor,
    OpKind,
    PreconditionViolation,
    TooLarge,
    check_permutation,
    oracle_apply,
)
from .qdict import (
    CapacityExceeded,
    ClassicalDict,
    InvalidEncoding,
    QuantumDict,
    ReservedAddress,
    ZeroValue,
    decode,
    encode,
)
from .resources import (
    InsufficientGrid,
    fit_coefficients,
    measure_costs,
    records_to_csv,
    records_to_json,
)
from .sim import Simulator
from . import qdict as qd_ops

DEFAULT_SEED = 0xD1C7

OP_NAMES = {
    "extract": OpKind.EXTRACT,
    "inject": OpKind.INJECT,
    "swap_value": OpKind.SWAP_VALUE,
    "add_into_dict": OpKind.ADD_INTO_DICT,
    "add_into_value": OpKind.ADD_INTO_VALUE,
}

MODE_NAMES = {"clean": UncomputeMode.CLEAN, "measure": UncomputeMode.MEASURE_FIXUP}


class InputError(Exception):
    """Malformed user input; the message names the offending field."""


def load_classical_dict(spec: str) -> ClassicalDict:
    """Parses a dictionary literal: inline JSON or a path to a JSON file.

    Schema: {"capacity": C, "address_bits": A, "value_bits": V,
             "entries": {"<decimal address>": value, ...}}
    """
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec) as f:
                text = f.read()
        except OSError as exc:
            raise InputError(f"cannot read dict file {spec!r}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"dict is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise InputError("dict literal must be a JSON object")
    for field in ("capacity", "address_bits", "value_bits"):
        if field not in data:
            raise InputError(f"missing field {field!r}")
        if not isinstance(data[field], int) or data[field] < 1:
            raise InputError(f"field {field!r} must be a positive integer")
    raw_entries = data.get("entries", {})
    if not isinstance(raw_entries, dict):
        raise InputError("field 'entries' must be an object")
    entries = {}
    for k, v in raw_entries.items():
        try:
            a = int(k)
        except ValueError:
            raise InputError(f"entries key {k!r} is not a decimal address")
        if not isinstance(v, int):
            raise InputError(f"entries[{k!r}] must be an integer value")
        entries[a] = v
    try:
        return ClassicalDict(data["capacity"], data["address_bits"],
                             data["value_bits"], entries)
    except (CapacityExceeded, ReservedAddress, ZeroValue, ValueError) as exc:
        raise InputError(f"field 'entries' is invalid: {exc}")


def render_dict(d: ClassicalDict) -> str:
    inner = ", ".join(f'"{a}": {v}' for a, v in sorted(d.entries.items()))
    return "{" + inner + "}"


def _parse_range(spec: str, name: str) -> list[int]:
    """Parses '4', '1..4', or '1,2,5' into a list of integers."""
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(x) for x in spec.split(",")]
    except ValueError:
        raise InputError(f"flag --{name} must be N, N..M, or a comma list")
    if not values or min(values) < 1:
        raise InputError(f"flag --{name} must contain positive integers")
    return values


def _run_quantum_op(kind: OpKind, d: ClassicalDict, op: OpDescriptor,
                    mode: UncomputeMode, seed: int,
                    trace: list[str] | None = None,
                    drop_value_swap_at: int | None = None):
    sim = Simulator(seed=seed, trace=trace)
    qd = encode(sim, d)
    address = sim.alloc(d.address_bits, op.address)
    value = sim.alloc(d.value_bits, op.value)
    sim.reset_stats()
    if kind is OpKind.EXTRACT:
        qd_ops.extract(sim, qd, address, value, mode,
                       _drop_value_swap_at=drop_value_swap_at)
    elif kind is OpKind.INJECT:
        qd_ops.inject(sim, qd, address, value, mode)
    elif kind is OpKind.SWAP_VALUE:
        qd_ops.swap_value(sim, qd, address, value, mode)
    elif kind is OpKind.ADD_INTO_DICT:
        qd_ops.add_value_into_dict(sim, value, qd, address, mode)
    else:
        qd_ops.add_dict_into_value(sim, qd, address, value, mode)
    return sim, qd, address, value


def _state_rows(sim: Simulator, qd: QuantumDict, value_reg):
    rows = []
    decoded = decode(sim, qd)
    for (state, amp), key in zip(decoded, sorted(sim.terms)):
        if isinstance(state, InvalidEncoding):
            desc = {"invalid": state.kind.value, "index": state.index}
        else:
            desc = {str(a): v for a, v in sorted(state.entries.items())}
        rows.append({
            "amplitude": [amp.real, amp.imag],
            "dict": desc,
            "value": value_reg.value_from_key(key),
        })
    return rows


def _print_state_text(rows, stats):
    for row in rows:
        re_part, im_part = row["amplitude"]
        amp = f"{re_part:+.10f}" + (f"{im_part:+.10f}j" if im_part else "")
        if "invalid" in row["dict"]:
            desc = f"INVALID({row['dict']['invalid']}@{row['dict']['index']})"
        else:
            inner = ", ".join(f'"{k}": {v}' for k, v in row["dict"].items())
            desc = "{" + inner + "}"
        print(f"term amp={amp} dict={desc} value={row['value']}")
    print("stats " + " ".join(f"{k}={v}" for k, v in stats.items()))


def _parse_operands(args, d: ClassicalDict) -> OpDescriptor:
    if not 0 <= args.address < (1 << d.address_bits):
        raise InputError(
            f"flag --address must be in [0, {(1 << d.address_bits) - 1}]")
    if not 0 <= args.value < (1 << d.value_bits):
        raise InputError(
            f"flag --value must be in [0, {(1 << d.value_bits) - 1}]")
    return OpDescriptor(OP_NAMES[args.op], args.address, args.value)


def cmd_simulate(args) -> int:
    d = load_classical_dict(args.dict)
    kind = OP_NAMES[args.op]
    op = _parse_operands(args, d)
    pre = oracle_apply(op, d)
    if isinstance(pre, PreconditionViolation):
        print(f"precondition violated; requires: {pre.requirement}",
              file=sys.stderr)
        return 2
    sim, qd, _, value_reg = _run_quantum_op(kind, d, op, MODE_NAMES[args.mode],
                                            args.seed)
    rows = _state_rows(sim, qd, value_reg)
    stats = sim.stats.as_dict()
    if args.format == "json":
        print(json.dumps({"terms": rows, "stats": stats}, sort_keys=True))
    else:
        _print_state_text(rows, stats)
    return 0


def cmd_trace(args) -> int:
    d = load_classical_dict(args.dict)
    kind = OP_NAMES[args.op]
    op = _parse_operands(args, d)
    pre = oracle_apply(op, d)
    if isinstance(pre, PreconditionViolation):
        print(f"precondition violated; requires: {pre.requirement}",
              file=sys.stderr)
        return 2
    trace: list[str] = []
    _run_quantum_op(kind, d, op, MODE_NAMES[args.mode], args.seed, trace=trace)
    for line in trace:
        print(line)
    return 0


DEFAULT_VERIFY_BOUNDS = [(c, a, v) for c, a, v in
                         product((1, 2), (2, 3), (1, 2))]


def cmd_verify(args) -> int:
    kinds = [OP_NAMES[name] for name in args.ops.split(",")]
    modes = [MODE_NAMES[name] for name in args.modes.split(",")]
    bounds = [b for b in DEFAULT_VERIFY_BOUNDS
              if b[0] * (b[1] + b[2]) <= args.max_qubits]
    if not bounds:
        raise InputError("flag --max-qubits leaves no testable bounds")
    reports = []
    fault = 0 if args.self_test_fault else None
    for seed_index in range(args.seeds):
        seed = args.seed + seed_index
        for kind in kinds:
            for c, a, v in bounds:
                for mode in modes:
                    reports.append(check_permutation(
                        kind, c, a, v, mode, seed=seed,
                        _drop_value_swap_at=fault if kind is OpKind.EXTRACT
                        else None))
    failures = sum(len(r.failures) for r in reports)
    cases = sum(r.cases for r in reports)
    if args.format == "json":
        print(json.dumps({"cases": cases, "failures": failures,
                          "reports": [r.as_dict() for r in reports]},
                         sort_keys=True))
    else:
        for r in reports:
            print(f"op={r.kind.value} C={r.capacity} A={r.address_bits} "
                  f"V={r.value_bits} mode={r.mode.value} cases={r.cases} "
                  f"skipped={r.skipped} failures={len(r.failures)}")
        print(f"total cases={cases} failures={failures}")
    return 0 if failures == 0 else 3


def cmd_estimate(args) -> int:
    grid = [(c, a, v) for c in _parse_range(args.C, "C")
            for a in _parse_range(args.A, "A")
            for v in _parse_range(args.V, "V")]
    records = measure_costs(grid, MODE_NAMES[args.mode], trials=args.trials,
                            seed=args.seed, op=OP_NAMES[args.op])
    fit = None
    if args.fit:
        try:
            fit = fit_coefficients(records)
        except InsufficientGrid as exc:
            raise InputError(f"flag --fit: {exc}")
    if args.format == "json":
        payload = json.loads(records_to_json(records))
        out = {"records": payload}
        if fit is not None:
            out["fit"] = fit.as_dict()
        print(json.dumps(out, sort_keys=True))
        return 0
    if args.format == "text":
        lines = records_to_csv(records).splitlines()
        cells = [line.split(",") for line in lines]
        widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
        for row in cells:
            print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    else:
        print(records_to_csv(records), end="")
    if fit is not None:
        print()
        print("parameter,fixed,slope,intercept,residual,predicted_slope")
        for row in fit.rows:
            fixed = ";".join(f"{k}={v}" for k, v in row.fixed)
            print(f"{row.parameter},{fixed},{row.slope:.6g},"
                  f"{row.intercept:.6g},{row.residual:.3g},"
                  f"{row.predicted_slope:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdictsim",
        description="Quantum dictionary circuits: simulate, verify, estimate.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int,
                       default=int(os.environ.get("QDICTSIM_SEED", DEFAULT_SEED)),
                       help="measurement RNG seed (default: fixed constant)")

    def add_op_args(p):
        p.add_argument("--dict", required=True,
                       help="inline JSON or path to a JSON dictionary literal")
        p.add_argument("--op", choices=sorted(OP_NAMES), default="extract")
        p.add_argument("--address", type=int, required=True)
        p.add_argument("--value", type=int, default=0)
        p.add_argument("--mode", choices=sorted(MODE_NAMES), default="measure")
        add_common(p)

    p_sim = sub.add_parser("simulate", help="run one operation")
    add_op_args(p_sim)
    p_sim.add_argument("--format", choices=("text", "json"), default="text")
    p_sim.set_defaults(func=cmd_simulate)

    p_trace = sub.add_parser("trace", help="emit the gate log of one operation")
    add_op_args(p_trace)
    p_trace.set_defaults(func=cmd_trace)

    p_verify = sub.add_parser("verify",
                              help="exhaustive oracle-equivalence sweep")
    p_verify.add_argument("--max-qubits", type=int, default=14,
                          help="skip bounds whose dictionary exceeds this")
    p_verify.add_argument("--ops", default=",".join(sorted(OP_NAMES)))
    p_verify.add_argument("--modes", default="clean,measure")
    p_verify.add_argument("--seeds", type=int, default=1,
                          help="number of consecutive seeds to sweep")
    p_verify.add_argument("--format", choices=("text", "json"), default="text")
    p_verify.add_argument("--self-test-fault", action="store_true",
                          help="corrupt one swap to prove the checker notices")
    add_common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_est = sub.add_parser("estimate", help="measure Toffoli costs on a grid")
    p_est.add_argument("--op", choices=sorted(OP_NAMES), default="extract")
    p_est.add_argument("--C", default="1..4", help="capacity range (N, N..M, or list)")
    p_est.add_argument("--A", default="4", help="address-bit range")
    p_est.add_argument("--V", default="3", help="value-bit range")
    p_est.add_argument("--mode", choices=sorted(MODE_NAMES), default="measure")
    p_est.add_argument("--trials", type=int, default=1)
    p_est.add_argument("--fit", action="store_true",
                       help="append least-squares slope rows")
    p_est.add_argument("--format", choices=("csv", "json", "text"),
                       default="csv")
    add_common(p_est)
    p_est.set_defaults(func=cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
