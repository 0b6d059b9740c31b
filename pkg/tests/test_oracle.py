"""Classical oracle semantics and the exhaustive permutation checker."""

import json
from math import comb

import pytest

from qdictsim.arith import UncomputeMode
from qdictsim.oracle import (
    OpDescriptor,
    OpKind,
    OracleResult,
    PreconditionViolation,
    TooLarge,
    check_permutation,
    enumerate_valid_dicts,
    oracle_apply,
    oracle_extract,
    oracle_inject,
)
from qdictsim.qdict import ClassicalDict


def D(entries, capacity=2, abits=3, vbits=2):
    return ClassicalDict(capacity, abits, vbits, entries)


def test_oracle_extract():
    res = oracle_extract(D({2: 3, 5: 1}, capacity=3), 5)
    assert res == OracleResult(D({2: 3}, capacity=3), 1)
    res = oracle_extract(D({2: 3, 5: 1}, capacity=3), 4)
    assert res == OracleResult(D({2: 3, 5: 1}, capacity=3), 0)


def test_oracle_extract_requires_zero_output():
    res = oracle_apply(OpDescriptor(OpKind.EXTRACT, 5, value=1), D({5: 1}))
    assert res == PreconditionViolation("output == 0")


def test_oracle_inject():
    res = oracle_inject(D({2: 3}), 5, 1)
    assert res == OracleResult(D({2: 3, 5: 1}), 0)


def test_oracle_inject_full_dict_violation():
    res = oracle_inject(D({5: 1}, capacity=1), 2, 1)
    assert res == PreconditionViolation("HasSpace(dict) or value == 0")
    # injecting nothing is always allowed
    assert oracle_inject(D({5: 1}, capacity=1), 2, 0) == OracleResult(
        D({5: 1}, capacity=1), 0)


def test_oracle_inject_present_address_violation():
    res = oracle_inject(D({5: 1}), 5, 2)
    assert res == PreconditionViolation("dict[address] == 0")


def test_oracle_reserved_address():
    for kind in OpKind:
        res = oracle_apply(OpDescriptor(kind, 7, value=0), D({}))
        assert res == PreconditionViolation("address < MAX_ADDRESS")


def test_oracle_swap_value():
    assert oracle_apply(OpDescriptor(OpKind.SWAP_VALUE, 2, 1), D({2: 3})) == \
        OracleResult(D({2: 1}), 3)
    assert oracle_apply(OpDescriptor(OpKind.SWAP_VALUE, 2, 1), D({})) == \
        OracleResult(D({2: 1}), 0)
    assert oracle_apply(OpDescriptor(OpKind.SWAP_VALUE, 2, 0), D({2: 3})) == \
        OracleResult(D({}), 3)


def test_oracle_swap_value_full_dict():
    full = D({0: 1}, capacity=1)
    # swapping at the present address never grows the dict
    assert oracle_apply(OpDescriptor(OpKind.SWAP_VALUE, 0, 2), full) == \
        OracleResult(D({0: 2}, capacity=1), 1)
    assert oracle_apply(OpDescriptor(OpKind.SWAP_VALUE, 0, 0), full) == \
        OracleResult(D({}, capacity=1), 1)
    # swapping a nonzero value into an absent slot would need space
    assert isinstance(oracle_apply(OpDescriptor(OpKind.SWAP_VALUE, 1, 2), full),
                      PreconditionViolation)


def test_oracle_add_into_dict_wraparound_deletes():
    res = oracle_apply(OpDescriptor(OpKind.ADD_INTO_DICT, 2, 1), D({2: 3}))
    assert res == OracleResult(D({}), 1)
    res = oracle_apply(OpDescriptor(OpKind.ADD_INTO_DICT, 2, 1), D({}))
    assert res == OracleResult(D({2: 1}), 1)
    res = oracle_apply(OpDescriptor(OpKind.ADD_INTO_DICT, 4, 0), D({2: 3}))
    assert res == OracleResult(D({2: 3}), 0)


def test_oracle_add_into_dict_full_dict():
    full = D({0: 1}, capacity=1)
    assert oracle_apply(OpDescriptor(OpKind.ADD_INTO_DICT, 0, 3), full) == \
        OracleResult(D({}, capacity=1), 3)  # sum wraps to 0: entry removed
    assert isinstance(
        oracle_apply(OpDescriptor(OpKind.ADD_INTO_DICT, 1, 2), full),
        PreconditionViolation)


def test_oracle_add_into_value():
    res = oracle_apply(OpDescriptor(OpKind.ADD_INTO_VALUE, 2, 1), D({2: 3}))
    assert res == OracleResult(D({2: 3}), 0)
    res = oracle_apply(OpDescriptor(OpKind.ADD_INTO_VALUE, 4, 1), D({2: 3}))
    assert res == OracleResult(D({2: 3}), 1)


def test_oracle_extract_then_inject_is_identity():
    for d in enumerate_valid_dicts(2, 2, 2):
        for a in range(3):
            extracted = oracle_extract(d, a)
            assert isinstance(extracted, OracleResult)
            back = oracle_inject(extracted.dict, a, extracted.value)
            assert isinstance(back, OracleResult)
            assert back.dict == d


def test_enumerate_counts():
    assert len(enumerate_valid_dicts(1, 2, 1)) == 4
    assert len(enumerate_valid_dicts(1, 2, 2)) == 10
    assert len(enumerate_valid_dicts(2, 2, 1)) == 7


@pytest.mark.parametrize("bounds", [(1, 2, 1), (1, 2, 2), (2, 2, 1), (2, 3, 2)])
def test_enumerate_count_formula(bounds):
    c, a, v = bounds
    want = sum(comb((1 << a) - 1, k) * ((1 << v) - 1) ** k
               for k in range(c + 1))
    dicts = enumerate_valid_dicts(c, a, v)
    assert len(dicts) == want
    # all distinct, all valid by construction
    assert len({tuple(d.canonical_pairs()) for d in dicts}) == want


def test_enumerate_guard():
    with pytest.raises(TooLarge):
        enumerate_valid_dicts(4, 4, 4)


def test_check_permutation_extract_small():
    report = check_permutation(OpKind.EXTRACT, 1, 2, 1, UncomputeMode.CLEAN)
    assert report.cases == 12  # 4 dicts x 3 addresses
    assert report.passed


def test_check_permutation_extract_c2():
    report = check_permutation(OpKind.EXTRACT, 2, 2, 1, UncomputeMode.CLEAN)
    assert report.cases == 21  # 7 dicts x 3 addresses
    assert report.passed


@pytest.mark.parametrize("kind", list(OpKind))
@pytest.mark.parametrize("mode", list(UncomputeMode))
def test_check_permutation_all_ops(kind, mode):
    report = check_permutation(kind, 2, 2, 2, mode, seed=3)
    assert report.cases > 0
    assert report.passed, report.failures[:3]


def test_check_permutation_catches_mutation():
    report = check_permutation(OpKind.EXTRACT, 2, 2, 1, UncomputeMode.CLEAN,
                               _drop_value_swap_at=0)
    assert not report.passed
    assert report.failures[0].got


def test_report_json_schema():
    report = check_permutation(OpKind.EXTRACT, 1, 2, 1, UncomputeMode.CLEAN)
    data = json.loads(report.to_json())
    assert set(data) == {"op", "capacity", "address_bits", "value_bits",
                         "mode", "cases", "skipped", "failures"}
    assert data["failures"] == []
