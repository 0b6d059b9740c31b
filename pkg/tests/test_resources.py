"""Cost model vs measured tallies: exact in clean mode, 3-sigma in measure mode."""

import pytest

from qdictsim.arith import UncomputeMode
from qdictsim.oracle import OpKind, TooLarge
from qdictsim.resources import (
    CSV_HEADER,
    InsufficientGrid,
    fit_coefficients,
    fixup_sigma,
    measure_costs,
    predict_extract_ancilla,
    predict_extract_cost,
    predict_inject_cost,
    predict_op_cost,
    records_to_csv,
    records_to_json,
)

CLEAN = UncomputeMode.CLEAN
MEASURE = UncomputeMode.MEASURE_FIXUP


def test_per_slot_formulas():
    # each extra capacity slot costs 2.5A + V - 1 expected, 3A + V - 1 clean
    for a, v in ((3, 2), (4, 3), (5, 2)):
        dm = (predict_extract_cost(2, a, v, MEASURE)
              - predict_extract_cost(1, a, v, MEASURE))
        dc = (predict_extract_cost(2, a, v, CLEAN)
              - predict_extract_cost(1, a, v, CLEAN))
        assert dm == 2.5 * a + v - 1
        assert dc == 3 * a + v - 1


def test_clean_counts_match_prediction_exactly():
    grid = [(1, 2, 1), (2, 3, 2), (3, 4, 3), (4, 5, 2)]
    for rec in measure_costs(grid, CLEAN, trials=3, seed=1):
        want = predict_extract_cost(rec.capacity, rec.address_bits,
                                    rec.value_bits, CLEAN)
        assert rec.toffoli_min == rec.toffoli_max == want
        assert rec.expected_analytic == want


def test_clean_counts_are_input_independent():
    # superposition input (small bounds) and random basis inputs (larger)
    # both produce the same clean-mode count
    recs = measure_costs([(2, 2, 1)], CLEAN, trials=10, seed=3)
    assert recs[0].toffoli_min == recs[0].toffoli_max


def test_expected_accumulator_matches_prediction():
    grid = [(c, a, v) for c in (1, 2, 3) for a, v in ((3, 2), (4, 3))]
    for rec in measure_costs(grid, MEASURE, trials=2, seed=5):
        want = predict_extract_cost(rec.capacity, rec.address_bits,
                                    rec.value_bits, MEASURE)
        assert rec.expected_analytic == want


def test_monte_carlo_mean_within_three_sigma():
    trials = 300
    for rec in measure_costs([(2, 3, 2), (3, 4, 3)], MEASURE, trials=trials,
                             seed=11):
        sigma = fixup_sigma(rec.capacity, rec.address_bits, trials)
        assert abs(rec.toffoli_mean - rec.expected_analytic) <= 3 * sigma


def test_inject_cost_symmetry():
    for c, a, v in ((1, 3, 2), (3, 4, 3), (2, 5, 2)):
        assert predict_inject_cost(c, a, v, CLEAN) == \
            predict_extract_cost(c, a, v, CLEAN)
        assert predict_inject_cost(c, a, v, MEASURE) == \
            predict_extract_cost(c, a, v, MEASURE)


def test_derived_op_cost_is_both_passes_plus_adder():
    got = predict_op_cost(OpKind.ADD_INTO_DICT, 2, 4, 3, MEASURE)
    want = (predict_extract_cost(2, 4, 3, MEASURE)
            + predict_inject_cost(2, 4, 3, MEASURE) + 2)
    assert got == want


@pytest.mark.parametrize("kind", [OpKind.INJECT, OpKind.SWAP_VALUE,
                                  OpKind.ADD_INTO_DICT, OpKind.ADD_INTO_VALUE])
def test_measured_derived_ops_match_prediction_clean(kind):
    for rec in measure_costs([(1, 3, 2), (2, 3, 2)], CLEAN, trials=4, seed=2,
                             op=kind):
        want = predict_op_cost(kind, rec.capacity, rec.address_bits,
                               rec.value_bits, CLEAN)
        assert rec.toffoli_min == rec.toffoli_max == want, kind


def test_ancilla_high_water_capacity_independent():
    recs = measure_costs([(c, 3, 2) for c in (1, 2, 3)], CLEAN, trials=2,
                         seed=7)
    hws = {r.ancilla_high_water for r in recs}
    assert hws == {predict_extract_ancilla(3, 2)}


def test_ancilla_high_water_affine_in_widths():
    # slope 2 in A, slope 0 in V, on grids where the comparator chain
    # dominates the zero-test ladder (V <= A + 2)
    for a in (2, 3, 4, 5):
        recs = measure_costs([(2, a, 2)], CLEAN, trials=1, seed=0)
        assert recs[0].ancilla_high_water == 2 * a + 1
    for v in (1, 2, 3):
        recs = measure_costs([(2, 4, v)], CLEAN, trials=1, seed=0)
        assert recs[0].ancilla_high_water == 9


def test_finite_difference_in_capacity_is_constant():
    recs = measure_costs([(c, 4, 3) for c in (1, 2, 3, 4)], CLEAN, trials=1,
                         seed=0)
    means = [r.toffoli_mean for r in recs]
    diffs = {b - a for a, b in zip(means, means[1:])}
    assert diffs == {3 * 4 + 3 - 1}


def test_csv_schema():
    recs = measure_costs([(1, 2, 1)], CLEAN, trials=1, seed=0)
    text = records_to_csv(recs)
    header, row = text.strip().split("\n")
    assert header == ",".join(CSV_HEADER)
    assert row.split(",")[0:4] == ["1", "2", "1", "clean"]
    data = records_to_json(recs)
    assert '"toffoli_mean"' in data


def test_fit_slopes_exact_on_clean_records():
    grid = ([(c, 4, 3) for c in (1, 2, 3, 4)]
            + [(2, a, 3) for a in (2, 3, 5)]
            + [(2, 4, v) for v in (1, 2, 4)])
    fit = fit_coefficients(measure_costs(grid, CLEAN, trials=1, seed=0))
    c_row = fit.slope_in("C", A=4, V=3)
    assert c_row.slope == pytest.approx(14)  # 3A + V - 1
    assert c_row.residual == pytest.approx(0, abs=1e-18)
    assert c_row.predicted_slope == 14
    a_row = fit.slope_in("A", C=2, V=3)
    assert a_row.slope == pytest.approx(2 * 3 + 1)  # 3 per slot plus boundary
    v_row = fit.slope_in("V", C=2, A=4)
    assert v_row.slope == pytest.approx(2 + 2)  # 1 per slot plus boundary


def test_value_edit_slope_is_5a_plus_2v_minus_2():
    # both passes shuttle the value registers, so the per-slot cost of a
    # value-editing operation carries 2V, not V
    for a, v in ((3, 2), (4, 3), (5, 2)):
        recs = measure_costs([(c, a, v) for c in (1, 2, 3)], CLEAN, trials=1,
                             seed=0, op=OpKind.ADD_INTO_DICT)
        means = [r.toffoli_mean for r in recs]
        diffs = {y - x for x, y in zip(means, means[1:])}
        assert diffs == {2 * (3 * a + v - 1)}
        exp = measure_costs([(c, a, v) for c in (1, 2, 3)], MEASURE, trials=1,
                            seed=0, op=OpKind.ADD_INTO_DICT)
        ediffs = {y.expected_analytic - x.expected_analytic
                  for x, y in zip(exp, exp[1:])}
        assert ediffs == {5 * a + 2 * v - 2}


def test_fit_requires_three_points():
    recs = measure_costs([(1, 2, 1), (2, 2, 1)], CLEAN, trials=1, seed=0)
    with pytest.raises(InsufficientGrid):
        fit_coefficients(recs)


def test_measure_costs_guard():
    with pytest.raises(TooLarge):
        measure_costs([(8, 4, 4)], CLEAN, trials=1, seed=0)


def test_records_deterministic_across_runs():
    a = measure_costs([(2, 3, 2)], MEASURE, trials=20, seed=9)
    b = measure_costs([(2, 3, 2)], MEASURE, trials=20, seed=9)
    assert records_to_csv(a) == records_to_csv(b)
