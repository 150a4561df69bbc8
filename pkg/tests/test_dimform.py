import math

import pytest

from dimform import (
    FormulaError,
    cross_check,
    d1_norm_q,
    derivative,
    edge_bound_d2,
    eval_formula,
    fact_table,
    family_argument,
    formula_table_json,
    formulas,
    get_formula,
    next_dimension,
    sample_q,
    scan_threshold,
    window_q,
)
from qarith import QRational, q_to_index, quantum_int

FORMULA_IDS = sorted(formulas())


@pytest.mark.parametrize("formula_id", FORMULA_IDS)
def test_every_formula_agrees_with_its_sources(formula_id):
    results = cross_check(formula_id)
    failed = [r for r in results if not r.passed]
    assert failed == [], failed


def test_cross_check_samples_twenty_random_q_at_tight_tolerance():
    qs = sample_q()
    assert len(qs) == 20
    assert len(set(qs)) == 20
    assert all(1.6 <= qv <= 2.2 for qv in qs)
    assert sample_q() == qs
    for r in cross_check("dD3"):
        if r.name.endswith(":graph"):
            assert r.max_deviation <= 1e-10


def test_formula_ids():
    assert {
        "factPplusQ", "factR", "dimPPrimeD1", "dimPPrimeD1Derivative", "dimPD2", "dimQD2",
        "dimQPrimeD2", "sumDoublePrimeD2", "dD3", "dK", "dKprime",
    } <= set(FORMULA_IDS)
    with pytest.raises(FormulaError):
        get_formula("dimNothing")


def test_fact_table():
    p = QRational.var()
    table = fact_table(p)
    assert table["P"] + table["Q"] == quantum_int(3)
    assert table["R"] == quantum_int(3) / quantum_int(2)
    assert next_dimension(QRational.make(1), quantum_int(2)) == quantum_int(3)


def test_d1_dimension_and_slope():
    assert eval_formula("dimPPrimeD1", 1.64) == pytest.approx(0.998428, abs=5e-6)
    assert derivative("dimPPrimeD1") == get_formula("dimPPrimeD1Derivative").value
    assert eval_formula("dimPPrimeD1Derivative", 1.8) < 0
    assert d1_norm_q() == pytest.approx(1.76918, abs=1e-4)


@pytest.mark.parametrize(
    "formula_id,target,lo,hi,expected,tol",
    [
        ("dD3", 1, 1.9, 2.1, 2.03228, 1e-4),
        ("dK", 1, 1.5, 1.8, 1.636, 1e-3),
        ("dK", "sqrt2", 1.9, 2.2, 2.047, 1e-3),
        ("dKprime", 1, 1.9, 2.05, 1.987, 1e-3),
    ],
)
def test_thresholds(formula_id, target, lo, hi, expected, tol):
    assert scan_threshold(formula_id, target, lo, hi) == pytest.approx(expected, abs=tol)


def test_d3_threshold_as_index():
    assert q_to_index(scan_threshold("dD3", 1, 1.9, 2.1)) == pytest.approx(6.37228, abs=1e-4)


def test_scan_without_crossing():
    with pytest.raises(FormulaError):
        scan_threshold("dK", 1, 1.9, 2.0)
    with pytest.raises(FormulaError):
        scan_threshold("dK", 1, 2.0, 1.9)


@pytest.mark.parametrize("qv,bound", [(1.75, 2), (1.9, 2), (1.98, 2), (1.99, 3), (2.0, 4), (2.03, 5)])
def test_edge_bound_d2(qv, bound):
    assert edge_bound_d2(qv) == bound


def test_edge_bound_d2_across_window():
    lo, hi = window_q()
    steps = 200
    assert all(edge_bound_d2(lo + (hi - lo) * k / steps) == 2 for k in range(steps + 1))


def test_window_q():
    lo, hi = window_q()
    assert lo == pytest.approx(1.70002, abs=1e-5)
    assert hi == pytest.approx(1.98661, abs=1e-5)


@pytest.mark.parametrize("family", ["D1", "D2", "D3", "K", "Kprime"])
def test_family_arguments_close(family):
    lines, ok = family_argument(family)
    assert ok, lines
    assert lines[0].startswith("window q in")


def test_family_argument_fails_past_the_window():
    _, ok = family_argument("D3", "3+sqrt5", "13/2")
    assert not ok
    with pytest.raises(FormulaError):
        family_argument("E8")


def test_formula_table_json():
    rows = {r["id"]: r for r in formula_table_json()}
    assert rows["dK"]["values"]["1.7"] == pytest.approx(quantum_int(5, 1.7) / quantum_int(2, 1.7) ** 3)
    assert math.isfinite(rows["dKprime"]["values"]["1.9"])
