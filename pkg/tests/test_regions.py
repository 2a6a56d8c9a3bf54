from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from slgluing.regions import (QUANTITIES, classify_by_order, classify_region, lattice,
                              lattice_report, p_region_exponent, predicted_exponent,
                              sup_exponents, table_for)


@pytest.mark.parametrize("m,c1,c2,label", [(2, "0.5", "0.3", "7"), (2, "2", "1.5", "1"),
                                           (3, "0.2", "0.1", "12")])
def test_classifier_examples(m, c1, c2, label):
    assert classify_region(m, F(c1), F(c2), "13") == label


def test_prediction_examples():
    assert p_region_exponent("eps_L65", 2, F(1, 2)) == F(4, 3)
    assert p_region_exponent("eps_L1", 2, F(3, 2)) == 3 * (1 + F(1, 2) / 2)
    assert p_region_exponent("deps_L6", 2, F(1, 2)) == F(-1, 12)
    pred = predicted_exponent("eps_L65", 2, F(1, 2), F(3, 10))
    assert pred.region == "7" and pred.exponent == F(7, 30)
    assert sup_exponents(2, F(1, 2), F(3, 10))["P"] == F(1, 2)


def test_unknown_quantity():
    with pytest.raises(KeyError):
        predicted_exponent("eps_L2", 2, 1, F(1, 2))


fracs = st.fractions(min_value=F(1, 60), max_value=3, max_denominator=60)


@given(st.integers(2, 12), fracs, fracs)
def test_every_point_is_classified_consistently(m, x, y):
    c1, c2 = max(x, y), min(x, y)
    if c1 == c2:
        return
    for q in QUANTITIES:
        label = classify_region(m, c1, c2, table_for(q))
        assert isinstance(predicted_exponent(q, m, c1, c2).exponent, F)
        order = classify_by_order(m, c1, c2, table_for(q))
        assert order is None or order == label


def test_lattice_points_are_exact():
    vals = lattice(100, 3)
    assert len(vals) == 100 and vals[0] == F(3, 100) and vals[-1] == 3


@pytest.mark.parametrize("q", QUANTITIES)
def test_lattice_is_covered(q):
    rep = lattice_report(q, 7)
    assert rep.covered and rep.points == 4950


def test_lattice_defect_records_are_exact():
    rep = lattice_report("eps_L65", 3)
    for d in rep.defects:
        assert d.exp_below != d.exp_above and isinstance(d.c1, F) and d.c2 < d.c1
