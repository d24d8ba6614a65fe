from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rmtlab.combinat import (
    binom_ext,
    catalan,
    catalan_composition_residual,
    compositions_count,
    first_vertex_count_formula,
    mp_moment_exact,
    mp_moment_recurrence_residual,
    narayana_count,
)

CATALAN_FIRST = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796]


def test_catalan_first_values():
    assert [catalan(i) for i in range(11)] == CATALAN_FIRST


def test_catalan_rejects_negative():
    with pytest.raises(ValueError):
        catalan(-1)


@given(st.integers(min_value=0, max_value=60))
def test_catalan_segner_recurrence(n):
    assert catalan(n + 1) == sum(catalan(i) * catalan(n - i) for i in range(n + 1))


def test_binom_ext_edge_rows():
    # the extended convention the closed forms rely on: k = -1 contributes 1,
    # anything below that contributes 0, and n < k contributes 0
    assert binom_ext(5, -1) == 1
    assert binom_ext(0, -1) == 1
    assert binom_ext(5, -2) == 0
    assert binom_ext(3, 5) == 0
    assert binom_ext(6, 2) == 15


def test_compositions_count_is_stars_and_bars():
    assert compositions_count(5, 2) == 15
    assert compositions_count(4, 1) == 4
    assert compositions_count(1, 7) == 1
    assert compositions_count(3, 0) == 1
    with pytest.raises(ValueError):
        compositions_count(0, 3)


def test_narayana_row_four():
    assert [narayana_count(4, i) for i in range(4)] == [1, 6, 6, 1]


@given(st.integers(min_value=1, max_value=25))
def test_narayana_rows_sum_to_catalan(p):
    assert sum(narayana_count(p, i) for i in range(p)) == catalan(p)


def test_mp_moments_frozen_values():
    assert mp_moment_exact(3, Fraction(1, 2)) == Fraction(11, 4)
    assert mp_moment_exact(4, Fraction(1, 2)) == Fraction(45, 8)
    assert mp_moment_exact(3, 2) == 11
    assert mp_moment_exact(1, Fraction(7, 3)) == 1
    assert mp_moment_exact(2, Fraction(7, 3)) == 1 + Fraction(7, 3)


def test_mp_moments_ratio_one_is_catalan():
    for k in range(1, 21):
        assert mp_moment_exact(k, 1) == catalan(k)


def test_mp_recurrence_residual_zero_on_grid():
    for k in range(2, 12):
        for gamma in (Fraction(1, 4), Fraction(1, 2), 1, 2, 3):
            assert mp_moment_recurrence_residual(k, gamma) == 0


def test_mp_recurrence_rejects_first_moment():
    with pytest.raises(ValueError):
        mp_moment_recurrence_residual(1, 1)


def test_first_vertex_formula_low_columns():
    # t = 1 is always empty; t = 2 recovers the catalan numbers
    for l in range(1, 9):
        assert first_vertex_count_formula(l, 1) == 0
    for l in range(2, 9):
        assert first_vertex_count_formula(l, 2) == catalan(l - 1)


def test_first_vertex_formula_domain():
    with pytest.raises(ValueError):
        first_vertex_count_formula(3, 0)
    with pytest.raises(ValueError):
        first_vertex_count_formula(3, 4)


def test_catalan_composition_residual_vanishes():
    for l in range(1, 13):
        assert catalan_composition_residual(l) == 0
