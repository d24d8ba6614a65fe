from fractions import Fraction

import pytest

from rmtlab.variance import (
    coeff_envelope_report,
    diag_variance_coeff,
    offdiag_variance,
    pair_count_closed_form,
    pair_count_root_splits,
    pair_count_total,
    pair_count_vertex_splits,
    pair_counts_by_enumeration,
    shared_edge_weight_closed,
    shared_edge_weight_direct,
    variance_report,
)
from rmtlab.combinat import catalan

# weighted split counts, frozen from the direct recursive definitions
A11_TABLE = [1, 4, 10, 38, 107, 404, 1234, 4666, 15032, 57022, 190588, 725476, 2490399]
A12_TABLE = [0, 1, 7, 15, 68, 179, 742, 2169, 8715, 27167, 107693, 350602, 1380801]
A2_TABLE = {4: 6, 6: 40, 8: 240, 10: 1344, 12: 7168, 14: 36864, 16: 184320, 18: 901120, 20: 4325376}


def test_split_count_tables_frozen():
    for offset, p in enumerate(range(2, 15)):
        assert pair_count_root_splits(p) == A11_TABLE[offset]
        assert pair_count_vertex_splits(p) == A12_TABLE[offset]
        assert pair_count_total(p) == A11_TABLE[offset] + A12_TABLE[offset]


def test_split_counts_match_enumeration():
    # the weighted recursions against direct enumeration over cycle classes
    for p in range(2, 10):
        by_walks = pair_counts_by_enumeration(p)
        assert by_walks == (pair_count_root_splits(p), pair_count_vertex_splits(p))


def test_closed_form_disagrees_from_p4():
    # the seven-term summation formula evaluates cleanly but departs from
    # the direct count at p = 4 and stays off; both sides are kept callable
    assert pair_count_closed_form(2) == pair_count_total(2) == 1
    assert pair_count_closed_form(3) == pair_count_total(3) == 5
    assert pair_count_closed_form(4) == 18
    assert pair_count_total(4) == 17
    assert pair_count_closed_form(6) == 166
    assert pair_count_total(6) == 175


def test_shared_edge_weight_routes_agree_on_even_orders():
    for p in range(4, 21, 2):
        assert shared_edge_weight_direct(p) == shared_edge_weight_closed(p)
    for p, value in A2_TABLE.items():
        assert shared_edge_weight_direct(p) == value


def test_shared_edge_weight_p2_divergence():
    # documented boundary mismatch: the direct count gives 1, the closed
    # form gives 3/4; callers at p = 2 must use the direct route
    assert shared_edge_weight_direct(2) == 1
    assert shared_edge_weight_closed(2) == Fraction(3, 4)


def test_shared_edge_weight_vanishes_on_odd_orders():
    for p in (3, 5, 7, 9):
        assert shared_edge_weight_direct(p) == 0
        assert shared_edge_weight_closed(p) == 0


def test_diag_variance_coeff_values():
    # m4 = 1 keeps only the pair-count part; the correction term scales
    # linearly in (m4 - 2)
    assert diag_variance_coeff(4, 1) == 22
    assert diag_variance_coeff(4, Fraction(9, 5)) == Fraction(158, 5)
    assert diag_variance_coeff(4, 3) == 46
    base = diag_variance_coeff(6, 2)
    corr = diag_variance_coeff(6, 3) - base
    assert diag_variance_coeff(6, 1) == base - corr


def test_diag_variance_coeff_routes_agree_in_overlap():
    for p in range(2, 15):
        direct = diag_variance_coeff(p, 2, route="direct")
        assert diag_variance_coeff(p, 2, route="auto") == direct


def test_diag_variance_coeff_rejects_bad_moment():
    with pytest.raises(ValueError):
        diag_variance_coeff(4, Fraction(1, 2))


def test_offdiag_variance_values():
    assert offdiag_variance(2) == 1
    assert offdiag_variance(3) == 5
    assert offdiag_variance(4) == 10
    for p in range(2, 12):
        expect = catalan(p) - (catalan(p // 2) ** 2 if p % 2 == 0 else 0)
        assert offdiag_variance(p) == expect


def test_envelope_report_positive():
    rows = coeff_envelope_report(12, (Fraction(1, 2), 1, 2))
    assert rows
    for row in rows:
        assert row["c"] > 0


def test_variance_report_row_six():
    report = variance_report(6)
    assert report["A11"] == 107
    assert report["A12"] == 68
    assert report["A1"] == 175
    assert report["A2_direct"] == report["A2_closed"] == 40
    assert report["offdiag_var"] == 107
