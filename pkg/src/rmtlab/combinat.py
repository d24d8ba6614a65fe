"""Exact integer and rational combinatorics underlying every closed form.

Everything here returns Python ints or Fractions; nothing rounds. Floating
point enters only when callers explicitly convert, because the quantities
involved (Catalan numbers, Narayana rows, moment polynomials) overflow
64-bit arithmetic long before the supported ranges end.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb


def catalan(p: int) -> int:
    """p-th Catalan number, binom(2p, p) / (p + 1)."""
    if p < 0:
        raise ValueError(f"Catalan numbers need p >= 0, got {p}")
    return comb(2 * p, p) // (p + 1)


def binom_ext(n: int, k: int) -> int:
    """Binomial coefficient extended for the variance-count sums.

    For k >= 0 this counts k-subsets: comb(n, k) when 0 <= k <= n, and 0
    when k > n or n < 0 (a negative upper argument means an empty choice
    pool here, not the polynomial extension). The index k = -1 denotes the
    degenerate position in those sums and counts exactly 1, for every n;
    anything below -1 counts 0.
    """
    if k == -1:
        return 1
    if k < -1:
        return 0
    if n < k:
        return 0
    return comb(n, k)


def compositions_count(m: int, n: int) -> int:
    """Number of m-tuples of nonnegative integers summing to n.

    Stars and bars: binom(m + n - 1, m - 1). m must be at least 1.
    """
    if m < 1:
        raise ValueError(f"need at least one part, got m={m}")
    if n < 0:
        return 0
    return comb(m + n - 1, m - 1)


def narayana_count(p: int, i: int) -> int:
    """Narayana-type count binom(p, i) * binom(p - 1, i) / (i + 1).

    Row p, entries i = 0 .. p-1, summing to catalan(p). Also the number of
    dominant cycle classes whose support tree puts i+1 vertices on the
    even-depth side (see cycles.bipartite_class_counts).
    """
    if not 0 <= i <= p - 1:
        raise ValueError(f"index i={i} outside 0..{p - 1}")
    num = comb(p, i) * comb(p - 1, i)
    count, rem = divmod(num, i + 1)
    assert rem == 0
    return count


def mp_moment_exact(k: int, gamma: Fraction | int) -> Fraction:
    """k-th moment of the Marchenko-Pastur law with ratio gamma, exactly.

    Evaluates the Narayana polynomial sum_{r=0}^{k-1} n(k, r) gamma^r where
    n(k, r) = binom(k, r) binom(k-1, r) / (r + 1). At gamma = 1 this is the
    k-th Catalan number.
    """
    if k < 1:
        raise ValueError(f"moments start at k=1, got {k}")
    g = Fraction(gamma)
    if g <= 0:
        raise ValueError(f"aspect ratio must be positive, got {g}")
    total = Fraction(0)
    term = Fraction(1)  # gamma^r, updated in the loop
    for r in range(k):
        total += Fraction(comb(k, r) * comb(k - 1, r), r + 1) * term
        term *= g
    return total


def mp_moment_recurrence_residual(k: int, gamma: Fraction | int) -> Fraction:
    """Residual of the Marchenko-Pastur moment recurrence at order k.

    Returns m_k - (1 + g) m_{k-1} - g * sum_{a=1}^{k-2} m_a m_{k-1-a},
    which is exactly zero when the closed form is correct. Kept as a
    residual rather than an assertion so it doubles as a table column.
    """
    if k < 2:
        raise ValueError(f"recurrence starts at k=2, got {k}")
    g = Fraction(gamma)
    lhs = mp_moment_exact(k, g)
    rhs = (1 + g) * mp_moment_exact(k - 1, g)
    for a in range(1, k - 1):
        rhs += g * mp_moment_exact(a, g) * mp_moment_exact(k - 1 - a, g)
    return lhs - rhs


def first_vertex_count_formula(l: int, t: int) -> int:
    """Closed-form count binom(2l - t, l - 1) - binom(2l - t, l).

    Defined for 1 <= t <= l. Note the t = 1 value is 0 for every l by the
    symmetry of the two binomials; the enumeration histogram shows the
    formula matches vertex-visit counts only after an index shift (the
    value for m visits is this formula at t = m + 1). Both facts are
    pinned in the test suite; the formula itself is kept exactly as given.
    """
    if not 1 <= t <= l:
        raise ValueError(f"t={t} outside 1..{l}")
    return binom_ext(2 * l - t, l - 1) - binom_ext(2 * l - t, l)


def catalan_composition_residual(l: int) -> int:
    """Residual of the composition identity for Catalan numbers.

    Sums prod C_{l_i} over all k >= 1 and all compositions
    l_1 + ... + l_k = l - k with l_i >= 0, then subtracts C_l.
    Exactly zero for every l >= 1.
    """
    if l < 1:
        raise ValueError(f"need l >= 1, got {l}")
    total = 0
    for k in range(1, l + 1):
        total += _weighted_compositions(l - k, k)
    return total - catalan(l)


def _weighted_compositions(total: int, parts: int) -> int:
    """Sum of prod catalan(l_i) over nonnegative compositions of total."""
    if parts == 0:
        return 1 if total == 0 else 0
    if parts == 1:
        return catalan(total)
    acc = 0
    for first in range(total + 1):
        acc += catalan(first) * _weighted_compositions(total - first, parts - 1)
    return acc
