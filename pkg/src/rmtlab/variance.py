"""Normalizing coefficients for powers of a symmetric random matrix.

The diagonal-entry variance coefficient is assembled from two families of
counts. The first family (the "split counts") sums indicator constraints
over the loop profiles of dominant classes of half-length p - 1: for a class
with petal profile (l_1, ..., l_k), each admissible split position (q, t)
contributes one, and the class itself carries weight prod catalan(l_i) when
the sum runs over profiles rather than elements. Both routes are implemented
and must agree; the profile route is the fast one, the element route is the
oracle. The second family weighs classes by a shared-edge factor and has a
closed form that the direct sum confirms for even p >= 4.

A seven-term closed form for the first family is also evaluated exactly as
written. It does NOT reproduce the direct counts (off by +1 at p = 4, -9 at
p = 6, sign-changing beyond), so every consumer here prefers the direct
definition and uses the closed form only where the direct enumeration is out
of range. The discrepancy is asserted, reported, and never patched.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .combinat import binom_ext, catalan
from .cycles import dominant_classes, petal_profile
from .errors import ResourceGuardError

_DIRECT_CAP = 14
_CLOSED_CAP = 30


def _split_count_rooted(p: int, profile: Sequence[int]) -> int:
    """Admissible (q, t) splits of one petal profile, rooted variant.

    q picks a petal, t a run of petals after it; the two partial sums of
    loop half-lengths are capped by (p + 1)/2 - q and (p - 1)/2 - t. All
    comparisons are doubled to stay in integers.
    """
    k = len(profile)
    count = 0
    for q in range(1, k + 1):
        head = sum(profile[: q - 1])
        if 2 * head > (p + 1) - 2 * q:
            continue
        for t in range(0, k - q + 1):
            mid = sum(profile[q - 1 : q - 1 + t])
            if 2 * mid <= (p - 1) - 2 * t:
                count += 1
    return count


def _split_count_deferred(p: int, profile: Sequence[int]) -> int:
    """Admissible (q, t) splits, deferred variant (needs k >= 2 petals).

    Here the middle run includes the petal at position q + t, and the caps
    tighten to p/2 - q and (p - t - [t > 0])/2 - 1.
    """
    k = len(profile)
    if k < 2:
        return 0
    count = 0
    for q in range(1, k + 1):
        head = sum(profile[: q - 1])
        if 2 * head > p - 2 * q:
            continue
        for t in range(0, k - q + 1):
            mid = sum(profile[q - 1 : q + t])
            chi = 1 if t > 0 else 0
            if 2 * mid <= (p - t - chi) - 2:
                count += 1
    return count


def _profiles(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _profiles(total - first, parts - 1):
            yield (first,) + rest


def _catalan_weight(profile: Sequence[int]) -> int:
    weight = 1
    for l in profile:
        weight *= catalan(l)
    return weight


def _check_direct_range(p: int, name: str) -> None:
    if p < 2:
        raise ValueError(f"{name} needs p >= 2, got {p}")
    if p > _DIRECT_CAP:
        raise ResourceGuardError(f"{name} capped at p = {_DIRECT_CAP}, got {p}")


@lru_cache(maxsize=None)
def pair_count_root_splits(p: int) -> int:
    """First split-count sum: profiles weighted by prod catalan(l_i).

    Sums _split_count_rooted over all petal profiles (k parts summing to
    p - 1 - k, k = 1 .. p - 1), each weighted by its class multiplicity.
    Equals the same sum taken classwise over dominant_classes(p - 1); the
    test suite holds the two routes together.
    """
    _check_direct_range(p, "pair_count_root_splits")
    total = 0
    for k in range(1, p):
        for profile in _profiles(p - 1 - k, k):
            total += _catalan_weight(profile) * _split_count_rooted(p, profile)
    return total


@lru_cache(maxsize=None)
def pair_count_vertex_splits(p: int) -> int:
    """Second split-count sum, deferred variant, same weighting scheme."""
    _check_direct_range(p, "pair_count_vertex_splits")
    total = 0
    for k in range(2, p):
        for profile in _profiles(p - 1 - k, k):
            total += _catalan_weight(profile) * _split_count_deferred(p, profile)
    return total


def pair_count_total(p: int) -> int:
    """Direct-definition total of both split counts."""
    return pair_count_root_splits(p) + pair_count_vertex_splits(p)


def pair_counts_by_enumeration(p: int) -> tuple[int, int]:
    """Oracle route: the same two sums taken over actual class elements.

    Walks every dominant class of half-length p - 1 and applies the split
    counts to its petal profile, one class at a time. Slower, independent of
    the profile-weighting argument, and the ground truth for it.
    """
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    rooted = 0
    deferred = 0
    for word in dominant_classes(p - 1):
        profile = petal_profile(word)
        rooted += _split_count_rooted(p, profile)
        deferred += _split_count_deferred(p, profile)
    return rooted, deferred


def _tuple_set(p: int) -> Iterator[tuple[int, int, int, int, int]]:
    """Ordered tuples (k, q, t, a, b) of the primary index set."""
    for k in range(1, p):
        for q in range(1, min(k, (p + 1) // 2) + 1):
            for t in range(0, min(k - q, (p - 1) // 2) + 1):
                for a in range(0, min((p + 1 - 2 * q) // 2, p - 1 - k) + 1):
                    for b in range(0, min((p - 1 - 2 * t) // 2, p - 1 - k - a) + 1):
                        yield k, q, t, a, b


def _tuple_set_shifted(p: int) -> Iterator[tuple[int, int, int, int, int]]:
    """Ordered tuples of the companion index set (q starts at 2)."""
    for k in range(1, p):
        for q in range(2, min(k, p // 2) + 1):
            for t in range(0, min(k - q, p // 2) + 1):
                for a in range(0, min((p - 2 * q) // 2, p - 1 - k) + 1):
                    for b in range(0, min((p - t - 2) // 2, p - 1 - k - a) + 1):
                        yield k, q, t, a, b


@lru_cache(maxsize=None)
def pair_count_closed_form(p: int) -> int:
    """Seven-term closed-form candidate for pair_count_total, as written.

    Terms two and three are printed without one of the five indices in
    their summands; they are evaluated over the remaining indices (the
    degenerate slice of the tuple set), which is the reading closest to the
    direct counts. The extended binomial supplies the count-1 convention at
    index -1. Known to differ from pair_count_total for p >= 4; callers
    that can reach the direct definition should use it instead.
    """
    if not 2 <= p <= _CLOSED_CAP:
        raise ValueError(f"closed form supported for 2 <= p <= {_CLOSED_CAP}, got {p}")

    term1 = catalan(p - 1)
    term2 = 0
    term3 = 0
    term4 = 0
    for k, q, t, a, b in _tuple_set(p):
        if q == 1 and t >= 1 and a == 0:
            term2 += binom_ext(b + t - 1, t - 1) * binom_ext(p - b - t - 2, k - t - 1)
        if q >= 2 and t == 0 and b == 0:
            term3 += binom_ext(a + q - 2, q - 2) * binom_ext(p - a - q - 1, k - q)
        if q >= 2 and t >= 1:
            term4 += (
                binom_ext(a + q - 2, q - 2)
                * binom_ext(b + t - 1, t - 1)
                * binom_ext(p - a - b - q - t - 1, k - q - t)
            )
    term5 = 0
    term6 = 0
    for k in range(2, p):
        for l1 in range(0, min(p // 2 - 1, p - 1 - k) + 1):
            term5 += binom_ext(p - l1 - 3, k - 2)
        for t in range(1, k - 1):
            for a in range(0, min((p - t - 1) // 2, p - 1 - k) + 1):
                term6 += binom_ext(a + t, t) * binom_ext(p - a - t - 3, k - t - 2)
    term7 = 0
    for k, q, t, a, b in _tuple_set_shifted(p):
        term7 += (
            binom_ext(a + q - 2, q - 2)
            * binom_ext(b + t, t)
            * binom_ext(p - a - b - q - t - 2, k - q - t - 1)
        )
    return term1 + term2 + term3 + term4 + term5 + term6 + term7


def _composition_ways(parts: int, target: int) -> int:
    if parts == 0:
        return 1 if target == 0 else 0
    if target < 0:
        return 0
    return binom_ext(parts + target - 1, parts - 1)


def shared_edge_weight_direct(p: int) -> int:
    """Direct double sum for the shared-edge weight.

    Over k1 >= 1 and k2 >= 0 with loop half-lengths filling
    2 * sum(first k1) = p - 2 k1 and 2 * sum(next k2) = p - 2 k2 - 2,
    each composition counts k1 * (k2 + 1). Zero for odd p. The k2 = 0
    branch only fires at p = 2, which is why the closed form (derived for
    k2 >= 1) disagrees there: 1 here vs 3/4 there.
    """
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    if p % 2:
        return 0
    total = 0
    for k1 in range(1, p // 2 + 1):
        first_target, rem1 = divmod(p - 2 * k1, 2)
        ways1 = _composition_ways(k1, first_target) if rem1 == 0 else 0
        if ways1 == 0:
            continue
        for k2 in range(0, (p - 2) // 2 + 1):
            second_target, rem2 = divmod(p - 2 * k2 - 2, 2)
            ways2 = _composition_ways(k2, second_target) if rem2 == 0 else 0
            total += ways1 * ways2 * k1 * (k2 + 1)
    return total


def shared_edge_weight_closed(p: int) -> Fraction:
    """Closed form 2^(p-7) (p+2) (p+4) for even p, else 0.

    Rational because the power of two is fractional below p = 7.
    """
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    if p % 2:
        return Fraction(0)
    return Fraction(2) ** (p - 7) * (p + 2) * (p + 4)


def _correction_coefficient(p: int) -> Fraction:
    if p % 2:
        return Fraction(0)
    return Fraction(2) ** (p - 6) * (p + 2) * (p + 4)


def diag_variance_coeff(
    p: int, fourth_moment: Fraction | float, route: str = "auto"
) -> Fraction:
    """Diagonal variance coefficient: 2 * A + coeff * (m4 - 2).

    A is pair_count_total where the direct enumeration reaches (p <= 14)
    and pair_count_closed_form beyond; the two disagree, the direct value
    is authoritative, and route="direct" / route="closed" force a side.
    The even-p correction coefficient is 2^(p-6) (p+2) (p+4); m4 is the
    entry law's fourth moment, at least 1 by Jensen.
    """
    m4 = Fraction(fourth_moment)
    if m4 < 1:
        raise ValueError(f"fourth moment below 1 is impossible, got {m4}")
    if route not in ("auto", "direct", "closed"):
        raise ValueError(f"unknown route {route!r}")
    if route == "auto":
        route = "direct" if p <= _DIRECT_CAP else "closed"
    if route == "direct":
        base = pair_count_total(p)
    else:
        base = pair_count_closed_form(p)
    return 2 * base + _correction_coefficient(p) * (m4 - 2)


def offdiag_variance(p: int) -> int:
    """Off-diagonal variance coefficient: catalan(p) minus, for even p, the
    square of catalan(p / 2)."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    value = catalan(p)
    if p % 2 == 0:
        value -= catalan(p // 2) ** 2
    return value


def coeff_envelope_report(
    p_max: int, delta_grid: Sequence[Fraction | float]
) -> list[dict]:
    """Tabulate the coefficient against its square-root envelope.

    For each (p, delta) with m4 = 1 + delta: the coefficient c, the
    residual c - sqrt(2 catalan(p-1)), and that residual normalized by
    2^(p/2) p sqrt(delta) and by 2^(p/2) p (1 + sqrt(delta)). Ratios are
    reported, never asserted, since the envelope's constants are unspecified.
    Asserts only that c^2 is positive and, for even p, nondecreasing in
    delta.
    """
    if p_max > _CLOSED_CAP:
        raise ValueError(f"p_max capped at {_CLOSED_CAP}, got {p_max}")
    deltas = [Fraction(d) for d in delta_grid]
    if any(d < 0 for d in deltas):
        raise ValueError("delta values must be nonnegative")
    rows = []
    for p in range(2, p_max + 1):
        previous = None
        for delta in sorted(deltas):
            c_sq = diag_variance_coeff(p, 1 + delta)
            if c_sq <= 0:
                raise AssertionError(f"coefficient not positive at p={p}, delta={delta}")
            if p % 2 == 0:
                if previous is not None and c_sq < previous:
                    raise AssertionError(f"coefficient decreased in delta at p={p}")
                previous = c_sq
            c = float(c_sq) ** 0.5
            base = (2 * catalan(p - 1)) ** 0.5
            residual = c - base
            scale = 2 ** (p / 2) * p
            sqrt_delta = float(delta) ** 0.5
            rows.append(
                {
                    "p": p,
                    "delta": delta,
                    "c": c,
                    "residual": residual,
                    "ratio_sqrt": residual / (scale * sqrt_delta) if delta > 0 else None,
                    "ratio_shifted": residual / (scale * (1 + sqrt_delta)),
                }
            )
    return rows


def variance_report(p: int) -> dict:
    """One table row of every coefficient at power p.

    Uses the direct split counts (they are the authoritative ones) and
    reports the closed-form candidate beside them.
    """
    rooted = pair_count_root_splits(p)
    deferred = pair_count_vertex_splits(p)
    return {
        "p": p,
        "A11": rooted,
        "A12": deferred,
        "A1": rooted + deferred,
        "A2_direct": shared_edge_weight_direct(p),
        "A2_closed": shared_edge_weight_closed(p),
        "offdiag_var": offdiag_variance(p),
        "c2_at_1": diag_variance_coeff(p, 1),
        "c2_at_1.8": diag_variance_coeff(p, Fraction(9, 5)),
        "c2_at_3": diag_variance_coeff(p, 3),
    }
