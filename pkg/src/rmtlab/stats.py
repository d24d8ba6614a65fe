"""Streaming moment estimators and distribution tests for the Monte Carlo
engine.

Accumulators are mergeable values. Single-value insertion is itself a merge
with a singleton, so combining partial accumulators in the engine's fixed
reduction order reproduces sequential accumulation bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

_erfc_vec = np.vectorize(math.erfc, otypes=[float])


@dataclass
class MomentAccumulator:
    """Count, mean, and central power sums through order four.

    The merge update is the pairwise form of the central-moment recurrences
    (Pebay's formulas), stable for well-scaled data and exact for the merge
    law the engine relies on: merge(acc(xs), acc(ys)) == acc(xs + ys) as
    long as both sides split the data at the same points.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    def add(self, x: float) -> None:
        self.merge(MomentAccumulator(1, float(x), 0.0, 0.0, 0.0))

    def merge(self, other: "MomentAccumulator") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count = other.count
            self.mean = other.mean
            self.m2 = other.m2
            self.m3 = other.m3
            self.m4 = other.m4
            return
        na = self.count
        nb = other.count
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (
            self.m3
            + other.m3
            + delta * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4
            + other.m4
            + delta * d_n * d_n * d_n * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3)
        )
        self.count = n
        self.mean = self.mean + d_n * nb
        self.m2 = m2
        self.m3 = m3
        self.m4 = m4


class CoreMoments(NamedTuple):
    count: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float


def finalize(acc: MomentAccumulator) -> CoreMoments:
    """Finished statistics of an accumulator.

    Variance is the unbiased estimator; skewness and excess kurtosis are the
    standardized population-form ratios. Standard errors: se(mean) from the
    sample variance, se(variance) from the plug-in fourth-moment formula
    Var(s^2) = (mu4 - s^4 (m-3)/(m-1)) / m, and normal-theory sqrt(6/m) and
    sqrt(24/m) for the shape statistics (approximations, adequate for
    threshold checks).
    """
    m = acc.count
    if m < 2:
        raise ValueError(f"need at least 2 samples, got {m}")
    variance = acc.m2 / (m - 1)
    mu2 = acc.m2 / m
    if m < 4:
        # below four samples the shape statistics are undefined, not zero
        return CoreMoments(
            count=m,
            mean=acc.mean,
            variance=variance,
            skewness=math.nan,
            excess_kurtosis=math.nan,
            se_mean=math.sqrt(variance / m),
            se_variance=math.nan,
            se_skewness=math.nan,
            se_kurtosis=math.nan,
        )
    if mu2 > 0:
        skewness = (acc.m3 / m) / mu2**1.5
        excess_kurtosis = (acc.m4 / m) / mu2**2 - 3.0
        se_variance = math.sqrt(max(acc.m4 / m - mu2 * mu2 * (m - 3) / (m - 1), 0.0) / m)
    else:
        skewness = 0.0
        excess_kurtosis = 0.0
        se_variance = 0.0
    return CoreMoments(
        count=m,
        mean=acc.mean,
        variance=variance,
        skewness=skewness,
        excess_kurtosis=excess_kurtosis,
        se_mean=math.sqrt(variance / m),
        se_variance=se_variance,
        se_skewness=math.sqrt(6.0 / m),
        se_kurtosis=math.sqrt(24.0 / m),
    )


def tree_reduce(values: Sequence[float]) -> MomentAccumulator:
    """Accumulate values by a fixed halving tree keyed by position.

    The tree shape depends only on len(values), so any parallel schedule
    that fills the value slots by index reduces to the same accumulator.
    """
    n = len(values)
    if n == 0:
        return MomentAccumulator()

    def reduce_range(lo: int, hi: int) -> MomentAccumulator:
        if hi - lo == 1:
            return MomentAccumulator(1, float(values[lo]), 0.0, 0.0, 0.0)
        mid = (lo + hi) // 2
        left = reduce_range(lo, mid)
        left.merge(reduce_range(mid, hi))
        return left

    return reduce_range(0, n)


def normal_cdf(x: float) -> float:
    """Standard normal distribution function via the complementary error
    function, Phi(x) = erfc(-x / sqrt(2)) / 2.

    The libm erfc is a rational/continued-fraction evaluation good to the
    last unit, far inside the 1e-10 budget, and avoids the cancellation a
    plain erf form has in the tails.
    """
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(q: float, tol: float = 1e-12) -> float:
    """Inverse of normal_cdf by bisection. Test-fixture grade, not fast."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must be inside (0, 1), got {q}")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ks_statistic(samples: Sequence[float]) -> float:
    """Two-sided Kolmogorov-Smirnov distance to the standard normal.

    Sorted form: max over order statistics x_(i) of
    max(F(x_(i)) - i/m, (i+1)/m - F(x_(i))), i = 0..m-1.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.size
    if m < 10:
        raise ValueError(f"need at least 10 samples, got {m}")
    cdf = 0.5 * _erfc_vec(-x / math.sqrt(2.0))
    grid = np.arange(m, dtype=float)
    below = cdf - grid / m
    above = (grid + 1.0) / m - cdf
    return float(max(below.max(), above.max()))


class HistogramTable(NamedTuple):
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    underflow: int
    overflow: int


def histogram(
    samples: Sequence[float], bin_count: int, value_range: tuple[float, float]
) -> HistogramTable:
    """Fixed-width histogram with closed-open bins [e_k, e_{k+1}).

    Values below the range go to underflow, values at or above the top edge
    to overflow; in-range plus the two tails always equals the sample count.
    """
    lo, hi = value_range
    if bin_count < 1:
        raise ValueError(f"need at least one bin, got {bin_count}")
    if not lo < hi:
        raise ValueError(f"invalid range ({lo}, {hi})")
    x = np.asarray(samples, dtype=float)
    edges = np.linspace(lo, hi, bin_count + 1)
    # searchsorted against the edge array keeps boundary values exact: a
    # sample equal to an interior edge lands in the bin opening there
    idx = np.searchsorted(edges, x, side="right") - 1
    underflow = int(np.count_nonzero(idx < 0))
    overflow = int(np.count_nonzero(idx >= bin_count))
    in_range = (idx >= 0) & (idx < bin_count)
    counts = np.bincount(idx[in_range], minlength=bin_count)
    return HistogramTable(
        edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        underflow=underflow,
        overflow=overflow,
    )
