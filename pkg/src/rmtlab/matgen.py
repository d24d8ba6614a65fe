"""Symmetric entry laws, seeded matrix samplers, and matrix powers.

Reproducibility scheme: a (master, stream) seed pair is mixed through
splitmix64 into a Philox key, and the replicate index is placed in the high
word of the counter block. Every replicate therefore owns a disjoint counter
range, and a sample is a pure function of (master, stream, replicate) no
matter how replicates are scheduled across workers. Each law consumes a
fixed number of uniforms per generated value (one, except the gaussian pair
transform which uses two uniforms for two values), so samples can never
shift against each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_MASK64 = (1 << 64) - 1
_PROFILE_K_CAP = 16

LAW_KINDS = ("rademacher", "gaussian", "uniform_symmetric", "three_point")


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RandomSeed:
    """Master/stream pair identifying one logical random sequence."""

    master: int
    stream: int

    def __post_init__(self) -> None:
        for name in ("master", "stream"):
            v = getattr(self, name)
            if not 0 <= v <= _MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def child(self, tag: int) -> "RandomSeed":
        """Derived seed for auxiliary randomness (index subsets, rotations).

        Mixing the tag before xoring keeps children of nearby streams far
        apart in key space.
        """
        return RandomSeed(self.master, self.stream ^ _splitmix64(tag))


def replicate_generator(seed: RandomSeed, replicate: int) -> np.random.Generator:
    """Counter-based generator owning the replicate's counter range."""
    if not 0 <= replicate <= _MASK64:
        raise ValueError(f"replicate must be a 64-bit unsigned integer, got {replicate}")
    key = np.array(
        [_splitmix64(seed.master), _splitmix64(seed.stream)], dtype=np.uint64
    )
    counter = np.array([0, 0, 0, replicate], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


@dataclass(frozen=True)
class MomentProfile:
    """Even moments of a symmetric unit-variance law: entry k is E[a^(2k)].

    All odd moments vanish by symmetry and are not stored. The sequence
    must start 1, 1 (normalization and unit variance) and be log-convex,
    which every genuine moment sequence is by Cauchy-Schwarz.
    """

    even_moments: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        m = self.even_moments
        if len(m) < 2:
            raise ValueError("profile needs at least orders 0 and 2")
        if m[0] != 1:
            raise ValueError(f"zeroth moment must be 1, got {m[0]}")
        if m[1] != 1:
            raise ValueError(f"second moment must be 1 (unit variance), got {m[1]}")
        for k in range(1, len(m) - 1):
            if m[k] * m[k] > m[k - 1] * m[k + 1]:
                raise ValueError(f"moment sequence not log-convex at index {k}")


@dataclass(frozen=True)
class EntryLaw:
    """Symmetric entry law. three_point(b) puts mass 1/(2 b^2) at each of
    +-b and the rest at zero; it keeps unit variance for every b and its
    fourth moment b^2 is the free dial of the diagonal-entry checks.

    b_squared is stored exactly so irrational b (say sqrt(3)) loses nothing.
    """

    kind: str
    b_squared: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in LAW_KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}")
        if self.kind == "three_point":
            if self.b_squared is None:
                raise ValueError("three_point needs its b parameter")
            if self.b_squared <= 1:
                raise ValueError(f"three_point needs b > 1, got b^2 = {self.b_squared}")
        elif self.b_squared is not None:
            raise ValueError(f"{self.kind} takes no b parameter")

    @staticmethod
    def rademacher() -> "EntryLaw":
        return EntryLaw("rademacher")

    @staticmethod
    def gaussian() -> "EntryLaw":
        return EntryLaw("gaussian")

    @staticmethod
    def uniform_symmetric() -> "EntryLaw":
        return EntryLaw("uniform_symmetric")

    @staticmethod
    def three_point(
        b: float | None = None, b_squared: Fraction | int | None = None
    ) -> "EntryLaw":
        if (b is None) == (b_squared is None):
            raise ValueError("give exactly one of b and b_squared")
        if b_squared is None:
            b_squared = Fraction(b) ** 2
        return EntryLaw("three_point", Fraction(b_squared))

    @property
    def label(self) -> str:
        if self.kind != "three_point":
            return self.kind
        b_sq = self.b_squared
        if b_sq.denominator == 1 and math.isqrt(b_sq.numerator) ** 2 == b_sq.numerator:
            return f"three_point({math.isqrt(b_sq.numerator)})"
        return f"three_point(sqrt({b_sq}))"

    @property
    def fourth_moment(self) -> Fraction:
        return law_profile(self, 2).even_moments[2]


def law_from_json(obj: dict) -> EntryLaw:
    """Parse the config form {"kind": ..., "b": ...} of a law."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("law must be an object with a 'kind' field")
    kind = obj["kind"]
    extra = set(obj) - {"kind", "b", "b_squared"}
    if extra:
        raise ValueError(f"unknown law fields {sorted(extra)}")
    if kind == "three_point":
        if "b_squared" in obj:
            return EntryLaw.three_point(b_squared=Fraction(obj["b_squared"]))
        if "b" in obj:
            return EntryLaw.three_point(b=obj["b"])
        raise ValueError("three_point law needs 'b' or 'b_squared'")
    if "b" in obj or "b_squared" in obj:
        raise ValueError(f"law {kind!r} takes no 'b' parameter")
    return EntryLaw(kind)


def law_to_json(law: EntryLaw) -> dict:
    if law.kind != "three_point":
        return {"kind": law.kind}
    b_sq = law.b_squared
    if b_sq.denominator == 1:
        return {"kind": "three_point", "b_squared": b_sq.numerator}
    return {"kind": "three_point", "b_squared": f"{b_sq.numerator}/{b_sq.denominator}"}


def law_profile(law: EntryLaw, k_max: int) -> MomentProfile:
    """Exact even moments through order 2 k_max.

    rademacher: all one. gaussian: double factorials (2k-1)!!. uniform on
    [-sqrt(3), sqrt(3)]: 3^k / (2k+1). three_point(b): b^(2k-2) for k >= 1.
    """
    if not 1 <= k_max <= _PROFILE_K_CAP:
        raise ValueError(f"k_max must be within 1..{_PROFILE_K_CAP}, got {k_max}")
    moments: list[Fraction] = [Fraction(1)]
    for k in range(1, k_max + 1):
        if law.kind == "rademacher":
            moments.append(Fraction(1))
        elif law.kind == "gaussian":
            moments.append(moments[-1] * (2 * k - 1))
        elif law.kind == "uniform_symmetric":
            moments.append(Fraction(3**k, 2 * k + 1))
        else:
            moments.append(law.b_squared ** (k - 1))
    return MomentProfile(tuple(moments))


def draw_entries(
    law: EntryLaw, count: int, seed: RandomSeed, replicate: int
) -> np.ndarray:
    """count i.i.d. draws from the law as float64.

    Uniform consumption is fixed per law and count, so a given (seed,
    replicate) always yields the same entries regardless of caller context.
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    gen = replicate_generator(seed, replicate)
    if law.kind == "gaussian":
        half = (count + 1) // 2
        u = gen.random(2 * half)
        radius = np.sqrt(-2.0 * np.log1p(-u[:half]))
        angle = 2.0 * np.pi * u[half:]
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        return z[:count]
    u = gen.random(count)
    if law.kind == "rademacher":
        return np.where(u < 0.5, -1.0, 1.0)
    if law.kind == "uniform_symmetric":
        return math.sqrt(3.0) * (2.0 * u - 1.0)
    b = math.sqrt(float(law.b_squared))
    lo = 1.0 / (2.0 * float(law.b_squared))
    hi = 1.0 / float(law.b_squared)
    return np.where(u < lo, -b, np.where(u < hi, b, 0.0))


def sample_wigner(
    n: int, law: EntryLaw, seed: RandomSeed, replicate: int = 0
) -> np.ndarray:
    """Symmetric n x n matrix with i.i.d. upper triangle, scaled by
    1/sqrt(n).

    The lower triangle is written from the same values, not recomputed, so
    the result is symmetric bit for bit.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    vals = draw_entries(law, n * (n + 1) // 2, seed, replicate)
    rows, cols = np.triu_indices(n)
    m = np.zeros((n, n))
    m[rows, cols] = vals
    m[cols, rows] = vals
    m *= 1.0 / math.sqrt(n)
    return m


def sample_wishart(
    n: int, N: int, law: EntryLaw, seed: RandomSeed, replicate: int = 0
) -> np.ndarray:
    """X X^T / N for an n x N matrix X of i.i.d. law entries.

    The Gram product is symmetrized by averaging with its transpose; that
    costs nothing in exact arithmetic (the two are equal) and pins down
    bitwise symmetry against summation-order quirks in the matmul.
    """
    if n < 2 or N < 2:
        raise ValueError(f"need n, N >= 2, got n={n}, N={N}")
    x = draw_entries(law, n * N, seed, replicate).reshape(n, N)
    gram = x @ x.T
    return (gram + gram.T) / (2.0 * N)


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def matrix_power(a: np.ndarray, p: int) -> np.ndarray:
    """A^p by binary exponentiation, re-symmetrizing after every multiply
    to keep rounding drift from breaking A = A^T downstream."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    result: np.ndarray | None = None
    base = a
    while p:
        if p & 1:
            result = base if result is None else _symmetrize(result @ base)
        p >>= 1
        if p:
            base = _symmetrize(base @ base)
    return result
