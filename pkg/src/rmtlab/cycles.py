"""Even-cycle enumeration and exact small-instance expectation oracles.

A cycle is stored as its vertex word, a tuple whose first and last entries
coincide. Canonical form relabels vertices by order of first appearance, so
two walks are isomorphic exactly when their canonical words are equal. The
dominant classes enumerated here are the even cycles of length 2l whose
support is a tree traversed edge-twice (n_1 = l, unmarked first vertex);
there are catalan(l) of them.

The expectation oracles at the bottom evaluate Wigner and Wishart trace and
entry moments exactly (as rationals) by summing over all index walks of a
small matrix, weighted by the entry law's even-moment profile. They exist to
pin the Monte Carlo engine at small sizes, so their guards are tight and
explicit.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import NamedTuple, Sequence

from .combinat import narayana_count
from .errors import ResourceGuardError

CycleWord = tuple[int, ...]

_ENUMERATION_CAP = 10
_FILTER_CAP = 5
_TRACE_WALK_CAP = 10**8
_ENTRY_PAIR_CAP = 10**8


class MarkedWalk(NamedTuple):
    cycle: CycleWord
    marks: tuple[bool, ...]


def canonicalize(raw_cycle: Sequence[int]) -> CycleWord:
    """Relabel a closed walk by order of first appearance.

    Idempotent; rejects open walks. (7,3,7,9,7) becomes (0,1,0,2,0).
    """
    word = tuple(raw_cycle)
    if len(word) < 2:
        raise ValueError("a closed walk has at least two entries")
    if word[0] != word[-1]:
        raise ValueError(f"open walk rejected: starts {word[0]}, ends {word[-1]}")
    labels: dict[int, int] = {}
    out = []
    for v in word:
        if v not in labels:
            labels[v] = len(labels)
        out.append(labels[v])
    return tuple(out)


def edge_multiplicities(cycle: Sequence[int]) -> dict[tuple[int, int], int]:
    """Undirected edge multiset of a walk, loops included."""
    counts: dict[tuple[int, int], int] = {}
    for a, b in zip(cycle, cycle[1:]):
        e = (a, b) if a <= b else (b, a)
        counts[e] = counts.get(e, 0) + 1
    return counts


def is_even_cycle(cycle: Sequence[int]) -> bool:
    """True when every undirected edge appears an even number of times."""
    return all(c % 2 == 0 for c in edge_multiplicities(cycle).values())


def mark_edges(cycle: Sequence[int]) -> MarkedWalk:
    """Mark each edge whose undirected copy has appeared an even number of
    times before it (so first traversals are marked, returns are not).

    An even cycle of length q gets exactly q/2 marks.
    """
    word = canonicalize(cycle)
    seen: dict[tuple[int, int], int] = {}
    marks = []
    for a, b in zip(word, word[1:]):
        e = (a, b) if a <= b else (b, a)
        prior = seen.get(e, 0)
        marks.append(prior % 2 == 0)
        seen[e] = prior + 1
    return MarkedWalk(word, tuple(marks))


def to_dyck_path(walk: MarkedWalk) -> tuple[int, ...]:
    """Map marks to +1 / -1 steps; valid only for even cycles.

    For even cycles the result is a Dyck path: prefix sums stay nonnegative
    and the total is zero.
    """
    if not is_even_cycle(walk.cycle):
        raise ValueError("Dyck image is defined for even cycles only")
    return tuple(1 if m else -1 for m in walk.marks)


def _mark_counts(cycle: Sequence[int]) -> dict[int, int]:
    """Marks per vertex: a mark sits on the vertex its edge enters."""
    walk = mark_edges(cycle)
    counts: dict[int, int] = {}
    for (_, head), marked in zip(zip(walk.cycle, walk.cycle[1:]), walk.marks):
        if marked:
            counts[head] = counts.get(head, 0) + 1
    return counts


def mark_multiplicity_profile(cycle: Sequence[int], ambient_n: int) -> tuple[int, ...]:
    """Counts (n_0, n_1, ..., n_q): how many of the ambient_n vertices carry
    exactly k marks. Unvisited vertices count toward n_0. For an even cycle
    of length q, sum(k * n_k) = q / 2.
    """
    word = canonicalize(cycle)
    if ambient_n < len(set(word)):
        raise ValueError(f"ambient size {ambient_n} smaller than support {len(set(word))}")
    q = len(word) - 1
    per_vertex = _mark_counts(word)
    profile = [0] * (q + 1)
    for v in set(word):
        profile[per_vertex.get(v, 0)] += 1
    profile[0] += ambient_n - len(set(word))
    return tuple(profile)


@lru_cache(maxsize=None)
def _classes(l: int) -> frozenset[CycleWord]:
    if l == 1:
        return frozenset({(0, 1, 0)})
    out: set[CycleWord] = set()
    for small in _classes(l - 1):
        fresh = max(small) + 1
        # a fresh loop hung on the root
        out.add(canonicalize((small[0], fresh) + small))
        # a fresh loop hung on the second vertex
        out.add(canonicalize(small[:2] + (fresh,) + small[1:]))
    # gluing: descend one edge, run an inner class, come back, finish an outer one
    for a in range(1, l - 1):
        for outer in _classes(l - 1 - a):
            offset = max(outer) + 1
            for inner in _classes(a):
                shifted = tuple(v + offset for v in inner)
                word = (
                    (outer[0], outer[1], shifted[0])
                    + shifted[1:-1]
                    + (shifted[0], outer[1])
                    + outer[2:]
                )
                out.add(canonicalize(word))
    return frozenset(out)


def dominant_classes(l: int) -> tuple[CycleWord, ...]:
    """All catalan(l) canonical dominant classes of length 2l, sorted.

    Generated by the three-branch recursion (loop at the root, loop at the
    second vertex, glue of two smaller classes) with canonical-form
    deduplication. Guarded at l = 10: the class count is catalan(l) and the
    point of this enumeration is exactness, not scale.
    """
    if l < 1:
        raise ValueError(f"need l >= 1, got {l}")
    if l > _ENUMERATION_CAP:
        raise ResourceGuardError(
            f"dominant_classes capped at l = {_ENUMERATION_CAP}, got l = {l}"
        )
    return tuple(sorted(_classes(l)))


def dominant_classes_by_filter(l: int) -> tuple[CycleWord, ...]:
    """Independent route to the same set: filter every canonical closed walk
    of length 2l for evenness, n_1 = l, and an unmarked first vertex.

    Exponentially slower than the recursion, which is why it stops at l = 5;
    it exists to check the recursion, not to replace it.
    """
    if l < 1:
        raise ValueError(f"need l >= 1, got {l}")
    if l > _FILTER_CAP:
        raise ResourceGuardError(
            f"dominant_classes_by_filter capped at l = {_FILTER_CAP}, got l = {l}"
        )
    found: set[CycleWord] = set()

    def gen(prefix: list[int], used: int):
        if len(prefix) == 2 * l:
            yield tuple(prefix) + (0,)
            return
        for v in range(used + 1):
            prefix.append(v)
            yield from gen(prefix, max(used, v + 1))
            prefix.pop()

    for word in gen([0], 1):
        if not is_even_cycle(word):
            continue
        mc = _mark_counts(word)
        if 0 in mc or len(mc) != l or any(c != 1 for c in mc.values()):
            continue
        found.add(word)
    return tuple(sorted(found))


def petal_profile(cycle: Sequence[int]) -> tuple[int, ...]:
    """Half-length profile (l_1, ..., l_k) of the loops hanging off the root.

    Splitting a dominant class at each return to its first vertex yields k
    petals; a petal spanning s word entries is itself a dominant class of
    half-length s // 2 - 1. The profile satisfies sum(l_j + 1) = l.
    """
    word = canonicalize(cycle)
    root_positions = [idx for idx, v in enumerate(word) if v == word[0]]
    profile = []
    for start, stop in zip(root_positions, root_positions[1:]):
        entries = stop - start + 1
        profile.append(entries // 2 - 1)
    return tuple(profile)


def first_vertex_multiplicity_histogram(l: int) -> dict[int, int]:
    """Distribution of the number of root visits across dominant classes.

    Keys are visit counts m = 1..l, values are class counts; the values sum
    to catalan(l) and the m = 1 slot equals catalan(l - 1).
    """
    hist: dict[int, int] = {}
    for word in dominant_classes(l):
        visits = word[:-1].count(word[0])
        hist[visits] = hist.get(visits, 0) + 1
    return dict(sorted(hist.items()))


def bipartite_class_counts(l: int) -> dict[int, int]:
    """Histogram of dominant classes by their bipartite vertex split.

    Each class's support tree splits its l + 1 vertices into even-depth and
    odd-depth sides; with i + 1 distinct vertices in even word positions the
    class lands in slot i. The histogram reproduces the Narayana row of l.
    """
    counts: dict[int, int] = {}
    for word in dominant_classes(l):
        even_side = len(set(word[::2]))
        counts[even_side - 1] = counts.get(even_side - 1, 0) + 1
    return dict(sorted(counts.items()))


def _profile_moment(mp: Sequence[Fraction], half_multiplicity: int) -> Fraction:
    if half_multiplicity >= len(mp):
        raise ValueError(
            f"moment profile has {len(mp)} entries, need index {half_multiplicity}"
        )
    return Fraction(mp[half_multiplicity])


def _walk_weight(counts: dict, mp: Sequence[Fraction]) -> Fraction:
    weight = Fraction(1)
    for c in counts.values():
        if c % 2:
            return Fraction(0)
        weight *= _profile_moment(mp, c // 2)
    return weight


def exact_wigner_trace_mean(n: int, p: int, mp: Sequence[Fraction]) -> Fraction:
    """Exact E[tr(A^p)] for the n x n symmetric model with entry moments mp.

    Sums the moment weight of every closed index walk of length p and
    divides by n^(p/2). Odd p gives exactly zero (every walk has an odd
    edge), so the square root never materializes.
    """
    if n < 1 or p < 1:
        raise ValueError(f"need n, p >= 1, got n={n}, p={p}")
    if n**p > _TRACE_WALK_CAP:
        raise ResourceGuardError(f"n^p = {n**p} exceeds the {_TRACE_WALK_CAP} walk cap")
    total = Fraction(0)
    for walk in product(range(n), repeat=p):
        total += _walk_weight(edge_multiplicities(walk + (walk[0],)), mp)
    if p % 2:
        assert total == 0
        return Fraction(0)
    return total / n ** (p // 2)


def exact_wigner_entry_stats(
    n: int, p: int, i: int, j: int, mp: Sequence[Fraction]
) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of the (i, j) entry of A^p.

    Enumerates all index walks i -> j of length p, then all ordered walk
    pairs for the second moment. The variance of the entry equals the
    variance of the entry minus any deterministic centering, so the value
    reported covers the centered diagonal statistic as well.
    """
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"indices ({i}, {j}) outside 0..{n - 1}")
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    pairs = n ** (2 * (p - 1))
    if pairs > _ENTRY_PAIR_CAP:
        raise ResourceGuardError(f"n^(2(p-1)) = {pairs} exceeds the {_ENTRY_PAIR_CAP} pair cap")

    walks = []
    for interior in product(range(n), repeat=p - 1):
        walks.append((i,) + interior + (j,))
    counts = [edge_multiplicities(w) for w in walks]

    first = Fraction(0)
    for c in counts:
        first += _walk_weight(c, mp)
    if first == 0:
        mean = Fraction(0)
    else:
        # a nonzero first moment only happens for even p
        assert p % 2 == 0
        mean = first / n ** (p // 2)

    second = Fraction(0)
    for c1 in counts:
        for c2 in counts:
            merged = dict(c1)
            for e, c in c2.items():
                merged[e] = merged.get(e, 0) + c
            second += _walk_weight(merged, mp)
    second /= n**p
    return mean, second - mean * mean


def exact_wishart_trace_mean(
    n: int, N: int, p: int, mp: Sequence[Fraction]
) -> Fraction:
    """Exact E[tr((X X^T / N)^p)] for an n x N matrix of i.i.d. entries.

    A length-p trace walk alternates row indices i_t and column indices k_t;
    each step touches the ordered entry pairs (i_t, k_t) and (i_{t+1}, k_t).
    Odd entry multiplicities kill a term; the rest weigh in with mp.
    """
    if n < 1 or N < 1 or p < 1:
        raise ValueError(f"need n, N, p >= 1, got {n}, {N}, {p}")
    if (n * N) ** p > _TRACE_WALK_CAP:
        raise ResourceGuardError(
            f"(nN)^p = {(n * N) ** p} exceeds the {_TRACE_WALK_CAP} walk cap"
        )
    total = Fraction(0)
    for rows in product(range(n), repeat=p):
        for cols in product(range(N), repeat=p):
            counts: dict[tuple[int, int], int] = {}
            for t in range(p):
                for pair in ((rows[t], cols[t]), (rows[(t + 1) % p], cols[t])):
                    counts[pair] = counts.get(pair, 0) + 1
            total += _walk_weight(counts, mp)
    return total / N**p


def labeled_class_count(p: int, n: int, N: int) -> tuple[int, int]:
    """Labeled dominant-class count for the Wishart expansion, both forms.

    Returns (falling-factorial form, monomial form): the exact number of
    labeled class embeddings sum_i narayana(p, i) * n^(i+1 falling) *
    N^(p-i falling), and its monomial upper bound with plain powers.
    """
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    if p > 20:
        raise ResourceGuardError(f"labeled_class_count capped at p = 20, got {p}")

    def falling(x: int, k: int) -> int:
        out = 1
        for step in range(k):
            out *= x - step
        return out

    labeled = 0
    monomial = 0
    for i in range(p):
        row = narayana_count(p, i)
        labeled += row * falling(n, i + 1) * falling(N, p - i)
        monomial += row * n ** (i + 1) * N ** (p - i)
    return labeled, monomial
