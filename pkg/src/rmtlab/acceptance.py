"""The verification suite: every claim the package vouches for, runnable.

Criteria come in four groups: exact identities, quadrature residuals,
Monte Carlo runs pinned to small-case oracles, and tolerance-banded Monte
Carlo at scale. Each criterion returns pass/fail plus a measured detail
string; nothing is loosened to force a pass. Four checks are expected to
fail where a stated closed form or limit law departs from the direct
definition (see the README); they run and report exactly like the others.

The full determinism criterion (two identical runs under different worker
counts) is a statement about whole-process output and lives in the test
suite and CLI, which compare the files this module's runner emits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .combinat import (
    catalan,
    catalan_composition_residual,
    first_vertex_count_formula,
    mp_moment_exact,
    mp_moment_recurrence_residual,
    narayana_count,
)
from .cycles import (
    bipartite_class_counts,
    dominant_classes,
    exact_wigner_trace_mean,
    exact_wishart_trace_mean,
    first_vertex_multiplicity_histogram,
)
from .matgen import EntryLaw, RandomSeed, law_profile
from .mcengine import (
    TOLERANCES,
    ExperimentConfig,
    run_experiment,
)
from .spectral import (
    MPParams,
    generating_eq_residual,
    mp_moment_quadrature,
    stieltjes_residual,
)
from .variance import (
    pair_count_closed_form,
    pair_count_root_splits,
    pair_count_total,
    pair_count_vertex_splits,
    shared_edge_weight_closed,
    shared_edge_weight_direct,
)

DEFAULT_SEED = RandomSeed(master=20260801, stream=7)

CRITERION_NAMES = {
    1: "dominant class count",
    2: "catalan composition identity",
    3: "moment recurrence and catalan row",
    4: "bipartite split counts",
    5: "variance coefficient cross-checks",
    6: "first-vertex multiplicity histogram",
    7: "moment quadrature vs exact",
    8: "transform residuals",
    9: "trace mean vs small-case oracle",
    10: "gram trace mean vs small-case oracle",
    11: "gram trace mean ratio at scale",
    12: "trace mean ratio at scale",
    13: "off-diagonal entry normality",
    14: "diagonal entry variance coefficient",
    15: "characteristic function gaps",
    16: "eigenvector delocalization",
}


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str


def _problems_detail(problems: list[str], ok_note: str) -> tuple[bool, str]:
    if not problems:
        return True, ok_note
    shown = "; ".join(problems[:4])
    if len(problems) > 4:
        shown += f"; and {len(problems) - 4} more"
    return False, shown


def criterion_1() -> tuple[bool, str]:
    problems = []
    for l in range(1, 8):
        got = len(dominant_classes(l))
        want = catalan(l)
        if got != want:
            problems.append(f"l={l}: {got} classes, expected {want}")
    return _problems_detail(problems, "class counts match catalan numbers for l=1..7")


def criterion_2() -> tuple[bool, str]:
    problems = []
    for l in range(1, 13):
        r = catalan_composition_residual(l)
        if r != 0:
            problems.append(f"l={l}: residual {r}")
    return _problems_detail(problems, "weighted composition identity exact for l=1..12")


def criterion_3() -> tuple[bool, str]:
    problems = []
    gammas = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3))
    for k in range(2, 21):
        for g in gammas:
            r = mp_moment_recurrence_residual(k, g)
            if r != 0:
                problems.append(f"k={k}, gamma={g}: residual {r}")
    for k in range(1, 21):
        if mp_moment_exact(k, 1) != catalan(k):
            problems.append(f"k={k}: moment at ratio 1 is {mp_moment_exact(k, 1)}, not catalan")
    return _problems_detail(problems, "recurrence exact for k<=20 on 5 ratios; ratio-1 row is catalan")


def criterion_4() -> tuple[bool, str]:
    problems = []
    for l in range(1, 8):
        counts = bipartite_class_counts(l)
        for i in range(l):
            if counts.get(i, 0) != narayana_count(l, i):
                problems.append(
                    f"l={l}, i={i}: {counts.get(i, 0)} vs narayana {narayana_count(l, i)}"
                )
    for p in range(1, 21):
        if sum(narayana_count(p, i) for i in range(p)) != catalan(p):
            problems.append(f"p={p}: narayana row sum differs from catalan")
    return _problems_detail(problems, "bipartite counts are the narayana triangle; rows sum to catalan")


def criterion_5() -> tuple[bool, str]:
    problems = []
    for p in range(4, 21, 2):
        d, c = shared_edge_weight_direct(p), shared_edge_weight_closed(p)
        if d != c:
            problems.append(f"p={p}: shared-edge direct {d} != closed {c}")
    if shared_edge_weight_direct(2) != 1 or shared_edge_weight_closed(2) != Fraction(3, 4):
        problems.append(
            f"p=2 divergence not as documented: direct {shared_edge_weight_direct(2)},"
            f" closed {shared_edge_weight_closed(2)}"
        )
    for p in range(2, 13):
        total = pair_count_total(p)
        closed = pair_count_closed_form(p)
        if closed != total:
            problems.append(f"p={p}: seven-term form {closed} != direct total {total}")
    for p in range(2, 13):
        a11 = pair_count_root_splits(p)
        a12 = pair_count_vertex_splits(p)
        lower = catalan(p - 1)
        upper11 = catalan(p - 1) + Fraction(2) ** (p - 6) * (p * p + 12 * p + 19)
        upper12 = Fraction(2) ** (p - 5) * (p * p + 8 * p)
        if a11 < lower:
            problems.append(f"p={p}: first split count {a11} below catalan({p - 1})={lower}")
        if a11 > upper11:
            problems.append(f"p={p}: first split count {a11} above bound {upper11}")
        if a12 > upper12:
            problems.append(f"p={p}: second split count {a12} above bound {upper12}")
    return _problems_detail(
        problems, "shared-edge forms agree (p=2 divergence as documented); split counts in bounds"
    )


def criterion_6() -> tuple[bool, str]:
    problems = []
    for l in range(1, 8):
        hist = first_vertex_multiplicity_histogram(l)
        if hist.get(1, 0) != catalan(l - 1):
            problems.append(f"l={l}: histogram[1]={hist.get(1, 0)}, expected catalan {catalan(l - 1)}")
        for m in range(2, l + 1):
            want = first_vertex_count_formula(l, m)
            if hist.get(m, 0) != want:
                problems.append(f"l={l}, m={m}: histogram {hist.get(m, 0)} vs formula {want}")
    return _problems_detail(problems, "histogram matches the count formula for l=1..7")


def criterion_7() -> tuple[bool, str]:
    problems = []
    for g in (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)):
        params = MPParams(float(g))
        for k in range(1, 9):
            quad = mp_moment_quadrature(k, params)
            exact = float(mp_moment_exact(k, g))
            if abs(quad - exact) > 1e-6:
                problems.append(f"k={k}, gamma={g}: |{quad} - {exact}| > 1e-6")
    return _problems_detail(problems, "quadrature moments within 1e-6 of exact for k<=8 on 4 ratios")


def criterion_8() -> tuple[bool, str]:
    problems = []
    for gamma in (0.5, 1.0, 2.0):
        params = MPParams(gamma)
        for real in (1.0, 2.0, 3.0):
            for imag in (1.0, 2.0):
                r = stieltjes_residual(complex(real, imag), params)
                if r > 1e-5:
                    problems.append(f"gamma={gamma}, z={real}+{imag}i: residual {r:.2e}")
        r = generating_eq_residual(0.1 / params.b, params, 40)
        if r > 1e-8:
            problems.append(f"gamma={gamma}: series residual {r:.2e} at x=0.1/b")
    return _problems_detail(problems, "transform residuals within budget on the z grid and series point")


def _oracle_check(cfg: ExperimentConfig, exact: float, workers: int | None) -> str | None:
    result = run_experiment(cfg, workers)
    s = result.summary
    gap = abs(s.mean - exact)
    budget = TOLERANCES["oracle_se_multiplier"] * s.se_mean
    if gap > budget:
        return (
            f"{cfg.kind} n={cfg.n} N={cfg.N} p={cfg.p} {cfg.law.label}:"
            f" |{s.mean:.6f} - {exact:.6f}| = {gap:.2e} > 4se = {budget:.2e}"
        )
    return None


def criterion_9(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    problems = []
    for law in (EntryLaw.rademacher(), EntryLaw.three_point(b=2.0)):
        for n, p in ((5, 4), (6, 4), (4, 6)):
            profile = law_profile(law, p)
            exact = float(exact_wigner_trace_mean(n, p, profile.even_moments))
            cfg = ExperimentConfig(
                kind="trace", n=n, p=p, law=law, replicates=100_000, seed=seed
            )
            problem = _oracle_check(cfg, exact, workers)
            if problem:
                problems.append(problem)
    return _problems_detail(problems, "trace means within 4se of exact enumeration, 6 configs")


def criterion_10(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    problems = []
    law = EntryLaw.rademacher()
    for n, N, p in ((2, 4, 2), (3, 3, 2), (2, 2, 3)):
        profile = law_profile(law, max(2, p))
        exact = float(exact_wishart_trace_mean(n, N, p, profile.even_moments))
        cfg = ExperimentConfig(
            kind="wishart_trace", n=n, N=N, p=p, law=law, replicates=100_000, seed=seed
        )
        problem = _oracle_check(cfg, exact, workers)
        if problem:
            problems.append(problem)
    return _problems_detail(problems, "gram trace means within 4se of exact enumeration, 3 configs")


def criterion_11(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    problems = []
    lo, hi = TOLERANCES["wishart_mean_ratio_band"]
    for n, N, p in ((300, 600, 4), (400, 200, 3)):
        cfg = ExperimentConfig(
            kind="wishart_trace", n=n, N=N, p=p, law=EntryLaw.gaussian(),
            replicates=400, seed=seed,
        )
        ratio = run_experiment(cfg, workers).summary.mean_ratio
        if not lo <= ratio <= hi:
            problems.append(f"n={n}, N={N}, p={p}: ratio {ratio:.4f} outside [{lo}, {hi}]")
    return _problems_detail(problems, "gram trace mean ratios inside the 5 percent band")


def criterion_12(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    problems = []
    lo, hi = TOLERANCES["trace_mean_ratio_band"]
    for law in (EntryLaw.gaussian(), EntryLaw.rademacher()):
        cfg = ExperimentConfig(
            kind="trace", n=1000, p=6, law=law, replicates=400, seed=seed
        )
        ratio = run_experiment(cfg, workers).summary.mean_ratio
        if not lo <= ratio <= hi:
            problems.append(f"{law.label}: ratio {ratio:.4f} outside [{lo}, {hi}]")
    return _problems_detail(problems, "trace mean ratios inside the 5 percent band at n=1000, p=6")


def criterion_13(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    problems = []
    lo, hi = TOLERANCES["offdiag_variance_ratio_band"]
    ks_max = TOLERANCES["entry_ks_max"]
    kurt_max = TOLERANCES["entry_excess_kurtosis_max"]
    laws = (EntryLaw.gaussian(), EntryLaw.rademacher(), EntryLaw.uniform_symmetric())
    for law in laws:
        for p in (2, 3, 4):
            cfg = ExperimentConfig(
                kind="entry_offdiag", n=400, p=p, law=law, replicates=20_000, seed=seed
            )
            s = run_experiment(cfg, workers).summary
            tag = f"{law.label}, p={p}"
            if not lo <= s.variance_ratio <= hi:
                problems.append(f"{tag}: variance ratio {s.variance_ratio:.4f} outside [{lo}, {hi}]")
            if s.ks > ks_max:
                problems.append(f"{tag}: ks {s.ks:.4f} > {ks_max}")
            if abs(s.excess_kurtosis) > kurt_max:
                problems.append(f"{tag}: excess kurtosis {s.excess_kurtosis:.4f} outside +-{kurt_max}")
    return _problems_detail(problems, "off-diagonal entries normal within bands, 9 configs")


def criterion_14(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    problems = []
    lo, hi = TOLERANCES["diag_variance_ratio_band"]
    laws = (
        EntryLaw.rademacher(),
        EntryLaw.uniform_symmetric(),
        EntryLaw.gaussian(),
        EntryLaw.three_point(b_squared=3),
    )
    for law in laws:
        cfg = ExperimentConfig(
            kind="entry_diag", n=400, p=4, law=law, replicates=20_000, seed=seed
        )
        s = run_experiment(cfg, workers).summary
        if not lo <= s.variance_ratio <= hi:
            problems.append(
                f"{law.label} (m4={float(law.fourth_moment):g}): variance ratio"
                f" {s.variance_ratio:.4f} outside [{lo}, {hi}]"
            )
    return _problems_detail(problems, "diagonal variance ratios inside the 15 percent band, 4 laws")


def criterion_15(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    cfg = ExperimentConfig(
        kind="charfn_probe", n=30, p=2, law=EntryLaw.rademacher(),
        replicates=20_000, seed=seed, theta_count=20, theta_norm=1.0,
    )
    result = run_experiment(cfg, workers)
    base = TOLERANCES["charfn_gap_base"]
    mult = TOLERANCES["charfn_gap_se_multiplier"]
    problems = []
    for row in result.rows:
        budget = base + mult * row["mc_se"]
        if row["gap"] > budget:
            problems.append(f"theta {row['theta_index']}: gap {row['gap']:.4f} > {budget:.4f}")
    return _problems_detail(problems, "all 20 characteristic-function gaps within budget")


def criterion_16(seed: RandomSeed, workers: int | None = None) -> tuple[bool, str]:
    cfg = ExperimentConfig(
        kind="eigenvector", n=200, p=1, law=EntryLaw.rademacher(),
        replicates=50, seed=seed,
    )
    result = run_experiment(cfg, workers)
    by_law = {row["law"]: row for row in result.rows}
    gauss = by_law["gaussian"]
    rade = by_law["rademacher"]
    problems = []
    ks_max = TOLERANCES["eigenvector_ks_gaussian_max"]
    gap_max = TOLERANCES["eigenvector_ks_gap_max"]
    frac_min = TOLERANCES["max_entry_min_fraction"]
    if gauss["ks"] > ks_max:
        problems.append(f"gaussian pooled ks {gauss['ks']:.4f} > {ks_max}")
    gap = abs(rade["ks"] - gauss["ks"])
    if gap > gap_max:
        problems.append(
            f"ks gap |{rade['ks']:.4f} - {gauss['ks']:.4f}| = {gap:.4f} > {gap_max}"
        )
    for row in result.rows:
        if row["max_entry_fraction_below_cap"] < frac_min:
            problems.append(
                f"{row['law']}: max-entry within cap in only"
                f" {row['max_entry_fraction_below_cap']:.0%} of replicates"
            )
    return _problems_detail(problems, "pooled entries normal and delocalized for both laws")


_EXACT_CRITERIA: dict[int, Callable[[], tuple[bool, str]]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}

_MC_CRITERIA: dict[int, Callable[[RandomSeed, int | None], tuple[bool, str]]] = {
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
    13: criterion_13,
    14: criterion_14,
    15: criterion_15,
    16: criterion_16,
}


def run_criterion(
    index: int, seed: RandomSeed = DEFAULT_SEED, workers: int | None = None
) -> CriterionResult:
    if index in _EXACT_CRITERIA:
        passed, detail = _EXACT_CRITERIA[index]()
    elif index in _MC_CRITERIA:
        passed, detail = _MC_CRITERIA[index](seed, workers)
    else:
        raise ValueError(f"no criterion {index}")
    return CriterionResult(index=index, name=CRITERION_NAMES[index], passed=passed, detail=detail)


def run_all(
    seed: RandomSeed = DEFAULT_SEED,
    workers: int | None = None,
    report: Callable[[CriterionResult], None] | None = None,
) -> list[CriterionResult]:
    """Run criteria 1 through 16 in order, optionally reporting each as it
    finishes (the CLI streams them to stdout this way)."""
    results = []
    for index in range(1, 17):
        result = run_criterion(index, seed, workers)
        results.append(result)
        if report is not None:
            report(result)
    return results
