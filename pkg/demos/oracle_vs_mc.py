"""Exact small-case expectations against seeded simulation.

The enumeration oracle computes E tr(A^p) by summing entry-law moments
over closed walks, exactly, as a rational number. A short Monte Carlo run
with the shipped sampler should land within a few standard errors. Both
matrix models are exercised.
"""
from rmtlab.cycles import exact_wigner_trace_mean, exact_wishart_trace_mean
from rmtlab.matgen import EntryLaw, RandomSeed, law_profile
from rmtlab.mcengine import ExperimentConfig, run_experiment

seed = RandomSeed(master=424242, stream=0)
law = EntryLaw.three_point(b=2.0)
profile = law_profile(law, 4)

print(f"Entry law: {law.label}, fourth moment {law.fourth_moment}")
print()

for n, p in ((5, 4), (4, 6)):
    exact = exact_wigner_trace_mean(n, p, profile.even_moments)
    cfg = ExperimentConfig(kind="trace", n=n, p=p, law=law,
                           replicates=20_000, seed=seed)
    s = run_experiment(cfg).summary
    gap = abs(s.mean - float(exact)) / s.se_mean
    print(f"symmetric model, n={n}, p={p}:")
    print(f"  exact mean {exact} = {float(exact):.6f}")
    print(f"  MC mean    {s.mean:.6f}  (se {s.se_mean:.2e}, {gap:.2f} se away)")

print()
n, N, p = (3, 6, 2)
exact = exact_wishart_trace_mean(n, N, p, profile.even_moments)
cfg = ExperimentConfig(kind="wishart_trace", n=n, N=N, p=p, law=law,
                       replicates=20_000, seed=seed)
s = run_experiment(cfg).summary
gap = abs(s.mean - float(exact)) / s.se_mean
print(f"sample-covariance model, n={n}, N={N}, p={p}:")
print(f"  exact mean {exact} = {float(exact):.6f}")
print(f"  MC mean    {s.mean:.6f}  (se {s.se_mean:.2e}, {gap:.2f} se away)")
