import numpy as np
import pytest

from rmtlab.combinat import catalan
from rmtlab.errors import ConfigError, ResourceGuardError
from rmtlab.matgen import EntryLaw, RandomSeed
from rmtlab.mcengine import (
    EXPERIMENT_KINDS,
    ExperimentConfig,
    config_from_json,
    run_experiment,
    thread_count,
)

SEED = RandomSeed(master=99, stream=1)


def small(kind="trace", **overrides):
    base = dict(kind=kind, n=12, p=2, law=EntryLaw.rademacher(),
                replicates=200, seed=SEED)
    base.update(overrides)
    return ExperimentConfig(**base)


def summaries_equal(a, b):
    for name in type(a.summary).field_names():
        if getattr(a.summary, name) != getattr(b.summary, name):
            return False
    return True


def test_config_collects_every_problem():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig(kind="nope", n=1, p=0, law=EntryLaw.gaussian(),
                         replicates=5, seed=SEED)
    text = str(err.value)
    for field in ("kind", "n", "p", "replicates"):
        assert field in text


def test_config_wishart_needs_n_cols():
    with pytest.raises(ConfigError, match="N"):
        small(kind="wishart_trace")
    small(kind="wishart_trace", N=8)


def test_config_rejects_stray_fields_per_kind():
    with pytest.raises(ConfigError, match="N"):
        small(kind="trace", N=4)
    with pytest.raises(ConfigError, match="indices"):
        small(kind="trace", indices=(0, 0))
    with pytest.raises(ConfigError, match="indices"):
        small(kind="entry_offdiag", indices=(3, 3))


def test_config_eigenvector_floor_is_fifty():
    small(kind="eigenvector", replicates=50)
    with pytest.raises(ConfigError, match="replicates"):
        small(kind="eigenvector", replicates=49)
    with pytest.raises(ConfigError, match="replicates"):
        small(kind="trace", replicates=50)


def test_config_from_json_round_trip():
    cfg = small(kind="entry_diag", indices=(4, 4))
    parsed = config_from_json(cfg.to_json(), SEED)
    assert parsed == cfg


def test_config_from_json_reports_fields():
    with pytest.raises(ConfigError) as err:
        config_from_json({"kind": "trace", "n": "twelve", "p": 2,
                          "law": {"kind": "rademacher"}, "replicates": 200,
                          "extra": 1}, SEED)
    text = str(err.value)
    assert "n:" in text
    assert "extra" in text


def test_trace_experiment_values():
    result = run_experiment(small(replicates=400))
    s = result.summary
    assert s.count == 400
    assert s.target_mean == pytest.approx(12 * catalan(1))
    assert s.mean_ratio == pytest.approx(s.mean / s.target_mean)
    # tr(A^2) for rademacher entries is a deterministic function of n only
    # up to the diagonal draw; the mean lands close to n at this size
    assert 0.8 <= s.mean_ratio <= 1.2


def test_trace_odd_power_has_no_ratio():
    s = run_experiment(small(p=3, replicates=150)).summary
    assert s.target_mean == 0.0
    assert s.mean_ratio is None


def test_entry_experiments_standardize():
    diag = run_experiment(small(kind="entry_diag", n=30, p=2, replicates=4000))
    off = run_experiment(small(kind="entry_offdiag", n=30, p=2, replicates=4000))
    assert diag.histogram is not None
    assert off.summary.ks is not None
    assert off.summary.target_variance == 1.0
    assert 0.5 < off.summary.variance_ratio < 2.0


def test_entry_diag_power_one_runs():
    # odd diagonal powers have no variance target; the run still reports
    # standardized samples (for p = 1 that is just the entry law itself)
    s = run_experiment(small(kind="entry_diag", p=1, n=20, replicates=500)).summary
    assert s.target_variance is None
    assert s.ks is not None
    assert 0.5 < s.variance < 2.0


def test_wishart_experiment_target():
    cfg = small(kind="wishart_trace", N=24, p=2, replicates=300)
    s = run_experiment(cfg).summary
    assert s.target_mean is not None
    assert s.mean_ratio == pytest.approx(s.mean / s.target_mean)


def test_charfn_probe_rows():
    cfg = small(kind="charfn_probe", n=10, p=2, replicates=500, theta_count=5)
    result = run_experiment(cfg)
    assert len(result.rows) == 5
    for row in result.rows:
        assert row["mc_se"] == pytest.approx(1 / np.sqrt(500))
        assert 0 <= row["gap"] <= 2.0


def test_eigenvector_rows_cover_both_laws():
    cfg = small(kind="eigenvector", n=16, replicates=50)
    result = run_experiment(cfg)
    assert [row["law"] for row in result.rows] == ["rademacher", "gaussian"]
    for row in result.rows:
        assert 0 <= row["max_entry_fraction_below_cap"] <= 1


def test_trace_flop_guard():
    cfg = small(n=4000, p=16, replicates=100_000)
    with pytest.raises(ResourceGuardError):
        run_experiment(cfg)


def test_charfn_caps():
    with pytest.raises(ConfigError, match="n"):
        small(kind="charfn_probe", n=61)
    with pytest.raises(ConfigError, match="p"):
        small(kind="charfn_probe", n=20, p=3)


@pytest.mark.parametrize("kind,extra", [
    ("trace", {}),
    ("entry_diag", {}),
    ("entry_offdiag", {}),
    ("wishart_trace", {"N": 10}),
    ("charfn_probe", {"theta_count": 4}),
    ("eigenvector", {"replicates": 50}),
])
def test_worker_count_does_not_change_results(kind, extra):
    cfg = small(kind=kind, n=10, replicates=extra.pop("replicates", 120), **extra)
    serial = run_experiment(cfg, workers=1)
    parallel = run_experiment(cfg, workers=8)
    assert summaries_equal(serial, parallel)
    assert serial.rows == parallel.rows
    if serial.histogram is not None:
        assert np.array_equal(serial.histogram.counts, parallel.histogram.counts)


def test_thread_count_env_override(monkeypatch):
    monkeypatch.setenv("RMT_LAB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("RMT_LAB_THREADS", "zero")
    with pytest.raises(ConfigError):
        thread_count()


def test_experiment_kinds_frozen():
    assert EXPERIMENT_KINDS == (
        "trace", "entry_diag", "entry_offdiag", "wishart_trace",
        "charfn_probe", "eigenvector",
    )
