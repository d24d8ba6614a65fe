import csv
import json
import re
import subprocess
import sys

BASE = [sys.executable, "-m", "rmtlab.cli"]


def run_cli(*args, cwd):
    return subprocess.run(
        BASE + list(args), cwd=cwd, capture_output=True, text=True, timeout=600
    )


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_tables_catalan(tmp_path):
    proc = run_cli("tables", "--catalan", "10", "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    rows = read_csv(tmp_path / "t" / "catalan.csv")
    assert rows[0] == ["index", "value"]
    assert len(rows) == 12
    assert rows[-1] == ["10", "16796"]


def test_tables_beta_ratio_one_is_catalan(tmp_path):
    proc = run_cli("tables", "--beta", "1,5", "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    for row in read_csv(tmp_path / "t" / "beta.csv")[1:]:
        assert row[1] == row[3]


def test_tables_variance_row(tmp_path):
    proc = run_cli("tables", "--variance", "6", "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    rows = read_csv(tmp_path / "t" / "variance.csv")
    assert rows[0][:6] == ["p", "A11", "A12", "A1", "A2_direct", "A2_closed"]
    by_p = {row[0]: row for row in rows[1:]}
    assert by_p["6"][4] == by_p["6"][5] == "40"


def test_tables_exactly_one_selector(tmp_path):
    proc = run_cli("tables", "--catalan", "4", "--fcount", "3", cwd=tmp_path)
    assert proc.returncode == 2
    assert "exactly one" in proc.stderr


def test_tables_bound_violation_exits_nonzero(tmp_path):
    proc = run_cli("tables", "--catalan", "-3", cwd=tmp_path)
    assert proc.returncode == 2
    assert proc.stderr.strip()


def test_enumerate_row_count(tmp_path):
    proc = run_cli("enumerate", "--l", "3", "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    rows = read_csv(tmp_path / "t" / "classes_l3.csv")
    assert rows[0] == ["index", "walk", "dyck", "bipartite_index"]
    assert len(rows) == 6


def test_oracle_wigner_frozen_value(tmp_path):
    proc = run_cli("oracle", "--wigner", "2,4", "--law", "rademacher",
                   "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "3"


def test_oracle_odd_power_vanishes(tmp_path):
    proc = run_cli("oracle", "--wigner", "4,3", "--law", "gaussian",
                   "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "0"


def test_oracle_wishart_rational(tmp_path):
    proc = run_cli("oracle", "--wishart", "2,4,2", "--law", "rademacher",
                   "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "5/2"
    row = read_csv(tmp_path / "t" / "oracle.csv")[1]
    assert row[5] == "5/2"
    assert row[6] == "2.5"


def test_oracle_three_point_needs_b(tmp_path):
    proc = run_cli("oracle", "--wigner", "2,4", "--law", "three_point",
                   cwd=tmp_path)
    assert proc.returncode == 2
    assert "--b" in proc.stderr


def test_oracle_unknown_law_names_field(tmp_path):
    proc = run_cli("oracle", "--wigner", "2,4", "--law", "lorentz", cwd=tmp_path)
    assert proc.returncode == 2
    assert "law" in proc.stderr


def test_spectral_residuals_small(tmp_path):
    proc = run_cli("spectral", "--gamma", "1/2", "--out", "t", cwd=tmp_path)
    assert proc.returncode == 0
    rows = read_csv(tmp_path / "t" / "residuals.csv")
    assert rows[0] == ["kind", "point", "residual"]
    for row in rows[1:]:
        assert float(row[2]) < 1e-5


MC_CONFIG = {
    "seed": {"master": 5, "stream": 17},
    "experiments": [
        {"kind": "trace", "n": 16, "p": 4, "law": {"kind": "rademacher"},
         "replicates": 300},
        {"kind": "entry_offdiag", "n": 16, "p": 2,
         "law": {"kind": "three_point", "b": 2.0}, "replicates": 12000},
    ],
}


def write_config(tmp_path, obj):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(obj))
    return path


def test_mc_outputs_and_determinism(tmp_path):
    path = write_config(tmp_path, MC_CONFIG)
    first = run_cli("mc", "--config", str(path), "--out", "a", cwd=tmp_path)
    assert first.returncode == 0, first.stderr
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["experiment_1_histogram.csv", "manifest.json",
                     "results.csv", "results.json"]
    second = run_cli("mc", "--config", str(path), "--out", "b", cwd=tmp_path)
    assert second.returncode == 0
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert first.stdout == second.stdout


def test_mc_results_content(tmp_path):
    path = write_config(tmp_path, MC_CONFIG)
    run_cli("mc", "--config", str(path), "--out", "a", cwd=tmp_path)
    rows = read_csv(tmp_path / "a" / "results.csv")
    assert rows[0][:5] == ["kind", "n", "N", "p", "law"]
    assert rows[1][0] == "trace"
    assert rows[2][4] == "three_point(2)"
    results = json.loads((tmp_path / "a" / "results.json").read_text())
    assert len(results["experiments"]) == 2
    hist = results["experiments"][1]["histogram"]
    assert sum(hist["counts"]) + hist["underflow"] + hist["overflow"] == 12000
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seed"] == {"master": 5, "stream": 17}
    assert manifest["config_digest"].startswith("sha256:")
    assert manifest["criteria"] == {}


def test_mc_digest_tracks_config_bytes(tmp_path):
    path = write_config(tmp_path, MC_CONFIG)
    run_cli("mc", "--config", str(path), "--out", "a", cwd=tmp_path)
    digest_a = json.loads((tmp_path / "a" / "manifest.json").read_text())["config_digest"]
    # same semantics, different bytes: digest must move
    path.write_text(json.dumps(MC_CONFIG, indent=1))
    run_cli("mc", "--config", str(path), "--out", "b", cwd=tmp_path)
    digest_b = json.loads((tmp_path / "b" / "manifest.json").read_text())["config_digest"]
    assert digest_a != digest_b


def test_mc_worker_count_invariance(tmp_path):
    path = write_config(tmp_path, MC_CONFIG)
    one = run_cli("mc", "--config", str(path), "--out", "w1", "--workers", "1",
                  cwd=tmp_path)
    eight = run_cli("mc", "--config", str(path), "--out", "w8", "--workers", "8",
                    cwd=tmp_path)
    assert one.returncode == eight.returncode == 0
    for name in ("results.csv", "results.json", "manifest.json"):
        assert (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w8" / name).read_bytes()


def test_mc_bad_config_reports_all_and_writes_nothing(tmp_path):
    bad = {
        "seed": {"master": 5, "stream": 17},
        "experiments": [
            {"kind": "trace", "n": 1, "p": 4, "law": {"kind": "banana"},
             "replicates": 300},
            {"kind": "entry_offdiag", "n": 16, "p": 2,
             "law": {"kind": "gaussian"}, "replicates": 3},
        ],
    }
    path = write_config(tmp_path, bad)
    proc = run_cli("mc", "--config", str(path), "--out", "out", cwd=tmp_path)
    assert proc.returncode == 2
    assert "experiments[0].law" in proc.stderr
    assert "experiments[0].n" in proc.stderr
    assert "experiments[1].replicates" in proc.stderr
    assert not (tmp_path / "out").exists()


def test_mc_bad_seed_still_reports_experiment_fields(tmp_path):
    bad = {
        "seed": {"master": 5},
        "experiments": [
            {"kind": "trace", "n": 8, "p": 0, "law": {"kind": "banana"},
             "replicates": 300},
        ],
    }
    path = write_config(tmp_path, bad)
    proc = run_cli("mc", "--config", str(path), "--out", "out", cwd=tmp_path)
    assert proc.returncode == 2
    assert "seed:" in proc.stderr
    assert "experiments[0].law" in proc.stderr
    assert "experiments[0].p" in proc.stderr
    assert not (tmp_path / "out").exists()


def test_mc_missing_config_file(tmp_path):
    proc = run_cli("mc", "--config", "no_such.json", "--out", "out", cwd=tmp_path)
    assert proc.returncode == 2
    assert "config" in proc.stderr


def test_mc_resource_guard_exit_code(tmp_path):
    huge = {
        "seed": {"master": 1, "stream": 1},
        "experiments": [
            {"kind": "trace", "n": 4000, "p": 16, "law": {"kind": "gaussian"},
             "replicates": 100000},
        ],
    }
    path = write_config(tmp_path, huge)
    proc = run_cli("mc", "--config", str(path), "--out", "out", cwd=tmp_path)
    assert proc.returncode == 3
    assert not (tmp_path / "out").exists()


def test_timestamps_only_on_stderr(tmp_path):
    stamp = re.compile(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}")
    path = write_config(tmp_path, MC_CONFIG)
    proc = run_cli("mc", "--config", str(path), "--out", "a", cwd=tmp_path)
    assert stamp.search(proc.stderr)
    for name in ("results.csv", "results.json", "manifest.json"):
        assert not stamp.search((tmp_path / "a" / name).read_text())
