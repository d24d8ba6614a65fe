"""The shipped acceptance gate.

Criteria 1 through 8 are exact or near-exact and run in-process. Criteria
9 through 16 are the seeded Monte Carlo suite; they are read back from two
full `verify` subprocess runs (worker counts 1 and 8) whose outputs also
settle criterion 17, full byte determinism. Every criterion is asserted
exactly as stated; the ones that fail do so because a stated closed form
or limit law genuinely disagrees with the direct definition (see the
README), and the assertion message carries the measured numbers.
"""
import csv
import json
import subprocess
import sys

import pytest

import rmtlab
from rmtlab.acceptance import run_criterion

VERIFY_TIMEOUT = 5400


def _assert_criterion(result):
    tag = f"criterion {result.index} ({result.name})"
    assert result.passed, f"{tag}: {result.detail}"


@pytest.mark.parametrize("index", range(1, 9))
def test_exact_criteria(index):
    _assert_criterion(run_criterion(index))


@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    runs = {}
    for workers in (1, 8):
        out = tmp_path_factory.mktemp(f"verify_w{workers}")
        proc = subprocess.run(
            [sys.executable, "-m", "rmtlab.cli", "verify",
             "--out", str(out), "--workers", str(workers)],
            capture_output=True, text=True, timeout=VERIFY_TIMEOUT,
        )
        assert proc.returncode in (0, 1), proc.stderr
        runs[workers] = {"out": out, "proc": proc}
    return runs


def _criteria_rows(run):
    with open(run["out"] / "criteria.csv", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 16
    return {int(row["index"]): row for row in rows}


@pytest.mark.parametrize("index", range(9, 17))
def test_mc_criteria(verify_runs, index):
    row = _criteria_rows(verify_runs[8])[index]
    assert row["passed"] == "True", \
        f"criterion {index} ({row['name']}): {row['detail']}"


def test_criterion_17_full_determinism(verify_runs):
    one, eight = verify_runs[1], verify_runs[8]
    assert one["proc"].stdout == eight["proc"].stdout
    for name in ("criteria.csv", "manifest.json"):
        assert (one["out"] / name).read_bytes() == (eight["out"] / name).read_bytes(), \
            f"{name} differs between worker counts 1 and 8"


def test_manifest_structure(verify_runs):
    manifest = json.loads((verify_runs[8]["out"] / "manifest.json").read_text())
    assert manifest["tool_version"] == rmtlab.__version__
    assert sorted(manifest["criteria"]) == [f"{i:02d}" for i in range(1, 17)]
    assert manifest["config_digest"].startswith("sha256:")
    rows = _criteria_rows(verify_runs[8])
    for key, passed in manifest["criteria"].items():
        assert rows[int(key)]["passed"] == str(passed)
