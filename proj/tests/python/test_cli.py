"""Exit-status and output contract of the apcones command-line tool."""

import csv
import io
import json
import os
import subprocess

import pytest

CLI = os.environ.get("APCONES_CLI", "apcones")


def run(*args, **kw):
    return subprocess.run([CLI, *args], capture_output=True, text=True, **kw)


def test_selftest_passes():
    r = run("selftest")
    assert r.returncode == 0
    summary = json.loads(r.stderr)
    assert summary["summary"]["fail_count"] == 0


def test_corrupted_weight_is_named():
    r = run("selftest", "--corrupt-weight")
    assert r.returncode == 1
    assert "FAIL sum-of-weights" in r.stderr


def test_usage_errors_exit_2():
    assert run("no-such-command").returncode == 2
    assert run("verify-inequality", "--dim", "9").returncode == 2
    assert run("concentrate", "--gammas", "0.9,1").returncode == 2
    r = run("q-curve", "--boundary", "parabola:0.8,0.3")
    assert r.returncode == 2
    assert "deviation" in r.stderr


def test_help_exits_0():
    r = run("--help")
    assert r.returncode == 0
    assert "verify-inequality" in r.stdout


def test_verify_inequality_csv(tmp_path):
    out = tmp_path / "v.csv"
    r = run("verify-inequality", "--dim", "3", "--samples", "12", "--seed", "3", "--level", "32", "--out", str(out))
    assert r.returncode == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["sample_id", "eigenvalues", "Q1", "quad_error", "margin", "nearest_k", "dist_to_SP", "anomaly"]
    assert [int(row[0]) for row in rows[1:]] == list(range(12))
    for row in rows[1:]:
        eig = [float(x) for x in row[1].split(";")]
        assert abs(sum(eig) - 1.0) < 1e-12
        assert float(row[2]) >= -10 * float(row[3])
    summary = json.loads((tmp_path / "v.csv.summary.json").read_text())
    assert summary["summary"] == {"pass_count": 12, "fail_count": 0, "anomaly_count": 0}


def test_samples_zero_is_empty_pass():
    r = run("verify-inequality", "--samples", "0")
    assert r.returncode == 0
    assert r.stdout.strip().count("\n") == 0


def test_unwritable_output():
    r = run("verify-inequality", "--samples", "1", "--out", "/nonexistent/dir/x.csv")
    assert r.returncode == 2


def test_q_curve_radial_is_zero():
    r = run("q-curve", "--boundary", "parabola:0.5,0.5")
    assert r.returncode == 0
    rows = list(csv.reader(io.StringIO(r.stdout)))
    assert rows[0] == ["t", "Q_direct", "Q_expanded", "q", "q_dd_formula", "q_dd_finite_diff"]
    assert all(cell == "0" for row in rows[1:] for cell in row[1:])
    assert json.loads(r.stderr)["params"]["t_bar"] == "inf"


def test_solve_writes_field(tmp_path):
    out = tmp_path / "u.field"
    r = run("solve", "--dim", "2", "--gamma", "1", "--n", "31", "--boundary", "symmetric:2", "--out", str(out))
    assert r.returncode == 0
    rows = list(csv.reader(io.StringIO(r.stdout)))
    assert rows[0] == ["gamma", "n", "energy", "el_residual", "homogeneity_defect", "contact_fraction", "converged"]
    assert rows[1][-1] == "1"
    header = out.read_text().split("\n", 1)[0].split()
    assert header[:2] == ["2", "31"]


@pytest.mark.parametrize("seed", ["7", "8"])
def test_determinism(seed):
    args = ("verify-inequality", "--dim", "2", "--samples", "20", "--seed", seed, "--level", "16")
    assert run(*args).stdout == run(*args).stdout
