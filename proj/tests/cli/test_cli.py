"""End-to-end checks of the qet command line: reports, tables and exit codes."""

import csv
import json
import math
import os
import subprocess
from pathlib import Path

import pytest

QET = os.environ.get("QET_BIN", "qet")
CONFIGS = Path(os.environ.get("QET_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))


def run(*args, env=None, check=None):
    full_env = dict(os.environ)
    full_env.pop("QET_THREADS", None)
    if env:
        full_env.update(env)
    proc = subprocess.run([QET, *map(str, args)], capture_output=True, text=True, env=full_env)
    if check is not None:
        assert proc.returncode == check, proc.stderr
    return proc


def error_of(proc):
    return json.loads(proc.stderr.strip().splitlines()[-1])["error"]


def write_json(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def base_doc():
    return {
        "geometry": {"x1A": -26.0, "x2A": -10.0, "x1B": 10.0, "x2B": 26.0, "T": 0.0},
        "gA": {"family": "gaussian", "center": -18.0, "sigma": 1.0},
        "gB": {"family": "gaussian", "center": 18.0, "sigma": 1.0},
    }


def test_vacuum_report(tmp_path):
    out = tmp_path / "v.json"
    run("vacuum", CONFIGS / "vacuum.toml", "-o", out, check=0)
    rep = json.loads(out.read_text())
    for key in ("E_A", "E_B", "E_B_closed_form", "A_variance", "AB_moment", "C", "p", "theta", "G_B",
                "bound_ratio", "certification", "manifest"):
        assert key in rep
    assert rep["p"] == [0.5, 0.5]
    assert rep["C"][0] == -rep["C"][1]
    assert abs(rep["E_B"] / rep["E_B_closed_form"] - 1) < 1e-8
    assert rep["E_B"] <= rep["E_A"]
    assert rep["certification"]["pass"] is True
    assert "timestamp" not in rep["manifest"]


def test_reports_are_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("vacuum", CONFIGS / "vacuum.toml", "-o", a, check=0)
    run("vacuum", CONFIGS / "vacuum.toml", "-o", b, check=0)
    assert a.read_bytes().replace(b"a.json", b"b.json") == b.read_bytes()
    run("vacuum", CONFIGS / "vacuum.toml", "-o", a, "--stamp", check=0)
    assert json.loads(a.read_text())["manifest"]["timestamp"].endswith("Z")


def test_squeezed_report():
    rep = json.loads(run("squeezed", CONFIGS / "squeezed.toml", check=0).stdout)
    assert rep["l"] == pytest.approx(3.0, rel=1e-14)
    lam, xbar, d = 0.02, 5.0, 10.0
    u0 = 1 - 2 * lam * (d - xbar)
    # (ln f')' = 2 lambda / f' on each quadratic arc, so E_C = lambda (1/u0 - 1) / (12 pi).
    assert rep["E_C"] == pytest.approx(lam * (1 / u0 - 1) / (12 * math.pi), rel=1e-8)
    assert rep["E_Bf"] > rep["E_B"]
    assert rep["certification"]["applicable"] is False
    assert rep["profile"]["kind"] == "piecewise_quadratic"


def test_shift_only_config():
    rep = json.loads(run("squeezed", CONFIGS / "squeezed_shift.json", check=0).stdout)
    assert rep["l"] == pytest.approx(150.0)


def test_vacuum_rejects_squeeze_keys(tmp_path):
    doc = base_doc()
    doc["l"] = 2.0
    proc = run("vacuum", write_json(tmp_path, "c.json", doc), check=1)
    err = error_of(proc)
    assert err["code"] == "ConfigError"
    assert err["exit_status"] == 1


def test_validation_errors_exit_1(tmp_path):
    doc = base_doc()
    doc["gA"]["center"] = -10.5  # support pokes past x2A
    assert error_of(run("vacuum", write_json(tmp_path, "s.json", doc), check=1))["code"] == "SupportViolation"
    doc = base_doc()
    doc["f"] = {"kind": "piecewise_quadratic", "lambda": 0.2, "xbar": 5.0, "d": 10.0}
    assert error_of(run("squeezed", write_json(tmp_path, "p.json", doc), check=1))["code"] == "ParameterViolation"
    assert error_of(run("vacuum", tmp_path / "missing.toml", check=1))["code"] == "ConfigError"
    doc = base_doc()
    doc["gB"]["colour"] = "red"
    assert error_of(run("vacuum", write_json(tmp_path, "u.json", doc), check=1))["code"] == "ConfigError"


def test_numerical_errors_exit_2(tmp_path):
    doc = base_doc()
    doc["f"] = {"kind": "scale_factor", "scale_table": [[-2, 1], [-2, 2], [2, 2], [2, 1]]}
    err = error_of(run("squeezed", write_json(tmp_path, "j.json", doc), check=2))
    assert err["code"] == "DivergentCost"
    assert err["exit_status"] == 2


def test_usage_errors():
    assert error_of(run(check=1))["code"] == "UsageError"
    assert error_of(run("scan", CONFIGS / "vacuum.toml", "--mode", "sideways", check=1))["code"] == "UsageError"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_vacuum_scan(tmp_path):
    out = tmp_path / "scan.csv"
    summary = tmp_path / "summary.json"
    run("scan", CONFIGS / "vacuum.toml", "--from", 50, "--to", 5000, "--points", 21, "--mode", "vacuum",
        "-o", out, "--summary", summary, check=0)
    rows = read_csv(out)
    assert rows[0] == ["L", "E_A", "E_B", "bound_ratio"]
    assert len(rows) == 22
    eb = [float(r[2]) for r in rows[1:]]
    assert all(a > b for a, b in zip(eb, eb[1:]))
    fit = json.loads(summary.read_text())["fit"]
    assert -6.1 < fit["slope"] < -5.8


def test_squeezed_scans(tmp_path):
    out = tmp_path / "t.csv"
    proc = run("scan", CONFIGS / "vacuum.toml", "--from", 100, "--to", 10000, "--points", 21, "--mode",
               "tracking", "-o", out, check=0)
    rows = read_csv(out)
    assert rows[0] == ["L", "l", "E_A", "E_C", "E_Bf", "bound_ratio", "slope_window"]
    assert abs(json.loads(proc.stderr)["slope"]) < 0.05
    proc = run("scan", CONFIGS / "vacuum.toml", "--from", 1000, "--to", 100000, "--points", 21, "--mode",
               "fixed_l", "--fixed-l", 10, "-o", out, check=0)
    assert json.loads(proc.stderr)["slope"] == pytest.approx(-6.0, abs=0.05)
    assert {r[1] for r in read_csv(out)[1:]} == {"10"}


def test_scan_is_thread_count_independent(tmp_path):
    outs = []
    for threads in ("1", "3"):
        out = tmp_path / f"scan{threads}.csv"
        run("scan", CONFIGS / "vacuum.toml", "--from", 20, "--to", 2000, "--points", 20, "--mode", "vacuum",
            "-o", out, env={"QET_THREADS": threads}, check=0)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    proc = run("scan", CONFIGS / "vacuum.toml", "--from", 20, "--to", 2000, "--points", 20, "--mode", "vacuum",
               "-o", tmp_path / "x.csv", env={"QET_THREADS": "abc"}, check=1)
    assert "QET_THREADS" in error_of(proc)["message"]


def test_scan_grid_preconditions(tmp_path):
    run("scan", CONFIGS / "vacuum.toml", "--from", 10, "--to", 1000, "--points", 19, "--mode", "vacuum",
        "-o", tmp_path / "x.csv", check=1)
    run("scan", CONFIGS / "vacuum.toml", "--from", 10, "--to", 500, "--points", 30, "--mode", "vacuum",
        "-o", tmp_path / "x.csv", check=1)


def test_bound(tmp_path):
    xi = tmp_path / "xi.csv"
    rep = json.loads(run("bound", "--L", 1, "--xi-csv", xi, check=0).stdout)
    m = rep["minimizer"]
    assert m["value"] == pytest.approx((1 + 1e-3) / (12 * math.pi), rel=1e-9)
    assert m["conjugate_gradient_value"] == pytest.approx(m["value"], rel=1e-8)
    rows = read_csv(xi)
    assert rows[0] == ["x", "xi"]
    mid = [r for r in rows[1:] if float(r[0]) == 0.5]
    assert float(mid[0][1]) == pytest.approx(0.25, abs=1e-10)
    assert error_of(run("bound", "--L", 1, "--grid", 10, check=1))["exit_status"] == 1


def test_bound_with_config():
    rep = json.loads(run("bound", "--config", CONFIGS / "vacuum.toml", "--grid", 2000, check=0).stdout)
    assert rep["certification"]["E_B_below_minimizer"] is True
    assert rep["E_B"] <= rep["minimizer"]["value"]


def test_oracle_compare():
    rep = json.loads(run("oracle-compare", CONFIGS / "vacuum.toml", check=0).stdout)
    assert rep["all_pass"] is True
    assert {e["quantity"] for e in rep["entries"]} >= {"A_variance", "AB_moment", "E_B"}
    assert all(e["rel_diff"] < 0.01 for e in rep["entries"])
    log_rule = json.loads(run("oracle-compare", CONFIGS / "vacuum.toml", "--rule", "log", check=0).stdout)
    assert log_rule["all_pass"] is True
    err = error_of(run("oracle-compare", CONFIGS / "vacuum.toml", "--inject-fault", "damping", check=2))
    assert err["code"] == "OracleMismatch"


def test_profile_inspect(tmp_path):
    summary = tmp_path / "sum.json"
    proc = run("profile-inspect", CONFIGS / "profile.toml", "--points", 401, "--summary", summary, check=0)
    rows = list(csv.reader(proc.stdout.splitlines()))
    assert rows[0] == ["x", "density"]
    for x, rho in ((float(a), float(b)) for a, b in rows[1:]):
        if abs(x) < 5 or abs(x) > 10:
            assert rho == 0.0
    s = json.loads(summary.read_text())
    assert s["integrated_density"] == pytest.approx(s["E_C"], rel=1e-6)
