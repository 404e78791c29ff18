import csv
import io
import json
import math
import subprocess
import sys
import time

import pytest
from hypothesis import given, strategies as st

from adhoc_mimo import __version__
from adhoc_mimo.cli import db_to_linear, linear_to_db, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = text.splitlines()
    assert lines[0].startswith(f"# adhoc-mimo {__version__} command=")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


@given(st.floats(-100, 100))
def test_db_round_trip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def test_db_examples():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(0.0) == 1.0
    assert linear_to_db(100.0) == pytest.approx(20.0)


def test_outage_curve_analytic(capsys):
    t0 = time.perf_counter()
    code, out, _ = run(capsys, "outage-curve", "--no-mc")
    assert time.perf_counter() - t0 < 1.0
    assert code == 0
    rows = table(out)
    assert len(rows) == 3 * 12
    assert list(rows[0]) == ["lambda", "n_t", "analytic_outage"]
    for n_t in ("1", "2", "4"):
        f = [float(r["analytic_outage"]) for r in rows if r["n_t"] == n_t]
        assert all(0 <= a <= b <= 1 for a, b in zip(f, f[1:]))


def test_outage_curve_with_mc(capsys):
    code, out, _ = run(capsys, "outage-curve", "--nt", "2", "--points", "1", "--sweep-min", "0.3",
                       "--sweep-max", "0.3", "--trials", "4000", "--seed", "3")
    assert code == 0
    (row,) = table(out)
    assert float(row["lambda"]) == 0.3
    diff = abs(float(row["mc_outage"]) - float(row["analytic_outage"]))
    assert diff < 4 * float(row["mc_std_error"])


def test_tc_vs_epsilon(capsys):
    code, out, _ = run(capsys, "tc-vs-epsilon", "--points", "5")
    assert code == 0
    rows = table(out)
    assert len(rows) == 15 and all(r["status"] == "ok" for r in rows)
    by_eps = {}
    for r in rows:
        by_eps.setdefault(r["epsilon"], {})[r["n_t"]] = float(r["exact_capacity"])
    for caps in by_eps.values():
        assert caps["1"] > caps["2"] and caps["1"] > caps["4"]


def test_tc_vs_epsilon_marks_infeasible_targets(capsys):
    code, out, _ = run(capsys, "tc-vs-epsilon", "--nt", "1", "--nr", "1", "--gamma-db", "0", "--z-db", "0",
                       "--sweep-min", "1e-3", "--sweep-max", "0.99", "--points", "4")
    assert code == 0
    status = [r["status"] for r in table(out)]
    assert status[0] == "infeasible" and status[-1] == "ok"


def test_tc_vs_alpha(capsys):
    code, out, err = run(capsys, "tc-vs-alpha", "--points", "4")
    assert code == 0
    assert len(table(out)) == 12
    assert err.count("increasing in alpha: yes") == 3


def test_point_json(capsys):
    code, out, _ = run(capsys, "point", "--nt", "1", "--nt", "2", "--no-mc", "--gamma", "inf", "--z", "10")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["n_t"] for r in recs] == [1, 2]
    assert recs[0]["gamma"] == "inf" and recs[0]["ell"] == 4
    assert recs[1]["exact_capacity"] > 0


def test_point_zero_rate_reports_null_capacity(capsys):
    code, out, _ = run(capsys, "point", "--no-mc", "--z", "0")
    rec = json.loads(out)
    assert code == 0 and rec["outage"] == 0.0 and rec["exact_capacity"] is None


def test_one_point_grid(capsys):
    code, out, _ = run(capsys, "tc-vs-alpha", "--nt", "1", "--points", "1", "--sweep-min", "4", "--sweep-max", "4")
    assert code == 0 and len(table(out)) == 1


@pytest.mark.parametrize("argv", [
    ["tc-vs-alpha", "--sweep-min", "1.5", "--no-mc"],
    ["outage-curve", "--alpha", "2", "--no-mc"],
    ["outage-curve", "--nr", "0"],
    ["point", "--gamma", "-1", "--no-mc"],
    ["validate", "--sigma", "0"],
    ["outage-curve", "--no-mc", "--gnuplot"],
    ["bogus"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_data_error_when_nothing_feasible(capsys):
    code, _, err = run(capsys, "tc-vs-epsilon", "--nt", "1", "--nr", "1", "--gamma-db", "-10",
                       "--sweep-min", "1e-3", "--sweep-max", "0.1", "--points", "3")
    assert code == 3 and "noise floor" in err


def test_gnuplot_and_out(tmp_path, capsys):
    path = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "outage-curve", "--no-mc", "--points", "3", "--out", str(path), "--gnuplot")
    assert code == 0 and out == ""
    assert len(table(path.read_text())) == 9
    script = (tmp_path / "curve.csv.gp").read_text()
    assert str(path) in script and "plot" in script


def test_output_is_byte_identical(capsys):
    argv = ["outage-curve", "--points", "2", "--trials", "500", "--seed", "9"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    c = run(capsys, *argv, "--workers", "2")
    assert a == b == c and a[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "adhoc_mimo", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
