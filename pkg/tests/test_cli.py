import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from mfnpoise import cli
from mfnpoise.poisedness import Check


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def usage(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(list(argv))
    return exc.value.code, capsys.readouterr().err


def test_gen_csv(capsys):
    code, out, _ = run(capsys, "gen", "--n", "2", "--m", "5", "--delta", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["0,0", "1,0", "0,1", "-1,0", "0,-1"]


def test_gen_json(capsys):
    code, out, _ = run(capsys, "gen", "--n", "2", "--m", "4", "--format", "json", "--x0", "1,2")
    doc = json.loads(out)
    assert doc["meta"]["command"] == "gen" and "version" in doc["meta"]
    assert [list(r.values()) for r in doc["rows"]] == [[1, 2], [2, 2], [1, 3], [0, 2]]


def test_lambda_both(capsys):
    code, out, _ = run(capsys, "lambda", "--n", "5", "--m", "7", "--p", "2", "--mode", "both", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["n", "m", "p", "delta", "lambda_closed", "lambda_numeric", "abs_diff", "method", "witness"]
    assert float(rows[0]["lambda_closed"]) == 3.0
    assert abs(float(rows[0]["lambda_numeric"]) - 3.0) <= 1e-6
    assert len(rows[0]["witness"].split(";")) == 5


def test_lambda_inf_and_table(capsys):
    code, out, _ = run(capsys, "lambda", "--n", "5", "--m", "8", "--p", "inf")
    assert code == 0
    header, row = out.splitlines()
    assert header.split()[:3] == ["n", "m", "p"] and row.split()[:5] == ["5", "8", "inf", "1", "4"]


def test_lambda_without_closed_form(capsys):
    code, out, err = run(capsys, "lambda", "--n", "4", "--m", "7", "--p", "3", "--mode", "closed", "--format", "csv")
    assert code == 0 and "no closed form" in err
    row = out.splitlines()[1].split(",")
    assert row[4] == "" and row[5] == ""


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "4", "--p", "inf", "--format", "json", "--seed", "5")
    doc = json.loads(out)
    assert code == 0 and doc["meta"] == {"command": "sweep", "version": cli.__version__, "seed": 5}
    assert [r["m"] for r in doc["rows"]] == [6, 7, 8, 9]
    assert [r["lambda_closed"] for r in doc["rows"]] == [4, 3, 3, 3]
    assert doc["rows"][0]["p"] == "inf"


def test_lagrange_closed_and_numeric_agree(capsys):
    _, a, _ = run(capsys, "lagrange", "--n", "3", "--m", "6", "--mode", "closed", "--format", "csv")
    _, b, _ = run(capsys, "lagrange", "--n", "3", "--m", "6", "--mode", "numeric", "--format", "csv")
    A = list(csv.reader(io.StringIO(a)))
    B = list(csv.reader(io.StringIO(b)))
    assert A[0] == B[0] == ["i", "c", "g1", "g2", "g3", "h11", "h12", "h13", "h22", "h23", "h33"]
    assert np.allclose(np.array(A[1:], float), np.array(B[1:], float), atol=1e-12)
    assert A[1] == ["0", "1", "0", "0", "-1", "-2", "0", "0", "-2", "0", "0"]


def test_verify_passes(capsys):
    code, out, err = run(capsys, "verify", "--n-max", "4", "--tol", "1e-6", "--format", "csv")
    assert code == 0 and "checks passed" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["pass"] == "true" for r in rows)


def test_verify_failure_exit_code(capsys, monkeypatch):
    bad = Check(2, 4, 2.0, 1.0, "closed[p<=2]", 2.0, 2.1, 0.1, "certified-numeric", False)
    monkeypatch.setattr(cli, "verify_grid", lambda *a, **k: [bad])
    code, out, err = run(capsys, "verify", "--n-max", "2")
    assert code == 1 and "0/1" in err


def test_solve(capsys, tmp_path):
    hist = tmp_path / "h.csv"
    code, out, _ = run(capsys, "solve", "--function", "sphere", "--n", "3", "--x0", "1,1,1", "--max-evals", "100", "--format", "csv", "--history", str(hist))
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert code == 0 and float(row["best_value"]) <= 1e-8
    assert hist.read_text().startswith("iteration,evaluations,best_value,radius,step\n")


def test_out_file(capsys, tmp_path):
    path = tmp_path / "set.csv"
    code, out, _ = run(capsys, "gen", "--n", "1", "--format", "csv", "--out", str(path))
    assert code == 0 and out == "" and path.read_text() == "0\n1\n-1\n"


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["gen", "--n", "2", "--m", "3"], "--m"),
        (["gen", "--n", "0"], "--n"),
        (["lambda", "--n", "2", "--p", "0.5"], "--p"),
        (["lambda", "--n", "2", "--delta", "-1"], "--delta"),
        (["gen", "--n", "2", "--x0", "1,2,3"], "--x0"),
        (["verify", "--n-max", "1"], "--n-max"),
        (["solve", "--function", "rosenbrock", "--n", "1"], "--n"),
        (["solve", "--max-evals", "3"], "--max-evals"),
        (["solve", "--function", "nope"], "--function"),
    ],
)
def test_usage_errors_name_the_flag(capsys, argv, flag):
    code, err = usage(capsys, *argv)
    assert code == 2 and flag in err


def test_missing_subcommand(capsys):
    code, _ = usage(capsys)
    assert code == 2


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "mfnpoise", *argv], capture_output=True, check=False)


def test_module_entry_point_is_deterministic():
    a = _cli("sweep", "--n", "5", "--p", "3", "--format", "json", "--seed", "1")
    b = _cli("sweep", "--n", "5", "--p", "3", "--format", "json", "--seed", "1")
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
