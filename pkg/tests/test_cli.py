import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gcovsel import cli
from gcovsel.errors import AccuracyError, DataFormatError
from gcovsel.cli import load_csv, run, to_json


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def signal_csv(tmp_path):
    g = np.random.default_rng(4)
    n = 60
    X = g.standard_normal((n, 5))
    y = 2 * X[:, 1] + g.standard_normal(n)
    lines = ["y,a,b,c,d,e,id"]
    lines += [",".join(f"{v:.10f}" for v in [y[i], *X[i]]) + f",{i}" for i in range(n)]
    return write(tmp_path, "\n".join(lines) + "\n")


def test_load_small_file(tmp_path):
    path = write(tmp_path, "y,x1,x2\n1,2,3\n2,1,0\n3,5,1\n4,4,4\n")
    d = load_csv(path, "y")
    assert (d.n, d.p) == (4, 2)
    assert d.names == ("x1", "x2")
    np.testing.assert_array_equal(d.y, [1, 2, 3, 4])
    d2 = load_csv(path, "x1", intercept=True, drop=["x2"])
    assert d2.names == ("(Intercept)", "y")


@pytest.mark.parametrize("text,response,match,row,column", [
    ("y,x1,x2\n1,2,3\n2,1,0\n3,5,1\n", "z", "'z'", None, "z"),
    ("y,x1,x2\n1,2,3\n2,1,0\n3,5,abc\n4,4,4\n", "y", "non-numeric", 3, "x2"),
    ("y,x1,x2\n1,2,3\n2,1,0\n", "y", "at least 3", None, None),
    ("y,x1,x2\n1,2,3\n2,nan,0\n3,5,1\n", "y", "non-finite", 2, "x1"),
    ("y,x1,x2\n1,2,3\n2,inf,0\n3,5,1\n", "y", "non-finite", 2, "x1"),
    ("y,x1,x2\n1,2,3\n2,1\n3,5,1\n", "y", "fields", 2, None),
])
def test_load_errors(tmp_path, text, response, match, row, column):
    path = write(tmp_path, text)
    with pytest.raises(DataFormatError, match=match) as info:
        load_csv(path, response)
    assert info.value.row == row
    assert info.value.column == column


def test_missing_file(tmp_path):
    with pytest.raises(DataFormatError, match="not found"):
        load_csv(str(tmp_path / "nope.csv"), "y")


def test_select_happy_path(signal_csv):
    code, out, err = invoke(["select", "--data", signal_csv, "--response", "y",
                             "--alpha", "0.01", "--intercept", "--drop", "id"])
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "select"
    assert doc["result"]["final_names"] == ["b"]
    assert doc["result"]["stop_reason"] == "threshold"
    assert doc["config"]["drop"] == ["id"]
    assert doc["wall_time"] is None
    assert "stop: threshold" in err and "stop: threshold" not in out


def test_select_rerun_from_echo_is_identical(signal_csv):
    _, out, _ = invoke(["select", "--data", signal_csv, "--response", "y", "--alpha", "0.2"])
    cfg = json.loads(out)["config"]
    argv = ["select", "--data", cfg["data"], "--response", cfg["response"],
            "--alpha", repr(cfg["alpha"]), "--tol", repr(cfg["tol"])]
    argv.append("--intercept" if cfg["intercept"] else "--no-intercept")
    for col in cfg["drop"]:
        argv += ["--drop", col]
    _, out2, _ = invoke(argv)
    assert out2 == out


@pytest.mark.parametrize("argv", [
    ["select", "--data", "X", "--response", "y", "--alpha", "1.5"],
    ["select", "--data", "X", "--response", "y", "--frobnicate"],
    ["verify-beta", "--n", "20"],
    ["verify-beta", "--n", "4", "--k", "3"],
    ["verify-uniform", "--n", "20", "--k", "3", "--reps", "10"],
    ["dance"],
    [],
])
def test_input_errors_exit_1(argv, signal_csv):
    argv = [signal_csv if a == "X" else a for a in argv]
    code, out, err = invoke(argv)
    assert code == 1
    assert out == ""
    assert err


def test_accuracy_error_exits_2(signal_csv, monkeypatch):
    def boom(*a, **k):
        raise AccuracyError("continued fraction diverged")

    monkeypatch.setattr(cli, "forward_select", boom)
    code, out, err = invoke(["select", "--data", signal_csv, "--response", "y"])
    assert code == 2 and out == "" and "accuracy" in err


def test_verify_beta_report():
    code, out, _ = invoke(["verify-beta", "--n", "20", "--k", "3", "--reps", "5000", "--seed", "1"])
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "verify_beta"
    reps = doc["result"]["reports"]
    assert [r["scheme"] for r in reps] == ["gaussian_covariate", "standard_model"]
    for r in reps:
        assert r["ks_stat"] < r["ks_band"]
        assert r["beta_params"] == {"a": 8.0, "b": 0.5}
    assert doc["result"]["two_sample_ks"] < doc["result"]["two_sample_band"]
    code, out, _ = invoke(["verify-beta", "--n", "20", "--k", "3", "--reps", "5000",
                           "--scheme", "standard"])
    assert [r["scheme"] for r in json.loads(out)["result"]["reports"]] == ["standard_model"]


def test_verify_uniform_report():
    code, out, _ = invoke(["verify-uniform", "--n", "20", "--k", "3", "--q", "5",
                           "--reps", "4000", "--timing"])
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["q"] == 5
    assert doc["result"]["q"] == 5 and 0.0 <= doc["result"]["rejection_rate"] <= 1.0
    assert doc["wall_time"] > 0


def test_json_floats_are_lossless():
    values = [0.1, 1 / 3, 2.0, 1e-300, 123456789.123456789, -0.0]
    text = to_json({"v": values, "inf": math.inf, "n": None, "ok": True, "k": 3})
    doc = json.loads(text)
    assert doc["v"] == values
    assert doc["inf"] == "inf"
    assert "0.10000000000000001" in text
    assert "2.0" in text


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gcovsel", "verify-uniform", "--n", "10",
                           "--k", "1", "--reps", "1000"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mode"] == "verify_uniform"
