import io
import json

import numpy as np
import pytest

from targetrate.cli import run
from targetrate.model import ChannelSet, objective


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_solve_default_instance():
    code, out, _ = call("solve", "--gains", "20,15,10,7,5,3,2,1", "--target", "3", "--ptot", "10")
    assert code == 0
    assert "J = 1.789" in out
    assert "CaseB" in out


def test_solve_single_channel_case_a():
    code, out, _ = call("solve", "--gains", "1", "--target", "3", "--ptot", "20")
    assert code == 0
    assert "CaseA" in out and "J = 0" in out and "unused 13" in out
    row = out.strip().splitlines()[-1].split()
    assert row[0] == "0" and float(row[4]) == 7.0


def test_negative_budget_exit_1():
    code, out, err = call("solve", "--gains", "1", "--target", "3", "--ptot", "-1")
    assert code == 1 and out == ""
    assert "p_tot" in err and len(err.strip().splitlines()) == 1


@pytest.mark.parametrize(
    "argv, field",
    [
        (("solve", "--gains", "1,x", "--target", "3", "--ptot", "1"), "--gains"),
        (("solve", "--gains", "1,-2", "--target", "3", "--ptot", "1"), "gains"),
        (("solve", "--gains", "1,2", "--targets", "3", "--ptot", "1"), "targets"),
        (("solve", "--gains", "1", "--ptot", "1"), "targets"),
        (("solve", "--gains", "1", "--target", "3"), "p_tot"),
        (("solve", "--gains", "1", "--target", "3", "--ptot", "1", "--epsilon", "0"), "epsilon"),
        (("montecarlo", "--realizations", "0", "--out", "x"), "n_realizations"),
        (("frobnicate",), "frobnicate"),
    ],
)
def test_invalid_input_names_field(argv, field):
    code, _, err = call(*argv)
    assert code == 1
    assert field in err


def test_json_round_trip():
    code, out, _ = call("solve", "--gains-db", "13,11.76,10,8.45", "--targets", "3,2,2,1",
                        "--ptot", "0.5", "--json")
    assert code == 0
    doc = json.loads(out)
    ch = ChannelSet(doc["gains"], doc["targets"], doc["weights"])
    assert abs(objective(ch, np.array(doc["powers"])) - doc["objective"]) <= 1e-12
    assert doc["regime"] == "CaseB"
    assert doc["gains"][2] == pytest.approx(10.0)


def test_input_file_and_override(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"gains": [20, 15, 10, 7, 5, 3, 2, 1], "targets": 3, "p_tot": 5}))
    _, out5, _ = call("solve", "--input", str(path), "--json")
    _, out10, _ = call("solve", "--input", str(path), "--ptot", "10", "--json")
    assert json.loads(out5)["objective"] == pytest.approx(9.593, abs=1e-3)
    assert json.loads(out10)["objective"] == pytest.approx(1.789, abs=1e-3)


def test_missing_input_file(tmp_path):
    code, _, err = call("solve", "--input", str(tmp_path / "nope.json"))
    assert code == 1 and "nope.json" in err


def test_baseline_strategy():
    code, out, _ = call("solve", "--gains", "20,15,10,7,5,3,2,1", "--target", "3",
                        "--ptot", "10", "--strategy", "waterfilling", "--json")
    assert code == 0 and json.loads(out)["objective"] == pytest.approx(15.383, abs=1e-3)


def test_certify():
    code, out, _ = call("certify", "--gains", "1,2,4", "--targets", "3,2,1", "--ptot", "2",
                        "--json")
    assert code == 0
    assert json.loads(out)["kkt"]["max_residual"] <= 1e-6


def test_convergence_failure_exit_2(monkeypatch):
    from targetrate import cli
    from targetrate.errors import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("bisection stalled")

    monkeypatch.setattr(cli.ex, "allocate", boom)
    code, _, err = call("solve", "--gains", "1", "--target", "3", "--ptot", "1")
    assert code == 2 and "stalled" in err


def test_experiment_subcommands_write_files(tmp_path):
    assert call("sweep", "--out", str(tmp_path))[0] == 0
    assert call("hetero", "--out", str(tmp_path))[0] == 0
    assert call("dualcurve", "--points", "20", "--out", str(tmp_path))[0] == 0
    assert call("montecarlo", "--realizations", "10", "--out", str(tmp_path))[0] == 0
    assert call("snr", "--snr-grid", "0,10", "--realizations", "5", "--out", str(tmp_path))[0] == 0
    assert call("bench", "--sizes", "4,8", "--warm-steps", "3", "--out", str(tmp_path))[0] == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"sweep.csv", "hetero.csv", "dual_curve.csv", "snr.csv", "timing.csv",
            "warmstart.csv", "cdf_target_rate.csv"} <= names


def test_outputs_byte_identical(tmp_path):
    for sub in ("a", "b"):
        call("montecarlo", "--realizations", "15", "--seed", "4", "--out", str(tmp_path / sub))
        call("sweep", "--out", str(tmp_path / sub))
    for name in ("cdf_uniform.csv", "sweep.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
