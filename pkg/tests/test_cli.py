from pathlib import Path

import pytest

from sdfsim.cli import main
from sdfsim.harness.csvio import read_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def small_config(tmp_path, name="uniform", horizon=4000, warmup=400):
    text = (CONFIGS / f"{name}.ini").read_text()
    text = text.replace("horizon = 200000", f"horizon = {horizon}").replace("warmup = 20000", f"warmup = {warmup}")
    path = tmp_path / f"{name}.ini"
    path.write_text(text)
    return str(path)


def test_analyze_uniform(capsys):
    assert main(["analyze", "--config", str(CONFIGS / "uniform.ini")]) == 0
    out = capsys.readouterr().out
    assert "E[M]        : 11.4" in out
    assert "epsilon     : 0.346667" in out
    assert "epsilon_max : 0.666667" in out
    assert "expands     : true" in out


def test_validate_single_state_passes(capsys):
    assert main(["validate", "--config", str(CONFIGS / "l1.ini"), "--slots", "2000"]) == 0
    out = capsys.readouterr().out
    assert "zero variance" in out and "PASS" in out


def test_validate_skewed(capsys):
    assert main(["validate", "--config", str(CONFIGS / "skewed.ini"), "--slots", "50000"]) == 0


def test_validate_rejects_fading(capsys):
    assert main(["validate", "--config", str(CONFIGS / "jakes.ini")]) == 2
    assert "error" in capsys.readouterr().err


def test_simulate_writes_timeseries(tmp_path, capsys):
    cfg = small_config(tmp_path)
    assert main(["simulate", "--config", cfg, "--seed", "4", "--out", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "timeseries.csv")
    assert len(rows) == 4000
    assert (tmp_path / "o" / "summary.json").exists()


def test_sweep_five_policy_blocks_and_reproducible(tmp_path, capsys):
    cfg = small_config(tmp_path)
    args = ["sweep", "--config", cfg, "--lambda-min", "2", "--lambda-max", "3", "--steps", "2", "--reps", "1"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    policies = [r["policy"] for r in read_csv(tmp_path / "a" / "sweep.csv")]
    assert sorted(set(policies)) == sorted(["oracle", "sdf@0.01", "sdf@0.02", "full_probe@0.01",
                                            "full_probe@0.02"])
    assert len(policies) == 10


@pytest.mark.parametrize("argv", [
    ["sweep", "--config", "x", "--bogus"],
    ["frobnicate"],
    [],
    ["analyze", "--config", "/nonexistent.ini"],
    ["sweep", "--config", str(CONFIGS / "uniform.ini"), "--policies", "greedy", "--lambda-min", "1",
     "--lambda-max", "2", "--steps", "2", "--out", "/tmp/x"],
])
def test_errors_exit_nonzero(argv, capsys):
    assert main(argv) != 0
    captured = capsys.readouterr()
    assert captured.err


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[system]\nn_users = 3\nbeta = 0.5\n")
    assert main(["analyze", "--config", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
