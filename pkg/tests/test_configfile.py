from pathlib import Path

import pytest

from sdfsim.harness.configfile import ExperimentConfig, dump_config, load_config, parse_config
from sdfsim.model import ConfigError, HETERO_GROUP_PROBS, discrete_config, jakes_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MIN = """
[system]
n_users = 4
beta = 0.01
[channel]
rate_table = 3, 2, 1
dists = 0.5, 0.3, 0.2
[traffic]
lambda = 0.25
[experiment]
horizon = 100
warmup = 10
seed = 7
"""


def test_minimal_file():
    exp = parse_config(MIN)
    c = exp.system
    assert c.n_users == 4 and c.lam == (0.25,) * 4 and c.dists[3].probs == (0.5, 0.3, 0.2)
    assert exp.slope_tol == 0.05 and exp.queue_cap == 1e4


@pytest.mark.parametrize("name", ["uniform", "skewed", "groups", "jakes", "l1"])
def test_shipped_configs_load_and_round_trip(name):
    exp = load_config(CONFIGS / f"{name}.ini")
    again = parse_config(dump_config(exp))
    assert again == exp


def test_round_trip_of_builders():
    for cfg in (discrete_config(20, HETERO_GROUP_PROBS, 0.02, 3.0), jakes_config(20, 0.02, 9.0, seed=3)):
        assert parse_config(dump_config(cfg)).system == cfg
    assert parse_config(dump_config(ExperimentConfig(jakes_config(), slope_tol=7.5))).slope_tol == 7.5


@pytest.mark.parametrize("edit, field", [
    (("[traffic]", "[traffic]\nburst = 1"), "traffic.burst"),
    (("[experiment]", "[extra]\nx=1\n[experiment]"), "extra"),
    (("seed = 7", ""), "experiment.seed"),
    (("beta = 0.01", "beta = lots"), "beta"),
    (("n_users = 4", "n_users = 4.5"), "n_users"),
    (("dists = 0.5, 0.3, 0.2", "dists = 0.5, 0.3, 0.2; 0.2, 0.3, 0.5; 0.1, 0.1, 0.8"), "dists"),
    (("lambda = 0.25", "lambda = 0.25, 0.25"), "lambda"),
    (("beta = 0.01", "beta = 0.3"), "beta"),
    (("dists = 0.5, 0.3, 0.2", "dists = 0.5, 0.3, 0.2\nbandwidth_hz = 1e6"), "channel"),
    (("[system]", "[system\n"), "config"),
])
def test_bad_files_rejected(edit, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(MIN.replace(*edit))
    assert exc.value.field == field


def test_per_user_lambda_and_groups():
    text = MIN.replace("lambda = 0.25", "lambda = 0.1, 0.2, 0.3, 0.4").replace(
        "dists = 0.5, 0.3, 0.2", "dists = 0.5, 0.3, 0.2; 0.2, 0.3, 0.5")
    c = parse_config(text).system
    assert c.lam == (0.1, 0.2, 0.3, 0.4)
    assert c.dists[1].probs == (0.5, 0.3, 0.2) and c.dists[2].probs == (0.2, 0.3, 0.5)


def test_missing_file():
    with pytest.raises(ConfigError) as exc:
        load_config("/nonexistent/x.ini")
    assert "/nonexistent/x.ini" in str(exc.value)
