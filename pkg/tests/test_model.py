from dataclasses import replace

import pytest

from sdfsim.model import (HETERO_GROUP_PROBS, HETERO_GROUP_PROBS_RAW, NONUNIFORM_PROBS, ChannelStateDistribution,
                          ConfigError, JakesParams, RateTable, SystemConfig, ValidatedConfig, discrete_config,
                          ensure_valid, jakes_config, validate_config, with_load)


def base(**kw):
    cfg = SystemConfig(n_users=3, rate_table=RateTable((3.0, 2.0, 1.0)),
                       dists=(ChannelStateDistribution((0.5, 0.3, 0.2)),) * 3, beta=0.01,
                       lam=(0.1, 0.1, 0.1), horizon=100, warmup=10, seed=0)
    return replace(cfg, **kw)


def test_default_operating_point_accepted():
    cfg = discrete_config(20, NONUNIFORM_PROBS, 0.02)
    assert isinstance(cfg, ValidatedConfig)
    assert cfg.n_users == 20 and cfg.n_states == 5


def test_single_user_zero_cost_accepted():
    cfg = validate_config(base(n_users=1, beta=0.0, lam=(0.0,), dists=base().dists[:1]))
    assert cfg.n_users == 1


def test_beta_too_large_for_fifty_users():
    with pytest.raises(ConfigError) as exc:
        discrete_config(50, NONUNIFORM_PROBS, 0.02)
    assert exc.value.field == "beta"
    assert "1.02" in exc.value.rule


def test_beta_boundary_is_exclusive():
    # beta*(N+1) == 1 exactly
    with pytest.raises(ConfigError):
        validate_config(base(beta=0.25))
    validate_config(base(beta=0.2499))


@pytest.mark.parametrize("kw, field", [
    (dict(n_users=0), "n_users"),
    (dict(n_users=2.5), "n_users"),
    (dict(policy="greedy"), "policy"),
    (dict(beta=-0.01), "beta"),
    (dict(beta=float("nan")), "beta"),
    (dict(slot_seconds=0.0), "slot_seconds"),
    (dict(packet_bits=0.0), "packet_bits"),
    (dict(packet_bits=-8.0), "packet_bits"),
    (dict(lam=(0.1, 0.1)), "lambda"),
    (dict(lam=(0.1, -0.1, 0.1)), "lambda"),
    (dict(lam=(0.1, float("inf"), 0.1)), "lambda"),
    (dict(warmup=0), "warmup"),
    (dict(warmup=100), "warmup"),
    (dict(warmup=200), "warmup"),
    (dict(horizon=100.0), "horizon/warmup"),
    (dict(seed=-1), "seed"),
    (dict(seed=2**64), "seed"),
    (dict(rate_table=RateTable((1.0, 2.0, 3.0))), "rate_table"),
    (dict(rate_table=RateTable((3.0, 3.0, 1.0))), "rate_table"),
    (dict(rate_table=RateTable((3.0, 2.0, 0.0))), "rate_table"),
    (dict(rate_table=RateTable(())), "rate_table"),
    (dict(rate_table=None), "rate_table"),
    (dict(dists=(ChannelStateDistribution((0.5, 0.3, 0.2)),) * 2), "dists"),
    (dict(dists=(ChannelStateDistribution((0.5, 0.5)),) * 3), "dists[0]"),
    (dict(dists=(ChannelStateDistribution((0.5, 0.3, 0.1)),) * 3), "dists[0]"),
    (dict(dists=(ChannelStateDistribution((1.0, 0.0, 0.0)),) * 3), "dists[0]"),
    (dict(dists=(ChannelStateDistribution((0.5, 0.5 - 1e-8, 1e-8)),) * 3), "dists[0]"),
    (dict(p_min=0.0), "p_min/p_max"),
    (dict(p_min=0.6, p_max=0.5), "p_min/p_max"),
    (dict(jakes=JakesParams()), "dists"),
])
def test_every_invariant_is_rejected(kw, field):
    with pytest.raises(ConfigError) as exc:
        validate_config(base(**kw))
    assert exc.value.field == field
    assert exc.value.rule


@pytest.mark.parametrize("jp, field", [
    (JakesParams(bandwidth_hz=0.0), "bandwidth_hz"),
    (JakesParams(snr_linear=-1.0), "snr_linear"),
    (JakesParams(doppler_range_hz=(15.0, 5.0)), "doppler_range_hz"),
    (JakesParams(n_oscillators=4), "n_oscillators"),
    (JakesParams(drift_std_db=-0.1), "drift_std_db"),
    (JakesParams(drift_clamp_db=-1.0), "drift_clamp_db"),
])
def test_jakes_params_rejected(jp, field):
    with pytest.raises(ConfigError) as exc:
        jakes_config(params=jp)
    assert exc.value.field == field


def test_near_normalized_distribution_is_renormalized():
    cfg = validate_config(base(dists=(ChannelStateDistribution((0.5, 0.3, 0.2 + 5e-10)),) * 3))
    assert sum(cfg.dists[0].probs) == pytest.approx(1.0, abs=1e-15)


def test_single_state_channel_allowed():
    cfg = validate_config(base(rate_table=RateTable((5.0,)), dists=(ChannelStateDistribution((1.0,)),) * 3))
    assert cfg.dists[0].probs == (1.0,)


def test_hetero_groups_renormalized_only_where_needed():
    assert HETERO_GROUP_PROBS[0] == HETERO_GROUP_PROBS_RAW[0]
    assert sum(HETERO_GROUP_PROBS_RAW[2]) == pytest.approx(0.9)
    assert HETERO_GROUP_PROBS[2][0] == pytest.approx(0.25 / 0.9)
    cfg = discrete_config(20, HETERO_GROUP_PROBS, 0.01)
    assert not cfg.is_homogeneous()
    assert cfg.dists[9].probs != cfg.dists[10].probs


def test_groups_must_divide_users():
    with pytest.raises(ConfigError):
        discrete_config(18, HETERO_GROUP_PROBS, 0.01)


def test_replace_does_not_bypass_validation():
    cfg = discrete_config(20, NONUNIFORM_PROBS, 0.02)
    with pytest.raises(ConfigError):
        ensure_valid(replace(cfg, beta=0.1))


def test_with_load_splits_equally():
    cfg = with_load(discrete_config(20, NONUNIFORM_PROBS, 0.02), 14.0)
    assert cfg.lam == (0.7,) * 20


def test_validated_config_is_frozen():
    cfg = discrete_config(20, NONUNIFORM_PROBS, 0.02)
    with pytest.raises(Exception):
        cfg.beta = 0.5


def test_validation_is_idempotent():
    cfg = discrete_config(1, (0.6379649161127122 / 1.5324961661127122, 0.39453125 / 1.5324961661127122,
                              0.5 / 1.5324961661127122), 0.0, rates=(3.0, 2.0, 1.0))
    assert validate_config(cfg) == cfg
    drifted = discrete_config(1, (0.5, 0.3, 0.2 + 5e-10), 0.0, rates=(3.0, 2.0, 1.0))
    assert validate_config(drifted) == drifted
