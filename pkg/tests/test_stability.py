import numpy as np
import pytest

from sdfsim.engine import TimeSeries, run
from sdfsim.harness.stability import detect_stability, window_means
from sdfsim.model import UNIFORM5_PROBS, discrete_config


def series(total_pkts, warmup):
    total = np.asarray(total_pkts, dtype=np.float64) * 1024.0
    n = len(total)
    z = np.zeros(n, dtype=np.int32)
    return TimeSeries(n_users=1, warmup=warmup, packet_bits=1024.0, i_star=z, scheduled_user=z - 1,
                      served_bits=np.zeros(n), cost_units=z, m_count=z, total_queue_bits=total,
                      final_queues=np.zeros(1))


def test_zero_load_is_stable():
    ts = run(discrete_config(5, UNIFORM5_PROBS, 0.0, 0.0, horizon=2000, warmup=200))
    v = detect_stability(ts)
    assert v.stable and v.trend_slope == pytest.approx(0.0, abs=1e-12) and v.final_mean == 0.0


def test_linear_growth_slope_is_load_times_window():
    # no service at load 1: the queue grows by one packet per slot
    lam, horizon, warmup = 1.0, 16_200, 200
    v = detect_stability(series(lam * np.arange(1, horizon + 1), warmup))
    assert not v.stable
    assert v.window_len == 1000
    assert v.trend_slope == pytest.approx(lam * v.window_len, rel=1e-9)


def test_cap_alone_marks_unstable():
    v = detect_stability(series(np.full(3200, 2e4), 100))
    assert v.trend_slope == pytest.approx(0.0, abs=1e-6) and not v.stable


def test_verdict_rule_is_the_conjunction(rng):
    for _ in range(50):
        total = np.abs(rng.normal(50, 20, 1700)) * rng.choice([1, 400])
        v = detect_stability(series(total, 100), slope_tol=0.5, queue_cap=1e4)
        assert v.stable == (v.trend_slope <= 0.5 and v.final_mean <= 1e4)


def test_oracle_light_load_is_stable():
    ts = run(discrete_config(20, UNIFORM5_PROBS, 0.0, 4.0, policy="oracle", horizon=40_000, warmup=4_000, seed=2))
    assert detect_stability(ts, slope_tol=100.0).stable


def test_degenerate_series_rejected():
    with pytest.raises(ValueError):
        detect_stability(series(np.zeros(10), 10))
    with pytest.raises(ValueError):
        window_means(np.zeros(20), 10)
