"""Domain types and configuration validation.

Rates are bits/second, queues are bits, arrival rates are packets/slot.
Channel states are 0-based: state 0 carries the highest rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence, Tuple

import numpy as np

POLICIES = ("oracle", "full_probe", "sdf")

# CDMA/HDR physical rates, b/s
HDR_RATES_BPS = (1843200.0, 1228800.0, 614400.0, 307200.0, 76800.0)
UNIFORM5_PROBS = (0.2, 0.2, 0.2, 0.2, 0.2)
NONUNIFORM_PROBS = (0.3, 0.3, 0.2, 0.1, 0.1)
# four user groups as published; the third row sums to 0.9 and is
# renormalized in HETERO_GROUP_PROBS
HETERO_GROUP_PROBS_RAW = (
    (0.3, 0.3, 0.2, 0.1, 0.1),
    (0.1, 0.1, 0.2, 0.3, 0.3),
    (0.25, 0.15, 0.1, 0.25, 0.15),
    (0.15, 0.25, 0.25, 0.1, 0.25),
)
HETERO_GROUP_PROBS = tuple(tuple(p / sum(row) for p in row) for row in HETERO_GROUP_PROBS_RAW)

SUM_TOL = 1e-9
RENORM_TOL = 1e-12


class ConfigError(ValueError):
    """A configuration value violates one of the model invariants."""

    def __init__(self, field_name: str, rule: str):
        self.field = field_name
        self.rule = rule
        super().__init__(f"{field_name}: {rule}")


@dataclass(frozen=True)
class RateTable:
    rates: Tuple[float, ...]

    @property
    def n_states(self) -> int:
        return len(self.rates)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rates, dtype=np.float64)


@dataclass(frozen=True)
class ChannelStateDistribution:
    probs: Tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)


@dataclass(frozen=True)
class JakesParams:
    bandwidth_hz: float = 1.25e6
    snr_linear: float = 10.0
    doppler_range_hz: Tuple[float, float] = (5.0, 15.0)
    n_oscillators: int = 16
    drift_std_db: float = 0.01
    drift_clamp_db: float = 6.0


@dataclass(frozen=True)
class SystemConfig:
    n_users: int
    rate_table: Optional[RateTable]
    dists: Tuple[ChannelStateDistribution, ...]
    beta: float
    lam: Tuple[float, ...]
    horizon: int
    warmup: int
    seed: int
    policy: str = "sdf"
    slot_seconds: float = 0.005
    packet_bits: float = 1024.0
    jakes: Optional[JakesParams] = None
    p_min: float = 1e-6
    p_max: float = 1.0 - 1e-6

    @property
    def is_fading(self) -> bool:
        return self.jakes is not None

    @property
    def n_states(self) -> int:
        return self.rate_table.n_states if self.rate_table is not None else 0

    def prob_matrix(self) -> np.ndarray:
        """(N, L) matrix of per-user state probabilities."""
        return np.array([d.probs for d in self.dists], dtype=np.float64)

    def is_homogeneous(self) -> bool:
        return len(set(d.probs for d in self.dists)) <= 1


@dataclass(frozen=True)
class ValidatedConfig(SystemConfig):
    """A SystemConfig that has passed :func:`validate_config`."""


def _check(cond: bool, field_name: str, rule: str) -> None:
    if not cond:
        raise ConfigError(field_name, rule)


def _finite(x) -> bool:
    return isinstance(x, (int, float, np.integer, np.floating)) and math.isfinite(x)


def _validate_rates(rt: RateTable) -> RateTable:
    rates = tuple(float(r) for r in rt.rates)
    _check(len(rates) >= 1, "rate_table", "at least one state required")
    _check(all(_finite(r) and r > 0 for r in rates), "rate_table", "all rates must be finite and > 0")
    _check(all(a > b for a, b in zip(rates, rates[1:])), "rate_table", "rates must be strictly descending")
    return RateTable(rates)


def _validate_dist(d: ChannelStateDistribution, idx: int, n_states: int,
                   p_min: float, p_max: float) -> ChannelStateDistribution:
    # plain floats: these vectors are short and numpy overhead dominates
    name = f"dists[{idx}]"
    probs = [float(p) for p in np.ravel(d.probs)]
    _check(len(probs) == n_states, name, f"expected {n_states} probabilities, got {len(probs)}")
    _check(all(math.isfinite(p) for p in probs), name, "probabilities must be finite")
    total = sum(probs)
    _check(abs(total - 1.0) <= SUM_TOL, name, f"probabilities sum to {total!r}, not 1")
    if abs(total - 1.0) > RENORM_TOL:
        # one division lands within rounding of 1, so revalidation is a no-op
        probs = [p / total for p in probs]
    if n_states == 1:
        # the single-state channel is the one allowed degenerate distribution
        return ChannelStateDistribution((1.0,))
    _check(all(0.0 < p < 1.0 for p in probs), name, "each probability must lie in (0, 1)")
    _check(all(p_min <= p <= p_max for p in probs), name,
           f"each probability must lie in [p_min={p_min}, p_max={p_max}]")
    return ChannelStateDistribution(tuple(probs))


def _validate_jakes(jp: JakesParams) -> JakesParams:
    _check(_finite(jp.bandwidth_hz) and jp.bandwidth_hz > 0, "bandwidth_hz", "must be > 0")
    _check(_finite(jp.snr_linear) and jp.snr_linear > 0, "snr_linear", "must be > 0")
    lo, hi = (float(x) for x in jp.doppler_range_hz)
    _check(math.isfinite(lo) and math.isfinite(hi) and 0 <= lo <= hi, "doppler_range_hz",
           "need 0 <= low <= high")
    _check(int(jp.n_oscillators) == jp.n_oscillators and jp.n_oscillators >= 8, "n_oscillators",
           "must be an integer >= 8")
    _check(_finite(jp.drift_std_db) and jp.drift_std_db >= 0, "drift_std_db", "must be >= 0")
    _check(_finite(jp.drift_clamp_db) and jp.drift_clamp_db >= 0, "drift_clamp_db", "must be >= 0")
    return JakesParams(float(jp.bandwidth_hz), float(jp.snr_linear), (lo, hi), int(jp.n_oscillators),
                       float(jp.drift_std_db), float(jp.drift_clamp_db))


def validate_config(raw: SystemConfig) -> ValidatedConfig:
    """Check every invariant of ``raw`` and return an immutable validated copy.

    Distributions whose sum is within 1e-9 of one are renormalized.
    Raises :class:`ConfigError` naming the offending field on any violation.
    """
    n = raw.n_users
    _check(isinstance(n, (int, np.integer)) and n >= 1, "n_users", "must be an integer >= 1")
    n = int(n)
    _check(raw.policy in POLICIES, "policy", f"must be one of {POLICIES}")
    _check(_finite(raw.beta) and raw.beta >= 0, "beta", "must be finite and >= 0")
    beta = float(raw.beta)
    _check(beta * (n + 1) < 1, "beta", f"beta*(N+1) = {beta * (n + 1):g} must be < 1")
    _check(_finite(raw.slot_seconds) and raw.slot_seconds > 0, "slot_seconds", "must be > 0")
    _check(_finite(raw.packet_bits) and raw.packet_bits > 0, "packet_bits", "must be > 0")
    _check(_finite(raw.p_min) and _finite(raw.p_max) and 0 < raw.p_min < raw.p_max < 1,
           "p_min/p_max", "need 0 < p_min < p_max < 1")

    lam = tuple(float(x) for x in raw.lam)
    _check(len(lam) == n, "lambda", f"expected {n} per-user rates, got {len(lam)}")
    _check(all(math.isfinite(x) and x >= 0 for x in lam), "lambda", "all rates must be finite and >= 0")

    _check(isinstance(raw.horizon, (int, np.integer)) and isinstance(raw.warmup, (int, np.integer)),
           "horizon/warmup", "must be integers")
    _check(0 < raw.warmup < raw.horizon, "warmup", "need 0 < warmup < horizon")
    _check(isinstance(raw.seed, (int, np.integer)) and 0 <= raw.seed < 2**64, "seed",
           "must be an integer in [0, 2^64)")

    rate_table = raw.rate_table
    dists: Tuple[ChannelStateDistribution, ...] = ()
    jakes = None
    if raw.jakes is not None:
        _check(not raw.dists, "dists", "give either dists or Jakes parameters, not both")
        jakes = _validate_jakes(raw.jakes)
        rate_table = None
    else:
        _check(rate_table is not None, "rate_table", "required for the discrete channel")
        rate_table = _validate_rates(rate_table)
        _check(len(raw.dists) == n, "dists", f"expected {n} distributions, got {len(raw.dists)}")
        dists = tuple(_validate_dist(d, i, rate_table.n_states, raw.p_min, raw.p_max)
                      for i, d in enumerate(raw.dists))

    values = {f.name: getattr(raw, f.name) for f in fields(SystemConfig)}
    values.update(n_users=n, beta=beta, lam=lam, rate_table=rate_table, dists=dists, jakes=jakes,
                  horizon=int(raw.horizon), warmup=int(raw.warmup), seed=int(raw.seed),
                  slot_seconds=float(raw.slot_seconds), packet_bits=float(raw.packet_bits),
                  p_min=float(raw.p_min), p_max=float(raw.p_max))
    return ValidatedConfig(**values)


def ensure_valid(config: SystemConfig) -> ValidatedConfig:
    # dataclasses.replace() on a ValidatedConfig skips validation, so the type
    # alone is not trusted
    return validate_config(config)


def with_load(config: SystemConfig, lam_total: float) -> SystemConfig:
    """Split an overall load equally across users."""
    return replace(config, lam=(lam_total / config.n_users,) * config.n_users)


def discrete_config(n_users: int, probs: Sequence[Sequence[float]] | Sequence[float], beta: float,
                    lam_total: float = 0.0, *, rates: Sequence[float] = HDR_RATES_BPS,
                    horizon: int = 200_000, warmup: int = 20_000, seed: int = 0,
                    policy: str = "sdf", **kw) -> ValidatedConfig:
    """Build a validated i.i.d. finite-state config.

    ``probs`` is one distribution shared by every user, or a list of group
    distributions splitting the users into equal contiguous groups.
    """
    rows = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    if n_users % len(rows):
        raise ConfigError("dists", f"{len(rows)} groups do not divide {n_users} users")
    per = n_users // len(rows)
    dists = tuple(ChannelStateDistribution(tuple(row)) for row in rows for _ in range(per))
    cfg = SystemConfig(n_users=n_users, rate_table=RateTable(tuple(rates)), dists=dists, beta=beta,
                       lam=(lam_total / n_users,) * n_users, horizon=horizon, warmup=warmup,
                       seed=seed, policy=policy, **kw)
    return validate_config(cfg)


def jakes_config(n_users: int = 20, beta: float = 0.02, lam_total: float = 0.0, *,
                 params: JakesParams = JakesParams(), horizon: int = 200_000, warmup: int = 20_000,
                 seed: int = 0, policy: str = "sdf", **kw) -> ValidatedConfig:
    cfg = SystemConfig(n_users=n_users, rate_table=None, dists=(), beta=beta,
                       lam=(lam_total / n_users,) * n_users, horizon=horizon, warmup=warmup,
                       seed=seed, policy=policy, jakes=params, **kw)
    return validate_config(cfg)
