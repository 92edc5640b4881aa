"""Slot dynamics for the oracle, full-probe and SDF policies.

The per-slot functions (``sdf_probe``, ``schedule``, ``serve_and_update``...)
are the readable reference; :func:`run` drives the same logic through the
block kernels in :mod:`sdfsim._kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Optional

import numpy as np

from . import _kernels
from .channel import ChannelRealization, IIDChannel, JakesChannel
from .model import SystemConfig, ValidatedConfig, ensure_valid
from .traffic import PoissonTraffic

CHUNK_SLOTS = 8192


@dataclass(frozen=True)
class ProbeOutcome:
    i_star: int
    reporters: FrozenSet[int]
    probed_set: FrozenSet[int]
    m_count: int
    cost_units: int


@dataclass(frozen=True)
class SlotRecord:
    slot: int
    scheduled_user: Optional[int]
    served_bits: np.ndarray
    cost_units: int
    queue_total_before: float
    queue_total_after: float
    probed_rates: Optional[dict] = None


def _argmax_lowest(values) -> int:
    return int(np.argmax(np.asarray(values)))


def sdf_probe(queues, realization: ChannelRealization) -> ProbeOutcome:
    """Probe the longest queue, broadcast its rate, collect strictly better reports."""
    q = np.asarray(queues, dtype=np.float64)
    r = np.asarray(realization.rates)
    n = len(q)
    i_star = _argmax_lowest(q)
    reporters = frozenset(int(j) for j in np.flatnonzero(r > r[i_star]) if j != i_star)
    return ProbeOutcome(i_star=i_star, reporters=reporters, probed_set=reporters | {i_star},
                        m_count=n - 1 - len(reporters), cost_units=2 + len(reporters))


def full_probe(queues, realization: ChannelRealization) -> ProbeOutcome:
    n = len(queues)
    return ProbeOutcome(i_star=_argmax_lowest(queues), reporters=frozenset(),
                        probed_set=frozenset(range(n)), m_count=0, cost_units=n)


def oracle_probe(queues, realization: ChannelRealization) -> ProbeOutcome:
    n = len(queues)
    return ProbeOutcome(i_star=_argmax_lowest(queues), reporters=frozenset(),
                        probed_set=frozenset(range(n)), m_count=0, cost_units=0)


PROBES = {"sdf": sdf_probe, "full_probe": full_probe, "oracle": oracle_probe}


def schedule(probe: ProbeOutcome, queues, realization: ChannelRealization,
             beta: float = 0.0) -> Optional[int]:
    """Max-Weight over the probed set; ``None`` if no probed user has positive weight.

    The slot-wide factor ``1 - beta*cost`` is positive and common to every
    candidate, so it is left out of the comparison.
    """
    q = np.asarray(queues, dtype=np.float64)
    r = np.asarray(realization.rates)
    best, wbest = None, 0.0
    for j in sorted(probe.probed_set):
        w = q[j] * r[j]
        if w > wbest:
            best, wbest = j, w
    return best


def serve_and_update(queues, decision: Optional[int], realization: ChannelRealization,
                     probe: ProbeOutcome, arrivals, config: SystemConfig, slot: int = 0):
    """Apply one slot of service and arrivals; returns ``(new_queues, SlotRecord)``."""
    q = np.asarray(queues, dtype=np.float64)
    served = np.zeros(len(q))
    if decision is not None:
        factor = 1.0 - config.beta * probe.cost_units
        served[decision] = factor * config.slot_seconds * realization.rates[decision]
    new = q + np.asarray(arrivals) * config.packet_bits
    if decision is not None:
        new[decision] = new[decision] - served[decision]
    new = np.maximum(new, 0.0)
    rates = {j: float(realization.rates[j]) for j in sorted(probe.probed_set)}
    rec = SlotRecord(slot=slot, scheduled_user=decision, served_bits=served, cost_units=probe.cost_units,
                     queue_total_before=float(np.cumsum(q)[-1]), queue_total_after=float(np.cumsum(new)[-1]),
                     probed_rates=rates)
    return new, rec


def step(queues, realization: ChannelRealization, arrivals, config: SystemConfig, slot: int = 0):
    """One full slot through the reference functions."""
    probe = PROBES[config.policy](queues, realization)
    decision = schedule(probe, queues, realization, config.beta)
    new, rec = serve_and_update(queues, decision, realization, probe, arrivals, config, slot)
    return new, rec, probe


# -------------------------------------------------------------------- run

@dataclass
class TimeSeries:
    """Per-slot records stored column-wise, plus post-warmup summaries."""
    n_users: int
    warmup: int
    packet_bits: float
    i_star: np.ndarray
    scheduled_user: np.ndarray
    served_bits: np.ndarray
    cost_units: np.ndarray
    m_count: np.ndarray
    total_queue_bits: np.ndarray
    final_queues: np.ndarray
    policy: str = "sdf"

    @property
    def horizon(self) -> int:
        return len(self.total_queue_bits)

    def __len__(self) -> int:
        return self.horizon

    def record(self, t: int) -> SlotRecord:
        served = np.zeros(self.n_users)
        user = int(self.scheduled_user[t])
        if user >= 0:
            served[user] = self.served_bits[t]
        before = float(self.total_queue_bits[t - 1]) if t > 0 else 0.0
        return SlotRecord(slot=t, scheduled_user=user if user >= 0 else None, served_bits=served,
                          cost_units=int(self.cost_units[t]), queue_total_before=before,
                          queue_total_after=float(self.total_queue_bits[t]))

    @property
    def total_queue_pkts(self) -> np.ndarray:
        return self.total_queue_bits / self.packet_bits

    @property
    def mean_total_queue_pkts(self) -> float:
        return float(self.total_queue_pkts[self.warmup:].mean())

    @property
    def mean_cost_units(self) -> float:
        return float(self.cost_units[self.warmup:].mean())

    @property
    def mean_probed_fraction(self) -> float:
        """Average probing cost per slot as a fraction of N (full probing = 1)."""
        return self.mean_cost_units / self.n_users

    @property
    def mean_m_count(self) -> float:
        return float(self.m_count[self.warmup:].mean())

    @property
    def max_queue_share(self) -> np.ndarray:
        """Empirical probability that each user holds the longest queue."""
        counts = np.bincount(self.i_star[self.warmup:], minlength=self.n_users)
        return counts / counts.sum()

    def summary(self) -> dict:
        return {
            "policy": self.policy,
            "horizon": self.horizon,
            "warmup": self.warmup,
            "mean_total_queue_pkts": self.mean_total_queue_pkts,
            "mean_cost_units": self.mean_cost_units,
            "mean_probed_fraction": self.mean_probed_fraction,
            "mean_m_count": self.mean_m_count,
            "max_queue_share": self.max_queue_share.tolist(),
        }


def make_streams(seed: int):
    """Independent channel and traffic generators for one run."""
    ch, tr = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(ch), np.random.default_rng(tr)


def make_channel(config: ValidatedConfig, rng: np.random.Generator, backend: Optional[str] = None):
    if config.is_fading:
        return JakesChannel(config.n_users, config.jakes, config.slot_seconds, rng, backend)
    return IIDChannel(config.rate_table, config.dists, backend)


def run(config: SystemConfig, *, backend: Optional[str] = None,
        chunk_slots: int = CHUNK_SLOTS) -> TimeSeries:
    """Simulate ``config.horizon`` slots; deterministic per (config, seed, backend)."""
    cfg = ensure_valid(config)
    simulate_block = _kernels.get_kernels(backend)[0]
    policy = _kernels.POLICY_CODES[cfg.policy]
    n, horizon = cfg.n_users, cfg.horizon
    ch_rng, tr_rng = make_streams(cfg.seed)
    channel = make_channel(cfg, ch_rng, backend)
    traffic = PoissonTraffic(cfg.lam, backend)

    queues = np.zeros(n)
    out = dict(
        i_star=np.empty(horizon, dtype=np.int32), scheduled_user=np.empty(horizon, dtype=np.int32),
        served_bits=np.empty(horizon), cost_units=np.empty(horizon, dtype=np.int32),
        m_count=np.empty(horizon, dtype=np.int32), total_queue_bits=np.empty(horizon),
    )
    for start in range(0, horizon, chunk_slots):
        stop = min(start + chunk_slots, horizon)
        rates = channel.sample_rates(ch_rng, stop - start)
        arrivals = traffic.sample(tr_rng, stop - start)
        simulate_block(queues, rates, arrivals, cfg.beta, policy, cfg.slot_seconds, cfg.packet_bits,
                       *(a[start:stop] for a in out.values()))
    return TimeSeries(n_users=n, warmup=cfg.warmup, packet_bits=cfg.packet_bits,
                      final_queues=queues, policy=cfg.policy, **out)
