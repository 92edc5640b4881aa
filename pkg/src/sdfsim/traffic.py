"""Poisson packet arrivals.

Draws use inverse-cdf lookup on uniforms, ``A = #{k : F(k) <= U}``, which is
exact in distribution, fast for the small per-user rates used here, and makes
a block draw consume the stream exactly like successive single-slot draws.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import _kernels


@lru_cache(maxsize=256)
def _poisson_cdf(lam: float) -> np.ndarray:
    # the tail beyond mean + 12 sd + 40 is far below double resolution
    k_max = int(lam + 12.0 * np.sqrt(lam) + 40.0)
    cdf = stats.poisson.cdf(np.arange(k_max + 1), lam)
    # entries equal to 1.0 can never be reached by u < 1
    return cdf[: int(np.searchsorted(cdf, 1.0)) + 1]


class PoissonTraffic:
    """Independent Poisson arrivals with fixed per-user means (packets/slot)."""

    def __init__(self, lam: Sequence[float], backend: Optional[str] = None):
        lam = np.asarray(lam, dtype=np.float64)
        if np.any(~np.isfinite(lam)) or np.any(lam < 0):
            raise ValueError("arrival rates must be finite and >= 0")
        self.lam = lam
        values, group = np.unique(lam, return_inverse=True)
        rows = [_poisson_cdf(float(v)) if v > 0 else np.array([1.0]) for v in values]
        self._lookup = _kernels.InverseCDF(rows, group.ravel(), backend)

    def sample(self, rng: np.random.Generator, n_slots: Optional[int] = None) -> np.ndarray:
        """Arrivals for one slot (``n_slots=None``) or an (n_slots, N) block."""
        shape = len(self.lam) if n_slots is None else (n_slots, len(self.lam))
        return self._lookup(rng.random(shape))


def draw_arrivals(lam: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """Packets arriving in one slot, ``A_n ~ Poisson(lam_n)`` independently."""
    return PoissonTraffic(lam).sample(rng)


def draw_arrivals_block(lam: Sequence[float], rng: np.random.Generator, n_slots: int) -> np.ndarray:
    """(n_slots, N) arrivals; row ``t`` equals the ``t``-th single-slot draw."""
    return PoissonTraffic(lam).sample(rng, n_slots)


def split_load(lam_total: float, n_users: int) -> tuple:
    """Equal split of an overall load (packets/slot) across users."""
    if lam_total < 0:
        raise ValueError("load must be >= 0")
    return (lam_total / n_users,) * n_users
