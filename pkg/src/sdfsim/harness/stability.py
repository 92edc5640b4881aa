"""Finite-horizon stability verdicts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_WINDOWS = 16
SLOPE_TOL = 0.05     # packets per window
QUEUE_CAP = 1e4      # packets


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    trend_slope: float
    final_mean: float
    window_len: int


def window_means(total_queue_pkts: np.ndarray, warmup: int, n_windows: int = N_WINDOWS):
    """Means of ``n_windows`` equal windows after warmup; leftover tail slots are dropped."""
    post = np.asarray(total_queue_pkts, dtype=np.float64)[warmup:]
    wl = len(post) // n_windows
    if wl < 1:
        raise ValueError(f"need at least {n_windows} post-warmup slots, got {len(post)}")
    return post[: wl * n_windows].reshape(n_windows, wl).mean(axis=1), wl


def detect_stability(series, slope_tol: float = SLOPE_TOL, queue_cap: float = QUEUE_CAP,
                     n_windows: int = N_WINDOWS) -> StabilityVerdict:
    """Least-squares trend of window-mean total queue, in packets per window.

    Stable iff the trend is at most ``slope_tol`` and the last window mean is
    at most ``queue_cap`` packets.
    """
    if series.horizon <= series.warmup:
        raise ValueError("horizon must exceed warmup")
    means, wl = window_means(series.total_queue_pkts, series.warmup, n_windows)
    slope = float(np.polyfit(np.arange(n_windows, dtype=np.float64), means, 1)[0])
    final = float(means[-1])
    return StabilityVerdict(stable=bool(slope <= slope_tol and final <= queue_cap),
                            trend_slope=slope, final_mean=final, window_len=wl)
