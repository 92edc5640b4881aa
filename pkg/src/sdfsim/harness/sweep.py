"""Load sweeps: run a policy over a grid of total loads and locate its frontier."""
from __future__ import annotations

import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from ..engine import run
from ..model import POLICIES, SystemConfig, ensure_valid, with_load
from .stability import QUEUE_CAP, SLOPE_TOL, StabilityVerdict, detect_stability

ALIASES = {"full": "full_probe", "sdf": "sdf", "oracle": "oracle", "full_probe": "full_probe"}


@dataclass(frozen=True)
class PolicySpec:
    """A policy plus the probing cost it runs with; the oracle always pays 0."""
    name: str
    beta: float

    @classmethod
    def parse(cls, text: str, default_beta: float = 0.0) -> "PolicySpec":
        name, _, beta = text.strip().partition("@")
        name = ALIASES.get(name.strip().lower())
        if name is None:
            raise ValueError(f"unknown policy {text!r}; expected one of {POLICIES} with optional @beta")
        if name == "oracle":
            return cls("oracle", 0.0)
        try:
            b = float(beta) if beta else float(default_beta)
        except ValueError:
            raise ValueError(f"bad beta in policy {text!r}") from None
        return cls(name, b)

    @property
    def id(self) -> str:
        return "oracle" if self.name == "oracle" else f"{self.name}@{self.beta!r}"

    def apply(self, config: SystemConfig) -> SystemConfig:
        return replace(config, policy=self.name, beta=self.beta)


def parse_policies(text: str, default_beta: float = 0.0) -> Tuple[PolicySpec, ...]:
    specs = tuple(PolicySpec.parse(t, default_beta) for t in text.split(",") if t.strip())
    if not specs:
        raise ValueError("no policies given")
    return specs


def derive_seed(base_seed: int, policy_id: str, lam_idx: int, rep: int) -> int:
    """64-bit seed unique to one (policy, grid point, replication)."""
    ss = np.random.SeedSequence([base_seed, zlib.crc32(policy_id.encode()), lam_idx, rep])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def load_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1 or hi < lo:
        raise ValueError("need steps >= 1 and lambda-max >= lambda-min")
    if steps == 1:
        return np.array([float(lo)])
    return np.linspace(lo, hi, steps)


@dataclass(frozen=True)
class RunResult:
    lam_idx: int
    rep: int
    seed: int
    mean_total_queue_pkts: float
    mean_probed_fraction: float
    verdict: StabilityVerdict


@dataclass(frozen=True)
class SweepPoint:
    lambda_total: float
    mean_total_queue_pkts: float
    mean_probed_fraction: float
    stable: bool


@dataclass(frozen=True)
class SweepResult:
    policy: str
    grid: Tuple[float, ...]
    runs: Tuple[RunResult, ...]         # sorted by (lam_idx, rep)
    points: Tuple[SweepPoint, ...]
    frontier: Optional[float]

    @property
    def frontier_index(self) -> Optional[int]:
        return None if self.frontier is None else self.grid.index(self.frontier)


def _one(args) -> RunResult:
    cfg, lam_idx, rep, slope_tol, queue_cap = args
    ts = run(cfg)
    v = detect_stability(ts, slope_tol=slope_tol, queue_cap=queue_cap)
    return RunResult(lam_idx, rep, cfg.seed, ts.mean_total_queue_pkts, ts.mean_probed_fraction, v)


def worker_count(requested: Optional[int] = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("SDF_SIM_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def sweep(base_config: SystemConfig, policy: PolicySpec | str, grid: Sequence[float], replications: int = 1,
          *, slope_tol: float = SLOPE_TOL, queue_cap: float = QUEUE_CAP,
          workers: Optional[int] = None) -> SweepResult:
    """Run ``replications`` seeds at every load in ``grid`` (ascending)."""
    if isinstance(policy, str):
        policy = PolicySpec.parse(policy, base_config.beta)
    grid = tuple(float(x) for x in grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly ascending")
    if replications < 1:
        raise ValueError("need at least one replication")
    base = ensure_valid(policy.apply(base_config))

    jobs = []
    for i, lam in enumerate(grid):
        for r in range(replications):
            cfg = ensure_valid(replace(with_load(base, lam), seed=derive_seed(base.seed, policy.id, i, r)))
            jobs.append((cfg, i, r, slope_tol, queue_cap))

    n_workers = min(worker_count(workers), len(jobs)) if jobs else 1
    if n_workers <= 1:
        runs = [_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            runs = list(pool.map(_one, jobs, chunksize=1))
    runs.sort(key=lambda r: (r.lam_idx, r.rep))

    points = []
    for i, lam in enumerate(grid):
        mine = [r for r in runs if r.lam_idx == i]
        points.append(SweepPoint(lam, float(np.mean([r.mean_total_queue_pkts for r in mine])),
                                 float(np.mean([r.mean_probed_fraction for r in mine])),
                                 all(r.verdict.stable for r in mine)))
    stable = [p.lambda_total for p in points if p.stable]
    return SweepResult(policy.id, grid, tuple(runs), tuple(points), max(stable) if stable else None)
