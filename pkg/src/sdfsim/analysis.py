"""Closed-form rate-region results for SDF and their numerical oracles.

``M`` is the number of users that stay silent in a slot because their rate
does not beat the rate of the longest-queue user.  Every closed form here has
an independent route (enumeration, sampling, or simulation) used in tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .engine import make_channel, run
from .model import SystemConfig, ensure_valid

TOL = 1e-12


@dataclass(frozen=True)
class ExpansionReport:
    expected_m: float
    epsilon: float
    epsilon_max: float
    expands: bool
    method: str
    std_error: Optional[float] = None

    def lines(self):
        se = f" +/- {self.std_error:.4g}" if self.std_error is not None else ""
        return [
            f"method      : {self.method}",
            f"E[M]        : {self.expected_m:.6g}{se}",
            f"epsilon     : {self.epsilon:.6g}",
            f"epsilon_max : {self.epsilon_max:.6g}",
            f"expands     : {str(self.expands).lower()}",
        ]


@dataclass(frozen=True)
class HetBoundParams:
    p_q_min: float
    p_min: float
    n_users: int
    n_states: int

    def __post_init__(self):
        if not 0 < self.p_q_min <= 1.0 / self.n_users + TOL:
            raise ValueError("p_q_min must lie in (0, 1/N]")
        if not 0 < self.p_min <= 1.0 / self.n_states + TOL:
            raise ValueError("p_min must lie in (0, 1/L]")


def _as_dist(probs, axis=-1) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.shape[axis] < 1 or np.any(~np.isfinite(p)) or np.any(p < 0):
        raise ValueError("probabilities must be finite and nonnegative")
    if np.any(np.abs(p.sum(axis=axis) - 1.0) > 1e-9):
        raise ValueError("probabilities must sum to 1")
    return p


def _tails(p: np.ndarray) -> np.ndarray:
    """``Pr[R <= r_k] = sum_{j >= k} p_j`` along the last axis."""
    return np.cumsum(p[..., ::-1], axis=-1)[..., ::-1]


def expected_m_homogeneous(probs, n_users: int):
    """E[M] when every user shares ``probs``; broadcasts over leading axes."""
    p = _as_dist(probs)
    return (n_users - 1) * np.sum(p * _tails(p), axis=-1)


def expected_m_uniform(n_states: int, n_users: int) -> float:
    if n_states < 1 or n_users < 1:
        raise ValueError("need L >= 1 and N >= 1")
    return (0.5 + 0.5 / n_states) * (n_users - 1)


def uniform_limit(n_users: int) -> float:
    """E[M] for uniform channels as the number of states grows without bound."""
    return (n_users - 1) / 2.0


def _check_beta(beta: float, n_users: int) -> None:
    if not beta >= 0 or beta * n_users >= 1:
        raise ValueError(f"need 0 <= beta*N < 1, got beta*N = {beta * n_users:g}")


def epsilon(beta: float, n_users: int, expected_m: float) -> float:
    """Guaranteed fractional gain over the full-probe region; may be negative."""
    _check_beta(beta, n_users)
    return beta * (expected_m - 1.0) / (1.0 - beta * n_users)


def epsilon_max(beta: float, n_users: int) -> float:
    _check_beta(beta, n_users)
    return beta * n_users / (1.0 - beta * n_users)


# ------------------------------------------------------------ convexity checks

def hessian_matrix(n_states: int, n_users: int) -> np.ndarray:
    """Hessian of E[M] in ``(p_2..p_L)`` after eliminating ``p_1``."""
    k = n_states - 1
    return (np.eye(k) + np.ones((k, k))) * (n_users - 1)


def hessian_quadratic_form(x, n_users: int) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float((np.dot(x, x) + x.sum() ** 2) * (n_users - 1))


def uniform_is_minimizer_check(n_states: int, n_users: int, n_samples: int,
                               rng: np.random.Generator) -> Tuple[bool, Optional[np.ndarray]]:
    """Search the simplex for a distribution with E[M] below the uniform value.

    Returns ``(True, None)`` when none is found, else ``(False, witness)``.
    """
    if n_states < 2:
        raise ValueError("need L >= 2")
    floor = expected_m_uniform(n_states, n_users) - TOL
    for start in range(0, n_samples, 65536):
        p = rng.dirichlet(np.ones(n_states), size=min(65536, n_samples - start))
        em = expected_m_homogeneous(p, n_users)
        bad = np.flatnonzero(em < floor)
        if len(bad):
            return False, p[bad[0]]
    return True, None


def monotone_in_L_check(n_users: int, L_max: int) -> bool:
    """True iff uniform-channel E[M] strictly decreases over L = 1..L_max."""
    values = np.array([expected_m_uniform(L, n_users) for L in range(1, L_max + 1)])
    return bool(np.all(np.diff(values) < 0))


# --------------------------------------------------------- heterogeneous users

def het_expected_m_exact(dists, istar_dist) -> float:
    """E[M] for per-user distributions and a given law of the longest-queue user."""
    p = _as_dist(dists)
    pi = _as_dist(istar_dist)
    if p.ndim != 2 or pi.shape != (p.shape[0],):
        raise ValueError("dists must be (N, L) and istar_dist length N")
    tails = _tails(p)                        # tails[j, k] = Pr[R_j <= r_k]
    others = tails.sum(axis=0)[None, :] - tails
    return float(np.sum(pi[:, None] * p * others))


def het_expected_m_enumerated(dists, istar_dist) -> float:
    """Brute force over every joint channel state; feasible for tiny N and L."""
    p = _as_dist(dists)
    pi = _as_dist(istar_dist)
    n, L = p.shape
    total = 0.0
    for states in itertools.product(range(L), repeat=n):
        s = np.array(states)
        prob = np.prod(p[np.arange(n), s])
        if prob == 0:
            continue
        # larger state index means lower or equal rate
        silent = np.array([np.count_nonzero(s >= s[i]) - 1 for i in range(n)])
        total += prob * float(np.dot(pi, silent))
    return total


def het_lower_bound(params: HetBoundParams) -> float:
    n, L = params.n_users, params.n_states
    pm = params.p_min
    return n * params.p_q_min * (n - 1) * (pm + pm * pm * L * (L - 1) / 2.0)


def het_expansion_condition(params: HetBoundParams) -> bool:
    n, L = params.n_users, params.n_states
    pm = params.p_min
    return n * (n - 1) > 1.0 / (params.p_q_min * (pm + pm * pm * L * (L - 1) / 2.0))


# ----------------------------------------------------------------- Monte Carlo

MC_CHUNK = 65536


def monte_carlo_expected_m(config: SystemConfig, n_slots: int, rng: Optional[np.random.Generator] = None,
                           istar: str = "uniform", backend: Optional[str] = None):
    """Sample mean and standard error of M.

    ``istar="uniform"`` draws the longest-queue user uniformly each slot,
    independent of the channel; ``istar="queue"`` runs the SDF engine with
    the configured arrivals and reads M off the real queue process.
    """
    cfg = ensure_valid(config)
    if istar == "queue":
        ts = run(replace(cfg, policy="sdf", horizon=cfg.warmup + n_slots), backend=backend)
        m = ts.m_count[cfg.warmup:].astype(np.float64)
        return float(m.mean()), float(m.std(ddof=1) / np.sqrt(len(m))) if len(m) > 1 else 0.0
    if istar != "uniform":
        raise ValueError("istar must be 'uniform' or 'queue'")

    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    counts = _kernels.get_kernels(backend)[1]
    channel = make_channel(cfg, rng, backend)
    s1 = s2 = 0.0
    for start in range(0, n_slots, MC_CHUNK):
        k = min(MC_CHUNK, n_slots - start)
        rates = channel.sample_rates(rng, k)
        who = rng.integers(0, cfg.n_users, k)
        m = np.empty(k, dtype=np.int64)
        counts(who, rates, m)
        s1 += float(m.sum())
        s2 += float(np.dot(m, m))
    mean = s1 / n_slots
    var = max(s2 / n_slots - mean * mean, 0.0) * n_slots / max(n_slots - 1, 1)
    return mean, float(np.sqrt(var / n_slots))


# ------------------------------------------------------------------- reports

def _report(em: float, beta: float, n: int, method: str, se=None) -> ExpansionReport:
    return ExpansionReport(expected_m=float(em), epsilon=epsilon(beta, n, em), epsilon_max=epsilon_max(beta, n),
                           expands=bool(em > 1.0), method=method, std_error=se)


def expansion_reports(config: SystemConfig, mc_slots: int = 200_000):
    """Every applicable closed-form (or sampled) expansion figure for ``config``."""
    cfg = ensure_valid(config)
    n, beta = cfg.n_users, cfg.beta
    out = []
    if cfg.is_fading:
        mean, se = monte_carlo_expected_m(cfg, mc_slots)
        out.append(_report(mean, beta, n, "monte_carlo", se))
        return out
    p = cfg.prob_matrix()
    L = cfg.n_states
    if cfg.is_homogeneous():
        out.append(_report(expected_m_homogeneous(p[0], n), beta, n, "closed_form_homogeneous"))
        if np.allclose(p[0], 1.0 / L, rtol=0, atol=1e-12):
            out.append(_report(expected_m_uniform(L, n), beta, n, "closed_form_uniform"))
    else:
        uniform_q = np.full(n, 1.0 / n)
        out.append(_report(het_expected_m_exact(p, uniform_q), beta, n, "exact_heterogeneous"))
        params = HetBoundParams(p_q_min=1.0 / n, p_min=float(min(p.min(), 1.0 / L)), n_users=n, n_states=L)
        out.append(_report(het_lower_bound(params), beta, n, "het_lower_bound"))
    return out
