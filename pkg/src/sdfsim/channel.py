"""Per-slot channel realizations: i.i.d. finite-state and Jakes fading."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .model import ChannelStateDistribution, JakesParams, RateTable


@dataclass(frozen=True)
class ChannelRealization:
    """One slot of channel state.

    ``states`` holds 0-based state indices (``None`` for fading channels);
    ``rates`` holds the supported rate of each user in bits/second.
    """
    rates: np.ndarray
    states: Optional[np.ndarray] = None


class IIDChannel:
    """Finite-state channel, independent across users and slots."""

    def __init__(self, rate_table: RateTable, dists: Sequence[ChannelStateDistribution],
                 backend: Optional[str] = None):
        self.rate_values = rate_table.as_array()
        probs = np.array([d.probs for d in dists], dtype=np.float64)
        # only the first L-1 cumulative levels are compared, so the last state
        # absorbs any rounding in the cdf tail
        self._cdf = np.cumsum(probs, axis=1)[:, :-1]
        rows, group = np.unique(self._cdf, axis=0, return_inverse=True)
        self._lookup = _kernels.InverseCDF(list(rows), group.ravel(), backend)

    @property
    def n_users(self) -> int:
        return self._cdf.shape[0]

    def states_from_uniforms(self, u: np.ndarray) -> np.ndarray:
        if self._cdf.shape[1] == 0:
            return np.zeros(u.shape, dtype=np.int64)
        return self._lookup(u)

    def sample_states(self, rng: np.random.Generator, n_slots: int) -> np.ndarray:
        """(n_slots, N) array of state indices."""
        return self.states_from_uniforms(rng.random((n_slots, self.n_users)))

    def sample_rates(self, rng: np.random.Generator, n_slots: int) -> np.ndarray:
        return self.rate_values[self.sample_states(rng, n_slots)]


def sample_iid(rate_table: RateTable, dists: Sequence[ChannelStateDistribution],
               rng: np.random.Generator) -> ChannelRealization:
    """Draw a single slot; consumes the same stream as one row of a block draw."""
    chan = IIDChannel(rate_table, dists)
    states = chan.states_from_uniforms(rng.random(chan.n_users))
    return ChannelRealization(rates=chan.rate_values[states], states=states)


# ---------------------------------------------------------------------- Jakes

@dataclass
class JakesState:
    """Sum-of-sinusoids oscillator bank plus slow mean-gain drift.

    Oscillator ``m`` of user ``n`` has arrival angle
    ``(2*pi*(m+1) - pi + theta[n]) / (4*M)`` and independent phases for the
    in-phase and quadrature branches.
    """
    doppler_hz: np.ndarray      # (N,)
    theta: np.ndarray           # (N,)
    phi: np.ndarray             # (N, M) in-phase branch phases
    psi: np.ndarray             # (N, M) quadrature branch phases
    offset_db: np.ndarray       # (N,)
    slot: int = 0

    def copy(self) -> "JakesState":
        return JakesState(self.doppler_hz.copy(), self.theta.copy(), self.phi.copy(),
                          self.psi.copy(), self.offset_db.copy(), self.slot)

    def angular_steps(self, slot_seconds: float):
        """Per-slot phase increments (radians) of both branches."""
        m = self.phi.shape[1]
        idx = np.arange(1, m + 1, dtype=np.float64)
        alpha = (2.0 * math.pi * idx[None, :] - math.pi + self.theta[:, None]) / (4.0 * m)
        wd = 2.0 * math.pi * self.doppler_hz[:, None] * slot_seconds
        return wd * np.cos(alpha), wd * np.sin(alpha)


def init_jakes(n_users: int, params: JakesParams, rng: np.random.Generator) -> JakesState:
    lo, hi = params.doppler_range_hz
    m = params.n_oscillators
    doppler = rng.uniform(lo, hi, n_users)
    theta = rng.uniform(0.0, 2.0 * math.pi, n_users)
    phi = rng.uniform(0.0, 2.0 * math.pi, (n_users, m))
    psi = rng.uniform(0.0, 2.0 * math.pi, (n_users, m))
    return JakesState(doppler, theta, phi, psi, np.zeros(n_users), 0)


def _complex_gain(state: JakesState, slot_seconds: float, k: int) -> np.ndarray:
    w_c, w_s = state.angular_steps(slot_seconds)
    m = state.phi.shape[1]
    re = np.cos(w_c * k + state.phi).sum(axis=1) / math.sqrt(m)
    im = np.cos(w_s * k + state.psi).sum(axis=1) / math.sqrt(m)
    return re + 1j * im


def jakes_step(state: JakesState, params: JakesParams, rng: np.random.Generator,
               slot_seconds: float = 0.005):
    """Advance one slot; returns ``(new_state, power_gains)``."""
    new = state.copy()
    z = rng.standard_normal(len(state.offset_db))
    new.offset_db = np.clip(state.offset_db + params.drift_std_db * z,
                            -params.drift_clamp_db, params.drift_clamp_db)
    g = _complex_gain(state, slot_seconds, state.slot)
    gains = np.abs(g) ** 2 * 10.0 ** (new.offset_db / 10.0)
    new.slot = state.slot + 1
    return new, gains


def jakes_complex_gains(state: JakesState, slot_seconds: float, n_slots: int) -> np.ndarray:
    """Drift-free complex gains for the next ``n_slots`` slots (analysis helper)."""
    w_c, w_s = state.angular_steps(slot_seconds)
    m = state.phi.shape[1]
    k = (state.slot + np.arange(n_slots, dtype=np.float64))[:, None, None]
    re = np.cos(w_c * k + state.phi).sum(axis=2) / math.sqrt(m)
    im = np.cos(w_s * k + state.psi).sum(axis=2) / math.sqrt(m)
    return re + 1j * im


class JakesChannel:
    """Block generator of correlated, drifting Rayleigh power gains."""

    def __init__(self, n_users: int, params: JakesParams, slot_seconds: float,
                 rng: np.random.Generator, backend: Optional[str] = None):
        self.params = params
        self.slot_seconds = slot_seconds
        self.state = init_jakes(n_users, params, rng)
        self._w_c, self._w_s = self.state.angular_steps(slot_seconds)
        self._kernel = _kernels.get_kernels(backend)[2]

    def sample_gains(self, rng: np.random.Generator, n_slots: int) -> np.ndarray:
        st = self.state
        z = rng.standard_normal((n_slots, len(st.offset_db)))
        out = np.empty((n_slots, len(st.offset_db)))
        self._kernel(self._w_c, self._w_s, st.phi, st.psi, float(st.slot), z, st.offset_db,
                     self.params.drift_std_db, self.params.drift_clamp_db, out)
        st.slot += n_slots
        return out

    def sample_rates(self, rng: np.random.Generator, n_slots: int) -> np.ndarray:
        return shannon_rate(self.sample_gains(rng, n_slots), self.params)


def shannon_rate(gain, params: JakesParams):
    """Spectral rate ``BW * log2(1 + SNR * gain)`` in bits/second.

    The probing factor is not applied here; the engine charges it once when
    computing service.
    """
    gain = np.asarray(gain, dtype=np.float64)
    if np.any(gain < 0):
        raise ValueError("gain must be >= 0")
    out = params.bandwidth_hz * np.log2(1.0 + params.snr_linear * gain)
    return out if out.ndim else float(out)
