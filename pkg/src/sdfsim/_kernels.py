"""Hot per-slot loops, compiled with numba when available.

Every kernel has a pure-numpy twin.  ``SDF_SIM_BACKEND=numpy`` forces the
numpy path; the default is numba when it imports.  The discrete-channel
kernels are bit-identical across backends; the Jakes generator agrees to
rounding (the numba path advances oscillators by phasor rotation, the numpy
path evaluates cosines directly).
"""
import math
import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

ORACLE, FULL_PROBE, SDF = 0, 1, 2
POLICY_CODES = {"oracle": ORACLE, "full_probe": FULL_PROBE, "sdf": SDF}


def _requested_backend():
    want = os.environ.get("SDF_SIM_BACKEND", "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"SDF_SIM_BACKEND must be 'numba' or 'numpy', got {want!r}")
    if want == "numba" and not HAS_NUMBA:
        return "numpy"
    return want


BACKEND = _requested_backend()


# ---------------------------------------------------------------- loop kernels

def _simulate_block_loop(queues, rates, arrivals, beta, policy, slot_seconds, packet_bits,
                         istar_out, sched_out, served_out, cost_out, m_out, total_out):
    n_slots, n = rates.shape
    for t in range(n_slots):
        istar = 0
        qmax = queues[0]
        for i in range(1, n):
            if queues[i] > qmax:
                qmax = queues[i]
                istar = i
        r_star = rates[t, istar]

        best = -1
        wbest = 0.0
        reporters = 0
        for j in range(n):
            if policy == SDF and j != istar:
                if rates[t, j] > r_star:
                    reporters += 1
                else:
                    continue
            w = queues[j] * rates[t, j]
            if w > wbest:
                wbest = w
                best = j

        if policy == SDF:
            cost = reporters + 2
            m = n - 1 - reporters
        elif policy == FULL_PROBE:
            cost = n
            m = 0
        else:
            cost = 0
            m = 0

        served = 0.0
        if best >= 0:
            served = (1.0 - beta * cost) * slot_seconds * rates[t, best]
        total = 0.0
        for i in range(n):
            q = queues[i] + arrivals[t, i] * packet_bits
            if i == best:
                q = q - served
            if q < 0.0:
                q = 0.0
            queues[i] = q
            total += q

        istar_out[t] = istar
        sched_out[t] = best
        served_out[t] = served
        cost_out[t] = cost
        m_out[t] = m
        total_out[t] = total


def _inverse_cdf_loop(u, cdfs, lengths, group, out):
    n_slots, n = u.shape
    for t in range(n_slots):
        for i in range(n):
            g = group[i]
            x = u[t, i]
            k = 0
            while k < lengths[g] and x >= cdfs[g, k]:
                k += 1
            out[t, i] = k


def _silent_counts_loop(istar, rates, out):
    n_slots, n = rates.shape
    for t in range(n_slots):
        r_star = rates[t, istar[t]]
        c = 0
        for j in range(n):
            if j != istar[t] and rates[t, j] <= r_star:
                c += 1
        out[t] = c


def _jakes_block_loop(w_c, w_s, phi, psi, k0, z, offset_db, drift_std, drift_clamp, gains_out):
    n_slots = gains_out.shape[0]
    n, m = w_c.shape
    scale = 1.0 / math.sqrt(m)
    cc = np.empty((n, m))
    sc = np.empty((n, m))
    cs = np.empty((n, m))
    ss = np.empty((n, m))
    dcc = np.empty((n, m))
    dsc = np.empty((n, m))
    dcs = np.empty((n, m))
    dss = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            a = w_c[i, j] * k0 + phi[i, j]
            b = w_s[i, j] * k0 + psi[i, j]
            cc[i, j] = math.cos(a)
            sc[i, j] = math.sin(a)
            cs[i, j] = math.cos(b)
            ss[i, j] = math.sin(b)
            dcc[i, j] = math.cos(w_c[i, j])
            dsc[i, j] = math.sin(w_c[i, j])
            dcs[i, j] = math.cos(w_s[i, j])
            dss[i, j] = math.sin(w_s[i, j])
    for t in range(n_slots):
        for i in range(n):
            re = 0.0
            im = 0.0
            for j in range(m):
                re += cc[i, j]
                im += cs[i, j]
                c1 = cc[i, j] * dcc[i, j] - sc[i, j] * dsc[i, j]
                sc[i, j] = sc[i, j] * dcc[i, j] + cc[i, j] * dsc[i, j]
                cc[i, j] = c1
                c2 = cs[i, j] * dcs[i, j] - ss[i, j] * dss[i, j]
                ss[i, j] = ss[i, j] * dcs[i, j] + cs[i, j] * dss[i, j]
                cs[i, j] = c2
            re *= scale
            im *= scale
            off = offset_db[i] + drift_std * z[t, i]
            if off > drift_clamp:
                off = drift_clamp
            elif off < -drift_clamp:
                off = -drift_clamp
            offset_db[i] = off
            gains_out[t, i] = (re * re + im * im) * 10.0 ** (off / 10.0)


# ------------------------------------------------------------- numpy fallback

def _simulate_block_np(queues, rates, arrivals, beta, policy, slot_seconds, packet_bits,
                       istar_out, sched_out, served_out, cost_out, m_out, total_out):
    n_slots, n = rates.shape
    q = queues.copy()
    incoming = arrivals * packet_bits
    for t in range(n_slots):
        r = rates[t]
        istar = int(np.argmax(q))
        w = q * r
        reporters = 0
        if policy == SDF:
            above = r > r[istar]
            reporters = int(np.count_nonzero(above))
            above[istar] = True
            w = np.where(above, w, 0.0)
        best = int(np.argmax(w))
        if not w[best] > 0.0:
            best = -1
        if policy == SDF:
            cost, m = reporters + 2, n - 1 - reporters
        elif policy == FULL_PROBE:
            cost, m = n, 0
        else:
            cost, m = 0, 0
        served = 0.0
        q = q + incoming[t]
        if best >= 0:
            served = (1.0 - beta * cost) * slot_seconds * r[best]
            q[best] = q[best] - served
        q = np.maximum(q, 0.0)
        istar_out[t] = istar
        sched_out[t] = best
        served_out[t] = served
        cost_out[t] = cost
        m_out[t] = m
        total_out[t] = np.cumsum(q)[-1]
    queues[:] = q


def _inverse_cdf_np(u, cdfs, lengths, group, out):
    for g in range(len(lengths)):
        cols = np.flatnonzero(group == g)
        out[:, cols] = np.searchsorted(cdfs[g, :lengths[g]], u[:, cols], side="right")


def _silent_counts_np(istar, rates, out):
    r_star = rates[np.arange(len(istar)), istar]
    out[:] = np.count_nonzero(rates <= r_star[:, None], axis=1) - 1


def _jakes_block_np(w_c, w_s, phi, psi, k0, z, offset_db, drift_std, drift_clamp, gains_out):
    n_slots = gains_out.shape[0]
    m = w_c.shape[1]
    k = (k0 + np.arange(n_slots, dtype=np.float64))[:, None, None]
    re = np.cos(w_c * k + phi).sum(axis=2) / math.sqrt(m)
    im = np.cos(w_s * k + psi).sum(axis=2) / math.sqrt(m)
    power = re * re + im * im
    off = offset_db.copy()
    for t in range(n_slots):
        off = np.clip(off + drift_std * z[t], -drift_clamp, drift_clamp)
        gains_out[t] = power[t] * 10.0 ** (off / 10.0)
    offset_db[:] = off


# ------------------------------------------------------------------ dispatch

if HAS_NUMBA:
    simulate_block_numba = njit(cache=True, nogil=True)(_simulate_block_loop)
    silent_counts_numba = njit(cache=True, nogil=True)(_silent_counts_loop)
    jakes_block_numba = njit(cache=True, nogil=True)(_jakes_block_loop)
    inverse_cdf_numba = njit(cache=True, nogil=True)(_inverse_cdf_loop)
else:  # pragma: no cover
    simulate_block_numba = silent_counts_numba = jakes_block_numba = inverse_cdf_numba = None

IMPLS = {
    "numpy": (_simulate_block_np, _silent_counts_np, _jakes_block_np, _inverse_cdf_np),
}
if HAS_NUMBA:
    IMPLS["numba"] = (simulate_block_numba, silent_counts_numba, jakes_block_numba, inverse_cdf_numba)


def get_kernels(backend=None):
    """Return ``(simulate_block, silent_counts, jakes_block, inverse_cdf)`` for a backend."""
    return IMPLS[backend or BACKEND]


class InverseCDF:
    """Vectorized lookup ``k = #{j : cdf_g[j] <= u}`` with per-column cdf groups.

    Rows of ``cdfs`` may have different lengths; ``group[i]`` selects the row
    used for column ``i``.
    """

    def __init__(self, cdf_rows, group, backend=None):
        self.lengths = np.array([len(r) for r in cdf_rows], dtype=np.int64)
        width = max(1, int(self.lengths.max()) if len(self.lengths) else 1)
        self.cdfs = np.full((len(cdf_rows), width), np.inf)
        for g, row in enumerate(cdf_rows):
            self.cdfs[g, :len(row)] = row
        self.group = np.asarray(group, dtype=np.int64)
        self._kernel = get_kernels(backend)[3]

    def __call__(self, u):
        u2 = np.atleast_2d(u)
        out = np.empty(u2.shape, dtype=np.int64)
        self._kernel(u2, self.cdfs, self.lengths, self.group, out)
        return out.reshape(np.shape(u))
