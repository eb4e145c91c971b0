"""Per-trial Monte Carlo kernels: numba-jitted with a pure-numpy fallback.

Set CRSNOMA_NO_NUMBA=1 to force the numpy path (the numpy path is also
used automatically when numba is missing).  Both backends evaluate the
same per-trial arithmetic; see benchmarks/bench_kernels.py for a speed
comparison.
"""

from __future__ import annotations

import math
import os

import numpy as np

COMBINE_SINGLE = 0
COMBINE_SC = 1
COMBINE_MRC = 2

_flag = os.environ.get("CRSNOMA_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}


def combine_gains_numpy(gains: np.ndarray, mode: int) -> np.ndarray:
    if mode == COMBINE_SINGLE:
        return np.ascontiguousarray(gains[:, 0])
    if mode == COMBINE_SC:
        return gains.max(axis=1)
    return gains.sum(axis=1)


def noma_trials_numpy(lam_sp, lam_rp, g_sr, g_sd, g_rd, q, a1, a2, eps1, eps2):
    """Per-trial NOMA rates and outage flags.

    Returns (rate_s1, rate_s2, out_s1, out_s2) arrays; the s2 outage flag
    is the union of the three disjoint failure events (relay misses s1;
    relay gets s1 but misses s2; receiver misses the relayed s2).
    """
    ps = q / lam_sp
    pr = q / lam_rp
    sinr_sr1 = g_sr * a1 * ps / (g_sr * a2 * ps + 1.0)
    sinr_sr2 = g_sr * a2 * ps
    sinr_sd = g_sd * a1 * ps / (g_sd * a2 * ps + 1.0)
    sinr_rd = g_rd * pr
    m1 = np.minimum(sinr_sr1, sinr_sd)
    m2 = np.minimum(sinr_sr2, sinr_rd)
    r1 = 0.5 * np.log2(1.0 + m1)
    r2 = 0.5 * np.log2(1.0 + m2)
    out1 = m1 < eps1
    relay_s1 = sinr_sr1 >= eps1
    ev_i = ~relay_s1
    ev_ii = relay_s1 & (sinr_sr2 < eps2)
    ev_iii = relay_s1 & (sinr_sr2 >= eps2) & (sinr_rd < eps2)
    out2 = ev_i | ev_ii | ev_iii
    return r1, r2, out1.astype(np.uint8), out2.astype(np.uint8)


def oma_trials_numpy(lam_sp, lam_rp, g_sr, g_sd, g_rd, q, eps1):
    """Per-trial OMA rate and outage flag (slot-combined single symbol)."""
    z = np.minimum(g_sr / lam_sp, g_sd / lam_sp + g_rd / lam_rp)
    rate = 0.5 * np.log2(1.0 + q * z)
    out = (q * z) < eps1
    return rate, out.astype(np.uint8)


def _combine_gains_loop(gains, mode):
    n, width = gains.shape
    out = np.empty(n)
    if mode == 0:
        for i in range(n):
            out[i] = gains[i, 0]
    elif mode == 1:
        for i in range(n):
            best = gains[i, 0]
            for j in range(1, width):
                if gains[i, j] > best:
                    best = gains[i, j]
            out[i] = best
    else:
        for i in range(n):
            acc = 0.0
            for j in range(width):
                acc += gains[i, j]
            out[i] = acc
    return out


def _noma_trials_loop(lam_sp, lam_rp, g_sr, g_sd, g_rd, q, a1, a2, eps1, eps2):
    n = lam_sp.shape[0]
    r1 = np.empty(n)
    r2 = np.empty(n)
    out1 = np.empty(n, dtype=np.uint8)
    out2 = np.empty(n, dtype=np.uint8)
    for i in range(n):
        ps = q / lam_sp[i]
        pr = q / lam_rp[i]
        sinr_sr1 = g_sr[i] * a1 * ps / (g_sr[i] * a2 * ps + 1.0)
        sinr_sr2 = g_sr[i] * a2 * ps
        sinr_sd = g_sd[i] * a1 * ps / (g_sd[i] * a2 * ps + 1.0)
        sinr_rd = g_rd[i] * pr
        m1 = min(sinr_sr1, sinr_sd)
        m2 = min(sinr_sr2, sinr_rd)
        r1[i] = 0.5 * math.log2(1.0 + m1)
        r2[i] = 0.5 * math.log2(1.0 + m2)
        out1[i] = 1 if m1 < eps1 else 0
        if sinr_sr1 < eps1:
            out2[i] = 1
        elif sinr_sr2 < eps2:
            out2[i] = 1
        elif sinr_rd < eps2:
            out2[i] = 1
        else:
            out2[i] = 0
    return r1, r2, out1, out2


def _oma_trials_loop(lam_sp, lam_rp, g_sr, g_sd, g_rd, q, eps1):
    n = lam_sp.shape[0]
    rate = np.empty(n)
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        z = min(g_sr[i] / lam_sp[i], g_sd[i] / lam_sp[i] + g_rd[i] / lam_rp[i])
        rate[i] = 0.5 * math.log2(1.0 + q * z)
        out[i] = 1 if q * z < eps1 else 0
    return rate, out


BACKEND = "numpy"
combine_gains = combine_gains_numpy
noma_trials = noma_trials_numpy
oma_trials = oma_trials_numpy

if not NUMBA_DISABLED:
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        BACKEND = "numba"
        combine_gains_njit = njit(cache=True, nogil=True)(_combine_gains_loop)
        noma_trials_njit = njit(cache=True, nogil=True)(_noma_trials_loop)
        oma_trials_njit = njit(cache=True, nogil=True)(_oma_trials_loop)
        combine_gains = combine_gains_njit
        noma_trials = noma_trials_njit
        oma_trials = oma_trials_njit
