"""Seeded Monte Carlo of the two-slot protocol: the behavioral ground truth.

Trials are partitioned into fixed-size blocks; every block draws from its
own counter-based substreams keyed by (seed, block_index), so estimates are
bit-identical no matter how many workers process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .channels import ChannelRng, FadingRealization, sample_block
from .model import Combiner, SystemConfig, derive_thresholds
from .analytic import Method, OutageReport, RateReport

#: trials per rng block; results do not depend on how blocks map to workers
BLOCK_TRIALS = 1 << 17

_COMBINE_CODE = {
    Combiner.SINGLE: _kernels.COMBINE_SINGLE,
    Combiner.SC: _kernels.COMBINE_SC,
    Combiner.MRC: _kernels.COMBINE_MRC,
}


class Scheme(Enum):
    NOMA = "noma"
    OMA = "oma"


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    n_trials: int
    seed: int

    def __post_init__(self):
        if self.std_err < 0 or self.n_trials < 1:
            raise ValueError("invalid Monte Carlo estimate")


def instantaneous_sinrs(real: FadingRealization, cfg: SystemConfig):
    """SINR tuple (relay s1, relay s2, direct s1, second hop s2) for one trial."""
    if cfg.combiner is Combiner.SINGLE:
        g_sr, g_sd, g_rd = real.gains_sr[0], real.gains_sd[0], real.gains_rd[0]
    elif cfg.combiner is Combiner.SC:
        g_sr, g_sd, g_rd = (real.gains_sr.max(), real.gains_sd.max(),
                            real.gains_rd.max())
    else:
        g_sr, g_sd, g_rd = (real.gains_sr.sum(), real.gains_sd.sum(),
                            real.gains_rd.sum())
    ps = cfg.q_peak / real.lambda_sp
    pr = cfg.q_peak / real.lambda_rp
    sinr_sr1 = g_sr * cfg.a1 * ps / (g_sr * cfg.a2 * ps + 1.0)
    sinr_sr2 = g_sr * cfg.a2 * ps
    sinr_sd = g_sd * cfg.a1 * ps / (g_sd * cfg.a2 * ps + 1.0)
    sinr_rd = g_rd * pr
    return sinr_sr1, sinr_sr2, sinr_sd, sinr_rd


def _block_sizes(n_trials: int):
    sizes = []
    remaining = n_trials
    while remaining > 0:
        size = min(BLOCK_TRIALS, remaining)
        sizes.append(size)
        remaining -= size
    return sizes


def _combined_block(cfg: SystemConfig, seed: int, block_index: int, size: int):
    rng = ChannelRng.from_seed(seed, block_index)
    block = sample_block(cfg, rng, size)
    code = _COMBINE_CODE[cfg.combiner]
    g_sr = _kernels.combine_gains(block.gains_sr, code)
    g_sd = _kernels.combine_gains(block.gains_sd, code)
    g_rd = _kernels.combine_gains(block.gains_rd, code)
    return block.lam_sp, block.lam_rp, g_sr, g_sd, g_rd


def _block_stats(cfg, scheme, seed, block_index, size, eps1, eps2):
    lam_sp, lam_rp, g_sr, g_sd, g_rd = _combined_block(cfg, seed, block_index, size)
    if scheme is Scheme.NOMA:
        r1, r2, out1, out2 = _kernels.noma_trials(
            lam_sp, lam_rp, g_sr, g_sd, g_rd,
            cfg.q_peak, cfg.a1, cfg.a2, eps1, eps2)
        rsum = r1 + r2
        return {
            "n": size,
            "sum_r1": float(r1.sum()), "sumsq_r1": float((r1 * r1).sum()),
            "sum_r2": float(r2.sum()), "sumsq_r2": float((r2 * r2).sum()),
            "sumsq_rsum": float((rsum * rsum).sum()),
            "n_out1": int(out1.sum()), "n_out2": int(out2.sum()),
        }
    rate, out = _kernels.oma_trials(lam_sp, lam_rp, g_sr, g_sd, g_rd,
                                    cfg.q_peak, eps1)
    return {
        "n": size,
        "sum_r": float(rate.sum()), "sumsq_r": float((rate * rate).sum()),
        "n_out": int(out.sum()),
    }


def _run_blocks(cfg, scheme, n_trials, seed, workers):
    eps1 = 2.0 ** (2.0 * cfg.r1) - 1.0
    eps2 = 2.0 ** (2.0 * cfg.r2) - 1.0
    sizes = _block_sizes(n_trials)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(
                lambda item: _block_stats(cfg, scheme, seed, item[0], item[1],
                                          eps1, eps2),
                enumerate(sizes)))
    else:
        stats = [_block_stats(cfg, scheme, seed, i, size, eps1, eps2)
                 for i, size in enumerate(sizes)]
    merged = {key: 0 if key.startswith("n") else 0.0 for key in stats[0]}
    for entry in stats:  # block order is fixed, so the merge is deterministic
        for key, value in entry.items():
            merged[key] += value
    return merged


def _mean_se(total, total_sq, n, seed):
    mean = total / n
    var = max(total_sq - total * total / n, 0.0) / max(n - 1, 1)
    return McEstimate(mean=mean, std_err=math.sqrt(var / n), n_trials=n, seed=seed)


def _prob_se(count, n, seed):
    p = count / n
    return McEstimate(mean=p, std_err=math.sqrt(p * (1.0 - p) / n),
                      n_trials=n, seed=seed)


def mc_estimates(cfg: SystemConfig, scheme: Scheme, n_trials: int, seed: int,
                 workers: int = 1) -> dict:
    """All per-metric Monte Carlo estimates from one simulation pass."""
    if n_trials < 1000:
        raise ValueError("need at least 1000 trials")
    merged = _run_blocks(cfg, scheme, n_trials, seed, workers)
    n = merged["n"]
    if scheme is Scheme.NOMA:
        sum_rsum = merged["sum_r1"] + merged["sum_r2"]
        return {
            "rate_s1": _mean_se(merged["sum_r1"], merged["sumsq_r1"], n, seed),
            "rate_s2": _mean_se(merged["sum_r2"], merged["sumsq_r2"], n, seed),
            "rate_sum": _mean_se(sum_rsum, merged["sumsq_rsum"], n, seed),
            "outage_s1": _prob_se(merged["n_out1"], n, seed),
            "outage_s2": _prob_se(merged["n_out2"], n, seed),
        }
    return {
        "rate": _mean_se(merged["sum_r"], merged["sumsq_r"], n, seed),
        "outage": _prob_se(merged["n_out"], n, seed),
    }


def mc_rate(cfg: SystemConfig, scheme: Scheme, n_trials: int,
            seed: int, workers: int = 1) -> RateReport:
    """Monte Carlo rate report; the uncertainty is the sum rate's standard error."""
    est = mc_estimates(cfg, scheme, n_trials, seed, workers)
    if scheme is Scheme.NOMA:
        c1, c2 = est["rate_s1"].mean, est["rate_s2"].mean
        return RateReport(c_s1=c1, c_s2=c2, c_sum=c1 + c2,
                          method=Method.MONTE_CARLO,
                          mc_std_err=est["rate_sum"].std_err)
    rate = est["rate"].mean
    return RateReport(c_s1=rate, c_s2=0.0, c_sum=rate,
                      method=Method.MONTE_CARLO,
                      mc_std_err=est["rate"].std_err)


def mc_outage(cfg: SystemConfig, scheme: Scheme, n_trials: int,
              seed: int, workers: int = 1) -> OutageReport:
    """Monte Carlo outage report with a 3-sigma confidence half-width."""
    est = mc_estimates(cfg, scheme, n_trials, seed, workers)
    if scheme is Scheme.NOMA:
        half = 3.0 * max(est["outage_s1"].std_err, est["outage_s2"].std_err)
        return OutageReport(p_out_s1=est["outage_s1"].mean,
                            p_out_s2=est["outage_s2"].mean,
                            method=Method.MONTE_CARLO, conf_half_width=half)
    out = est["outage"]
    return OutageReport(p_out_s1=out.mean, p_out_s2=out.mean,
                        method=Method.MONTE_CARLO,
                        conf_half_width=3.0 * out.std_err)


def common_randomness_rates(cfg: SystemConfig, scheme: Scheme, n_trials: int,
                            seed: int) -> dict:
    """Per-trial rates for all three combiners on shared fading draws.

    The single-antenna receiver is modeled as using antenna 0 of the shared
    multi-antenna realization, so sum >= max >= element holds trial by
    trial.  Returns {combiner: rate arrays} keyed by Combiner.
    """
    eps1 = 2.0 ** (2.0 * cfg.r1) - 1.0
    eps2 = 2.0 ** (2.0 * cfg.r2) - 1.0
    out = {}
    for combiner in (Combiner.SINGLE, Combiner.SC, Combiner.MRC):
        code = _COMBINE_CODE[combiner]
        parts = []
        for i, size in enumerate(_block_sizes(n_trials)):
            rng = ChannelRng.from_seed(seed, i)
            block = sample_block(cfg, rng, size)
            cols = (block.lam_sp, block.lam_rp,
                    _kernels.combine_gains(block.gains_sr, code),
                    _kernels.combine_gains(block.gains_sd, code),
                    _kernels.combine_gains(block.gains_rd, code))
            if scheme is Scheme.NOMA:
                r1, r2, _, _ = _kernels.noma_trials(
                    *cols, cfg.q_peak, cfg.a1, cfg.a2, eps1, eps2)
                parts.append(r1 + r2)
            else:
                rate, _ = _kernels.oma_trials(*cols, cfg.q_peak, eps1)
                parts.append(rate)
        out[combiner] = np.concatenate(parts)
    return out


def trial_rates(cfg: SystemConfig, scheme: Scheme, n_trials: int,
                seed: int) -> tuple:
    """Per-trial rate arrays on the realizations of the seeded blocks.

    For NOMA returns (rate_s1, rate_s2); for OMA a single rate array.
    Useful for common-random-number comparisons across combiners.
    """
    eps1 = 2.0 ** (2.0 * cfg.r1) - 1.0
    eps2 = 2.0 ** (2.0 * cfg.r2) - 1.0
    parts = []
    for i, size in enumerate(_block_sizes(n_trials)):
        cols = _combined_block(cfg, seed, i, size)
        if scheme is Scheme.NOMA:
            r1, r2, _, _ = _kernels.noma_trials(*cols, cfg.q_peak, cfg.a1,
                                                cfg.a2, eps1, eps2)
            parts.append((r1, r2))
        else:
            rate, _ = _kernels.oma_trials(*cols, cfg.q_peak, eps1)
            parts.append((rate,))
    arrays = tuple(np.concatenate([p[i] for p in parts])
                   for i in range(len(parts[0])))
    return arrays if len(arrays) > 1 else arrays[0]
