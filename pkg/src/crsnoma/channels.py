"""Distributions of the channel-derived random variables, plus seeded samplers.

Squared Rayleigh amplitudes are exponential; selection combining takes the
max of the per-antenna gains and maximal-ratio combining their sum, so the
three numerator families are EXP, MAX_OF_EXP and GAMMA.  Every quantity the
rate/outage integrals need reduces to the pdf/cdf of a (possibly min-combined)
numerator gain divided by an independent exponential interference gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .model import Combiner, SystemConfig
from .specfun import gauss_2f1, pochhammer

#: fixed substream order for the five link classes
LINK_NAMES = ("sp", "rp", "sr", "sd", "rd")


class GainFamily(Enum):
    EXP = "exp"
    MAX_OF_EXP = "max_of_exp"
    GAMMA = "gamma"


@dataclass(frozen=True)
class LinkGainDistribution:
    """Distribution of a combined squared link gain.

    ``scale`` is the per-branch mean-square gain and ``order`` the branch
    count: EXP is a single branch, MAX_OF_EXP the max of ``order`` i.i.d.
    branches, GAMMA their sum.
    """

    family: GainFamily
    scale: float
    order: int = 1

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.family is GainFamily.EXP and self.order != 1:
            raise ValueError("EXP requires order 1")


def _check_nonneg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("argument must be nonnegative")
    return x


def gain_pdf(d: LinkGainDistribution, x):
    """Density of the combined gain at x >= 0."""
    x = _check_nonneg(x)
    if d.family is GainFamily.EXP:
        out = np.exp(-x / d.scale) / d.scale
    elif d.family is GainFamily.MAX_OF_EXP:
        out = np.zeros_like(x)
        for k in range(1, d.order + 1):
            out += ((-1.0) ** (k - 1) * math.comb(d.order, k)
                    * (k / d.scale) * np.exp(-k * x / d.scale))
    else:
        n = d.order
        out = (x ** (n - 1) * np.exp(-x / d.scale)
               / (math.gamma(n) * d.scale ** n))
    return out if out.ndim else float(out)


def gain_cdf(d: LinkGainDistribution, x):
    """Distribution function of the combined gain at x >= 0."""
    x = _check_nonneg(x)
    if d.family is GainFamily.EXP:
        out = -np.expm1(-x / d.scale)
    elif d.family is GainFamily.MAX_OF_EXP:
        out = np.ones_like(x)
        for k in range(1, d.order + 1):
            out -= ((-1.0) ** (k - 1) * math.comb(d.order, k)
                    * np.exp(-k * x / d.scale))
    else:
        partial = np.zeros_like(x)
        for mu in range(d.order):
            partial += (x / d.scale) ** mu / math.factorial(mu)
        out = 1.0 - np.exp(-x / d.scale) * partial
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RatioDistribution:
    """Distribution of (scale_factor * combined gain) / exponential gain.

    ``partner``, when present, is the second arm of a min taken inside the
    numerator before dividing (both arms share the family of ``numerator``
    and are independent of the denominator).
    """

    numerator: LinkGainDistribution
    denominator: LinkGainDistribution
    scale_factor: float = 1.0
    partner: Optional[LinkGainDistribution] = None

    def __post_init__(self):
        if self.denominator.family is not GainFamily.EXP:
            raise ValueError("denominator must be exponential")
        if not self.scale_factor > 0:
            raise ValueError("scale_factor must be positive")
        if self.partner is not None and self.partner.family is not self.numerator.family:
            raise ValueError("min-combined arms must share a family")


def _arms(r: RatioDistribution):
    s1 = r.scale_factor * r.numerator.scale
    if r.partner is None:
        return (r.numerator.order, s1), None
    s2 = r.scale_factor * r.partner.scale
    return (r.numerator.order, s1), (r.partner.order, s2)


def ratio_pdf(r: RatioDistribution, x):
    """Density of the gain ratio at x >= 0."""
    x = _check_nonneg(x)
    od = r.denominator.scale
    (n1, s1), arm2 = _arms(r)
    fam = r.numerator.family

    if fam is GainFamily.EXP:
        c = od / s1 if arm2 is None else od * (1.0 / s1 + 1.0 / arm2[1])
        out = c / (1.0 + c * x) ** 2
    elif fam is GainFamily.MAX_OF_EXP:
        out = np.zeros_like(x)
        if arm2 is None:
            for k in range(1, n1 + 1):
                ck = k * od / s1
                out += ((-1.0) ** (k - 1) * math.comb(n1, k)
                        * ck / (1.0 + ck * x) ** 2)
        else:
            n2, s2 = arm2
            for k in range(1, n1 + 1):
                for j in range(1, n2 + 1):
                    c = od * (k / s1 + j / s2)
                    out += ((-1.0) ** (k + j) * math.comb(n1, k) * math.comb(n2, j)
                            * c / (1.0 + c * x) ** 2)
    else:
        if arm2 is None:
            c = od / s1
            out = n1 * c ** n1 * x ** (n1 - 1) / (1.0 + c * x) ** (n1 + 1)
        else:
            out = _gamma_min_ratio_pdf(n1, s1, arm2[0], arm2[1], od, x)
    return out if out.ndim else float(out)


def _gamma_min_ratio_pdf(n1, s1, n2, s2, od, x):
    """Density of min(Gamma(n1,s1), Gamma(n2,s2)) / Exp(od)."""
    c_phi = od * (1.0 / s1 + 1.0 / s2)
    out = np.zeros_like(x)
    for (na, sa, nb, sb) in ((n1, s1, n2, s2), (n2, s2, n1, s1)):
        for nu in range(nb):
            m = na + nu
            coeff = (math.gamma(m + 1) * od ** m
                     / (math.gamma(na) * math.gamma(nu + 1) * sa ** na * sb ** nu))
            out += coeff * x ** (m - 1) / (1.0 + c_phi * x) ** (m + 1)
    return out


def ratio_cdf(r: RatioDistribution, x):
    """Distribution function of the gain ratio at x >= 0."""
    x = _check_nonneg(x)
    od = r.denominator.scale
    (n1, s1), arm2 = _arms(r)
    fam = r.numerator.family

    if fam is GainFamily.EXP:
        c = od / s1 if arm2 is None else od * (1.0 / s1 + 1.0 / arm2[1])
        out = c * x / (1.0 + c * x)
    elif fam is GainFamily.MAX_OF_EXP:
        out = np.zeros_like(x)
        if arm2 is None:
            for k in range(1, n1 + 1):
                ck = k * od / s1
                out += ((-1.0) ** (k - 1) * math.comb(n1, k)
                        * ck * x / (1.0 + ck * x))
        else:
            n2, s2 = arm2
            for k in range(1, n1 + 1):
                for j in range(1, n2 + 1):
                    c = od * (k / s1 + j / s2)
                    out += ((-1.0) ** (k + j) * math.comb(n1, k) * math.comb(n2, j)
                            * c * x / (1.0 + c * x))
    else:
        if arm2 is None:
            c = od / s1
            hyp = np.vectorize(lambda t: gauss_2f1(n1 + 1, n1, n1 + 1, -c * t))(x)
            out = (c * x) ** n1 * hyp
        else:
            out = _gamma_min_ratio_cdf(n1, s1, arm2[0], arm2[1], od, x)
    return out if out.ndim else float(out)


def _gamma_min_ratio_cdf(n1, s1, n2, s2, od, x):
    """CDF of min(Gamma(n1,s1), Gamma(n2,s2)) / Exp(od)."""
    c_phi = od * (1.0 / s1 + 1.0 / s2)
    hyp = {}
    out = np.zeros_like(x)
    for (na, sa, nb, sb) in ((n1, s1, n2, s2), (n2, s2, n1, s1)):
        for nu in range(nb):
            m = na + nu
            if m not in hyp:
                hyp[m] = np.vectorize(
                    lambda t, m=m: gauss_2f1(m + 1, m, m + 1, -c_phi * t))(x)
            coeff = pochhammer(nu + 1.0, na) / (
                math.gamma(na) * sa ** na * sb ** nu * m)
            out += coeff * (od * x) ** m * hyp[m]
    return out


def min_pair_survival(r1: RatioDistribution, r2: RatioDistribution, x):
    """Survival of the min of two independent gain ratios: (1-F1)(1-F2)."""
    return (1.0 - ratio_cdf(r1, x)) * (1.0 - ratio_cdf(r2, x))


# ---------------------------------------------------------------------------
# seeded sampling


@dataclass(frozen=True)
class FadingRealization:
    """One draw of all squared link gains for a Monte Carlo trial."""

    lambda_sp: float
    lambda_rp: float
    gains_sr: np.ndarray
    gains_sd: np.ndarray
    gains_rd: np.ndarray


@dataclass
class ChannelRng:
    """Counter-based generators with one named substream per link class.

    Streams are keyed by (seed, block_index, link), so any block can be
    regenerated independently of how work is scheduled.
    """

    streams: dict

    @classmethod
    def from_seed(cls, seed: int, block_index: int = 0) -> "ChannelRng":
        streams = {
            name: np.random.Generator(np.random.Philox(
                np.random.SeedSequence(entropy=seed, spawn_key=(block_index, i))))
            for i, name in enumerate(LINK_NAMES)
        }
        return cls(streams=streams)


def _exp_draws(gen: np.random.Generator, scale: float, size, resample_zero=False):
    out = scale * gen.standard_exponential(size=size, method="inv")
    if resample_zero:
        bad = out == 0.0
        while np.any(bad):
            out[bad] = scale * gen.standard_exponential(size=int(bad.sum()), method="inv")
            bad = out == 0.0
    return out


@dataclass(frozen=True)
class FadingBlock:
    """Vectorized draws for a block of trials (arrays indexed by trial)."""

    lam_sp: np.ndarray
    lam_rp: np.ndarray
    gains_sr: np.ndarray
    gains_sd: np.ndarray
    gains_rd: np.ndarray


def sample_block(cfg: SystemConfig, rng: ChannelRng, n: int) -> FadingBlock:
    """Draw n independent fading realizations from the rng's substreams."""
    return FadingBlock(
        lam_sp=_exp_draws(rng.streams["sp"], cfg.omega_sp, n, resample_zero=True),
        lam_rp=_exp_draws(rng.streams["rp"], cfg.omega_rp, n, resample_zero=True),
        gains_sr=_exp_draws(rng.streams["sr"], cfg.omega_sr, (n, cfg.n_r)),
        gains_sd=_exp_draws(rng.streams["sd"], cfg.omega_sd, (n, cfg.n_d)),
        gains_rd=_exp_draws(rng.streams["rd"], cfg.omega_rd, (n, cfg.n_d)),
    )


def sample_realization(cfg: SystemConfig, rng: ChannelRng) -> FadingRealization:
    """Draw a single fading realization, advancing the rng deterministically."""
    block = sample_block(cfg, rng, 1)
    return FadingRealization(
        lambda_sp=float(block.lam_sp[0]),
        lambda_rp=float(block.lam_rp[0]),
        gains_sr=block.gains_sr[0],
        gains_sd=block.gains_sd[0],
        gains_rd=block.gains_rd[0],
    )


def combined_gain_distribution(cfg: SystemConfig, link: str) -> LinkGainDistribution:
    """Distribution of the combiner output for one numerator link class."""
    scale = {"sr": cfg.omega_sr, "sd": cfg.omega_sd, "rd": cfg.omega_rd}[link]
    order = cfg.n_r if link == "sr" else cfg.n_d
    if cfg.combiner is Combiner.SINGLE:
        return LinkGainDistribution(GainFamily.EXP, scale)
    if cfg.combiner is Combiner.SC:
        return LinkGainDistribution(GainFamily.MAX_OF_EXP, scale, order)
    return LinkGainDistribution(GainFamily.GAMMA, scale, order)
