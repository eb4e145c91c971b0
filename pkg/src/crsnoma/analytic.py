"""Closed-form average rates and outage probabilities for every combiner.

The single-antenna and selection-combining rates are elementary: each term
is a scaled divided difference of x*ln(x), which this module evaluates
with midpoint series near the removable singularities instead of letting
the printed fractions cancel catastrophically.  The MRC rates go through
the Meijer G machinery in :mod:`crsnoma.specfun`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import (
    AsymptoticModel,
    Combiner,
    SystemConfig,
    derive_thresholds,
)
from .quad_oracle import quad_rate_s2
from .specfun import (
    ContourError,
    ConvergenceError,
    EgbmgfSpec,
    MeijerGSpec,
    egbmgf,
    gauss_2f1,
    meijer_g,
    pochhammer,
)

LOG2E = math.log2(math.e)

#: relative guard bands around removable singularities
LIMIT_BAND = 1e-9
SERIES_BAND = 1e-6


class InfeasibleError(ValueError):
    """The power split cannot support the first symbol's target rate."""


class Method(Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class RateReport:
    """Per-symbol and sum rates in bits/s/Hz with provenance."""

    c_s1: float
    c_s2: float
    c_sum: float
    method: Method
    mc_std_err: Optional[float] = None

    def __post_init__(self):
        if abs(self.c_sum - (self.c_s1 + self.c_s2)) > 1e-12:
            raise ValueError("c_sum must equal c_s1 + c_s2")
        if self.c_s1 < 0 or self.c_s2 < 0:
            raise ValueError("rates must be nonnegative")


@dataclass(frozen=True)
class OutageReport:
    """Per-symbol outage probabilities with provenance."""

    p_out_s1: float
    p_out_s2: float
    method: Method
    conf_half_width: Optional[float] = None

    def __post_init__(self):
        for p in (self.p_out_s1, self.p_out_s2):
            if not 0.0 <= p <= 1.0:
                raise ValueError("outage probabilities must lie in [0, 1]")


def _qlog_term(q: float, b: float) -> float:
    """q*log2(q/b)/(q-b) with its removable singularity at q = b."""
    u = (q - b) / b
    if abs(u) < LIMIT_BAND:
        return LOG2E
    if abs(u) < SERIES_BAND:
        return LOG2E * (1.0 + 0.5 * u)
    return q * math.log2(q / b) / (q - b)


def _dd_xlnx_pair(p: float, q: float) -> float:
    """First divided difference of x*ln(x) over two positive points."""
    if abs(p - q) < SERIES_BAND * max(p, q):
        m = 0.5 * (p + q)
        return math.log(m) + 1.0 - (p - q) ** 2 / (24.0 * m * m)
    return (p * math.log(p) - q * math.log(q)) / (p - q)


def _dd_xlnx(v1: float, v2: float, v3: float) -> float:
    """Second divided difference of x*ln(x) over three positive points."""
    a, b, c = sorted((v1, v2, v3))
    low_pair = (b - a) < SERIES_BAND * b
    high_pair = (c - b) < SERIES_BAND * c
    if low_pair and high_pair:
        return 0.5 / ((a + b + c) / 3.0)
    if low_pair or high_pair:
        return (_dd_xlnx_pair(a, b) - _dd_xlnx_pair(b, c)) / (a - c)
    return (a * math.log(a) / ((a - b) * (a - c))
            + b * math.log(b) / ((b - a) * (b - c))
            + c * math.log(c) / ((c - a) * (c - b)))


def _require(cfg: SystemConfig, combiner: Combiner):
    if cfg.combiner is not combiner:
        raise ValueError(f"operation requires the {combiner.value} combiner")


# ---------------------------------------------------------------------------
# single antenna


def rate_s1_single(cfg: SystemConfig) -> float:
    _require(cfg, Combiner.SINGLE)
    phi_osp = (1.0 / cfg.omega_sr + 1.0 / cfg.omega_sd) * cfg.omega_sp
    return 0.5 * (_qlog_term(cfg.q_peak, phi_osp)
                  - _qlog_term(cfg.a2 * cfg.q_peak, phi_osp))


def rate_s2_single(cfg: SystemConfig) -> float:
    _require(cfg, Combiner.SINGLE)
    r = cfg.omega_sp / (cfg.a2 * cfg.omega_sr)
    rho = cfg.omega_rp / cfg.omega_rd
    return 0.5 * LOG2E * cfg.q_peak * _dd_xlnx(cfg.q_peak, r, rho)


# ---------------------------------------------------------------------------
# selection combining


def rate_s1_sc(cfg: SystemConfig) -> float:
    _require(cfg, Combiner.SC)
    thr = derive_thresholds(cfg)
    total = 0.0
    for k in range(1, cfg.n_r + 1):
        for j in range(1, cfg.n_d + 1):
            b = thr.xi(k, j) * cfg.omega_sp
            sign = (-1.0) ** (k + j)
            weight = math.comb(cfg.n_r, k) * math.comb(cfg.n_d, j)
            total += sign * weight * (_qlog_term(cfg.q_peak, b)
                                      - _qlog_term(cfg.a2 * cfg.q_peak, b))
    return 0.5 * total


def rate_s2_sc(cfg: SystemConfig) -> float:
    _require(cfg, Combiner.SC)
    q = cfg.q_peak
    total = 0.0
    for k in range(1, cfg.n_r + 1):
        r_k = k * cfg.omega_sp / (cfg.a2 * cfg.omega_sr)
        for j in range(1, cfg.n_d + 1):
            rho_j = j * cfg.omega_rp / cfg.omega_rd
            sign = (-1.0) ** (k + j)
            weight = math.comb(cfg.n_r, k) * math.comb(cfg.n_d, j)
            total += sign * weight * _dd_xlnx(q, r_k, rho_j)
    return 0.5 * LOG2E * q * total


# ---------------------------------------------------------------------------
# maximal-ratio combining


def _g_log_kernel(z: float, order: int) -> float:
    """G^{2,3}_{3,3}(z | 1-order,1,1; 1,1,0), the log-moment kernel."""
    return meijer_g(MeijerGSpec(
        m=2, n=3, p=3, q=3,
        a_params=(1.0 - order, 1.0, 1.0), b_params=(1.0, 1.0, 0.0),
        argument=z))


def rate_s1_mrc(cfg: SystemConfig) -> float:
    _require(cfg, Combiner.MRC)
    phi = 1.0 / cfg.omega_sr + 1.0 / cfg.omega_sd
    arg_hi = cfg.q_peak / (phi * cfg.omega_sp)
    arg_lo = cfg.a2 * cfg.q_peak / (phi * cfg.omega_sp)
    total = 0.0
    arms = ((cfg.n_r, cfg.omega_sr, cfg.n_d, cfg.omega_sd),
            (cfg.n_d, cfg.omega_sd, cfg.n_r, cfg.omega_sr))
    for n_a, om_a, n_b, om_b in arms:
        lead = 1.0 / (math.gamma(n_a) * om_a ** n_a)
        for nu in range(n_b):
            order = n_a + nu
            diff = _g_log_kernel(arg_hi, order) - _g_log_kernel(arg_lo, order)
            total += lead * diff / (math.gamma(nu + 1) * om_b ** nu * phi ** order)
    return 0.5 * LOG2E * total


def _cross_moment(n1: int, s1: float, d1: float,
                  n2: int, s2: float, d2: float, q: float) -> float:
    """Log-moment of one ratio arm weighted by the other arm's distribution."""
    x = q * s1 / d1
    y = s1 * d2 / (d1 * s2)
    spec = EgbmgfSpec(
        joint_a=1.0 - n1 - n2, joint_b=1.0 - n2,
        outer_a=(1.0, 1.0), outer_b=(1.0, 0.0),
        inner_a=(-float(n2), 1.0 - n2), inner_b=(0.0, -float(n2)),
        x=x, y=y)
    return y ** n2 * egbmgf(spec) / (math.gamma(n1) * math.gamma(n2))


def _rate_s2_mrc_closed(cfg: SystemConfig) -> float:
    q = cfg.q_peak
    s_relay = cfg.a2 * cfg.omega_sr
    i7 = (cfg.n_r / math.gamma(cfg.n_r + 1)
          * _g_log_kernel(s_relay * q / cfg.omega_sp, cfg.n_r))
    i8 = (cfg.n_d / math.gamma(cfg.n_d + 1)
          * _g_log_kernel(cfg.omega_rd * q / cfg.omega_rp, cfg.n_d))
    i9 = _cross_moment(cfg.n_r, s_relay, cfg.omega_sp,
                       cfg.n_d, cfg.omega_rd, cfg.omega_rp, q)
    i10 = _cross_moment(cfg.n_d, cfg.omega_rd, cfg.omega_rp,
                        cfg.n_r, s_relay, cfg.omega_sp, q)
    return 0.5 * LOG2E * (i7 + i8 - i9 - i10)


def rate_s2_mrc(cfg: SystemConfig) -> float:
    value, _ = rate_s2_mrc_with_method(cfg)
    return value


def rate_s2_mrc_with_method(cfg: SystemConfig) -> tuple[float, Method]:
    """MRC second-symbol rate; falls back to quadrature if the bivariate
    contour integral fails to converge."""
    _require(cfg, Combiner.MRC)
    try:
        return _rate_s2_mrc_closed(cfg), Method.CLOSED_FORM
    except (ContourError, ConvergenceError):
        return quad_rate_s2(cfg), Method.QUADRATURE


# ---------------------------------------------------------------------------
# outage probabilities


def outage_s1(cfg: SystemConfig) -> float:
    """First-symbol outage; exactly 1 when the power split is infeasible."""
    thr = derive_thresholds(cfg)
    if not thr.noma_feasible:
        return 1.0
    if cfg.combiner is Combiner.SINGLE:
        w = thr.phi * cfg.omega_sp * thr.theta1
        return w / (1.0 + w)
    if cfg.combiner is Combiner.SC:
        total = 0.0
        for k in range(1, cfg.n_r + 1):
            for j in range(1, cfg.n_d + 1):
                w = thr.xi(k, j) * cfg.omega_sp * thr.theta1
                total += ((-1.0) ** (k + j) * math.comb(cfg.n_r, k)
                          * math.comb(cfg.n_d, j) * w / (1.0 + w))
        return total
    return _outage_s1_mrc(cfg, thr.theta1, thr.phi)


def _outage_s1_mrc(cfg: SystemConfig, theta1: float, phi: float) -> float:
    z = -cfg.omega_sp * phi * theta1
    total = 0.0
    arms = ((cfg.n_r, cfg.omega_sr, cfg.n_d, cfg.omega_sd),
            (cfg.n_d, cfg.omega_sd, cfg.n_r, cfg.omega_sr))
    for n_a, om_a, n_b, om_b in arms:
        lead = 1.0 / (math.gamma(n_a) * om_a ** n_a)
        for nu in range(n_b):
            order = n_a + nu
            total += (lead * pochhammer(nu + 1.0, n_a)
                      * (cfg.omega_sp * theta1) ** order
                      / (om_b ** nu * order)
                      * gauss_2f1(order + 1, order, order + 1, z))
    return total


def outage_s2(cfg: SystemConfig) -> float:
    """Second-symbol outage from the product form of the two ratio CDFs."""
    thr = derive_thresholds(cfg)
    if not thr.noma_feasible:
        return 1.0
    theta = thr.theta
    e2_over_q = thr.eps2 / cfg.q_peak
    if cfg.combiner is Combiner.SINGLE:
        f1 = (cfg.omega_sp * theta) / (cfg.omega_sr + cfg.omega_sp * theta)
        f2 = (thr.eps2 * cfg.omega_rp
              / (cfg.q_peak * cfg.omega_rd + thr.eps2 * cfg.omega_rp))
        return f1 + f2 - f1 * f2
    if cfg.combiner is Combiner.SC:
        f1 = 0.0
        for k in range(1, cfg.n_r + 1):
            w = k * cfg.omega_sp * theta
            f1 += ((-1.0) ** (k - 1) * math.comb(cfg.n_r, k)
                   * w / (cfg.omega_sr + w))
        f2 = 0.0
        for j in range(1, cfg.n_d + 1):
            w = j * thr.eps2 * cfg.omega_rp
            f2 += ((-1.0) ** (j - 1) * math.comb(cfg.n_d, j)
                   * w / (cfg.q_peak * cfg.omega_rd + w))
        return f1 + f2 - f1 * f2
    # MRC: each arm CDF is w^n 2F1(n+1, n; n+1; -w)
    w1 = theta * cfg.omega_sp / cfg.omega_sr
    w2 = e2_over_q * cfg.omega_rp / cfg.omega_rd
    f1 = w1 ** cfg.n_r * gauss_2f1(cfg.n_r + 1, cfg.n_r, cfg.n_r + 1, -w1)
    f2 = w2 ** cfg.n_d * gauss_2f1(cfg.n_d + 1, cfg.n_d, cfg.n_d + 1, -w2)
    return f1 + f2 - f1 * f2


# ---------------------------------------------------------------------------
# dispatch and asymptotics


def rate_s1(cfg: SystemConfig) -> float:
    if cfg.combiner is Combiner.SINGLE:
        return rate_s1_single(cfg)
    if cfg.combiner is Combiner.SC:
        return rate_s1_sc(cfg)
    return rate_s1_mrc(cfg)


def rate_s2(cfg: SystemConfig) -> float:
    if cfg.combiner is Combiner.SINGLE:
        return rate_s2_single(cfg)
    if cfg.combiner is Combiner.SC:
        return rate_s2_sc(cfg)
    return rate_s2_mrc(cfg)


def rate_report(cfg: SystemConfig) -> RateReport:
    """Closed-form rate report; tags quadrature when the MRC fallback fired."""
    method = Method.CLOSED_FORM
    c1 = rate_s1(cfg)
    if cfg.combiner is Combiner.MRC:
        c2, method = rate_s2_mrc_with_method(cfg)
    else:
        c2 = rate_s2(cfg)
    return RateReport(c_s1=c1, c_s2=c2, c_sum=c1 + c2, method=method)


def outage_report(cfg: SystemConfig) -> OutageReport:
    return OutageReport(p_out_s1=outage_s1(cfg), p_out_s2=outage_s2(cfg),
                        method=Method.CLOSED_FORM)


def asymptotic_model(cfg: SystemConfig) -> AsymptoticModel:
    """Large-Q outage decay prediction; requires a feasible power split."""
    thr = derive_thresholds(cfg)
    if not thr.noma_feasible:
        raise InfeasibleError("a1 must exceed eps1 * a2 for asymptotics")
    margin = cfg.a1 - thr.eps1 * cfg.a2
    beta = margin / (thr.phi * cfg.omega_sp * thr.eps1)
    beta_dagger = max(thr.eps1 / margin, thr.eps2 / cfg.a2)
    exponent = -min(cfg.n_r, cfg.n_d)
    return AsymptoticModel(beta=beta, beta_dagger=beta_dagger,
                           decay_exponent_s1=exponent,
                           decay_exponent_s2=exponent)
