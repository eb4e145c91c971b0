"""Independent evaluation of the rate integrals by adaptive quadrature.

This is the anti-drift oracle for the closed forms in :mod:`crsnoma.analytic`:
it integrates the defining expressions

    C_s1 = 0.5 [ int log2(1+Qx) f_X(x) dx - int log2(1+a2*Q*x) f_X(x) dx ]
    C_s2 = (0.5 Q / ln 2) int (1 - F_Y(x)) / (1 + Qx) dx

directly against the channel densities, over the semi-infinite domain via
the rational map x = t/(1-t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .channels import (
    LinkGainDistribution,
    RatioDistribution,
    combined_gain_distribution,
    min_pair_survival,
    ratio_pdf,
)
from .channels import GainFamily
from .model import SystemConfig

LN2 = math.log(2.0)


class ToleranceError(ArithmeticError):
    """Quadrature could not meet the requested tolerance."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_SETTINGS = QuadratureSettings()


def integrate_halfline(fn, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Integrate fn over [0, inf) through the x = t/(1-t) transform."""

    def transformed(t):
        x = t / (1.0 - t)
        return fn(x) / (1.0 - t) ** 2

    value, abserr, *_ = quad(
        transformed, 0.0, 1.0,
        epsabs=settings.abs_tol, epsrel=settings.rel_tol,
        limit=settings.max_subdivisions, full_output=True,
    )
    if abserr > 10.0 * max(settings.abs_tol, settings.rel_tol * abs(value)):
        raise ToleranceError(
            f"achieved error estimate {abserr:.3e} exceeds tolerance", abserr)
    return value


def x_ratio_distribution(cfg: SystemConfig) -> RatioDistribution:
    """Ratio of the weaker first-slot combined gain to the s-p interference gain."""
    return RatioDistribution(
        numerator=combined_gain_distribution(cfg, "sr"),
        denominator=LinkGainDistribution(GainFamily.EXP, cfg.omega_sp),
        partner=combined_gain_distribution(cfg, "sd"),
    )


def y_ratio_distributions(cfg: SystemConfig):
    """The two independent arms of the second-symbol effective gain."""
    relay_arm = RatioDistribution(
        numerator=combined_gain_distribution(cfg, "sr"),
        denominator=LinkGainDistribution(GainFamily.EXP, cfg.omega_sp),
        scale_factor=cfg.a2,
    )
    hop_arm = RatioDistribution(
        numerator=combined_gain_distribution(cfg, "rd"),
        denominator=LinkGainDistribution(GainFamily.EXP, cfg.omega_rp),
    )
    return relay_arm, hop_arm


def quad_rate_s1(cfg: SystemConfig,
                 settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """First-symbol average rate as the difference of the two log integrals."""
    dist = x_ratio_distribution(cfg)
    q = cfg.q_peak

    def log_integral(gain):
        return integrate_halfline(
            lambda x: math.log2(1.0 + gain * x) * ratio_pdf(dist, x), settings)

    return 0.5 * (log_integral(q) - log_integral(cfg.a2 * q))


def quad_rate_s2(cfg: SystemConfig,
                 settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Second-symbol average rate from the survival form of the min ratio."""
    relay_arm, hop_arm = y_ratio_distributions(cfg)
    q = cfg.q_peak
    value = integrate_halfline(
        lambda x: min_pair_survival(relay_arm, hop_arm, x) / (1.0 + q * x),
        settings)
    return 0.5 * q / LN2 * value
