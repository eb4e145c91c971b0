"""One-dimensional grid search over the weak-symbol power weight a2.

Candidates cover the feasible range (0, 2^(-2*r1)) on a uniform grid; every
candidate keeps the first symbol's SIC constraint satisfiable by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .analytic import rate_report
from .model import SystemConfig, a2_feasible_bound
from .simulator import Scheme, mc_rate


class SearchMetric(Enum):
    SUM_RATE_CLOSED = "sum_rate_closed"
    SUM_RATE_MC = "sum_rate_mc"


class OptimizationError(RuntimeError):
    """A candidate evaluation failed; carries the curve built so far."""

    def __init__(self, message: str, partial_curve):
        super().__init__(message)
        self.partial_curve = partial_curve


@dataclass(frozen=True)
class PowerSearchSpec:
    m_points: int = 24
    metric: SearchMetric = SearchMetric.SUM_RATE_CLOSED
    mc_trials: int = 100_000
    mc_seed: int = 20_24

    def __post_init__(self):
        if self.m_points < 1:
            raise ValueError("m_points must be >= 1")


def candidate_a2_values(cfg: SystemConfig, spec: PowerSearchSpec):
    """The grid {eps, 2 eps, ..., M eps} with eps = 2^(-2 r1)/(M+1)."""
    step = a2_feasible_bound(cfg.r1) / (spec.m_points + 1)
    return [k * step for k in range(1, spec.m_points + 1)]


def _metric_value(cfg: SystemConfig, spec: PowerSearchSpec) -> float:
    if spec.metric is SearchMetric.SUM_RATE_CLOSED:
        return rate_report(cfg).c_sum
    return mc_rate(cfg, Scheme.NOMA, spec.mc_trials, spec.mc_seed).c_sum


def optimize_a2(cfg: SystemConfig, spec: PowerSearchSpec = PowerSearchSpec()):
    """Return (a2_best, best_metric, curve) with ties broken toward smaller a2."""
    curve = []
    best_a2 = None
    best_value = -float("inf")
    for a2 in candidate_a2_values(cfg, spec):
        try:
            candidate = replace(cfg, a1=1.0 - a2, a2=a2)
            value = _metric_value(candidate, spec)
        except Exception as exc:
            raise OptimizationError(
                f"candidate a2={a2:.6g} failed: {exc}", curve) from exc
        curve.append((a2, value))
        if value > best_value:
            best_a2, best_value = a2, value
    return best_a2, best_value, curve
