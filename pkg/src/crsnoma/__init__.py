"""Rate and outage analysis for spectrum-sharing cooperative-relaying NOMA
under a peak interference constraint.

Closed-form expressions live in :mod:`crsnoma.analytic` and are validated
against two independent oracles: adaptive quadrature of the defining
integrals (:mod:`crsnoma.quad_oracle`) and a seeded Monte Carlo simulation
of the two-slot protocol (:mod:`crsnoma.simulator`).
"""

__version__ = "0.1.0"

from .model import (
    AsymptoticModel,
    Combiner,
    ConfigError,
    DerivedThresholds,
    SystemConfig,
    derive_thresholds,
    q_from_db,
)
from .analytic import (
    InfeasibleError,
    Method,
    OutageReport,
    RateReport,
    asymptotic_model,
    outage_report,
    outage_s1,
    outage_s2,
    rate_report,
    rate_s1,
    rate_s2,
)
from .quad_oracle import QuadratureSettings, quad_rate_s1, quad_rate_s2
from .simulator import McEstimate, Scheme, mc_estimates, mc_outage, mc_rate
from .optimizer import PowerSearchSpec, SearchMetric, optimize_a2

__all__ = [
    "AsymptoticModel", "Combiner", "ConfigError", "DerivedThresholds",
    "InfeasibleError", "McEstimate", "Method", "OutageReport",
    "PowerSearchSpec", "QuadratureSettings", "RateReport", "Scheme",
    "SearchMetric", "SystemConfig", "asymptotic_model", "derive_thresholds",
    "mc_estimates", "mc_outage", "mc_rate", "optimize_a2", "outage_report",
    "outage_s1", "outage_s2", "q_from_db", "quad_rate_s1", "quad_rate_s2",
    "rate_report", "rate_s1", "rate_s2",
]
