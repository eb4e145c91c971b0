"""Scenario parameters and the decoding thresholds derived from them.

Every other module consumes these immutable value types.  Powers and
mean-square gains are linear (not dB); target rates are in bits/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

#: absolute tolerance on a1 + a2 = 1 (inputs come from decimal config files)
ALLOC_TOL = 1e-12


class ConfigError(ValueError):
    """A scenario configuration violates a model constraint."""


class Combiner(Enum):
    SINGLE = "single"
    SC = "sc"
    MRC = "mrc"


def q_from_db(q_db: float) -> float:
    """Convert a peak interference power from dB to linear."""
    return 10.0 ** (q_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """All parameters of one operating point.

    ``omega_*`` are per-branch mean-square channel gains, ``q_peak`` is the
    peak interference power the primary receiver tolerates, ``a1``/``a2``
    split the transmit power between the two multiplexed symbols, and
    ``n_r``/``n_d`` are the receive antenna counts at the relay and the
    secondary receiver.
    """

    omega_sr: float
    omega_sd: float
    omega_rd: float
    omega_sp: float
    omega_rp: float
    q_peak: float
    a1: float = 0.8
    a2: float = 0.2
    n_r: int = 1
    n_d: int = 1
    r1: float = 1.0
    r2: float = 1.0
    combiner: Combiner = Combiner.SINGLE

    def __post_init__(self):
        for name in ("omega_sr", "omega_sd", "omega_rd", "omega_sp",
                     "omega_rp", "q_peak"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0
                    and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite positive number")
        if not (0.0 < self.a1 < 1.0 and 0.0 < self.a2 < 1.0):
            raise ConfigError("power weights a1, a2 must lie in (0, 1)")
        if abs(self.a1 + self.a2 - 1.0) > ALLOC_TOL:
            raise ConfigError("power weights must satisfy a1 + a2 = 1")
        if not self.a1 > self.a2:
            raise ConfigError("a1 must exceed a2")
        if not self.omega_sd < self.omega_sr:
            raise ConfigError("omega_sd must be smaller than omega_sr")
        if not (isinstance(self.n_r, int) and self.n_r >= 1
                and isinstance(self.n_d, int) and self.n_d >= 1):
            raise ConfigError("antenna counts must be integers >= 1")
        if self.r1 <= 0 or self.r2 <= 0:
            raise ConfigError("target rates must be positive")
        if not isinstance(self.combiner, Combiner):
            raise ConfigError("combiner must be a Combiner value")
        if self.combiner is Combiner.SINGLE and (self.n_r != 1 or self.n_d != 1):
            raise ConfigError("SINGLE combiner requires n_r = n_d = 1")


@dataclass(frozen=True)
class DerivedThresholds:
    """SINR thresholds and rate constants derived from a config.

    ``theta1`` is +inf when the power split cannot support the first
    symbol's target rate (``noma_feasible`` False); downstream outage
    formulas then evaluate to 1 in the limit.
    """

    eps1: float
    eps2: float
    theta1: float
    theta2: float
    theta: float
    phi: float
    noma_feasible: bool
    omega_sr: float
    omega_sd: float

    def xi(self, k: int, j: int) -> float:
        """Decay rate of the k-th/j-th order statistic pair: k/omega_sr + j/omega_sd."""
        return k / self.omega_sr + j / self.omega_sd


@dataclass(frozen=True)
class AsymptoticModel:
    """Predicted large-Q outage behavior."""

    beta: float
    beta_dagger: float
    decay_exponent_s1: int
    decay_exponent_s2: int


def derive_thresholds(cfg: SystemConfig) -> DerivedThresholds:
    """Compute the SINR thresholds and rate constants for a valid config."""
    if not isinstance(cfg, SystemConfig):
        raise ConfigError("expected a SystemConfig")
    eps1 = 2.0 ** (2.0 * cfg.r1) - 1.0
    eps2 = 2.0 ** (2.0 * cfg.r2) - 1.0
    margin = cfg.a1 - eps1 * cfg.a2
    feasible = margin > 0.0
    theta1 = eps1 / (cfg.q_peak * margin) if feasible else math.inf
    theta2 = eps2 / (cfg.a2 * cfg.q_peak)
    return DerivedThresholds(
        eps1=eps1,
        eps2=eps2,
        theta1=theta1,
        theta2=theta2,
        theta=max(theta1, theta2),
        phi=1.0 / cfg.omega_sr + 1.0 / cfg.omega_sd,
        noma_feasible=feasible,
        omega_sr=cfg.omega_sr,
        omega_sd=cfg.omega_sd,
    )


def a2_feasible_bound(r1: float) -> float:
    """Largest a2 for which the first symbol's SIC constraint can hold."""
    return 2.0 ** (-2.0 * r1)
