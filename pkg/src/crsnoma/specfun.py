"""Special functions needed by the multi-antenna (MRC) closed forms.

Only the parameter families that actually occur in the rate/outage
expressions are supported; this is not a general-purpose special-function
library.  The Meijer G and bivariate Meijer G evaluators integrate the
defining Mellin-Barnes representation along vertical contours:

    G(z) = (1/2*pi*i) int_L  prod Gamma(b_j - s) prod Gamma(1 - a_j + s)
                            ------------------------------------------- z^s ds
                             prod Gamma(1-b_j+s) prod Gamma(a_j - s)

with the contour shift chosen midway between the rightmost pole of the
Gamma(1-a_j+s) family ("left" poles) and the leftmost pole of the
Gamma(b_j-s) family ("right" poles).  The integrand decays like
exp(-delta*pi*|t|) with delta = m + n - (p+q)/2, so only patterns with
delta > 0 are accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma

MAX_SERIES_TERMS = 1_000_000


class ConvergenceError(ArithmeticError):
    """A series or contour integral failed to reach its target accuracy."""


class ContourError(ArithmeticError):
    """No vertical contour separates the two pole families."""


def pochhammer(x: float, n: int) -> float:
    """Rising factorial x (x+1) ... (x+n-1); empty product for n = 0."""
    if n < 0:
        raise ValueError("order must be a nonnegative integer")
    out = 1.0
    for k in range(n):
        out *= x + k
    return out


def _is_nonpos_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _hyp_series(alpha: float, beta: float, gamma_: float, w: float) -> float:
    """Power series sum_k (alpha)_k (beta)_k / ((gamma)_k k!) w^k for |w| < 1."""
    total = 1.0
    term = 1.0
    for k in range(MAX_SERIES_TERMS):
        term *= (alpha + k) * (beta + k) / ((gamma_ + k) * (k + 1.0)) * w
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
        if term == 0.0:
            return total
    raise ConvergenceError(
        f"hypergeometric series did not converge within {MAX_SERIES_TERMS} terms"
    )


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0.

    Arguments z < 0 are mapped into [0, 1) by a Pfaff transformation
    before summing the series; the transformation that produces a
    terminating series is preferred when one exists.
    """
    if z > 0:
        raise ValueError("only z <= 0 is supported")
    if _is_nonpos_int(c):
        raise ValueError("c must not be a nonpositive integer")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    w = z / (z - 1.0)
    one_minus_z = 1.0 - z
    # Pfaff variants: (1-z)^(-a) 2F1(a, c-b; c; w)  and  (1-z)^(-b) 2F1(c-a, b; c; w)
    if _is_nonpos_int(c - a) or _is_nonpos_int(b):
        return one_minus_z ** (-b) * _hyp_series(c - a, b, c, w)
    if _is_nonpos_int(c - b) or _is_nonpos_int(a):
        return one_minus_z ** (-a) * _hyp_series(a, c - b, c, w)
    return one_minus_z ** (-a) * _hyp_series(a, c - b, c, w)


@dataclass(frozen=True)
class MeijerGSpec:
    """Parameter block of a univariate Meijer G function G^{m,n}_{p,q}(z | a; b)."""

    m: int
    n: int
    p: int
    q: int
    a_params: tuple
    b_params: tuple
    argument: float

    def __post_init__(self):
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError("need m <= q and n <= p")
        if len(self.a_params) != self.p or len(self.b_params) != self.q:
            raise ValueError("parameter lists must have lengths p and q")
        if not self.argument > 0:
            raise ValueError("argument must be positive")


def _contour_gap(spec: MeijerGSpec) -> tuple[float, float]:
    a, b = spec.a_params, spec.b_params
    left = max(a[: spec.n]) - 1.0 if spec.n else -math.inf
    right = min(b[: spec.m]) if spec.m else math.inf
    return left, right


def meijer_g(spec: MeijerGSpec) -> float:
    """Evaluate a Meijer G function by Mellin-Barnes contour quadrature."""
    delta = spec.m + spec.n - 0.5 * (spec.p + spec.q)
    if delta <= 0:
        raise ContourError(
            f"contour integral does not converge for this pattern (delta={delta})"
        )
    left, right = _contour_gap(spec)
    if not left < right:
        raise ContourError(
            f"pole families overlap: left poles up to {left}, right poles from {right}"
        )
    if math.isinf(left) or math.isinf(right):
        shift = right - 0.5 if math.isinf(left) else left + 0.5
    else:
        shift = 0.5 * (left + right)

    a, b, m, n = spec.a_params, spec.b_params, spec.m, spec.n
    lnz = math.log(spec.argument)

    def integrand(t: float) -> float:
        s = shift + 1j * t
        log_num = sum(loggamma(bj - s) for bj in b[:m])
        log_num += sum(loggamma(1.0 - aj + s) for aj in a[:n])
        log_den = sum(loggamma(1.0 - bj + s) for bj in b[m:])
        log_den += sum(loggamma(aj - s) for aj in a[n:])
        return np.exp(log_num - log_den + s * lnz).real

    # the Gamma envelope decays like exp(-delta*pi*t); past t_max the tail
    # is below 1e-60 of the scale
    t_max = max(24.0, 44.0 / delta)
    value, abserr, *_ = quad(
        integrand, 0.0, t_max, epsabs=1e-14, epsrel=1e-13, limit=800,
        full_output=True,
    )
    value /= math.pi
    if abserr / math.pi > 1e-9 * max(1.0, abs(value)):
        raise ConvergenceError(
            f"contour quadrature error estimate {abserr / math.pi:.2e} too large"
        )
    return value


@dataclass(frozen=True)
class EgbmgfSpec:
    """Parameters of the bivariate Meijer G template G^{1,1:1,2:1,2}_{1,1:2,2:2,2}.

    ``joint_a``/``joint_b`` form the shared block coupling the two Mellin
    variables; ``outer_*`` and ``inner_*`` are the (a; b) blocks attached to
    the first and second argument respectively.
    """

    joint_a: float
    joint_b: float
    outer_a: tuple
    outer_b: tuple
    inner_a: tuple
    inner_b: tuple
    x: float
    y: float

    def __post_init__(self):
        if len(self.outer_a) != 2 or len(self.outer_b) != 2:
            raise ValueError("outer block must carry two upper and two lower parameters")
        if len(self.inner_a) != 2 or len(self.inner_b) != 2:
            raise ValueError("inner block must carry two upper and two lower parameters")
        if not (self.x > 0 and self.y > 0):
            raise ValueError("both arguments must be positive")


def _egbmgf_contours(spec: EgbmgfSpec) -> tuple[float, float]:
    """Pick contour shifts (c_s, c_t) maximizing clearance from all pole lines."""
    s_left = max(spec.outer_a) - 1.0
    s_right = spec.outer_b[0]
    t_left = max(spec.inner_a) - 1.0
    t_right = spec.inner_b[0]
    joint_left = spec.joint_a - 1.0
    joint_right = spec.joint_b
    if not (s_left < s_right and t_left < t_right):
        raise ContourError("pole families overlap in a univariate block")

    best = None
    for frac in np.linspace(0.05, 0.95, 37):
        cs = s_left + frac * (s_right - s_left)
        lo = max(t_left, joint_left - cs)
        hi = min(t_right, joint_right - cs)
        if lo >= hi:
            continue
        ct = 0.5 * (lo + hi)
        clearance = min(cs - s_left, s_right - cs, ct - t_left, t_right - ct,
                        cs + ct - joint_left, joint_right - cs - ct)
        if best is None or clearance > best[0]:
            best = (clearance, cs, ct)
    if best is None or best[0] <= 0:
        raise ContourError("no vertical contour pair separates the pole families")
    return best[1], best[2]


def _egbmgf_grid_value(spec: EgbmgfSpec, cs: float, ct: float,
                       h: float, t_max: float) -> float:
    """Trapezoidal value of the double contour integral on step h.

    The integrand satisfies F(-u,-v) = conj(F(u,v)), so the v < 0
    half-plane contributes the conjugate of the v > 0 half and the full
    integral equals twice the real part of the v >= 0 half.
    """
    u = np.arange(-t_max, t_max + 0.5 * h, h)
    v = np.arange(0.0, t_max + 0.5 * h, h)
    s = cs + 1j * u[:, None]
    t = ct + 1j * v[None, :]
    w = s + t
    log_f = (
        loggamma(1.0 - spec.joint_a + w) + loggamma(spec.joint_b - w)
        + loggamma(spec.outer_b[0] - s)
        + loggamma(1.0 - spec.outer_a[0] + s) + loggamma(1.0 - spec.outer_a[1] + s)
        - loggamma(1.0 - spec.outer_b[1] + s)
        + loggamma(spec.inner_b[0] - t)
        + loggamma(1.0 - spec.inner_a[0] + t) + loggamma(1.0 - spec.inner_a[1] + t)
        - loggamma(1.0 - spec.inner_b[1] + t)
        + s * math.log(spec.x) + t * math.log(spec.y)
    )
    rows = np.trapezoid(np.exp(log_f), dx=h, axis=0)
    half_plane = np.trapezoid(rows, dx=h)
    return 2.0 * half_plane.real / (4.0 * math.pi ** 2)


def egbmgf(spec: EgbmgfSpec, rel_tol: float = 2e-6) -> float:
    """Extended bivariate Meijer G function by nested Mellin-Barnes quadrature.

    Halves the trapezoidal step until two successive grids agree to
    ``rel_tol``; trapezoid error on these contours shrinks like
    exp(-2*pi*d/h), so the returned finer-grid value is far more accurate
    than the agreement check itself.  Raises :class:`ConvergenceError`
    when the grids never agree, in which case callers fall back to direct
    quadrature of the underlying integral.
    """
    cs, ct = _egbmgf_contours(spec)
    t_max = 26.0
    previous = None
    h = 0.25
    for _ in range(4):
        value = _egbmgf_grid_value(spec, cs, ct, h, t_max)
        if previous is not None and abs(value - previous) <= rel_tol * max(abs(value), 1e-300):
            return value
        previous = value
        h *= 0.5
    raise ConvergenceError(
        "double contour quadrature did not converge while refining the grid"
    )
