import math

import numpy as np
import pytest
from scipy.integrate import quad

from crsnoma.specfun import (
    ContourError,
    EgbmgfSpec,
    MeijerGSpec,
    egbmgf,
    gauss_2f1,
    meijer_g,
    pochhammer,
)


def log_kernel_spec(order, z):
    return MeijerGSpec(m=2, n=3, p=3, q=3,
                       a_params=(1.0 - order, 1.0, 1.0),
                       b_params=(1.0, 1.0, 0.0), argument=z)


def ln_pattern_spec(z):
    return MeijerGSpec(m=1, n=2, p=2, q=2, a_params=(1.0, 1.0),
                       b_params=(1.0, 0.0), argument=z)


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(5.0, 0) == 1.0

    def test_rising_factorial(self):
        assert pochhammer(2.0, 3) == 24.0

    def test_shifted(self):
        # (nu+1)_{N} with nu=1, N=2 -> 2*3
        assert pochhammer(2.0, 2) == 6.0

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            pochhammer(1.0, -1)


class TestGauss2f1:
    def test_at_zero(self):
        assert gauss_2f1(1.3, -2.2, 0.7, 0.0) == 1.0

    def test_degenerate_collapse_value(self):
        assert gauss_2f1(2.0, 1.0, 2.0, -1.0) == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
    def test_collapse_family(self, x):
        assert gauss_2f1(3.0, 2.0, 3.0, -x) == pytest.approx(
            (1.0 + x) ** -2, rel=1e-12)

    def test_random_collapse_identity(self):
        rng = np.random.default_rng(123)
        for _ in range(20):
            a = rng.uniform(0.3, 8.0)
            b = rng.uniform(0.3, 8.0)
            z = -rng.uniform(0.0, 50.0)
            assert gauss_2f1(a, b, a, z) == pytest.approx(
                (1.0 - z) ** -b, rel=1e-12)

    def test_generic_against_quadrature(self):
        # Euler integral representation for c > b > 0
        a, b, c, z = 1.7, 0.9, 2.4, -3.0

        def integrand(t):
            return (t ** (b - 1) * (1 - t) ** (c - b - 1)
                    * (1 - z * t) ** (-a))

        ref, _ = quad(integrand, 0, 1, epsabs=1e-14, epsrel=1e-13)
        ref *= math.gamma(c) / (math.gamma(b) * math.gamma(c - b))
        assert gauss_2f1(a, b, c, z) == pytest.approx(ref, rel=1e-11)

    def test_positive_argument_rejected(self):
        with pytest.raises(ValueError):
            gauss_2f1(1.0, 1.0, 2.0, 0.5)

    def test_nonpositive_integer_c_rejected(self):
        with pytest.raises(ValueError):
            gauss_2f1(1.0, 1.0, -2.0, -0.5)


class TestMeijerG:
    def test_ln_identity_at_e_minus_1(self):
        assert meijer_g(ln_pattern_spec(math.e - 1.0)) == pytest.approx(
            1.0, abs=1e-12)

    @pytest.mark.parametrize("z", np.logspace(-3, 3, 13).tolist())
    def test_ln_identity_grid(self, z):
        assert meijer_g(ln_pattern_spec(z)) == pytest.approx(
            math.log1p(z), rel=1e-10, abs=1e-10)

    def test_order_one_log_kernel(self):
        # reduces to c*ln(c)/(c-1)
        c = 2.0
        assert meijer_g(log_kernel_spec(1, c)) == pytest.approx(
            c * math.log(c) / (c - 1.0), rel=1e-12)

    def test_order_two_log_kernel_against_quadrature(self):
        # the full weighted-log integrand at order 2 and unit scales
        ref, _ = quad(lambda u: math.log1p(5.0 * u) * 2.0 * u / (1 + u) ** 3,
                      0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=500)
        ref *= math.gamma(3.0) / 2.0
        assert meijer_g(log_kernel_spec(2, 5.0)) == pytest.approx(ref, abs=1e-8)

    def test_pure_function(self):
        spec = log_kernel_spec(3, 37.0)
        assert meijer_g(spec) == meijer_g(spec)

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            MeijerGSpec(m=3, n=0, p=1, q=2, a_params=(1.0,),
                        b_params=(1.0, 0.0), argument=1.0)

    def test_nonpositive_argument_rejected(self):
        with pytest.raises(ValueError):
            ln_pattern_spec(0.0)

    def test_nonconvergent_pattern_raises(self):
        # delta = m + n - (p+q)/2 = 0: no exponential decay on the contour
        spec = MeijerGSpec(m=1, n=0, p=0, q=2, a_params=(),
                           b_params=(0.5, 0.0), argument=1.0)
        with pytest.raises(ContourError):
            meijer_g(spec)

    def test_overlapping_poles_raise(self):
        # leftmost right pole (b=0) below rightmost left pole (a-1=1)
        spec = MeijerGSpec(m=2, n=2, p=2, q=2, a_params=(2.0, 2.0),
                           b_params=(0.0, 0.0), argument=1.0)
        with pytest.raises(ContourError):
            meijer_g(spec)


def cross_spec(n1, n2, x, y):
    return EgbmgfSpec(joint_a=1.0 - n1 - n2, joint_b=1.0 - n2,
                      outer_a=(1.0, 1.0), outer_b=(1.0, 0.0),
                      inner_a=(-float(n2), 1.0 - n2),
                      inner_b=(0.0, -float(n2)), x=x, y=y)


def cross_term_direct(n1, s1, d1, n2, s2, d2, q):
    """Direct quadrature of the weighted-log cross integral."""

    def integrand(t):
        x = t / (1.0 - t)
        val = (math.log1p(q * x) * x ** (n1 + n2 - 1)
               * (s1 + d1 * x) ** -(n1 + 1) * (1.0 + d2 * x / s2) ** -n2)
        return val / (1.0 - t) ** 2

    pref = n1 * s1 * d1 ** n1 * (d2 / s2) ** n2
    val, _ = quad(integrand, 0, 1, epsabs=1e-13, epsrel=1e-12, limit=400)
    return pref * val


def cross_term_egbmgf(n1, s1, d1, n2, s2, d2, q):
    x = q * s1 / d1
    y = s1 * d2 / (d1 * s2)
    return (y ** n2 * egbmgf(cross_spec(n1, n2, x, y))
            / (math.gamma(n1) * math.gamma(n2)))


class TestEgbmgf:
    def test_unit_scale_instance_against_quadrature(self):
        mine = cross_term_egbmgf(1, 0.5, 1.0, 1, 1.0, 1.0, 1.0)
        ref = cross_term_direct(1, 0.5, 1.0, 1, 1.0, 1.0, 1.0)
        assert mine == pytest.approx(ref, rel=1e-6)

    @pytest.mark.parametrize("n1,n2,q", [(2, 2, 10.0), (3, 2, 100.0),
                                         (2, 3, 1.0), (4, 4, 100.0)])
    def test_reference_scales_against_quadrature(self, n1, n2, q):
        args = (n1, 0.2 * 10.0, 5.5, n2, 10.0, 5.5, q)
        assert cross_term_egbmgf(*args) == pytest.approx(
            cross_term_direct(*args), rel=1e-6)

    def test_argument_swap_symmetry(self):
        # exchanging the two ratio arms swaps the two cross terms
        a = (2, 2.0, 5.5, 3, 10.0, 5.5, 10.0)
        swapped = (3, 10.0, 5.5, 2, 2.0, 5.5, 10.0)
        assert cross_term_egbmgf(*a) == pytest.approx(
            cross_term_direct(*a), rel=1e-6)
        assert cross_term_egbmgf(*swapped) == pytest.approx(
            cross_term_direct(*swapped), rel=1e-6)

    def test_pure_function(self):
        spec = cross_spec(2, 2, 3.0, 0.5)
        assert egbmgf(spec) == egbmgf(spec)

    def test_invalid_arguments_rejected(self):
        with pytest.raises(ValueError):
            cross_spec(2, 2, -1.0, 0.5)
