import math

import numpy as np
import pytest
from scipy.integrate import quad

from crsnoma import Combiner
from crsnoma.channels import (
    ChannelRng,
    GainFamily,
    LinkGainDistribution,
    RatioDistribution,
    combined_gain_distribution,
    gain_cdf,
    gain_pdf,
    min_pair_survival,
    ratio_cdf,
    ratio_pdf,
    sample_block,
    sample_realization,
)

from _common import vi_config

EXP1 = LinkGainDistribution(GainFamily.EXP, 1.0)
MAX3_10 = LinkGainDistribution(GainFamily.MAX_OF_EXP, 10.0, 3)
GAMMA2_1 = LinkGainDistribution(GainFamily.GAMMA, 1.0, 2)

ALL_FAMILIES = [
    EXP1,
    LinkGainDistribution(GainFamily.EXP, 2.0),
    LinkGainDistribution(GainFamily.MAX_OF_EXP, 10.0, 2),
    MAX3_10,
    GAMMA2_1,
    LinkGainDistribution(GainFamily.GAMMA, 5.0, 3),
]


def exp_den(scale):
    return LinkGainDistribution(GainFamily.EXP, scale)


class TestGainDistributions:
    def test_exp_pdf_at_origin(self):
        assert gain_pdf(EXP1, 0.0) == 1.0

    def test_gamma_pdf_vanishes_at_origin(self):
        assert gain_pdf(GAMMA2_1, 0.0) == 0.0

    def test_max_pdf_matches_cdf_derivative(self):
        x, h = 5.0, 1e-5
        derivative = (gain_cdf(MAX3_10, x + h) - gain_cdf(MAX3_10, x - h)) / (2 * h)
        assert gain_pdf(MAX3_10, x) == pytest.approx(derivative, abs=1e-6)

    @pytest.mark.parametrize("dist", ALL_FAMILIES)
    def test_cdf_zero_at_origin(self, dist):
        assert gain_cdf(dist, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_exp_cdf_value(self):
        dist = LinkGainDistribution(GainFamily.EXP, 2.0)
        assert gain_cdf(dist, 2.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_gamma_cdf_value(self):
        assert gain_cdf(GAMMA2_1, 1.0) == pytest.approx(
            1.0 - 2.0 * math.exp(-1.0), rel=1e-12)

    @pytest.mark.parametrize("dist", ALL_FAMILIES)
    def test_cdf_monotone_and_normalized(self, dist):
        grid = np.linspace(0.0, 60.0 * dist.scale, 400)
        values = gain_cdf(dist, grid)
        assert np.all(np.diff(values) >= -1e-12)
        assert values[-1] == pytest.approx(1.0, abs=1e-9)
        assert np.all(gain_pdf(dist, grid) >= -1e-15)

    @pytest.mark.parametrize("dist", ALL_FAMILIES)
    def test_pdf_integrates_to_one(self, dist):
        val, _ = quad(lambda t: gain_pdf(dist, t / (1 - t)) / (1 - t) ** 2,
                      0, 1, epsabs=1e-12, epsrel=1e-11, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("op", [gain_pdf, gain_cdf])
    def test_negative_argument_rejected(self, op):
        with pytest.raises(ValueError):
            op(EXP1, -0.1)

    def test_order_one_reductions(self):
        grid = np.linspace(0.0, 20.0, 50)
        for family in (GainFamily.MAX_OF_EXP, GainFamily.GAMMA):
            dist = LinkGainDistribution(family, 3.0, 1)
            ref = LinkGainDistribution(GainFamily.EXP, 3.0)
            np.testing.assert_allclose(gain_pdf(dist, grid), gain_pdf(ref, grid),
                                       rtol=0, atol=1e-12)
            np.testing.assert_allclose(gain_cdf(dist, grid), gain_cdf(ref, grid),
                                       rtol=0, atol=1e-12)

    def test_exp_with_order_rejected(self):
        with pytest.raises(ValueError):
            LinkGainDistribution(GainFamily.EXP, 1.0, 2)


def make_ratio(num, den_scale, scale_factor=1.0, partner=None):
    return RatioDistribution(numerator=num, denominator=exp_den(den_scale),
                             scale_factor=scale_factor, partner=partner)


RATIO_CASES = [
    make_ratio(EXP1, 1.0),
    make_ratio(LinkGainDistribution(GainFamily.EXP, 10.0), 5.5, scale_factor=0.2),
    make_ratio(LinkGainDistribution(GainFamily.EXP, 10.0), 5.5,
               partner=LinkGainDistribution(GainFamily.EXP, 1.0)),
    make_ratio(LinkGainDistribution(GainFamily.MAX_OF_EXP, 10.0, 2), 5.5),
    make_ratio(LinkGainDistribution(GainFamily.MAX_OF_EXP, 10.0, 2), 5.5,
               partner=LinkGainDistribution(GainFamily.MAX_OF_EXP, 1.0, 3)),
    make_ratio(LinkGainDistribution(GainFamily.GAMMA, 10.0, 2), 5.5,
               scale_factor=0.2),
    make_ratio(LinkGainDistribution(GainFamily.GAMMA, 10.0, 2), 5.5,
               partner=LinkGainDistribution(GainFamily.GAMMA, 1.0, 3)),
]


class TestRatioDistributions:
    def test_min_exp_pair_density_at_origin(self):
        # min of exp(10) and exp(1) over exp(5.5): density at 0 is phi*omega
        ratio = make_ratio(LinkGainDistribution(GainFamily.EXP, 10.0), 5.5,
                           partner=LinkGainDistribution(GainFamily.EXP, 1.0))
        assert ratio_pdf(ratio, 0.0) == pytest.approx(6.05, rel=1e-12)

    def test_gamma_order_one_density_at_origin(self):
        ratio = make_ratio(LinkGainDistribution(GainFamily.GAMMA, 1.0, 1), 1.0)
        assert ratio_pdf(ratio, 0.0) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("ratio", RATIO_CASES)
    def test_density_normalized(self, ratio):
        val, _ = quad(lambda t: ratio_pdf(ratio, t / (1 - t)) / (1 - t) ** 2,
                      0, 1, epsabs=1e-12, epsrel=1e-11, limit=300)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_exp_ratio_cdf_value(self):
        # numerator scale 2, denominator scale 1, x=2 -> 2/(2+2)
        ratio = make_ratio(LinkGainDistribution(GainFamily.EXP, 2.0), 1.0)
        assert ratio_cdf(ratio, 2.0) == pytest.approx(0.5, rel=1e-12)

    def test_gamma_order_one_cdf_equals_exp_form(self):
        gamma_ratio = make_ratio(LinkGainDistribution(GainFamily.GAMMA, 2.0, 1), 1.0)
        exp_ratio = make_ratio(LinkGainDistribution(GainFamily.EXP, 2.0), 1.0)
        for x in np.linspace(0.0, 20.0, 20):
            assert ratio_cdf(gamma_ratio, float(x)) == pytest.approx(
                ratio_cdf(exp_ratio, float(x)), abs=1e-10)

    def test_max_ratio_cdf_limit(self):
        ratio = make_ratio(LinkGainDistribution(GainFamily.MAX_OF_EXP, 2.0, 2), 1.0)
        assert ratio_cdf(ratio, 1e9) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("ratio", RATIO_CASES)
    def test_cdf_matches_pdf_derivative(self, ratio):
        for x in (0.3, 1.7, 6.0):
            h = 1e-5 * max(1.0, x)
            derivative = (ratio_cdf(ratio, x + h) - ratio_cdf(ratio, x - h)) / (2 * h)
            assert ratio_pdf(ratio, x) == pytest.approx(derivative, abs=1e-5)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_gamma_cdf_collapse(self, n):
        # (cx)^n 2F1(n+1,n;n+1;-cx) equals (cx/(1+cx))^n
        ratio = make_ratio(LinkGainDistribution(GainFamily.GAMMA, 10.0, n), 5.5,
                           scale_factor=0.2)
        c = 5.5 / (0.2 * 10.0)
        for x in np.logspace(-2, 2, 9):
            expected = (c * x / (1.0 + c * x)) ** n
            assert ratio_cdf(ratio, float(x)) == pytest.approx(
                expected, rel=1e-10)

    def test_non_exponential_denominator_rejected(self):
        with pytest.raises(ValueError):
            RatioDistribution(numerator=EXP1, denominator=GAMMA2_1)

    def test_mismatched_partner_rejected(self):
        with pytest.raises(ValueError):
            make_ratio(GAMMA2_1, 1.0, partner=EXP1)


class TestMinPairSurvival:
    def setup_method(self):
        self.r1 = make_ratio(LinkGainDistribution(GainFamily.EXP, 1.0), 1.0)
        self.r2 = make_ratio(LinkGainDistribution(GainFamily.EXP, 1.0), 1.0)

    def test_at_origin(self):
        assert min_pair_survival(self.r1, self.r2, 0.0) == 1.0

    def test_unit_scale_value(self):
        assert min_pair_survival(self.r1, self.r2, 1.0) == pytest.approx(
            0.25, rel=1e-12)

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(42)
        n = 10 ** 6
        u1 = rng.exponential(1.0, n) / rng.exponential(1.0, n)
        u2 = rng.exponential(1.0, n) / rng.exponential(1.0, n)
        samples = np.minimum(u1, u2)
        for x in (0.5, 1.0, 3.0):
            p_hat = float((samples > x).mean())
            se = math.sqrt(p_hat * (1 - p_hat) / n)
            assert abs(min_pair_survival(self.r1, self.r2, x) - p_hat) < 3 * se


class TestSampling:
    def test_law_of_large_numbers(self):
        cfg = vi_config()
        rng = ChannelRng.from_seed(99)
        block = sample_block(cfg, rng, 10 ** 6)
        assert abs(block.gains_sr.mean() - 10.0) < 3.0 * 10.0 / 1000.0

    def test_identical_seeds_identical_draws(self):
        cfg = vi_config(n_r=2, n_d=3, combiner=Combiner.SC)
        one = sample_realization(cfg, ChannelRng.from_seed(5))
        two = sample_realization(cfg, ChannelRng.from_seed(5))
        assert one.lambda_sp == two.lambda_sp
        assert one.lambda_rp == two.lambda_rp
        np.testing.assert_array_equal(one.gains_sr, two.gains_sr)
        np.testing.assert_array_equal(one.gains_sd, two.gains_sd)
        np.testing.assert_array_equal(one.gains_rd, two.gains_rd)

    def test_rng_advances(self):
        cfg = vi_config()
        rng = ChannelRng.from_seed(5)
        first = sample_realization(cfg, rng)
        second = sample_realization(cfg, rng)
        assert first.lambda_sp != second.lambda_sp

    def test_max_gain_empirical_cdf(self):
        cfg = vi_config(n_r=3, n_d=1, combiner=Combiner.SC)
        rng = ChannelRng.from_seed(11)
        block = sample_block(cfg, rng, 10 ** 6)
        best = block.gains_sr.max(axis=1)
        dist = LinkGainDistribution(GainFamily.MAX_OF_EXP, 10.0, 3)
        for x in (1.0, 5.0, 20.0):
            p = gain_cdf(dist, x)
            p_hat = float((best <= x).mean())
            se = math.sqrt(p * (1 - p) / best.size)
            assert abs(p - p_hat) < 3 * se

    def test_all_gains_nonnegative_and_shaped(self):
        cfg = vi_config(n_r=2, n_d=3, combiner=Combiner.MRC)
        block = sample_block(cfg, ChannelRng.from_seed(1), 1000)
        assert block.gains_sr.shape == (1000, 2)
        assert block.gains_sd.shape == (1000, 3)
        assert block.gains_rd.shape == (1000, 3)
        assert np.all(block.lam_sp > 0) and np.all(block.lam_rp > 0)
        assert np.all(block.gains_sr >= 0)


class TestCombinedGainDistribution:
    def test_single(self):
        dist = combined_gain_distribution(vi_config(), "sr")
        assert dist.family is GainFamily.EXP and dist.scale == 10.0

    def test_sc_and_mrc(self):
        sc = combined_gain_distribution(
            vi_config(n_r=2, n_d=3, combiner=Combiner.SC), "sd")
        assert sc.family is GainFamily.MAX_OF_EXP and sc.order == 3
        mrc = combined_gain_distribution(
            vi_config(n_r=2, n_d=3, combiner=Combiner.MRC), "sr")
        assert mrc.family is GainFamily.GAMMA and mrc.order == 2
