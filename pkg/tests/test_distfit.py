import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtr

from covbond.distfit import (
    LocScaleParams,
    MeanVarTarget,
    QuantileESTarget,
    fit_locscale_quantile_es,
    fit_lognormal_quantile_es,
    fit_normal_quantile_es,
    lognormal_es,
    lognormal_quantile,
    lognormal_s_lower_bounds,
    lognormal_scale_equation,
    lognormal_scale_upper_bound,
    mv_fit_beta,
    mv_fit_locscale,
    mv_fit_lognormal,
    mv_fit_vasicek,
    normal_es,
)
from covbond.errors import InfeasibleMoments
from covbond.numerics import bivariate_normal_cdf, std_normal_cdf, std_normal_inv_cdf
from golden import LOGNORMAL_ES_0_1_001

targets = st.builds(
    lambda alpha, logq, ratio: QuantileESTarget(alpha, math.exp(logq), math.exp(logq) * ratio),
    st.floats(1e-4, 0.99),
    st.floats(-7, 7),
    st.floats(1e-4, 1 - 1e-4),
)


class TestTargets:
    def test_pd_lgd_mapping(self):
        t = QuantileESTarget.from_pd_lgd(0.01, 0.45, 0.36)
        assert (t.alpha, t.q) == (0.01, 0.36)
        assert t.t == pytest.approx(0.36 * 0.55, rel=1e-15)
        assert QuantileESTarget.from_pd_el(0.01, 0.0045, 0.36).t == pytest.approx(t.t, rel=1e-15)

    @pytest.mark.parametrize("alpha,q,t", [(0.0, 1, 0.5), (1.0, 1, 0.5), (0.1, 1, 1), (0.1, 1, 2)])
    def test_rejects_invalid(self, alpha, q, t):
        with pytest.raises(ValueError):
            QuantileESTarget(alpha, q, t)


class TestLocScale:
    def test_identity(self):
        a = std_normal_inv_cdf(0.05)
        p = fit_locscale_quantile_es(QuantileESTarget(0.05, a, normal_es(0.05)), a, normal_es(0.05))
        assert (p.m, p.s) == pytest.approx((0.0, 1.0), abs=1e-15)

    def test_linear_solve(self):
        p = fit_locscale_quantile_es(QuantileESTarget(0.3, 3.0, 1.0), 1.0, 0.0)
        assert (p.m, p.s) == (1.0, 2.0)

    def test_standard_normal_generator(self):
        gq, ges = std_normal_inv_cdf(0.05), normal_es(0.05)
        assert ges == pytest.approx(-2.0627, abs=1e-4)
        # four-decimal inputs carry about 3e-4 of rounding error into (m, s)
        p = fit_locscale_quantile_es(QuantileESTarget(0.05, -1.6449, -2.0627), gq, ges)
        assert (p.m, p.s) == pytest.approx((0.0, 1.0), abs=1e-3)
        p = fit_locscale_quantile_es(QuantileESTarget(0.05, gq, ges), gq, ges)
        assert (p.m, p.s) == pytest.approx((0.0, 1.0), abs=1e-12)

    @pytest.mark.parametrize("q,t,expected", [
        (-1.6449, -2.0627, (0, 1)),
        (1 - 1.6449, 1 - 2.0627, (1, 1)),
        (-3.2897, -4.1255, (0, 2)),
    ])
    def test_normal_fit(self, q, t, expected):
        p = fit_normal_quantile_es(QuantileESTarget(0.05, q, t))
        assert (p.m, p.s) == pytest.approx(expected, abs=1e-3)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 0.999), st.floats(-10, 10), st.floats(0.01, 10), st.floats(-5, 5), st.floats(0.1, 5))
    def test_normal_equivariance(self, alpha, m, s, shift, scale):
        a = std_normal_inv_cdf(alpha)
        q, t = m + s * a, m + s * normal_es(alpha)
        p = fit_normal_quantile_es(QuantileESTarget(alpha, q, t))
        assert (p.m, p.s) == pytest.approx((m, s), abs=1e-9 * (1 + abs(m) + s))
        p2 = fit_normal_quantile_es(QuantileESTarget(alpha, shift + scale * q, shift + scale * t))
        assert p2.m == pytest.approx(shift + scale * p.m, abs=1e-8 * (1 + abs(shift) + scale * abs(p.m)))
        assert p2.s == pytest.approx(scale * p.s, rel=1e-9)


class TestLognormal:
    def test_es_closed_form(self):
        assert lognormal_es(LocScaleParams(0, 1), 0.01) == pytest.approx(LOGNORMAL_ES_0_1_001, rel=1e-14)

    def test_es_bounds_and_limit(self):
        p = LocScaleParams(0.3, 0.8)
        for alpha in (1e-4, 0.01, 0.2, 0.7):
            assert 0 < lognormal_es(p, alpha) < lognormal_quantile(p, alpha)
        assert lognormal_es(p, 1 - 1e-12) == pytest.approx(math.exp(0.3 + 0.32), rel=1e-9)

    def test_es_against_monte_carlo(self):
        p, alpha = LocScaleParams(-0.2, 0.6), 0.05
        x = np.exp(p.m + p.s * np.random.default_rng(11).standard_normal(10_000_000))
        tail = x[x <= lognormal_quantile(p, alpha)]
        se = tail.std(ddof=1) / math.sqrt(tail.size)
        assert abs(tail.mean() - lognormal_es(p, alpha)) < 3 * se

    def test_round_trip_unit(self):
        p0 = LocScaleParams(0.0, 1.0)
        t = QuantileESTarget(0.01, lognormal_quantile(p0, 0.01), lognormal_es(p0, 0.01))
        p = fit_lognormal_quantile_es(t)
        assert (p.m, p.s) == pytest.approx((0.0, 1.0), abs=1e-12)

    def test_cover_pool_inputs(self):
        p = fit_lognormal_quantile_es(QuantileESTarget.from_pd_el(0.01, 0.0045, 0.36))
        assert std_normal_cdf((math.log(0.36) - p.m) / p.s) == pytest.approx(0.01, rel=1e-12)
        assert lognormal_es(p, 0.01) == pytest.approx(0.36 * 0.55, rel=1e-12)

    def test_rejects_non_positive_es(self):
        with pytest.raises(ValueError):
            fit_lognormal_quantile_es(QuantileESTarget(0.1, 1.0, -0.5))

    @settings(max_examples=300, deadline=None)
    @given(targets)
    def test_fit_properties(self, target):
        p = fit_lognormal_quantile_es(target)
        a = std_normal_inv_cdf(target.alpha)
        b = target.alpha * target.t / target.q
        assert abs(lognormal_scale_equation(p.s, a, b)) <= 1e-12
        assert lognormal_s_lower_bounds(target) < p.s < lognormal_scale_upper_bound(a, b)
        assert lognormal_quantile(p, target.alpha) == pytest.approx(target.q, rel=1e-10)
        assert lognormal_es(p, target.alpha) == pytest.approx(target.t, rel=1e-10)
        if target.t < target.q / 2:
            assert math.exp(p.m - p.s ** 2) < target.q

    @settings(max_examples=100, deadline=None)
    @given(targets, st.floats(-5, 5))
    def test_scale_invariance(self, target, shift):
        # multiplying q and t by e^c shifts m by c and leaves s unchanged
        p = fit_lognormal_quantile_es(target)
        c = math.exp(shift)
        p2 = fit_lognormal_quantile_es(QuantileESTarget(target.alpha, c * target.q, c * target.t))
        assert p2.s == pytest.approx(p.s, rel=1e-9)
        assert p2.m == pytest.approx(p.m + shift, abs=1e-8 * (1 + abs(p.m) + p.s))


class TestLowerBounds:
    def test_small_alpha_mode_bound(self):
        bound = lognormal_s_lower_bounds(QuantileESTarget(0.001, 1.0, 0.4))
        assert bound > 3
        assert fit_lognormal_quantile_es(QuantileESTarget(0.001, 1.0, 0.4)).s > bound

    def test_no_constraint(self):
        # t >= q/2 and a^2 < 2 log(q/t)
        t = QuantileESTarget(0.3, 1.0, 0.6)
        assert std_normal_inv_cdf(0.3) ** 2 < 2 * math.log(1 / 0.6)
        assert lognormal_s_lower_bounds(t) == 0.0

    def test_both_candidates(self):
        t = QuantileESTarget(0.01, 1.0, 0.4)
        a = std_normal_inv_cdf(0.01)
        candidates = [-a, a + math.sqrt(a * a - 2 * math.log(2.5))]
        assert lognormal_s_lower_bounds(t) == pytest.approx(max(candidates), rel=1e-15)
        assert fit_lognormal_quantile_es(t).s > lognormal_s_lower_bounds(t)

    def test_quadratic_bound_not_used_above_median(self):
        # the fit lies below the smaller root of the quadratic here
        t = QuantileESTarget(0.954, 0.1646, 0.1450)
        a = std_normal_inv_cdf(t.alpha)
        s = fit_lognormal_quantile_es(t).s
        assert s < a - math.sqrt(a * a - 2 * math.log(t.q / t.t))
        assert lognormal_s_lower_bounds(t) < s


class TestMeanVariance:
    def test_locscale(self):
        assert mv_fit_locscale(MeanVarTarget(2.0, 9.0), 0.0, 1.0) == LocScaleParams(2.0, 3.0)
        p = mv_fit_locscale(MeanVarTarget(0.5, 0.8), 0.0, 2.0)
        assert p.s == pytest.approx(math.sqrt(0.4), rel=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-100, 100), st.floats(1e-6, 100), st.floats(-3, 3), st.floats(0.1, 10))
    def test_locscale_round_trip(self, mu, sigma2, gm, gv):
        p = mv_fit_locscale(MeanVarTarget(mu, sigma2), gm, gv)
        assert p.m + p.s * gm == pytest.approx(mu, abs=1e-12 * (1 + abs(mu) + p.s * abs(gm)))
        assert p.s * p.s * gv == pytest.approx(sigma2, rel=1e-14)

    def test_lognormal_examples(self):
        p = mv_fit_lognormal(MeanVarTarget(1.0, math.e - 1))
        assert (p.m, p.s) == pytest.approx((-0.5, 1.0), abs=1e-14)
        p = mv_fit_lognormal(MeanVarTarget(math.exp(0.5), (math.e - 1) * math.e))
        assert (p.m, p.s) == pytest.approx((0.0, 1.0), abs=1e-14)
        p = mv_fit_lognormal(MeanVarTarget(2.0, 4e-12))
        assert p.s == pytest.approx(1e-6, rel=1e-6)
        assert p.m == pytest.approx(math.log(2.0), abs=1e-11)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(1e-4, 10))
    def test_lognormal_round_trip(self, mu, cv2):
        sigma2 = cv2 * mu * mu
        p = mv_fit_lognormal(MeanVarTarget(mu, sigma2))
        mean = math.exp(p.m + 0.5 * p.s ** 2)
        var = math.expm1(p.s ** 2) * math.exp(2 * p.m + p.s ** 2)
        assert mean == pytest.approx(mu, rel=1e-12)
        assert var == pytest.approx(sigma2, rel=1e-12)

    def test_vasicek_examples(self):
        assert mv_fit_vasicek(MeanVarTarget(0.5, 0.05)).m == 0.0
        p = mv_fit_vasicek(MeanVarTarget(0.5, bivariate_normal_cdf(0, 0, 0.5) - 0.25))
        assert p.s == pytest.approx(1.0, abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.001, 0.999), st.floats(1e-4, 0.99))
    def test_vasicek_residual(self, mu, frac):
        sigma2 = frac * mu * (1 - mu)
        p = mv_fit_vasicek(MeanVarTarget(mu, sigma2))
        assert p.mean == pytest.approx(mu, abs=1e-15)
        assert abs(p.var - sigma2) <= 1e-10

    def test_vasicek_monte_carlo(self):
        p = mv_fit_vasicek(MeanVarTarget(0.2, 0.01))
        y = ndtr(p.location + p.s * np.random.default_rng(5).standard_normal(10_000_000))
        n = y.size
        assert abs(y.mean() - 0.2) < 3 * y.std() / math.sqrt(n)
        # SE of the sample variance from the fourth central moment
        c = y - y.mean()
        se_var = math.sqrt((np.mean(c ** 4) - np.mean(c ** 2) ** 2) / n)
        assert abs(y.var() - 0.01) < 3 * se_var

    @pytest.mark.parametrize("mu,sigma2,expected", [(0.5, 1 / 12, (1.0, 1.0)), (0.5, 0.05, (2.0, 2.0))])
    def test_beta_examples(self, mu, sigma2, expected):
        p = mv_fit_beta(MeanVarTarget(mu, sigma2))
        assert (p.a, p.b) == pytest.approx(expected, rel=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.001, 0.999), st.floats(1e-4, 0.999))
    def test_beta_round_trip(self, mu, frac):
        sigma2 = frac * mu * (1 - mu)
        p = mv_fit_beta(MeanVarTarget(mu, sigma2))
        assert p.mean == pytest.approx(mu, rel=1e-13)
        assert p.var == pytest.approx(sigma2, rel=1e-12)

    @pytest.mark.parametrize("fit", [mv_fit_beta, mv_fit_vasicek])
    @pytest.mark.parametrize("mu,sigma2", [(0.5, 0.25), (0.2, 0.2), (0.0, 0.01), (1.0, 0.01)])
    def test_unit_interval_infeasible(self, fit, mu, sigma2):
        with pytest.raises(InfeasibleMoments):
            fit(MeanVarTarget(mu, sigma2))

    def test_non_positive_variance(self):
        with pytest.raises(InfeasibleMoments):
            MeanVarTarget(0.5, 0.0)
        with pytest.raises(InfeasibleMoments):
            mv_fit_lognormal(MeanVarTarget(-1.0, 1.0))

