import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardykit import Kind, RadialGrid, WeightFamily, eval_mu, log_derivatives, weighted_integral
from hardykit.errors import DivergentIntegral, InvalidParams, NonPositiveRadius
from hardykit.weights import RadialBump, log_mu, smooth_transition

from conftest import fd_log_derivatives


class TestEvalMu:
    def test_lebesgue_is_one(self, leb3):
        assert eval_mu(leb3, 3.7) == 1.0

    def test_exp_power_value(self, exppow3):
        assert eval_mu(exppow3, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_power_value(self):
        fam = WeightFamily(Kind.POWER_EXP_POWER, 4, b=0.0, m=1.0, beta=1.0)
        assert eval_mu(fam, 0.5) == pytest.approx(2.0, rel=1e-15)

    def test_exp_power_b0_equals_lebesgue(self, leb3):
        fam = WeightFamily(Kind.EXP_POWER, 3, b=0.0, m=2.0)
        r = np.geomspace(1e-6, 50, 200)
        assert np.array_equal(eval_mu(fam, r), eval_mu(leb3, r))

    def test_log_weight_core_and_closure(self, logw_pos):
        assert eval_mu(logw_pos, 0.25) == pytest.approx(math.log(4.0), rel=1e-14)
        assert eval_mu(logw_pos, 1.0) == 0.0
        assert eval_mu(logw_pos, 2.0) == 0.0

    def test_oscillating_branches(self, oscillating):
        r = 0.3
        assert eval_mu(oscillating, r) == pytest.approx(2 + math.sin(math.log(r)), rel=1e-15)
        assert eval_mu(oscillating, 1.5) == 2.0

    def test_oscillating_blend_positive_and_continuous(self, oscillating):
        r = np.linspace(0.5, 1.0, 2001)
        mu = eval_mu(oscillating, r)
        assert (mu > 0).all()
        # C^0 at both seams
        assert eval_mu(oscillating, 0.5) == pytest.approx(2 + math.sin(math.log(0.5)), rel=1e-12)
        assert eval_mu(oscillating, 1.0 - 1e-12) == pytest.approx(2.0, rel=1e-9)

    def test_positive_on_support(self, exppow3, pexp4, logw_pos, oscillating):
        r = np.geomspace(1e-8, 0.999, 300)
        for fam in (exppow3, pexp4, logw_pos, oscillating):
            assert (eval_mu(fam, r) > 0).all()

    def test_nonpositive_radius(self, leb3):
        with pytest.raises(NonPositiveRadius):
            eval_mu(leb3, 0.0)
        with pytest.raises(NonPositiveRadius):
            eval_mu(leb3, -1.0)

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            WeightFamily(Kind.EXP_POWER, 3, b=-1.0, m=2.0)
        with pytest.raises(InvalidParams):
            WeightFamily(Kind.EXP_POWER, 3, b=1.0, m=0.0)
        with pytest.raises(InvalidParams):
            WeightFamily(Kind.LEBESGUE, 2)
        with pytest.raises(InvalidParams):
            WeightFamily(Kind.CUSTOM, 3)

    def test_log_mu_matches_eval_mu(self, exppow3, pexp4, logw_pos, oscillating):
        s = np.log(np.geomspace(1e-6, 0.9, 50))
        for fam in (exppow3, pexp4, logw_pos, oscillating):
            assert log_mu(fam, s) == pytest.approx(np.log(eval_mu(fam, np.exp(s))), rel=1e-12)

    def test_log_mu_deep_tail_stays_finite(self, pexp4, logw_pos):
        # far below the smallest positive float in r
        assert log_mu(pexp4, -1e6) == pytest.approx(1e6, rel=1e-12)
        assert np.isfinite(log_mu(logw_pos, -1e6))


class TestLogDerivatives:
    def test_exp_power_d1(self, exppow3):
        for r in (0.1, 1.0, 3.0):
            d1, _ = log_derivatives(exppow3, r)
            assert d1 == pytest.approx(-2.0 * r, rel=1e-14)

    def test_lebesgue_zero(self, leb3):
        assert log_derivatives(leb3, 1.7) == (0.0, 0.0)

    def test_pure_power_example(self):
        # mu = 1/r: d1 = -1/r, lap ratio = (beta^2 + beta(2-N))/r^2
        fam = WeightFamily(Kind.POWER_EXP_POWER, 4, b=0.0, m=1.0, beta=1.0)
        d1, lap = log_derivatives(fam, 2.0)
        assert d1 == pytest.approx(-0.5, rel=1e-14)
        assert lap == pytest.approx(-0.25, rel=1e-14)

    @pytest.mark.parametrize("r", [1e-3, 1e-2, 1e-1, 1.0, 10.0])
    def test_finite_difference_consistency(self, r, exppow3, pexp4, leb3, logw_pos,
                                           logw_neg, oscillating):
        for fam in (exppow3, pexp4, leb3, logw_pos, logw_neg, oscillating):
            if fam.kind is Kind.LOG_WEIGHT and r >= 1.0:
                continue  # weight vanishes: derivatives undefined
            r_eff = r
            if fam.kind is Kind.OSCILLATING and r == 1.0:
                r_eff = 0.99  # the closure seam is only C^2; test inside the blend
            d1, lap = log_derivatives(fam, r_eff)
            d1_fd, lap_fd = fd_log_derivatives(fam, r_eff)
            assert abs(d1 - d1_fd) <= 1e-6 * max(1.0, abs(d1))
            assert abs(lap - lap_fd) <= 1e-6 * max(1.0, abs(lap))

    def test_transition_region_log_weight(self, logw_pos):
        d1, lap = log_derivatives(logw_pos, 0.75)
        d1_fd, lap_fd = fd_log_derivatives(logw_pos, 0.75)
        assert d1 == pytest.approx(d1_fd, rel=1e-7)
        assert lap == pytest.approx(lap_fd, rel=1e-7)

    def test_custom_with_fd_fallback(self, exppow3):
        mu = lambda r: np.exp(-np.asarray(r, dtype=float) ** 2)
        d1 = lambda r: -2.0 * np.asarray(r, dtype=float)
        fam = WeightFamily(Kind.CUSTOM, 3, custom_profile=(mu, d1, None))
        for r in (0.05, 0.5, 2.0):
            got = log_derivatives(fam, r)
            want = log_derivatives(exppow3, r)
            assert got[0] == pytest.approx(want[0], rel=1e-12)
            assert abs(got[1] - want[1]) <= 1e-6 * max(1.0, abs(want[1]))


class TestWeightedIntegral:
    def test_unit_ball_volume(self, leb3):
        assert weighted_integral(leb3, None, 0.0, 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-10)

    def test_inverse_square_moment(self, leb3):
        got = weighted_integral(leb3, lambda r: r**-2.0, 0.0, 1.0)
        assert got == pytest.approx(4 * math.pi, rel=1e-10)
        # the singular factor can equivalently ride the power channel
        assert weighted_integral(leb3, None, 0.0, 1.0, power=-2.0) == pytest.approx(
            4 * math.pi, rel=1e-12)

    def test_pure_power_weight(self):
        fam = WeightFamily(Kind.POWER_EXP_POWER, 4, b=0.0, m=1.0, beta=1.0)
        assert weighted_integral(fam, None, 0.0, 1.0) == pytest.approx(
            2 * math.pi**2 / 3, rel=1e-10)

    def test_divergent_flagged(self, leb3):
        with pytest.raises(DivergentIntegral):
            weighted_integral(leb3, None, 0.0, 1.0, power=-3.5)
        with pytest.raises(DivergentIntegral):
            weighted_integral(leb3, lambda r: r**-3.5, 0.0, 1.0)

    def test_oscillating_moments(self, oscillating):
        # analytic tail: int_{-inf}^{a} e^{qs}(2+sin s) ds at q = N = 3
        a = math.log(0.5)
        q = 3.0
        tail = math.exp(q * a) * (2.0 / q + (q * math.sin(a) - math.cos(a)) / (q * q + 1))
        got = weighted_integral(oscillating, None, 0.0, 0.5)
        assert got == pytest.approx(4 * math.pi * tail, rel=1e-10)
        with pytest.raises(DivergentIntegral):
            weighted_integral(oscillating, None, 0.0, 1.0, power=-3.0)

    def test_bad_range(self, leb3):
        with pytest.raises(InvalidParams):
            weighted_integral(leb3, None, 1.0, 0.5)

    @settings(max_examples=20, deadline=None, derandomize=True)
    @given(split=st.floats(min_value=0.05, max_value=4.0))
    def test_additive_over_adjacent_intervals(self, split):
        fam = WeightFamily(Kind.EXP_POWER, 3, b=1.0, m=2.0)
        f = lambda r: r**2 / (1.0 + r)
        whole = weighted_integral(fam, f, 0.0, 5.0)
        parts = weighted_integral(fam, f, 0.0, split) + weighted_integral(fam, f, split, 5.0)
        assert abs(whole - parts) <= 1e-10 * abs(whole)

    def test_log_weight_lambda_moment(self, logw_pos):
        # int_0^1 r^{lam-1} theta log(1/r) dr ~ 1/lam^2 for small lam
        lam = 2.0**-12
        got = weighted_integral(logw_pos, None, 0.0, 1.0, power=lam - 3.0)
        assert got == pytest.approx(4 * math.pi / lam**2, rel=1e-3)


class TestRadialGrid:
    def test_geometric_ratio_constant(self):
        g = RadialGrid(1e-4, 20.0, 333)
        logs = np.diff(np.log(g.nodes))
        assert np.ptp(logs) <= 1e-12 * logs[0]
        assert (np.diff(g.nodes) > 0).all()
        assert g.nodes[0] == pytest.approx(1e-4, rel=1e-14)
        assert g.nodes[-1] == pytest.approx(20.0, rel=1e-14)

    @settings(max_examples=25, deadline=None, derandomize=True)
    @given(
        r_min=st.floats(min_value=1e-8, max_value=1e-2),
        span=st.floats(min_value=10.0, max_value=1e6),
        n=st.integers(min_value=16, max_value=4000),
    )
    def test_grid_properties(self, r_min, span, n):
        g = RadialGrid(r_min, r_min * span, n)
        assert len(g.nodes) == n
        ratios = g.nodes[1:] / g.nodes[:-1]
        assert ratios.max() - ratios.min() <= 1e-10 * ratios[0]

    def test_origin_excluded(self):
        with pytest.raises(InvalidParams):
            RadialGrid(0.0, 1.0, 32)
        with pytest.raises(InvalidParams):
            RadialGrid(1.0, 0.5, 32)
        with pytest.raises(InvalidParams):
            RadialGrid(0.1, 1.0, 8)


class TestBumpsAndCutoffs:
    def test_transition_endpoints(self):
        assert smooth_transition(0.4, 0.5, 1.0) == 1.0
        assert smooth_transition(1.1, 0.5, 1.0) == 0.0
        mid = smooth_transition(0.75, 0.5, 1.0)
        assert 0.0 < mid < 1.0

    def test_bump_support_and_derivative(self):
        b = RadialBump(0.25, 1.0)
        assert b(0.2) == 0.0 and b(1.1) == 0.0
        assert b(0.625) == pytest.approx(1.0, rel=1e-14)
        r = np.linspace(0.26, 0.99, 400)
        h = 1e-6
        fd = (b(r + h) - b(r - h)) / (2 * h)
        assert np.allclose(b.deriv(r), fd, atol=1e-6, rtol=1e-5)

    def test_centered_bump(self):
        b = RadialBump(0.0, 0.6)
        assert b(0.0) == pytest.approx(1.0, rel=1e-14)
        assert b(0.61) == 0.0
        r = np.linspace(0.01, 0.59, 200)
        h = 1e-7
        fd = (b(r + h) - b(r - h)) / (2 * h)
        assert np.allclose(b.deriv(r), fd, atol=1e-5, rtol=1e-4)
