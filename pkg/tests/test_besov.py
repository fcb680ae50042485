"""Seminorms, rate-zone classification, and generated test functions."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockshrink import (
    BesovBall,
    CoefficientTree,
    besov_seminorm,
    make_test_function,
    midpoint_grid,
    rate_spec,
)

INF = math.inf


class TestRateSpec:
    def test_regular_zone_tuple(self):
        r = rate_spec(2, 2, 1, 2)
        assert r.epsilon == 4
        assert r.zone == "regular"
        assert r.alpha1 == Fraction(2, 5)
        assert r.risk_exponent == Fraction(-4, 5)
        assert r.log_exponent == 0  # p == pi: no extra log factor

    def test_sparse_zone_tuple(self):
        r = rate_spec(2, 1, 1, 6)
        assert r.epsilon == Fraction(-1, 2)
        assert r.zone == "sparse"
        assert r.alpha2 == Fraction(7, 18)
        assert r.risk_exponent == Fraction(-7, 3)
        assert r.log_exponent == Fraction(7, 3)

    def test_critical_zone_tuple(self):
        r = rate_spec(Fraction(5, 2), 1, 1, 6)
        assert r.epsilon == 0
        assert r.zone == "critical"
        assert r.log_exponent - r.alpha2 * 6 == 5  # the (p - pi/r)_+ surcharge

    def test_infinite_shape_is_regular(self):
        r = rate_spec(1, INF, INF, 2)
        assert r.zone == "regular"
        assert r.risk_exponent == Fraction(-2, 3)
        assert r.log_exponent == 0

    def test_infinite_shape_matches_large_finite_limit(self):
        # monotone limit oracle: huge finite pi classifies like pi = inf
        limit = rate_spec(1, 10**9, 10**9, 2)
        exact = rate_spec(1, INF, INF, 2)
        assert limit.zone == exact.zone == "regular"
        assert abs(float(limit.risk_exponent) - float(exact.risk_exponent)) < 1e-6

    def test_regular_log_factor_when_p_exceeds_pi(self):
        r = rate_spec(3, 2, 1, 4)  # eps = 6 + (2-4)/2 = 5 > 0, p > pi
        assert r.zone == "regular"
        assert r.log_exponent == r.alpha1 * 4

    def test_out_of_range_parameters(self):
        with pytest.raises(ValueError, match="s > 1/pi \\+ 1/2"):
            rate_spec(1, 1, 1, 2)
        with pytest.raises(ValueError, match="p="):
            rate_spec(2, 2, 1, 1.5)

    def test_zone_sweep_exact_rational(self):
        """1000 rational tuples: zone always matches the integer-arithmetic
        sign of epsilon, including constructed exactly-critical tuples."""
        rng = np.random.default_rng(77)
        cases = []
        while len(cases) < 800:
            s = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 8)))
            pi = Fraction(int(rng.integers(1, 30)), int(rng.integers(1, 4)))
            p = Fraction(int(rng.integers(4, 24)), 2)
            if pi >= 1 and p >= 2 and s > 1 / pi + Fraction(1, 2):
                cases.append((s, pi, p))
        while len(cases) < 1000:
            # engineered critical tuples: s = (p - pi)/(2 pi)
            pi = Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 3)))
            p = Fraction(int(rng.integers(4, 30)), 2)
            if pi < 1 or p < 2:
                continue
            s = (p - pi) / (2 * pi)
            if s > 1 / pi + Fraction(1, 2):
                cases.append((s, pi, p))
        assert len(cases) == 1000
        miscls = 0
        for s, pi, p in cases:
            r = rate_spec(s, pi, INF, p)
            # independent oracle: sign of epsilon = pi*s + (pi - p)/2 with all
            # denominators cleared, in pure integer arithmetic
            lhs = (
                2 * pi.numerator * s.numerator * p.denominator
                + (pi.numerator * p.denominator - p.numerator * pi.denominator)
                * s.denominator
            )
            sign = (lhs > 0) - (lhs < 0)
            expect = {1: "regular", 0: "critical", -1: "sparse"}[sign]
            if r.zone != expect:
                miscls += 1
        assert miscls == 0

    def test_ball_applicability_flag(self):
        assert BesovBall(2, 2, 1).theorem_applicable
        assert not BesovBall(1, 1, 1).theorem_applicable
        assert BesovBall(Fraction(3, 4), INF, INF).theorem_applicable


class TestSeminorm:
    def test_single_atom(self):
        tree = CoefficientTree(0, 3, np.zeros(1), [np.zeros(1), np.zeros(2), np.zeros(4), np.zeros(8)])
        tree.detail(3)[5] = 2.0
        assert besov_seminorm(tree, 1, 2, 1) == pytest.approx(16.0)

    def test_zero_tree(self):
        tree = CoefficientTree(0, 2, np.zeros(1), [np.zeros(1), np.zeros(2), np.zeros(4)])
        assert besov_seminorm(tree, 1.3, 2, 4) == 0.0

    def test_homogeneous_degree_one(self):
        rng = np.random.default_rng(5)
        tree = CoefficientTree(0, 4, rng.normal(size=1), [rng.normal(size=1 << j) for j in range(5)])
        base = besov_seminorm(tree, 0.8, 3, 2)
        scaled = tree.copy()
        scaled.alpha *= 2.5
        for b in scaled.beta:
            b *= 2.5
        assert besov_seminorm(scaled, 0.8, 3, 2) == pytest.approx(2.5 * base, rel=1e-12)

    @given(st.floats(0.2, 3.0), st.floats(1.0, 6.0), st.floats(1.0, 6.0))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_magnitudes(self, s, pi, r):
        rng = np.random.default_rng(11)
        tree = CoefficientTree(0, 3, rng.normal(size=1), [rng.normal(size=1 << j) for j in range(4)])
        grown = tree.copy()
        grown.detail(2)[1] = 2.0 * abs(grown.detail(2)[1]) + 1.0
        assert besov_seminorm(grown, s, pi, r) >= besov_seminorm(tree, s, pi, r)

    def test_heavisine_growth_at_too_high_smoothness(self, haar):
        """The jump coefficients scale like 2^{-j/2}, so the (0.9, inf, inf)
        seminorm grows like 2^{0.9 j} in the truncation level instead of
        stabilizing: heavisine does not live at Hoelder smoothness 0.9."""
        s10 = besov_seminorm(make_test_function("heavisine", haar, jmax=10).tree, 0.9, INF, INF)
        s12 = besov_seminorm(make_test_function("heavisine", haar, jmax=12).tree, 0.9, INF, INF)
        assert np.isfinite(s10) and np.isfinite(s12)
        assert 2.0 <= s12 / s10 <= 2.0**1.8 * 1.1

    def test_heavisine_stable_inside_its_ball(self, haar):
        # parameters the signal genuinely satisfies: truncation converges
        t10 = besov_seminorm(make_test_function("heavisine", haar, jmax=10).tree, 0.7, 1, 2)
        t12 = besov_seminorm(make_test_function("heavisine", haar, jmax=12).tree, 0.7, 1, 2)
        assert abs(t12 - t10) / t10 < 0.02


class TestMakeTestFunction:
    def test_constant_tree(self, haar):
        tf = make_test_function("constant", haar, jmax=8)
        assert tf.tree.alpha[0] == pytest.approx(1.0, abs=1e-10)
        assert tf.sup_bound == pytest.approx(1.0)

    def test_doppler_normalized(self, haar):
        tf = make_test_function("doppler", haar, jmax=10)
        assert np.max(np.abs(tf.values)) <= 1.0 + 1e-12

    def test_unknown_name(self, haar):
        with pytest.raises(ValueError, match="unknown signal"):
            make_test_function("brownian", haar, jmax=8)

    def test_jmax_capped(self, haar):
        with pytest.raises(ValueError, match="jmax"):
            make_test_function("constant", haar, jmax=13)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_besov_membership(self, haar, seed):
        tf = make_test_function({"random_besov": {"s": 2, "pi": 2, "seed": seed}}, haar, jmax=10)
        value = besov_seminorm(tf.tree, 2, 2, INF)
        assert value <= tf.ball_radius
        assert np.isfinite(tf.sup_bound)
        assert np.max(np.abs(tf.values)) <= tf.sup_bound + 1e-9

    def test_random_besov_finite_r_membership(self, haar):
        tf = make_test_function(
            {"random_besov": {"s": 1.5, "pi": 3, "r": 2, "seed": 4}}, haar, jmax=9
        )
        assert besov_seminorm(tf.tree, 1.5, 3, 2) <= tf.ball_radius

    def test_values_match_tree_synthesis(self, haar):
        tf = make_test_function({"random_besov": {"s": 2, "pi": 2, "seed": 1}}, haar, jmax=6)
        x = midpoint_grid(4096)
        from blockshrink import evaluate_tree

        assert np.allclose(tf.fn(x), evaluate_tree(haar, tf.tree, x))
