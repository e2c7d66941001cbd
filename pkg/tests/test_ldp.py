"""Unit tests for the large-deviation machinery."""

import math

import numpy as np
import pytest

from sconv.ldp import (
    WeightedSampleSequence,
    binomial_sequence,
    build_rate_curve,
    chernoff_upper,
    exact_tail_rate,
    gartner_ellis_lower_check,
    lambda_bar,
    log_mgf,
    pinched_pair_sequence,
    windowed_rate,
)
from sconv.operators import HermitianOperator, rand_density, tensor_power
from sconv.renyi import psi
from sconv.operators import pinch


def fair_coin_lambda(t):
    """Closed form for the fair-coin mean: log((1 + e^t)/2)."""
    return float(np.logaddexp(0.0, t)) - math.log(2.0)


def binary_kl(x, p=0.5):
    return x * math.log(x / p) + (1 - x) * math.log((1 - x) / (1 - p))


class TestSequences:
    def test_binomial_support_is_probability(self):
        seq = binomial_sequence([8, 16])
        y, lw = seq.support(8)
        assert y.size == 9
        assert float(np.exp(lw).sum()) == pytest.approx(1.0, abs=1e-12)
        assert y[0] == 0.0 and y[-1] == 1.0

    def test_binomial_rejects_degenerate_prob(self):
        with pytest.raises(ValueError, match="prob"):
            binomial_sequence([4], prob=0.0)

    def test_sequence_validation(self):
        with pytest.raises(ValueError, match="at least one"):
            WeightedSampleSequence(lambda n: (np.ones(1), np.zeros(1)),
                                   lambda n: 1.0, ())
        with pytest.raises(ValueError, match="positive"):
            WeightedSampleSequence(lambda n: (np.ones(1), np.zeros(1)),
                                   lambda n: 0.0, (4,))


class TestLogMgf:
    def test_binomial_closed_form(self):
        # Lambda_n(n t)/n = log((1 + e^t)/2) exactly, independent of n
        seq = binomial_sequence([16, 64, 256])
        for n in (16, 64, 256):
            for t in (-1.0, 0.0, 0.7, 2.5):
                got = log_mgf(seq, n, n * t) / n
                assert got == pytest.approx(fair_coin_lambda(t), abs=1e-12)

    def test_lambda_bar_exact_for_binomial(self):
        seq = binomial_sequence([64, 128, 256, 512])
        val, resid = lambda_bar(seq, 1.3)
        assert val == pytest.approx(fair_coin_lambda(1.3), abs=1e-12)
        assert resid < 1e-12

    def test_lambda_bar_removes_first_order_bias(self):
        # mu_n with Lambda_n(nt)/n = f(t) + g0/n: Richardson recovers f exactly
        base = binomial_sequence([32, 64, 128])
        g0 = 0.37

        def support(n):
            y, lw = base.support(n)
            return y, lw + g0

        seq = WeightedSampleSequence(support, lambda n: float(n), (32, 64, 128))
        t = 0.8
        plain = log_mgf(seq, 128, 128 * t) / 128
        exact = fair_coin_lambda(t)
        assert abs(plain - exact) > 1e-3  # visible bias before extrapolation
        val, resid = lambda_bar(seq, t)
        assert val == pytest.approx(exact, abs=1e-10)
        assert resid < 1e-10


class TestRateCurve:
    def test_spline_and_legendre(self):
        seq = binomial_sequence([128, 256, 512])
        curve = build_rate_curve(seq, np.linspace(-2.0, 4.0, 121))
        for t in (-1.0, 0.5, 3.0):
            assert curve.lambda_bar(t) == pytest.approx(fair_coin_lambda(t), abs=1e-9)
        # Legendre transform of the fair coin at x is the binary KL to 1/2
        for x in (0.6, 0.7, 0.8):
            assert curve.legendre(x) == pytest.approx(binary_kl(x), abs=1e-8)

    def test_stationary_point_closed_form(self):
        # Lambda'(t) = e^t/(1+e^t) = x  =>  t = log(x/(1-x))
        seq = binomial_sequence([128, 256, 512])
        curve = build_rate_curve(seq, np.linspace(-2.0, 4.0, 121))
        assert curve.stationary_t(0.7) == pytest.approx(math.log(7.0 / 3.0), abs=1e-5)

    def test_domain_errors(self):
        seq = binomial_sequence([64, 128, 256])
        curve = build_rate_curve(seq, np.linspace(-1.0, 1.0, 41))
        with pytest.raises(ValueError, match="outside"):
            curve.lambda_bar(5.0)
        with pytest.raises(ValueError, match="slope interval"):
            curve.stationary_t(0.99)  # needs t ~ log(99) far beyond the grid

    def test_grid_validation(self):
        seq = binomial_sequence([64, 128, 256])
        with pytest.raises(ValueError, match="four"):
            build_rate_curve(seq, [0.0, 1.0])


class TestChernoff:
    def test_matches_binary_kl(self):
        # discrete t-grid: optimum within half a grid step, error ~ curvature*(dt/2)^2
        seq = binomial_sequence([256, 512, 1024])
        for x in (0.6, 0.7, 0.85):
            bound = chernoff_upper(seq, x, np.linspace(0.0, 8.0, 321))
            assert bound == pytest.approx(-binary_kl(x), abs=5e-5)
            assert bound >= -binary_kl(x) - 1e-12  # grid sup never exceeds true sup

    def test_dominates_exact_tails(self):
        seq = binomial_sequence([16, 64, 256, 1024])
        x = 0.7
        bound = chernoff_upper(seq, x, np.linspace(0.0, 8.0, 321))
        for n in seq.n_list:
            assert exact_tail_rate(seq, n, x) <= bound + 1e-12

    def test_lower_side(self):
        seq = binomial_sequence([256, 512, 1024])
        x = 0.3
        bound = chernoff_upper(seq, x, side="le")  # default coarse grid
        assert bound == pytest.approx(-binary_kl(x), abs=5e-3)
        for n in seq.n_list:
            assert exact_tail_rate(seq, n, x, side="le") <= bound + 1e-12

    def test_never_positive_for_probability_measures(self):
        seq = binomial_sequence([64, 128, 256])
        assert chernoff_upper(seq, 0.5) <= 1e-12

    def test_side_validation(self):
        seq = binomial_sequence([64, 128, 256])
        with pytest.raises(ValueError, match="side"):
            chernoff_upper(seq, 0.6, side="both")
        with pytest.raises(ValueError, match="t >= 0"):
            chernoff_upper(seq, 0.6, t_grid=np.linspace(-1, 1, 11))


class TestTailHelpers:
    def test_exact_tail_rate_small_case(self):
        seq = binomial_sequence([4])
        # P(mean >= 3/4) = (C(4,3) + C(4,4)) / 16 = 5/16
        assert exact_tail_rate(seq, 4, 0.75) == pytest.approx(
            math.log(5.0 / 16.0) / 4.0, abs=1e-12
        )

    def test_windowed_rate_open_window(self):
        seq = binomial_sequence([4])
        # open (0.5, 1): k = 3 only -> 4/16
        assert windowed_rate(seq, 4, 0.5, 1.0) == pytest.approx(
            math.log(4.0 / 16.0) / 4.0, abs=1e-12
        )

    def test_empty_tail_is_minus_inf(self):
        seq = binomial_sequence([4])
        assert exact_tail_rate(seq, 4, 1.5) == -math.inf
        assert windowed_rate(seq, 4, 0.96, 0.99) == -math.inf


class TestGartnerEllisLower:
    def test_binomial_margins_shrink(self):
        seq = binomial_sequence([256, 512, 1024, 2048, 4096])
        verdict = gartner_ellis_lower_check(
            seq, 0.7, (0.7, 1.0), (-1.0, 4.0), delta_fraction=1.0 / 6.0
        )
        assert verdict.converged
        assert verdict.t_x == pytest.approx(math.log(7.0 / 3.0), abs=1e-6)
        assert verdict.legendre_value == pytest.approx(binary_kl(0.7), abs=1e-7)
        margins = [m for _, m in verdict.margins]
        # margins approach zero from below as n grows
        assert all(m <= 1e-12 for m in margins)
        assert margins[-1] > margins[0]
        assert abs(verdict.final_margin) < 0.01
        assert verdict.tilted_mass >= 0.99
        assert verdict.notes == ()

    def test_narrow_tilt_window_flagged(self):
        seq = binomial_sequence([256, 512, 1024, 2048, 4096])
        verdict = gartner_ellis_lower_check(
            seq, 0.7, (0.7, 1.0), (-1.0, 4.0), delta_fraction=0.05
        )
        # the 5% default window is CLT-narrow at n = 4096: mass visibly < 0.99
        assert verdict.tilted_mass < 0.99
        assert any("tilted mass" in note for note in verdict.notes)

    def test_convergence_gate(self):
        # log-weights drifting with n at O(1) per point break the Cauchy gate
        def support(n):
            y = np.array([0.0, 1.0])
            lw = np.array([math.log(0.5) + 0.5 * math.sqrt(n), math.log(0.5)])
            return y, lw

        seq = WeightedSampleSequence(support, lambda n: float(n), (64, 128, 256))
        with pytest.raises(ValueError, match="Cauchy"):
            gartner_ellis_lower_check(seq, 0.6, (0.6, 1.0), (0.0, 2.0))

    def test_window_validation(self):
        seq = binomial_sequence([64, 128, 256])
        with pytest.raises(ValueError, match="left edge"):
            gartner_ellis_lower_check(seq, 0.5, (0.6, 1.0), (0.0, 2.0))

    def test_needs_three_sizes(self):
        seq = binomial_sequence([64, 128])
        with pytest.raises(ValueError, match="three"):
            gartner_ellis_lower_check(seq, 0.6, (0.6, 1.0), (0.0, 2.0))


class TestPinchedPairSequence:
    def test_sigma_weights_reproduce_psi(self, rng):
        rho1, sigma1 = rand_density(2, rng), rand_density(2, rng)
        seq = pinched_pair_sequence(rho1, sigma1, [4, 6])
        for n in (4, 6):
            rho_n = tensor_power(rho1, n)
            sigma_n = tensor_power(sigma1, n)
            rho_hat = pinch(rho_n, sigma_n)
            for t in (0.5, 1.5):
                got = log_mgf(seq, n, n * t)
                expect = psi(rho_hat, sigma_n, t)
                assert got == pytest.approx(expect, abs=1e-9)

    def test_rho_weights_shift_by_one(self, rng):
        rho1, sigma1 = rand_density(2, rng), rand_density(2, rng)
        s_sig = pinched_pair_sequence(rho1, sigma1, [5])
        s_rho = pinched_pair_sequence(rho1, sigma1, [5], under="rho_hat")
        for t in (0.3, 1.2):
            assert log_mgf(s_rho, 5, 5 * t) == pytest.approx(
                log_mgf(s_sig, 5, 5 * (t + 1.0)), abs=1e-9
            )

    def test_total_masses(self, rng):
        rho1, sigma1 = rand_density(2, rng), rand_density(2, rng)
        s_sig = pinched_pair_sequence(rho1, sigma1, [4])
        s_rho = pinched_pair_sequence(rho1, sigma1, [4], under="rho_hat")
        _, lw_s = s_sig.support(4)
        _, lw_r = s_rho.support(4)
        assert float(np.exp(lw_s).sum()) == pytest.approx(1.0, abs=1e-10)
        assert float(np.exp(lw_r).sum()) == pytest.approx(1.0, abs=1e-10)

    def test_reference_validation(self, rng):
        rho1 = rand_density(2, rng)
        degenerate = HermitianOperator(0.5 * np.eye(2))
        with pytest.raises(ValueError, match="nondegenerate"):
            pinched_pair_sequence(rho1, degenerate, [4])
