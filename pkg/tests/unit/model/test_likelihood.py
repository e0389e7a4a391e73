"""Unit tests for single-hit Bernoulli likelihood pieces."""

import math

import numpy as np
import pytest

from src.model.likelihood import (
    bernoulli_terms,
    infection_prob,
    log1mexp,
    observation_log_pmf,
    per_obs_rate,
)


class TestLog1mexp:
    """Test the stable log(1 - exp(-eta))."""

    @pytest.mark.parametrize("eta", [1e-12, 1e-6, 0.3, math.log(2.0), 2.0, 40.0])
    def test_matches_direct_formula(self, eta):
        expected = math.log(-math.expm1(-eta))
        assert log1mexp(eta) == pytest.approx(expected, rel=1e-12)

    def test_matches_extended_precision_on_dense_grid(self):
        """Agreement with long double evaluation over [1e-12, 50]."""
        eta = np.concatenate([np.geomspace(1e-12, 50.0, 4000), np.linspace(0.6, 0.8, 401)])
        wide = eta.astype(np.longdouble)
        reference = np.where(wide < 0.5, np.log(-np.expm1(-wide)), np.log1p(-np.exp(-wide)))
        np.testing.assert_allclose(log1mexp(eta), reference.astype(float), rtol=1e-12, atol=0.0)

    def test_zero_rate_is_minus_infinity(self):
        assert log1mexp(0.0) == -math.inf

    def test_vector_input(self):
        out = log1mexp(np.array([0.1, 5.0]))
        assert out.shape == (2,)


class TestRates:
    """Test rates and probabilities."""

    def test_infection_prob(self):
        assert infection_prob(0.05) == pytest.approx(1 - math.exp(-0.05))
        assert infection_prob(0.0) == 0.0

    def test_per_obs_rate(self):
        eta = per_obs_rate(0.1, np.array([0.5, 0.0]), np.array([[1.0], [-2.0]]), np.array([0.3]))
        np.testing.assert_allclose(eta, [math.exp(0.3) * 0.6, math.exp(-0.6) * 0.1])

    def test_per_obs_rate_without_covariates(self):
        eta = per_obs_rate(0.2, np.array([0.1, 0.3]), np.zeros((2, 0)), np.zeros(0))
        np.testing.assert_allclose(eta, [0.3, 0.5])


class TestBernoulliTerms:
    """Test count-aggregated terms against single observations."""

    def test_counts_equal_sum_of_observations(self):
        eta = np.array([0.2, 1.5, 0.01])
        pos = np.array([2, 0, 1])
        neg = np.array([1, 3, 4])
        value, _ = bernoulli_terms(eta, pos, neg)
        brute = [
            pos[j] * observation_log_pmf(eta[j], 1) + neg[j] * observation_log_pmf(eta[j], 0)
            for j in range(3)
        ]
        np.testing.assert_allclose(value, brute, rtol=1e-12)

    def test_slope_matches_differences(self):
        eta = np.array([0.2, 1.5, 0.01])
        pos = np.array([2, 0, 1])
        neg = np.array([1, 3, 4])
        _, slope = bernoulli_terms(eta, pos, neg)
        h = 1e-7
        numeric = (bernoulli_terms(eta + h, pos, neg)[0] - bernoulli_terms(eta - h, pos, neg)[0]) / (2 * h)
        np.testing.assert_allclose(slope, numeric, rtol=1e-5)

    def test_zero_rate_only_fatal_with_positives(self):
        value, _ = bernoulli_terms(np.array([0.0, 0.0]), np.array([0, 1]), np.array([3, 0]))
        assert value[0] == 0.0
        assert value[1] == -math.inf
