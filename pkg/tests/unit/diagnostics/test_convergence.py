"""Unit tests for R-hat and effective sample size."""

import math

import numpy as np
import pytest

from src.diagnostics.convergence import (
    autocovariance,
    ess_bulk,
    ess_tail,
    split_chains,
    split_rhat_rank_normalized,
    z_scale,
)


def ar1(phi, chains, draws, seed):
    rng = np.random.default_rng(seed)
    out = np.empty((chains, draws))
    noise = rng.standard_normal((chains, draws)) * math.sqrt(1.0 - phi * phi)
    out[:, 0] = rng.standard_normal(chains)
    for t in range(1, draws):
        out[:, t] = phi * out[:, t - 1] + noise[:, t]
    return out


class TestHelpers:
    """Test rank normalization and chain splitting."""

    def test_split_drops_middle_draw(self):
        ary = np.arange(14.0).reshape(2, 7)
        split = split_chains(ary)
        assert split.shape == (4, 3)
        np.testing.assert_array_equal(split[0], [0, 1, 2])
        np.testing.assert_array_equal(split[2], [4, 5, 6])

    def test_z_scale_is_symmetric(self):
        z = z_scale(np.array([[3.0, 1.0, 2.0]]))
        assert z[0, 2] == pytest.approx(0.0)
        assert z[0, 0] == pytest.approx(-z[0, 1])

    def test_autocovariance_lag_zero(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        assert autocovariance(x)[0] == pytest.approx(np.var(x))

    def test_too_few_draws(self):
        with pytest.raises(ValueError, match="at least 4 draws"):
            ess_bulk(np.zeros((2, 3)))


class TestRhat:
    """Test split R-hat."""

    def test_iid_chains(self):
        ary = np.random.default_rng(0).standard_normal((4, 1000))
        rhat = split_rhat_rank_normalized(ary)
        assert 0.999 <= rhat <= 1.01

    def test_separated_chains(self):
        ary = np.random.default_rng(1).standard_normal((4, 500))
        ary[2:] += 5.0
        assert split_rhat_rank_normalized(ary) > 1.5

    def test_trend_within_chain(self):
        ary = np.tile(np.linspace(0.0, 10.0, 400), (2, 1))
        ary += np.random.default_rng(2).normal(0.0, 0.1, ary.shape)
        assert split_rhat_rank_normalized(ary) > 1.5

    def test_invariant_under_monotone_transforms(self):
        ary = np.random.default_rng(7).standard_normal((4, 300))
        ary[1] += 0.3
        rhat = split_rhat_rank_normalized(ary)
        assert split_rhat_rank_normalized(np.exp(ary)) == pytest.approx(rhat, rel=1e-12)
        assert split_rhat_rank_normalized(ary ** 3) == pytest.approx(rhat, rel=1e-12)
        assert split_rhat_rank_normalized(-2.0 * ary + 1.0) == pytest.approx(rhat, rel=1e-12)

    def test_constant_is_undefined(self):
        assert split_rhat_rank_normalized(np.ones((4, 100))) is None


class TestEss:
    """Test bulk and tail ESS."""

    def test_iid_near_sample_size(self):
        ary = np.random.default_rng(3).standard_normal((4, 1000))
        assert ess_bulk(ary) == pytest.approx(4000, rel=0.15)
        assert ess_tail(ary) > 0.5 * 4000

    def test_ar1_matches_analytic(self):
        phi = 0.9
        ary = ar1(phi, 4, 4000, seed=4)
        analytic = ary.size * (1.0 - phi) / (1.0 + phi)
        ess = ess_bulk(ary)
        assert analytic / 1.5 < ess < analytic * 1.5

    def test_antithetic_is_capped(self):
        ary = np.tile(np.array([1.0, -1.0] * 100), (2, 1))
        ary += np.random.default_rng(5).normal(0.0, 1e-3, ary.shape)
        n = ary.size
        assert ess_bulk(ary) <= n * math.log10(n) + 1e-9

    def test_constant_is_undefined(self):
        assert ess_bulk(np.full((2, 50), 3.0)) is None
        assert ess_tail(np.full((2, 50), 3.0)) is None

    def test_tail_smaller_for_sticky_chain(self):
        ary = ar1(0.95, 4, 2000, seed=6)
        assert ess_tail(ary) < 0.2 * ary.size

    def test_decreases_with_autocorrelation(self):
        ess = [ess_bulk(ar1(phi, 4, 2000, seed=8)) for phi in (0.0, 0.5, 0.9)]
        assert ess[0] > ess[1] > ess[2]


class TestChainLabels:
    """Test that chain order does not matter."""

    def test_permuted_chains_give_same_diagnostics(self):
        ary = ar1(0.6, 4, 500, seed=9)
        ary[0] += 0.2
        permuted = ary[[2, 0, 3, 1]]
        assert split_rhat_rank_normalized(permuted) == pytest.approx(
            split_rhat_rank_normalized(ary), rel=1e-12
        )
        assert ess_bulk(permuted) == pytest.approx(ess_bulk(ary), rel=1e-12)
        assert ess_tail(permuted) == pytest.approx(ess_tail(ary), rel=1e-12)
