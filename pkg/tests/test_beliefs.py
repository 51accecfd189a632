"""Belief-primitive tests: index formulas, posterior updates, position sets."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matching_bandits.beliefs import (
    BetaWinCounts,
    GaussianPosterior,
    PositionBelief,
    RewardStats,
    WinStats,
    bernoulli_point,
    gaussian_sample,
    gaussian_update,
    position_update_on_loss,
    ucb_index,
    ucb_win_prob,
)

REL = 1e-9


class TestUcbIndex:
    def test_unexplored_is_infinite(self):
        assert ucb_index(RewardStats(0, 0.0), t=50) == math.inf

    def test_single_pull_round_one(self):
        assert ucb_index(RewardStats(1, 0.0), t=1) == 0.0

    def test_hand_derived_value(self):
        expected = 0.5 + math.sqrt(3.0 * math.log(10) / 4.0)
        assert ucb_index(RewardStats(2, 1.0), t=10) == pytest.approx(expected, rel=REL)

    def test_rejects_round_zero(self):
        with pytest.raises(ValueError):
            ucb_index(RewardStats(1, 1.0), t=0)

    @given(st.integers(min_value=1, max_value=10_000), st.integers(min_value=2, max_value=10_000))
    def test_monotone_nonincreasing_in_count(self, count, t):
        mean = 0.7
        lo = ucb_index(RewardStats(count, mean * count), t)
        hi = ucb_index(RewardStats(count + 1, mean * (count + 1)), t)
        assert hi <= lo

    @given(st.integers(min_value=1, max_value=10_000))
    def test_monotone_nondecreasing_in_round(self, t):
        stats = RewardStats(3, 1.5)
        assert ucb_index(stats, t + 1) >= ucb_index(stats, t)


class TestUcbWinProb:
    def test_unseen_is_one(self):
        assert ucb_win_prob(WinStats(0, 0), t=9) == 1.0

    def test_perfect_record_censored(self):
        assert ucb_win_prob(WinStats(5, 5), t=3) == 1.0

    def test_censoring_of_hand_derived_value(self):
        # 0.25 + sqrt(3 ln 10 / 8) ~ 1.179 censors to 1.
        assert ucb_win_prob(WinStats(1, 4), t=10) == 1.0

    def test_uncensored_value(self):
        expected = 0.1 + math.sqrt(3.0 * math.log(2) / 200.0)
        assert ucb_win_prob(WinStats(10, 100), t=2) == pytest.approx(expected, rel=REL)

    @given(
        st.integers(min_value=0, max_value=500),
        st.integers(min_value=0, max_value=500),
        st.integers(min_value=1, max_value=100_000),
    )
    def test_always_a_probability(self, wins, extra, t):
        value = ucb_win_prob(WinStats(wins, wins + extra), t)
        assert 0.0 <= value <= 1.0

    def test_rejects_round_zero(self):
        with pytest.raises(ValueError):
            ucb_win_prob(WinStats(1, 2), t=0)


class TestGaussianPosterior:
    def test_empty_batch_is_identity(self):
        post = GaussianPosterior(mean=1.5, precision=2.0)
        assert gaussian_update(post, []) == post

    def test_near_flat_prior_tracks_observation(self):
        post = gaussian_update(GaussianPosterior(0.0, 1e-6), [1.0])
        assert post.mean == pytest.approx(1.0 / 1.000001, rel=REL)
        assert post.precision == pytest.approx(1.000001, rel=REL)

    def test_observations_at_prior_mean_leave_mean_fixed(self):
        post = gaussian_update(GaussianPosterior(2.0, 4.0), [2.0, 2.0])
        assert post.mean == pytest.approx(2.0, rel=REL)
        assert post.precision == pytest.approx(6.0, rel=REL)

    @given(
        st.floats(-10, 10, allow_nan=False),
        st.floats(-10, 10, allow_nan=False),
        st.floats(-5, 5, allow_nan=False),
        st.floats(0.1, 100.0, allow_nan=False),
    )
    def test_batching_is_order_independent(self, a, b, mu0, tau0):
        post = GaussianPosterior(mu0, tau0)
        stepwise = gaussian_update(gaussian_update(post, [a]), [b])
        batched = gaussian_update(post, [a, b])
        assert stepwise.precision == pytest.approx(batched.precision, rel=1e-12)
        assert stepwise.mean == pytest.approx(batched.mean, rel=1e-9, abs=1e-12)

    def test_rejects_nonpositive_precision(self):
        with pytest.raises(ValueError):
            GaussianPosterior(0.0, 0.0)


class TestGaussianSample:
    def test_degenerate_variance_returns_mean(self):
        post = GaussianPosterior(mean=3.25, precision=1e12)
        sample = gaussian_sample(post, np.random.default_rng(0))
        assert sample == pytest.approx(3.25, abs=1e-4)

    def test_deterministic_given_rng_state(self):
        post = GaussianPosterior(mean=0.0, precision=2.0)
        a = gaussian_sample(post, np.random.default_rng(7))
        b = gaussian_sample(post, np.random.default_rng(7))
        assert a == b

    def test_sample_mean_concentrates(self):
        post = GaussianPosterior(mean=0.0, precision=1.0)
        rng = np.random.default_rng(42)
        draws = [gaussian_sample(post, rng) for _ in range(100_000)]
        assert abs(sum(draws) / len(draws)) <= 0.02


class TestBernoulliPoint:
    def test_optimistic_initialization(self):
        assert bernoulli_point(BetaWinCounts(0, 0)) == 1.0

    def test_point_estimate(self):
        assert bernoulli_point(BetaWinCounts(3, 1)) == 0.75

    def test_all_losses(self):
        assert bernoulli_point(BetaWinCounts(0, 5)) == 0.0

    @given(st.integers(0, 1000), st.integers(0, 1000))
    def test_complement_sums_to_one(self, alpha, beta):
        if alpha + beta == 0:
            return
        total = bernoulli_point(BetaWinCounts(alpha, beta)) + bernoulli_point(
            BetaWinCounts(beta, alpha)
        )
        assert total == pytest.approx(1.0, rel=1e-12)


class TestPositionBelief:
    def test_fresh_is_fully_optimistic(self):
        belief = PositionBelief.fresh(1, 4)
        assert belief.higher == frozenset()
        assert belief.lower == frozenset({0, 2, 3})

    def test_loss_moves_winner_up(self):
        belief = position_update_on_loss(PositionBelief.fresh(0, 3), winner=2)
        assert belief.higher == frozenset({2})
        assert belief.lower == frozenset({1})

    def test_idempotent(self):
        belief = PositionBelief.fresh(0, 3)
        once = position_update_on_loss(belief, 2)
        assert position_update_on_loss(once, 2) == once

    def test_losing_to_everyone_empties_lower(self):
        belief = PositionBelief.fresh(0, 4)
        for winner in (1, 2, 3):
            belief = position_update_on_loss(belief, winner)
        assert belief.lower == frozenset()
        assert belief.higher == frozenset({1, 2, 3})

    def test_rejects_self_as_winner(self):
        with pytest.raises(ValueError):
            position_update_on_loss(PositionBelief.fresh(0, 3), winner=0)

    @given(st.lists(st.integers(1, 5), max_size=20))
    def test_partition_invariant_under_any_sequence(self, winners):
        belief = PositionBelief.fresh(0, 6)
        universe = frozenset(range(1, 6))
        for w in winners:
            belief = position_update_on_loss(belief, w)
            assert belief.higher | belief.lower == universe
            assert not (belief.higher & belief.lower)

    def test_rejects_overlapping_sets(self):
        with pytest.raises(ValueError):
            PositionBelief(higher=frozenset({1}), lower=frozenset({1, 2}))
