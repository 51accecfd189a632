"""Policy tests: plausible sets, arm choice, conflict resolution, updates."""

import numpy as np
import pytest

from matching_bandits.beliefs import RewardStats, WinStats, GaussianPosterior
from matching_bandits.market import Conflict, Matching, PreferenceProfile, RoundOutcome
from matching_bandits.policies import (
    choose_arm_ca,
    choose_arm_pca,
    new_arm_state,
    new_player_state,
    plausible_set,
    player_digest,
    resolve_conflict,
    update_arm_after_round,
    update_player_after_round,
)

BIG = 10**12  # pull counts large enough to make UCB bonuses negligible


def make_outcome(t, attempts, matching, conflicts=(), n_players=None, n_arms=None):
    n_players = n_players if n_players is not None else max(attempts) + 1
    n_arms = n_arms if n_arms is not None else max(attempts.values()) + 1
    return RoundOutcome(
        round=t,
        attempts=attempts,
        matching=Matching(matching),
        conflicts=tuple(conflicts),
        player_rewards=dict.fromkeys(range(n_players), 0.0),
        arm_rewards=dict.fromkeys(range(n_arms), 0.0),
    )


def pinned_reward_stats(means):
    return [RewardStats(BIG, mean * BIG) for mean in means]


class TestPlausibleSet:
    def test_first_round_includes_everything(self):
        arm_means = np.array([[1.0, 2.0], [2.0, 1.0]])
        assert plausible_set(0, None, arm_means=arm_means) == {0, 1}

    def test_fresh_position_beliefs_include_everything(self):
        state = new_player_state("oca_ucb", 0, 3, 3, lam=0.0)
        last = make_outcome(1, {0: 0, 1: 1, 2: 2}, {0: 0, 1: 1, 2: 2}, n_arms=3)
        assert plausible_set(0, last, position_beliefs=state.position_beliefs) == {0, 1, 2}

    def test_true_preference_filter(self):
        # p1 holds a0 and a0 truly prefers p1; a1 is unmatched.
        arm_means = np.array([[1.0, 2.0], [1.0, 2.0]])
        last = make_outcome(3, {0: 0, 1: 0}, {1: 0}, n_arms=2)
        assert plausible_set(0, last, arm_means=arm_means) == {1}
        # The holder itself keeps its arm plausible.
        assert plausible_set(1, last, arm_means=arm_means) == {0, 1}

    def test_learned_position_filter(self):
        state = new_player_state("oca_ucb", 0, 2, 2, lam=0.0)
        last = make_outcome(3, {0: 0, 1: 0}, {1: 0}, n_arms=2)
        loss = Conflict(arm=0, requesters=(0, 1), winner=1)
        update_player_after_round(
            state, 0, make_outcome(3, {0: 0, 1: 0}, {1: 0}, [loss], n_arms=2)
        )
        assert plausible_set(0, last, position_beliefs=state.position_beliefs) == {1}

    def test_own_arm_and_unmatched_arms_always_present(self):
        arm_means = np.array([[1.0, 2.0], [2.0, 1.0], [1.0, 2.0]])
        last = make_outcome(5, {0: 1, 1: 0}, {0: 1, 1: 0}, n_arms=3)
        got = plausible_set(0, last, arm_means=arm_means)
        assert 1 in got  # own successful pull
        assert 2 in got  # unmatched arm

    def test_requires_exactly_one_knowledge_source(self):
        with pytest.raises(ValueError):
            plausible_set(0, None)


class TestChooseArmCa:
    def test_argmax_without_delay(self):
        state = new_player_state("ca_ucb", 0, 2, 2, lam=0.0)
        state.reward_stats = pinned_reward_stats([2.0, 1.0])
        rng = np.random.default_rng(0)
        assert choose_arm_ca(state, t=10, plausible={0, 1}, rng=rng) == 0

    def test_restricted_to_plausible_set(self):
        state = new_player_state("ca_ucb", 0, 2, 2, lam=0.0)
        state.reward_stats = pinned_reward_stats([2.0, 1.0])
        rng = np.random.default_rng(0)
        assert choose_arm_ca(state, t=10, plausible={1}, rng=rng) == 1

    def test_unexplored_ties_break_uniformly(self):
        state = new_player_state("ca_ucb", 0, 3, 3, lam=0.0)
        rng = np.random.default_rng(1)
        counts = [0, 0, 0]
        trials = 30_000
        for _ in range(trials):
            counts[choose_arm_ca(state, t=1, plausible={0, 1, 2}, rng=rng)] += 1
        for c in counts:
            assert abs(c / trials - 1 / 3) <= 0.02

    def test_delay_frequency(self):
        state = new_player_state("ca_ucb", 0, 2, 2, lam=0.9)
        state.reward_stats = pinned_reward_stats([2.0, 1.0])
        state.last_attempt = 1  # not the argmax
        rng = np.random.default_rng(2)
        trials = 100_000
        repeats = sum(
            choose_arm_ca(state, t=10, plausible={0, 1}, rng=rng) == 1
            for _ in range(trials)
        )
        assert abs(repeats / trials - 0.9) <= 0.01

    def test_lazy_plausible_not_evaluated_on_delay(self):
        state = new_player_state("ca_ucb", 0, 2, 2, lam=0.999999)
        state.last_attempt = 0

        def explode():
            raise AssertionError("plausible set evaluated on the delay path")

        rng = np.random.default_rng(3)
        assert choose_arm_ca(state, t=5, plausible=explode, rng=rng) == 0


class TestChooseArmPca:
    def test_first_round_uniform(self):
        state = new_player_state("pca_ucb", 0, 2, 4, lam=0.9)
        rng = np.random.default_rng(4)
        counts = [0] * 4
        trials = 20_000
        for _ in range(trials):
            counts[choose_arm_pca(state, t=1, last=None, rng=rng)] += 1
        for c in counts:
            assert abs(c / trials - 0.25) <= 0.02

    def test_reduces_to_reward_argmax_when_unopposed(self):
        state = new_player_state("pca_ucb", 0, 2, 2, lam=0.0)
        state.reward_stats = pinned_reward_stats([2.0, 3.0])
        last = make_outcome(4, {0: 0, 1: 1}, {0: 0}, n_players=2, n_arms=2)
        # Arm 1 unmatched, arm 0 held by self: both Z = 1.
        rng = np.random.default_rng(5)
        assert choose_arm_pca(state, t=5, last=last, rng=rng) == 1

    def test_products_decide(self):
        # rewards {4, 3}; a0 held by opponent with Z=0.5, a1 unmatched.
        state = new_player_state("pca_ucb", 0, 2, 2, lam=0.0)
        state.reward_stats = pinned_reward_stats([4.0, 3.0])
        state.win_stats[1][0] = WinStats(BIG // 2, BIG)
        last = make_outcome(4, {0: 1, 1: 0}, {1: 0}, n_players=2, n_arms=2)
        rng = np.random.default_rng(6)
        assert choose_arm_pca(state, t=5, last=last, rng=rng) == 1

    def test_thompson_samples_concentrate_on_posterior_mean(self):
        state = new_player_state("pca_ts", 0, 2, 2, lam=0.0)
        state.reward_posteriors = [
            GaussianPosterior(2.0, 1e12),
            GaussianPosterior(3.0, 1e12),
        ]
        last = make_outcome(4, {0: 0, 1: 1}, {0: 0}, n_players=2, n_arms=2)
        rng = np.random.default_rng(7)
        assert choose_arm_pca(state, t=5, last=last, rng=rng) == 1

    def test_point_win_estimate_zeroes_certain_losses(self):
        # Losing record vs the holder: Z = 0 exactly, so the held arm
        # scores 0 even with an infinite (unexplored) reward index.
        state = new_player_state("pca_ts", 0, 2, 2, lam=0.0)
        state.reward_posteriors = [
            GaussianPosterior(9.0, 1e12),
            GaussianPosterior(1.0, 1e12),
        ]
        from matching_bandits.beliefs import BetaWinCounts

        state.win_counts[1][0] = BetaWinCounts(0, 3)
        last = make_outcome(4, {0: 1, 1: 0}, {1: 0}, n_players=2, n_arms=2)
        rng = np.random.default_rng(8)
        assert choose_arm_pca(state, t=5, last=last, rng=rng) == 1

    def test_delay_repeats_previous_attempt(self):
        state = new_player_state("pca_ucb", 0, 2, 2, lam=0.9)
        state.reward_stats = pinned_reward_stats([5.0, 1.0])
        state.last_attempt = 1
        last = make_outcome(4, {0: 1, 1: 0}, {0: 1, 1: 0}, n_players=2, n_arms=2)
        rng = np.random.default_rng(9)
        trials = 100_000
        repeats = sum(
            choose_arm_pca(state, t=5, last=last, rng=rng) == 1 for _ in range(trials)
        )
        assert abs(repeats / trials - 0.9) <= 0.01

    def test_argmax_invariant_to_positive_scaling(self):
        last = make_outcome(4, {0: 0, 1: 1}, {0: 0, 1: 1}, n_players=2, n_arms=2)
        for scale in (0.01, 1.0, 250.0):
            state = new_player_state("pca_ts", 0, 2, 2, lam=0.0)
            state.reward_posteriors = [
                GaussianPosterior(2.0 * scale, 1e12),
                GaussianPosterior(3.0 * scale, 1e12),
            ]
            rng = np.random.default_rng(10)
            assert choose_arm_pca(state, t=5, last=last, rng=rng) == 1


class TestResolveConflict:
    @pytest.fixture
    def profile(self):
        return PreferenceProfile(
            np.array([[2.0, 1.0], [1.0, 2.0]]),
            np.array([[2.0, 1.0], [2.0, 1.0]]),
        )

    def test_no_requesters(self, profile):
        arm = new_arm_state("known_prefs", 0, 2)
        assert resolve_conflict(0, [], arm, profile, 1, np.random.default_rng(0)) is None

    def test_single_requester_always_accepted(self, profile):
        arm = new_arm_state("learning_ucb", 0, 2)
        assert resolve_conflict(0, [1], arm, profile, 1, np.random.default_rng(0)) == 1

    def test_known_prefs_picks_true_favorite_deterministically(self, profile):
        arm = new_arm_state("known_prefs", 0, 2)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            assert resolve_conflict(0, [0, 1], arm, profile, 3, rng) == 0

    def test_learning_ucb_unseen_tie_is_fair(self, profile):
        arm = new_arm_state("learning_ucb", 0, 2)
        rng = np.random.default_rng(11)
        trials = 10_000
        wins0 = sum(
            resolve_conflict(0, [0, 1], arm, profile, 2, rng) == 0 for _ in range(trials)
        )
        assert abs(wins0 / trials - 0.5) <= 0.03

    def test_learning_ucb_prefers_better_record(self, profile):
        arm = new_arm_state("learning_ucb", 0, 2)
        arm.reward_stats = pinned_reward_stats([1.0, 2.0])
        rng = np.random.default_rng(12)
        assert resolve_conflict(0, [0, 1], arm, profile, 9, rng) == 1

    def test_learning_ts_concentrated_posteriors(self, profile):
        arm = new_arm_state("learning_ts", 0, 2)
        arm.reward_posteriors = [GaussianPosterior(5.0, 1e12), GaussianPosterior(1.0, 1e12)]
        rng = np.random.default_rng(13)
        assert resolve_conflict(0, [0, 1], arm, profile, 9, rng) == 0


class TestPlayerUpdates:
    def test_uninvolved_player_keeps_beliefs(self):
        state = new_player_state("pca_ucb", 2, 3, 3, lam=0.5)
        before = player_digest(state)
        outcome = make_outcome(4, {0: 0, 1: 0, 2: 1}, {0: 0}, n_players=3, n_arms=3)
        update_player_after_round(state, 2, outcome)
        after = player_digest(state)
        before.pop("last_attempt")
        after.pop("last_attempt")
        assert before == after

    def test_matched_reward_folds_into_stats(self):
        state = new_player_state("ca_ucb", 0, 2, 2, lam=0.5)
        outcome = RoundOutcome(
            round=3,
            attempts={0: 1, 1: 0},
            matching=Matching({0: 1, 1: 0}),
            conflicts=(),
            player_rewards={0: 2.5, 1: -0.5},
            arm_rewards={0: 0.1, 1: 0.2},
        )
        update_player_after_round(state, 0, outcome)
        assert state.reward_stats[1] == RewardStats(1, 2.5)
        assert state.reward_stats[0] == RewardStats(0, 0.0)
        assert state.last_attempt == 1

    def test_oca_loss_promotes_winner(self):
        state = new_player_state("oca_ucb", 0, 3, 3, lam=0.5)
        loss = Conflict(arm=1, requesters=(0, 2), winner=2)
        outcome = make_outcome(4, {0: 1, 1: 0, 2: 1}, {1: 0, 2: 1}, [loss], n_arms=3)
        update_player_after_round(state, 0, outcome)
        assert state.position_beliefs[1].higher == frozenset({2})
        # Other arms' beliefs untouched.
        assert state.position_beliefs[0].higher == frozenset()

    def test_oca_winner_learns_nothing_about_order(self):
        state = new_player_state("oca_ucb", 2, 3, 3, lam=0.5)
        win = Conflict(arm=1, requesters=(0, 2), winner=2)
        outcome = make_outcome(4, {0: 1, 1: 0, 2: 1}, {1: 0, 2: 1}, [win], n_arms=3)
        update_player_after_round(state, 2, outcome)
        assert all(b.higher == frozenset() for b in state.position_beliefs)

    def test_pca_three_way_conflict_bookkeeping(self):
        conflict = Conflict(arm=0, requesters=(0, 1, 2), winner=0)
        outcome = make_outcome(4, {0: 0, 1: 0, 2: 0}, {0: 0}, [conflict], n_arms=3)

        winner = new_player_state("pca_ucb", 0, 3, 3, lam=0.5)
        update_player_after_round(winner, 0, outcome)
        assert winner.win_stats[1][0] == WinStats(1, 1)
        assert winner.win_stats[2][0] == WinStats(1, 1)

        loser = new_player_state("pca_ucb", 1, 3, 3, lam=0.5)
        update_player_after_round(loser, 1, outcome)
        assert loser.win_stats[0][0] == WinStats(0, 1)
        # Losers learn nothing about their order relative to other losers.
        assert loser.win_stats[2][0] == WinStats(0, 0)

    def test_pca_ts_counts_mirror_wins_and_losses(self):
        conflict = Conflict(arm=2, requesters=(0, 1), winner=1)
        outcome = make_outcome(4, {0: 2, 1: 2}, {1: 2}, [conflict], n_players=2, n_arms=3)
        state = new_player_state("pca_ts", 0, 2, 3, lam=0.5)
        update_player_after_round(state, 0, outcome)
        assert state.win_counts[1][2].alpha == 0
        assert state.win_counts[1][2].beta == 1


class TestArmUpdates:
    def test_known_prefs_is_a_noop(self):
        state = new_arm_state("known_prefs", 0, 2)
        outcome = make_outcome(3, {0: 0, 1: 1}, {0: 0, 1: 1}, n_arms=2)
        update_arm_after_round(state, 0, outcome)
        assert state.reward_stats is None and state.reward_posteriors is None

    def test_learning_arm_folds_accepted_pull_only(self):
        state = new_arm_state("learning_ucb", 0, 3)
        outcome = RoundOutcome(
            round=3,
            attempts={0: 0, 1: 0, 2: 1},
            matching=Matching({1: 0, 2: 1}),
            conflicts=(Conflict(0, (0, 1), 1),),
            player_rewards={0: 0.0, 1: 1.0, 2: 2.0},
            arm_rewards={0: 4.5, 1: 0.3},
        )
        update_arm_after_round(state, 0, outcome)
        assert state.reward_stats[1] == RewardStats(1, 4.5)
        assert state.reward_stats[0] == RewardStats(0, 0.0)
        assert state.reward_stats[2] == RewardStats(0, 0.0)

    def test_unrequested_arm_learns_nothing(self):
        state = new_arm_state("learning_ts", 2, 2)
        outcome = make_outcome(3, {0: 0, 1: 1}, {0: 0, 1: 1}, n_players=2, n_arms=3)
        before = list(state.reward_posteriors)
        update_arm_after_round(state, 2, outcome)
        assert state.reward_posteriors == before
