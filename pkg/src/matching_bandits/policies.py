"""Decision rules for players and arms in each information scenario.

Player kinds:

* ``ca_ucb``   — conflict-avoiding UCB against commonly known arm
  preferences (plausible sets built from true arm rankings).
* ``oca_ucb``  — optimistic CA-UCB: plausible sets built from learned
  higher/lower position beliefs, updated on lost conflicts.
* ``pca_ucb`` / ``pca_ts`` — probabilistic conflict avoidance: attempt
  the arm maximizing (reward estimate x believed win probability
  against the arm's previous holder), with UCB or Thompson Sampling
  estimators.

Arm kinds: ``known_prefs`` accepts its truly most-preferred requester;
``learning_ucb`` / ``learning_ts`` accept the requester with the highest
reward estimate under the respective estimator.

Every argmax tie breaks uniformly at random from the caller's stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .beliefs import (
    BetaWinCounts,
    GaussianPosterior,
    PositionBelief,
    RewardStats,
    WinStats,
    belief_digest_gaussian,
    belief_digest_reward,
    bernoulli_point_value,
    gaussian_update,
    position_update_on_loss,
    ucb_value,
    win_prob_value,
)
from .market import PreferenceProfile, RoundOutcome

PLAYER_KINDS = ("ca_ucb", "oca_ucb", "pca_ucb", "pca_ts")
ARM_KINDS = ("known_prefs", "learning_ucb", "learning_ts")


@dataclass
class PlayerPolicyState:
    """Per-player beliefs plus the previously attempted arm."""

    kind: str
    player_id: int
    n_players: int
    n_arms: int
    lam: float
    reward_stats: Optional[list[RewardStats]] = None
    reward_posteriors: Optional[list[GaussianPosterior]] = None
    win_stats: Optional[list[list[WinStats]]] = None          # [opponent][arm]
    win_counts: Optional[list[list[BetaWinCounts]]] = None    # [opponent][arm]
    position_beliefs: Optional[list[PositionBelief]] = None   # per arm
    last_attempt: Optional[int] = None
    ts_win_beta_sample: bool = False


@dataclass
class ArmPolicyState:
    """Per-arm beliefs about player rewards (learning kinds only)."""

    kind: str
    arm_id: int
    n_players: int
    reward_stats: Optional[list[RewardStats]] = None
    reward_posteriors: Optional[list[GaussianPosterior]] = None


def new_player_state(
    kind: str,
    player_id: int,
    n_players: int,
    n_arms: int,
    lam: float,
    ts_prior_mean: float = 0.0,
    ts_prior_precision: float = 1e-6,
    ts_win_beta_sample: bool = False,
) -> PlayerPolicyState:
    """Fresh optimistic beliefs: unexplored rewards, win probability 1."""
    if kind not in PLAYER_KINDS:
        raise ValueError(f"unknown player policy {kind!r}")
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda must be in [0, 1), got {lam}")
    state = PlayerPolicyState(
        kind=kind,
        player_id=player_id,
        n_players=n_players,
        n_arms=n_arms,
        lam=lam,
        ts_win_beta_sample=ts_win_beta_sample,
    )
    if kind == "pca_ts":
        prior = GaussianPosterior(mean=ts_prior_mean, precision=ts_prior_precision)
        state.reward_posteriors = [prior] * n_arms
        state.win_counts = [[BetaWinCounts()] * n_arms for _ in range(n_players)]
    else:
        state.reward_stats = [RewardStats()] * n_arms
        if kind == "pca_ucb":
            state.win_stats = [[WinStats()] * n_arms for _ in range(n_players)]
        if kind == "oca_ucb":
            state.position_beliefs = [PositionBelief.fresh(player_id, n_players)] * n_arms
    return state


def new_arm_state(
    kind: str,
    arm_id: int,
    n_players: int,
    ts_prior_mean: float = 0.0,
    ts_prior_precision: float = 1e-6,
) -> ArmPolicyState:
    if kind not in ARM_KINDS:
        raise ValueError(f"unknown arm policy {kind!r}")
    state = ArmPolicyState(kind=kind, arm_id=arm_id, n_players=n_players)
    if kind == "learning_ucb":
        state.reward_stats = [RewardStats()] * n_players
    elif kind == "learning_ts":
        prior = GaussianPosterior(mean=ts_prior_mean, precision=ts_prior_precision)
        state.reward_posteriors = [prior] * n_players
    return state


def plausible_set(
    player: int,
    last: Optional[RoundOutcome],
    arm_means: Optional[np.ndarray] = None,
    position_beliefs: Optional[Sequence[PositionBelief]] = None,
) -> set[int]:
    """Arms the player could plausibly win next round.

    Includes every arm unmatched last round, the player's own successful
    pull, and each arm held by another player the arm is believed to
    rank below oneself — by true arm preferences (``arm_means``) or by
    learned position beliefs, whichever knowledge source is given.
    Before any outcome exists, every arm is plausible.
    """
    if (arm_means is None) == (position_beliefs is None):
        raise ValueError("pass exactly one of arm_means / position_beliefs")
    n_arms = arm_means.shape[0] if arm_means is not None else len(position_beliefs)
    if last is None:
        return set(range(n_arms))
    holders = last.matching.arm_holders()
    plausible = set(range(n_arms)) - holders.keys()
    for a, holder in holders.items():
        if holder == player:
            plausible.add(a)
        elif arm_means is not None:
            if arm_means[a, player] > arm_means[a, holder]:
                plausible.add(a)
        elif holder in position_beliefs[a].lower:
            plausible.add(a)
    return plausible


def _argmax_with_random_ties(scores: list[float], ids: list[int], rng: np.random.Generator) -> int:
    best = max(scores)
    tied = [ids[i] for i, s in enumerate(scores) if s == best]
    if len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(0, len(tied)))]


def choose_arm_ca(
    state: PlayerPolicyState,
    t: int,
    plausible: Union[set[int], Callable[[], set[int]]],
    rng: np.random.Generator,
) -> int:
    """CA/OCA attempt: repeat with probability lambda, else best UCB in the set.

    ``plausible`` may be a zero-argument callable; it is only evaluated
    when the delay does not trigger, which keeps high-lambda rounds
    cheap.  An empty set falls back to the whole arm range (only
    possible before any outcome is published).
    """
    if state.last_attempt is not None and rng.random() < state.lam:
        return state.last_attempt
    arms = plausible() if callable(plausible) else plausible
    if not arms:
        arms = range(state.n_arms)
    ids = sorted(arms)
    stats = state.reward_stats
    scores = [ucb_value(stats[a].count, stats[a].total, t) for a in ids]
    return _argmax_with_random_ties(scores, ids, rng)


def choose_arm_pca(
    state: PlayerPolicyState,
    t: int,
    last: Optional[RoundOutcome],
    rng: np.random.Generator,
) -> int:
    """PCA attempt: uniform on round one, else maximize reward x win probability.

    The win probability is against whoever successfully pulled the arm
    last round (1 when the arm was unmatched or held by oneself).
    """
    if t == 1 or last is None:
        return int(rng.integers(0, state.n_arms))
    if state.last_attempt is not None and rng.random() < state.lam:
        return state.last_attempt
    holders = last.matching.arm_holders()
    n_arms = state.n_arms
    me = state.player_id

    if state.kind == "pca_ts":
        posts = state.reward_posteriors
        means = [p.mean for p in posts]
        sds = [math.sqrt(1.0 / p.precision) for p in posts]
        rewards = rng.normal(means, sds)  # one batch draw, arms ascending
    else:
        stats = state.reward_stats
        rewards = [ucb_value(stats[a].count, stats[a].total, t) for a in range(n_arms)]

    scores = []
    for a in range(n_arms):
        holder = holders.get(a)
        if holder is None or holder == me:
            z = 1.0
        elif state.kind == "pca_ts":
            counts = state.win_counts[holder][a]
            if state.ts_win_beta_sample:
                z = float(rng.beta(counts.alpha + 1, counts.beta + 1))
            else:
                z = bernoulli_point_value(counts.alpha, counts.beta)
        else:
            ws = state.win_stats[holder][a]
            z = win_prob_value(ws.wins, ws.total, t)
        # 0 * inf would be nan; a certain loss is worth exactly 0.
        scores.append(0.0 if z == 0.0 else float(rewards[a]) * z)
    return _argmax_with_random_ties(scores, list(range(n_arms)), rng)


def resolve_conflict(
    arm: int,
    requesters: Sequence[int],
    arm_state: ArmPolicyState,
    profile: PreferenceProfile,
    t: int,
    rng: np.random.Generator,
) -> Optional[int]:
    """Pick the accepted requester (None when nobody asked).

    A sole requester is always accepted without consuming randomness.
    """
    reqs = sorted(requesters)
    if not reqs:
        return None
    if len(reqs) == 1:
        return reqs[0]
    if arm_state.kind == "known_prefs":
        means = profile.arm_means
        return max(reqs, key=lambda p: means[arm, p])  # strict prefs: no ties
    if arm_state.kind == "learning_ucb":
        stats = arm_state.reward_stats
        scores = [ucb_value(stats[p].count, stats[p].total, t) for p in reqs]
    else:
        posts = arm_state.reward_posteriors
        means = [posts[p].mean for p in reqs]
        sds = [math.sqrt(1.0 / posts[p].precision) for p in reqs]
        scores = list(rng.normal(means, sds))  # one batch draw, requesters ascending
    return _argmax_with_random_ties(scores, reqs, rng)


def update_player_after_round(
    state: PlayerPolicyState, self_id: int, outcome: RoundOutcome
) -> PlayerPolicyState:
    """Fold the published round into the player's beliefs (in place).

    Matched players absorb their sampled reward; OCA players move
    conflict winners into the believed-higher set of the contested arm;
    PCA players update pairwise win counters for every conflict they
    took part in (the winner records a win against each other
    requester, a loser records a loss against the winner only).
    """
    state.last_attempt = outcome.attempts.get(self_id, state.last_attempt)

    matched_arm = outcome.matching.arm_of(self_id)
    if matched_arm is not None:
        reward = outcome.player_rewards[self_id]
        if state.kind == "pca_ts":
            state.reward_posteriors[matched_arm] = gaussian_update(
                state.reward_posteriors[matched_arm], (reward,)
            )
        else:
            state.reward_stats[matched_arm] = state.reward_stats[matched_arm].add(reward)

    if state.kind == "oca_ucb":
        for c in outcome.conflicts:
            if self_id in c.requesters and c.winner != self_id:
                state.position_beliefs[c.arm] = position_update_on_loss(
                    state.position_beliefs[c.arm], c.winner
                )
    elif state.kind in ("pca_ucb", "pca_ts"):
        for c in outcome.conflicts:
            if self_id not in c.requesters:
                continue
            if state.kind == "pca_ucb":
                table = state.win_stats
                if c.winner == self_id:
                    for q in c.requesters:
                        if q != self_id:
                            table[q][c.arm] = table[q][c.arm].record(True)
                else:
                    table[c.winner][c.arm] = table[c.winner][c.arm].record(False)
            else:
                table = state.win_counts
                if c.winner == self_id:
                    for q in c.requesters:
                        if q != self_id:
                            table[q][c.arm] = table[q][c.arm].record(True)
                else:
                    table[c.winner][c.arm] = table[c.winner][c.arm].record(False)
    return state


def update_arm_after_round(
    state: ArmPolicyState, self_id: int, outcome: RoundOutcome
) -> ArmPolicyState:
    """Learning arms absorb the sampled reward of an accepted pull."""
    if state.kind == "known_prefs":
        return state
    holder = outcome.matching.arm_holders().get(self_id)
    if holder is None:
        return state
    reward = outcome.arm_rewards[self_id]
    if state.kind == "learning_ucb":
        state.reward_stats[holder] = state.reward_stats[holder].add(reward)
    else:
        state.reward_posteriors[holder] = gaussian_update(
            state.reward_posteriors[holder], (reward,)
        )
    return state


def player_digest(state: PlayerPolicyState) -> dict:
    """JSON-able snapshot of one player's beliefs."""
    out: dict = {"kind": state.kind, "last_attempt": state.last_attempt}
    if state.reward_stats is not None:
        out["rewards"] = belief_digest_reward(state.reward_stats)
    if state.reward_posteriors is not None:
        out["rewards"] = belief_digest_gaussian(state.reward_posteriors)
    if state.position_beliefs is not None:
        out["higher"] = [sorted(b.higher) for b in state.position_beliefs]
    if state.win_stats is not None:
        out["conflicts"] = [
            [[ws.wins, ws.total] for ws in row] for row in state.win_stats
        ]
    if state.win_counts is not None:
        out["conflicts"] = [
            [[wc.alpha, wc.beta] for wc in row] for row in state.win_counts
        ]
    return out


def arm_digest(state: ArmPolicyState) -> dict:
    out: dict = {"kind": state.kind}
    if state.reward_stats is not None:
        out["rewards"] = belief_digest_reward(state.reward_stats)
    if state.reward_posteriors is not None:
        out["rewards"] = belief_digest_gaussian(state.reward_posteriors)
    return out
