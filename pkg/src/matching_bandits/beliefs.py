"""Belief-state primitives shared by the learning policies.

Covers the UCB reward index and win-probability index, Gaussian
posterior updates/sampling with known unit observation variance, the
Bernoulli conflict-win point estimate, and the optimistic position
beliefs used by OCA-UCB.  All types are immutable values; updates
return new instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class RewardStats:
    """Pull count and reward total for one partner."""

    count: int = 0
    total: float = 0.0

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.count == 0 and self.total != 0.0:
            raise ValueError("zero pulls cannot carry reward")

    @property
    def mean(self) -> float:
        return self.total / self.count

    def add(self, reward: float) -> "RewardStats":
        return RewardStats(self.count + 1, self.total + reward)


@dataclass(frozen=True)
class WinStats:
    """Win/total counters for one recurring pairwise conflict."""

    wins: int = 0
    total: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.wins <= self.total:
            raise ValueError("need 0 <= wins <= total")

    def record(self, won: bool) -> "WinStats":
        return WinStats(self.wins + (1 if won else 0), self.total + 1)


@dataclass(frozen=True)
class GaussianPosterior:
    """Normal posterior over a mean reward with known observation precision."""

    mean: float = 0.0
    precision: float = 1e-6
    known_obs_precision: float = 1.0

    def __post_init__(self) -> None:
        if self.precision <= 0 or self.known_obs_precision <= 0:
            raise ValueError("precisions must be positive")


@dataclass(frozen=True)
class BetaWinCounts:
    """Conflict win/loss counters backing the Bernoulli win estimate."""

    alpha: int = 0
    beta: int = 0

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("counts must be nonnegative")

    def record(self, won: bool) -> "BetaWinCounts":
        return BetaWinCounts(self.alpha + (1 if won else 0), self.beta + (0 if won else 1))


@dataclass(frozen=True)
class PositionBelief:
    """Players believed ranked above/below oneself in one arm's ordering.

    The two sets partition all other players; the optimistic initial
    state puts everyone in ``lower``.
    """

    higher: frozenset[int]
    lower: frozenset[int]

    def __post_init__(self) -> None:
        if self.higher & self.lower:
            raise ValueError("higher and lower sets must be disjoint")

    @classmethod
    def fresh(cls, self_id: int, n_players: int) -> "PositionBelief":
        others = frozenset(p for p in range(n_players) if p != self_id)
        return cls(higher=frozenset(), lower=others)


def ucb_value(count: int, total: float, t: int) -> float:
    """UCB reward index from raw counters (infinity while unexplored)."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    if count == 0:
        return math.inf
    return total / count + math.sqrt(3.0 * math.log(t) / (2.0 * count))


def ucb_index(stats: RewardStats, t: int) -> float:
    """UCB index of a partner's reward at round t (pull counts as of t-1)."""
    return ucb_value(stats.count, stats.total, t)


def win_prob_value(wins: int, total: int, t: int) -> float:
    """Optimistic conflict-win probability, upper-censored at 1."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    if total == 0:
        return 1.0
    return min(1.0, wins / total + math.sqrt(3.0 * math.log(t) / (2.0 * total)))


def ucb_win_prob(stats: WinStats, t: int) -> float:
    return win_prob_value(stats.wins, stats.total, t)


def gaussian_update(post: GaussianPosterior, rewards: Sequence[float]) -> GaussianPosterior:
    """Fold a batch of observations into the posterior.

    mean' = (tau0*mu0 + tau*sum(x)) / (tau0 + n*tau), precision' = tau0 + n*tau.
    Order-independent across batches.
    """
    n = len(rewards)
    if n == 0:
        return post
    tau = post.known_obs_precision
    new_precision = post.precision + n * tau
    new_mean = (post.precision * post.mean + tau * math.fsum(rewards)) / new_precision
    return replace(post, mean=new_mean, precision=new_precision)


def gaussian_sample(post: GaussianPosterior, rng: np.random.Generator) -> float:
    """One draw from Normal(mean, 1/precision)."""
    return float(rng.normal(post.mean, math.sqrt(1.0 / post.precision)))


def bernoulli_point_value(alpha: int, beta: int) -> float:
    """Win-rate point estimate; optimistically 1 before any observed conflict."""
    if alpha + beta == 0:
        return 1.0
    return alpha / (alpha + beta)


def bernoulli_point(counts: BetaWinCounts) -> float:
    return bernoulli_point_value(counts.alpha, counts.beta)


def position_update_on_loss(belief: PositionBelief, winner: int) -> PositionBelief:
    """Move a conflict winner into the believed-higher set (idempotent)."""
    if winner not in belief.higher and winner not in belief.lower:
        raise ValueError(f"player {winner} is not in this belief's universe (self?)")
    if winner in belief.higher:
        return belief
    return PositionBelief(higher=belief.higher | {winner}, lower=belief.lower - {winner})


def belief_digest_reward(stats: Iterable[RewardStats]) -> dict:
    """JSON-able snapshot of a reward-stats vector."""
    counts, totals = [], []
    for s in stats:
        counts.append(s.count)
        totals.append(s.total)
    return {"counts": counts, "totals": totals}


def belief_digest_gaussian(posts: Iterable[GaussianPosterior]) -> dict:
    means, precisions = [], []
    for p in posts:
        means.append(p.mean)
        precisions.append(p.precision)
    return {"means": means, "precisions": precisions}
