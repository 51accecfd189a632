"""Seeded preference-profile generators for the three experiment regimes.

All generators are pure functions of their arguments: the same spec and
seed reproduce the same profile bit-for-bit.  Mean rewards are assigned
as ranks (1 = least preferred), so every generated row is a permutation
of {1..K} (player side) or {1..N} (arm side).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .market import PreferenceProfile

GENERATOR_KINDS = ("uniform", "beta_heterogeneous", "edge_correlated")


@dataclass(frozen=True)
class GeneratorSpec:
    """Configuration-file form of a generator invocation."""

    kind: str
    n_players: int
    n_arms: int
    beta: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if not 1 <= self.n_players <= self.n_arms:
            raise ValueError(
                f"need 1 <= n_players <= n_arms, got N={self.n_players}, K={self.n_arms}"
            )
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_players": self.n_players,
            "n_arms": self.n_arms,
            "beta": self.beta,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "GeneratorSpec":
        return cls(
            kind=doc["kind"],
            n_players=int(doc["n_players"]),
            n_arms=int(doc["n_arms"]),
            beta=float(doc.get("beta", 0.0)),
            seed=int(doc.get("seed", 0)),
        )


def _rank_row(values: np.ndarray) -> np.ndarray:
    """Rank of each entry within the row, 1 = smallest (so max rank = best)."""
    order = np.argsort(values)
    ranks = np.empty(len(values), dtype=float)
    ranks[order] = np.arange(1, len(values) + 1)
    return ranks


def _permutation_rows(rng: np.random.Generator, rows: int, length: int) -> np.ndarray:
    out = np.empty((rows, length), dtype=float)
    base = np.arange(1, length + 1, dtype=float)
    for r in range(rows):
        out[r] = rng.permutation(base)
    return out


def _logistic(rng: np.random.Generator, size: int) -> np.ndarray:
    # Inverse CDF ln(u/(1-u)) with u in (0,1); rng.random() can return
    # exactly 0, which must be re-drawn.
    u = rng.random(size)
    while np.any(u == 0.0):
        zeros = u == 0.0
        u[zeros] = rng.random(int(zeros.sum()))
    return np.log(u / (1.0 - u))


def gen_uniform(n: int, k: int, seed: int) -> PreferenceProfile:
    """Independent uniform random rank permutations on both sides.

    Draw order: player rows 0..n-1, then arm rows 0..k-1.
    """
    if not 1 <= n <= k:
        raise ValueError(f"need 1 <= n <= k, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    player_means = _permutation_rows(rng, n, k)
    arm_means = _permutation_rows(rng, k, n)
    return PreferenceProfile(player_means, arm_means)


def gen_beta_heterogeneous(n: int, k: int, beta: float, seed: int) -> PreferenceProfile:
    """Player preferences mixing a shared arm-quality signal with logistic noise.

    Shared qualities x_j ~ U[0,1]; per-player utilities
    beta * x_j + Logistic(0,1) are converted to ranks, so larger beta
    means more homogeneous player preferences.  Arm preferences stay
    uniform random (heterogeneity is varied on the player side only).

    Draw order: the k shared qualities, then one logistic-noise row per
    player (re-drawn in full on an exact floating-point tie), then arm
    permutation rows.
    """
    if not 1 <= n <= k:
        raise ValueError(f"need 1 <= n <= k, got n={n}, k={k}")
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    rng = np.random.default_rng(seed)
    x = rng.random(k)
    player_means = np.empty((n, k), dtype=float)
    for i in range(n):
        while True:
            utilities = beta * x + _logistic(rng, k)
            if len(set(utilities.tolist())) == k:
                break
        player_means[i] = _rank_row(utilities)
    arm_means = _permutation_rows(rng, k, n)
    return PreferenceProfile(player_means, arm_means)


def gen_edge_correlated(n: int, k: int, seed: int) -> PreferenceProfile:
    """Maximally edge-correlated preferences from shared pair weights.

    One weight w[i][j] ~ U[0,1] per (player, arm) pair; player i ranks
    arms by w[i][:] and arm j ranks players by w[:][j], so both
    endpoints of an edge agree on its value.  The whole weight matrix is
    re-drawn if any row or column contains an exact tie.
    """
    if not 1 <= n <= k:
        raise ValueError(f"need 1 <= n <= k, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    while True:
        w = rng.random((n, k))
        rows_ok = all(len(set(w[i].tolist())) == k for i in range(n))
        cols_ok = all(len(set(w[:, j].tolist())) == n for j in range(k))
        if rows_ok and cols_ok:
            break
    return profile_from_edge_weights(w)


def profile_from_edge_weights(w: np.ndarray) -> PreferenceProfile:
    """Rank-valued profile in which both sides order an edge by its weight."""
    w = np.asarray(w, dtype=float)
    n, k = w.shape
    player_means = np.empty((n, k), dtype=float)
    for i in range(n):
        player_means[i] = _rank_row(w[i])
    arm_means = np.empty((k, n), dtype=float)
    for j in range(k):
        arm_means[j] = _rank_row(w[:, j])
    return PreferenceProfile(player_means, arm_means)


def generate(spec: GeneratorSpec) -> PreferenceProfile:
    """Dispatch on the spec's generator kind."""
    if spec.kind == "uniform":
        return gen_uniform(spec.n_players, spec.n_arms, spec.seed)
    if spec.kind == "beta_heterogeneous":
        return gen_beta_heterogeneous(spec.n_players, spec.n_arms, spec.beta, spec.seed)
    if spec.kind == "edge_correlated":
        return gen_edge_correlated(spec.n_players, spec.n_arms, spec.seed)
    raise ValueError(f"unknown generator kind {spec.kind!r}")
