"""Round engine for one episode of repeated matching.

Each round: every player picks an arm to attempt, every requested arm
accepts one requester, matched pairs draw unit-variance Gaussian
rewards, the full matching is published, and all beliefs update.

Determinism: an episode consumes a single seeded stream in a fixed
order per round — player choice draws in ascending player order (round
one: one uniform arm draw per player; later rounds: one delay draw,
then any selection draws), conflict-resolution draws in ascending arm
order, then two reward batches (player rewards, arm rewards) over the
matched arms in ascending arm order.  A RunLog is therefore a pure
function of its EpisodeConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .market import (
    Conflict,
    Matching,
    PreferenceProfile,
    RoundOutcome,
    blocking_pairs,
    gale_shapley,
    max_player_regret,
)
from .policies import (
    ARM_KINDS,
    PLAYER_KINDS,
    ArmPolicyState,
    PlayerPolicyState,
    arm_digest,
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
from .prefgen import GeneratorSpec, generate

SCENARIOS = ("APCK", "APKP", "APU")

# Allowed (player, arm) policy kinds per information scenario.
_SCENARIO_POLICIES = {
    "APCK": (("ca_ucb",), ("known_prefs",)),
    "APKP": (("oca_ucb",), ("known_prefs",)),
    "APU": (("pca_ucb", "pca_ts"), ("learning_ucb", "learning_ts")),
}


def default_policies(scenario: str, estimator: str = "ucb") -> tuple[str, str]:
    """Canonical policy pair for a scenario (APU picks the estimator family)."""
    if scenario == "APCK":
        return "ca_ucb", "known_prefs"
    if scenario == "APKP":
        return "oca_ucb", "known_prefs"
    if scenario == "APU":
        if estimator == "ucb":
            return "pca_ucb", "learning_ucb"
        if estimator == "ts":
            return "pca_ts", "learning_ts"
        raise ValueError(f"estimator must be 'ucb' or 'ts', got {estimator!r}")
    raise ValueError(f"unknown scenario {scenario!r}")


@dataclass(frozen=True)
class EpisodeConfig:
    """Everything needed to reproduce one episode bit-for-bit."""

    scenario: str
    player_policy: str
    arm_policy: str
    generator: GeneratorSpec
    horizon: int
    lam: float = 0.9
    snapshot_every: int = 10
    seed: int = 0
    ts_prior_mean: float = 0.0
    ts_prior_precision: float = 1e-6
    ts_win_beta_sample: bool = False

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        players, arms = _SCENARIO_POLICIES[self.scenario]
        if self.player_policy not in players or self.arm_policy not in arms:
            raise ValueError(
                f"scenario {self.scenario} does not allow policies "
                f"({self.player_policy}, {self.arm_policy})"
            )
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must be in [0, 1), got {self.lam}")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        if self.ts_prior_precision <= 0:
            raise ValueError("ts_prior_precision must be positive")

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "player_policy": self.player_policy,
            "arm_policy": self.arm_policy,
            "generator": self.generator.to_json_dict(),
            "horizon": self.horizon,
            "lambda": self.lam,
            "snapshot_every": self.snapshot_every,
            "seed": self.seed,
            "ts_prior_mean": self.ts_prior_mean,
            "ts_prior_precision": self.ts_prior_precision,
            "ts_win_beta_sample": self.ts_win_beta_sample,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "EpisodeConfig":
        return cls(
            scenario=doc["scenario"],
            player_policy=doc["player_policy"],
            arm_policy=doc["arm_policy"],
            generator=GeneratorSpec.from_json_dict(doc["generator"]),
            horizon=int(doc["horizon"]),
            lam=float(doc.get("lambda", 0.9)),
            snapshot_every=int(doc.get("snapshot_every", 10)),
            seed=int(doc.get("seed", 0)),
            ts_prior_mean=float(doc.get("ts_prior_mean", 0.0)),
            ts_prior_precision=float(doc.get("ts_prior_precision", 1e-6)),
            ts_win_beta_sample=bool(doc.get("ts_win_beta_sample", False)),
        )


@dataclass(frozen=True)
class Snapshot:
    """Market state sampled at round t.

    All three metrics are instantaneous readings of the snapshot round:
    ``conflicts`` is the number of arms contested by two or more
    requesters in that round.
    """

    t: int
    stable: bool
    max_regret: float
    conflicts: int
    matching: Matching


@dataclass
class RunLog:
    """Per-episode time series plus a final belief digest."""

    config: EpisodeConfig
    snapshots: list[Snapshot]
    belief_digest: dict = field(default_factory=dict)


def snapshot_metrics(
    profile: PreferenceProfile,
    outcome: RoundOutcome,
    pessimal: Optional[Matching] = None,
) -> dict:
    """Stability flag, true-mean max regret, and this round's conflict count."""
    return {
        "stable": not blocking_pairs(profile, outcome.matching),
        "max_regret": max_player_regret(profile, outcome.matching, pessimal=pessimal),
        "conflicts": len(outcome.conflicts),
    }


def run_round(
    profile: PreferenceProfile,
    player_states: list[PlayerPolicyState],
    arm_states: list[ArmPolicyState],
    t: int,
    last: Optional[RoundOutcome],
    rng: np.random.Generator,
) -> RoundOutcome:
    """Play one round and apply all belief updates."""
    n, k = profile.n_players, profile.n_arms

    attempts: dict[int, int] = {}
    for i in range(n):
        st = player_states[i]
        if st.kind == "ca_ucb":
            attempts[i] = choose_arm_ca(
                st, t, lambda i=i: plausible_set(i, last, arm_means=profile.arm_means), rng
            )
        elif st.kind == "oca_ucb":
            attempts[i] = choose_arm_ca(
                st,
                t,
                lambda i=i, st=st: plausible_set(i, last, position_beliefs=st.position_beliefs),
                rng,
            )
        else:
            attempts[i] = choose_arm_pca(st, t, last, rng)

    requests: dict[int, list[int]] = {}
    for i in range(n):
        requests.setdefault(attempts[i], []).append(i)

    assignment: dict[int, int] = {}
    conflicts: list[Conflict] = []
    for a in sorted(requests):
        reqs = requests[a]  # ascending by construction
        winner = resolve_conflict(a, reqs, arm_states[a], profile, t, rng)
        assignment[winner] = a
        if len(reqs) >= 2:
            conflicts.append(Conflict(arm=a, requesters=tuple(reqs), winner=winner))
    matching = Matching(assignment)

    player_rewards = dict.fromkeys(range(n), 0.0)
    arm_rewards = dict.fromkeys(range(k), 0.0)
    matched = sorted(assignment.items(), key=lambda pa: pa[1])
    if matched:
        p_mu = [float(profile.player_means[p, a]) for p, a in matched]
        a_mu = [float(profile.arm_means[a, p]) for p, a in matched]
        p_draws = rng.normal(p_mu, 1.0)
        a_draws = rng.normal(a_mu, 1.0)
        for (p, a), rp, ra in zip(matched, p_draws, a_draws):
            player_rewards[p] = float(rp)
            arm_rewards[a] = float(ra)

    outcome = RoundOutcome(
        round=t,
        attempts=attempts,
        matching=matching,
        conflicts=tuple(conflicts),
        player_rewards=player_rewards,
        arm_rewards=arm_rewards,
    )

    for i in range(n):
        update_player_after_round(player_states[i], i, outcome)
    for a in range(k):
        update_arm_after_round(arm_states[a], a, outcome)
    return outcome


def init_states(
    config: EpisodeConfig, profile: PreferenceProfile
) -> tuple[list[PlayerPolicyState], list[ArmPolicyState]]:
    n, k = profile.n_players, profile.n_arms
    players = [
        new_player_state(
            config.player_policy,
            i,
            n,
            k,
            config.lam,
            ts_prior_mean=config.ts_prior_mean,
            ts_prior_precision=config.ts_prior_precision,
            ts_win_beta_sample=config.ts_win_beta_sample,
        )
        for i in range(n)
    ]
    arms = [
        new_arm_state(
            config.arm_policy,
            a,
            n,
            ts_prior_mean=config.ts_prior_mean,
            ts_prior_precision=config.ts_prior_precision,
        )
        for a in range(k)
    ]
    return players, arms


def run_episode(config: EpisodeConfig) -> RunLog:
    """Generate the profile, play ``horizon`` rounds, snapshot every s rounds."""
    profile = generate(config.generator)
    rng = np.random.default_rng(config.seed)
    players, arms = init_states(config, profile)
    pessimal = gale_shapley(profile, proposers="arms")

    snapshots: list[Snapshot] = []
    last: Optional[RoundOutcome] = None
    for t in range(1, config.horizon + 1):
        outcome = run_round(profile, players, arms, t, last, rng)
        if t % config.snapshot_every == 0:
            metrics = snapshot_metrics(profile, outcome, pessimal=pessimal)
            snapshots.append(
                Snapshot(
                    t=t,
                    stable=metrics["stable"],
                    max_regret=metrics["max_regret"],
                    conflicts=metrics["conflicts"],
                    matching=outcome.matching,
                )
            )
        last = outcome

    digest = {
        "players": [player_digest(p) for p in players],
        "arms": [arm_digest(a) for a in arms],
    }
    return RunLog(config=config, snapshots=snapshots, belief_digest=digest)
