"""Repeated two-sided matching under preference uncertainty.

Simulates decentralized bandit learning in matching markets: CA-UCB
players against known-preference arms, OCA-UCB players that must learn
their own position in the arms' rankings, and PCA-DAA players (UCB or
Thompson Sampling flavored) against arms that learn their own
preferences from rewards.
"""

__version__ = "0.1.0"

from .harness import (
    AggregateRow,
    ExperimentSpec,
    convergence_proxy,
    mix64,
    run_experiment,
)
from .market import (
    Conflict,
    Matching,
    PreferenceProfile,
    RoundOutcome,
    blocking_pairs,
    enumerate_stable_matchings,
    gale_shapley,
    max_player_regret,
    prefers,
)
from .prefgen import GeneratorSpec, generate, gen_beta_heterogeneous, gen_edge_correlated, gen_uniform
from .simulator import EpisodeConfig, RunLog, Snapshot, default_policies, run_episode

__all__ = [
    "AggregateRow",
    "Conflict",
    "EpisodeConfig",
    "ExperimentSpec",
    "GeneratorSpec",
    "Matching",
    "PreferenceProfile",
    "RoundOutcome",
    "RunLog",
    "Snapshot",
    "blocking_pairs",
    "convergence_proxy",
    "default_policies",
    "enumerate_stable_matchings",
    "gale_shapley",
    "generate",
    "gen_beta_heterogeneous",
    "gen_edge_correlated",
    "gen_uniform",
    "max_player_regret",
    "mix64",
    "prefers",
    "run_episode",
    "run_experiment",
    "__version__",
]
