"""Bundled experiment presets.

One preset per experiment family: the two known-preference scenarios
and the two unknown-preference estimator variants, each crossed with a
market-size sweep (N=K in {5,10,15,20}, uniform preferences) and a
player-heterogeneity sweep (N=K=10, beta in {0,10,100,1000}); plus the
edge-correlation comparison (OCA-UCB at N=K=10, edge-correlated vs
uniform preferences, 100 runs, proxy window 500 rounds at threshold
0.9).

Full-scale horizons and run counts match the reference experiments;
pass ``--n-runs`` / ``--horizon`` to the CLI for desk-scale versions.
"""

from __future__ import annotations

from .harness import ExperimentSpec
from .prefgen import GeneratorSpec
from .simulator import EpisodeConfig, default_policies

DEFAULT_MASTER_SEED = 12345

_SIZES = (5, 10, 15, 20)
_BETAS = (0.0, 10.0, 100.0, 1000.0)


def _episode(scenario: str, estimator: str, generator: GeneratorSpec, horizon: int) -> EpisodeConfig:
    player_policy, arm_policy = default_policies(scenario, estimator)
    return EpisodeConfig(
        scenario=scenario,
        player_policy=player_policy,
        arm_policy=arm_policy,
        generator=generator,
        horizon=horizon,
        lam=0.9,
        snapshot_every=10,
    )


def _size_sweep() -> tuple[dict, ...]:
    return tuple(
        {"label": f"N{n}", "overrides": {"generator": {"n_players": n, "n_arms": n}}}
        for n in _SIZES
    )


def _beta_sweep() -> tuple[dict, ...]:
    return tuple(
        {"label": f"beta{beta:g}", "overrides": {"generator": {"beta": beta}}}
        for beta in _BETAS
    )


def _sizes_spec(scenario: str, estimator: str, horizon: int) -> ExperimentSpec:
    gen = GeneratorSpec(kind="uniform", n_players=5, n_arms=5)
    return ExperimentSpec(
        episode=_episode(scenario, estimator, gen, horizon),
        n_runs=1000,
        master_seed=DEFAULT_MASTER_SEED,
        sweep=_size_sweep(),
    )


def _beta_spec(scenario: str, estimator: str, horizon: int) -> ExperimentSpec:
    gen = GeneratorSpec(kind="beta_heterogeneous", n_players=10, n_arms=10, beta=0.0)
    return ExperimentSpec(
        episode=_episode(scenario, estimator, gen, horizon),
        n_runs=1000,
        master_seed=DEFAULT_MASTER_SEED,
        sweep=_beta_sweep(),
    )


def _edge_correlation_spec() -> ExperimentSpec:
    gen = GeneratorSpec(kind="uniform", n_players=10, n_arms=10)
    return ExperimentSpec(
        episode=_episode("APKP", "ucb", gen, 3000),
        n_runs=100,
        master_seed=DEFAULT_MASTER_SEED,
        sweep=(
            {"label": "uniform", "overrides": {"generator": {"kind": "uniform"}}},
            {"label": "edge_correlated", "overrides": {"generator": {"kind": "edge_correlated"}}},
        ),
    )


PRESETS = {
    "apck_sizes": lambda: _sizes_spec("APCK", "ucb", 6000),
    "apck_beta": lambda: _beta_spec("APCK", "ucb", 3000),
    "apkp_sizes": lambda: _sizes_spec("APKP", "ucb", 6000),
    "apkp_beta": lambda: _beta_spec("APKP", "ucb", 3000),
    "apu_ucb_sizes": lambda: _sizes_spec("APU", "ucb", 20000),
    "apu_ucb_beta": lambda: _beta_spec("APU", "ucb", 10000),
    "apu_ts_sizes": lambda: _sizes_spec("APU", "ts", 20000),
    "apu_ts_beta": lambda: _beta_spec("APU", "ts", 10000),
    "edge_correlation": _edge_correlation_spec,
}


def preset(name: str) -> ExperimentSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
