"""Command-line interface.

Subcommands:

* ``run``       — execute an experiment spec file (or bundled preset),
  writing runs.csv / aggregate.csv / config.json per variant.
* ``aggregate`` — recompute aggregate.csv from a stored runs.csv.
* ``proxy``     — convergence proxy from an aggregate.csv (window given
  in rounds and converted via the snapshot cadence).
* ``oracle``    — stable matchings and Gale-Shapley outcomes of a
  profile JSON file.
* ``gen``       — emit a preference profile from generator parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .harness import (
    ExperimentSpec,
    aggregate_csv_text,
    aggregate_rows_from_runs,
    convergence_proxy,
    expand_sweep,
    proxy_csv_text,
    read_aggregate_csv,
    read_runs_csv,
    run_experiment,
    write_experiment_outputs,
    _write_text,
)
from .market import PreferenceProfile, enumerate_stable_matchings, gale_shapley
from .prefgen import GENERATOR_KINDS, GeneratorSpec, generate
from .presets import PRESETS, preset


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matching-bandits",
        description="Two-sided bandit matching-market simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment spec")
    p_run.add_argument("spec", nargs="?", help="experiment spec JSON file")
    p_run.add_argument("--preset", choices=sorted(PRESETS), help="bundled preset name")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--workers", type=int, default=1, help="worker processes")
    p_run.add_argument("--n-runs", type=int, help="override the run count")
    p_run.add_argument("--horizon", type=int, help="override the episode horizon")
    p_run.add_argument("--master-seed", type=int, help="override the master seed")

    p_agg = sub.add_parser("aggregate", help="recompute aggregates from runs.csv")
    p_agg.add_argument("--runs", required=True, help="runs.csv path")
    p_agg.add_argument("--out", required=True, help="aggregate.csv path")

    p_proxy = sub.add_parser("proxy", help="convergence proxy from aggregate.csv")
    p_proxy.add_argument("--aggregate", required=True, help="aggregate.csv path")
    p_proxy.add_argument("--out", required=True, help="proxy.csv path")
    p_proxy.add_argument("--window", type=int, default=1000, help="window in rounds")
    p_proxy.add_argument("--threshold", type=float, default=0.9, help="stability threshold")
    p_proxy.add_argument(
        "--snapshot-every",
        type=int,
        help="snapshot cadence in rounds (default: inferred from the t column)",
    )

    p_oracle = sub.add_parser("oracle", help="stable matchings of a profile file")
    p_oracle.add_argument("profile", help="preference profile JSON file")

    p_gen = sub.add_parser("gen", help="emit a preference profile")
    p_gen.add_argument("--kind", choices=GENERATOR_KINDS, default="uniform")
    p_gen.add_argument("--players", type=int, required=True)
    p_gen.add_argument("--arms", type=int, required=True)
    p_gen.add_argument("--beta", type=float, default=0.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", help="output file (default: stdout)")

    return parser


def _load_spec(args) -> ExperimentSpec:
    if (args.spec is None) == (args.preset is None):
        raise ValueError("pass exactly one of a spec file or --preset")
    if args.preset is not None:
        spec = preset(args.preset)
    else:
        with open(args.spec, "r", encoding="utf-8") as fh:
            spec = ExperimentSpec.from_json_dict(json.load(fh))
    doc = spec.to_json_dict()
    if args.n_runs is not None:
        doc["n_runs"] = args.n_runs
    if args.master_seed is not None:
        doc["master_seed"] = args.master_seed
    if args.horizon is not None:
        doc["episode"]["horizon"] = args.horizon
    return ExperimentSpec.from_json_dict(doc)


def _cmd_run(args) -> int:
    spec = _load_spec(args)
    out_root = Path(args.out)
    variants = expand_sweep(spec)
    if len(variants) > 1 or variants[0][0]:
        out_root.mkdir(parents=True, exist_ok=True)
        echo = {"experiment": spec.to_json_dict(), "master_seed": spec.master_seed, "version": __version__}
        _write_text(out_root / "config.json", json.dumps(echo, indent=2) + "\n")
    for label, variant in variants:
        out_dir = out_root / label if label else out_root
        result = run_experiment(variant, n_workers=args.workers)
        write_experiment_outputs(out_dir, result, version=__version__)
        final = result.aggregate[-1] if result.aggregate else None
        rate = f"{final.stability_rate:.3f}" if final else "n/a"
        print(f"{label or 'experiment'}: {variant.n_runs} runs -> {out_dir} (final stability {rate})")
    return 0


def _cmd_aggregate(args) -> int:
    rows = read_runs_csv(Path(args.runs))
    agg = aggregate_rows_from_runs(rows)
    _write_text(Path(args.out), aggregate_csv_text(agg))
    print(f"wrote {len(agg)} aggregate rows to {args.out}")
    return 0


def _cmd_proxy(args) -> int:
    agg = read_aggregate_csv(Path(args.aggregate))
    if not agg:
        raise ValueError("aggregate file has no rows")
    if args.snapshot_every is not None:
        cadence = args.snapshot_every
    elif len(agg) >= 2:
        cadence = agg[1].t - agg[0].t
    else:
        cadence = agg[0].t
    if cadence < 1:
        raise ValueError(f"could not infer a positive snapshot cadence (got {cadence})")
    window = max(1, round(args.window / cadence))
    series = [(row.t, row.stability_rate) for row in agg]
    proxy = convergence_proxy(series, window=window, threshold=args.threshold)
    _write_text(Path(args.out), proxy_csv_text(proxy))
    print(f"wrote proxy ({window} snapshots, threshold {args.threshold}) to {args.out}")
    return 0


def _format_matching(m, n_players: int) -> str:
    return " ".join(
        f"p{p}->a{m.arm_of(p)}" if m.arm_of(p) is not None else f"p{p}->none"
        for p in range(n_players)
    )


def _cmd_oracle(args) -> int:
    with open(args.profile, "r", encoding="utf-8") as fh:
        profile = PreferenceProfile.from_json_dict(json.load(fh))
    stable = enumerate_stable_matchings(profile)
    print(f"profile: N={profile.n_players} K={profile.n_arms}")
    print(f"stable matchings: {len(stable)}")
    for m in stable:
        print(f"  {_format_matching(m, profile.n_players)}")
    optimal = gale_shapley(profile, proposers="players")
    pessimal = gale_shapley(profile, proposers="arms")
    print(f"player-optimal (players propose): {_format_matching(optimal, profile.n_players)}")
    print(f"player-pessimal (arms propose):   {_format_matching(pessimal, profile.n_players)}")
    return 0


def _cmd_gen(args) -> int:
    spec = GeneratorSpec(
        kind=args.kind,
        n_players=args.players,
        n_arms=args.arms,
        beta=args.beta,
        seed=args.seed,
    )
    profile = generate(spec)
    text = json.dumps(profile.to_json_dict()) + "\n"
    if args.out:
        _write_text(Path(args.out), text)
        print(f"wrote profile to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "aggregate": _cmd_aggregate,
    "proxy": _cmd_proxy,
    "oracle": _cmd_oracle,
    "gen": _cmd_gen,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
