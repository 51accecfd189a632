"""Batch experiment driver: seeded runs, aggregation, convergence proxy.

Run i of an experiment is seeded with ``mix64(master_seed, i)`` (a
splitmix64 finalizer over ``master + (i+1) * golden``), and its
preference profile with ``mix64(run_seed, 1)``, so every run draws a
fresh profile and the whole experiment is a pure function of the spec.
Results are keyed by run index, which makes parallel and serial
execution byte-identical.

CSV schemas (UTF-8, LF, header row):

* runs.csv       — run_id,t,stable,max_regret,conflicts
* aggregate.csv  — t,stability_rate,mean_max_regret,mean_conflicts
* proxy.csv      — t,proxy
"""

from __future__ import annotations

import copy
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .prefgen import GeneratorSpec
from .simulator import EpisodeConfig, RunLog, Snapshot, run_episode

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(seed: int, index: int) -> int:
    """Derive a decorrelated 64-bit seed (splitmix64 finalizer)."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ExperimentSpec:
    """An episode template, a run count, and a master seed.

    ``sweep`` optionally lists labeled override dictionaries (deep-merged
    onto the episode template) describing variants such as market sizes
    or heterogeneity levels; ``expand_sweep`` turns them into concrete
    specs.  The template's episode and generator seeds are placeholders:
    both are reassigned per run from the master seed.
    """

    episode: EpisodeConfig
    n_runs: int
    master_seed: int
    sweep: Optional[tuple[dict, ...]] = None

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.sweep is not None:
            object.__setattr__(self, "sweep", tuple(copy.deepcopy(dict(s)) for s in self.sweep))

    def to_json_dict(self) -> dict:
        doc = {
            "episode": self.episode.to_json_dict(),
            "n_runs": self.n_runs,
            "master_seed": self.master_seed,
        }
        if self.sweep is not None:
            doc["sweep"] = [copy.deepcopy(s) for s in self.sweep]
        return doc

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "ExperimentSpec":
        sweep = doc.get("sweep")
        return cls(
            episode=EpisodeConfig.from_json_dict(doc["episode"]),
            n_runs=int(doc["n_runs"]),
            master_seed=int(doc["master_seed"]),
            sweep=tuple(sweep) if sweep else None,
        )


def _deep_merge(base: dict, overrides: Mapping) -> dict:
    out = dict(base)
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def expand_sweep(spec: ExperimentSpec) -> list[tuple[str, ExperimentSpec]]:
    """Labeled concrete specs, one per sweep entry (or the spec itself)."""
    if not spec.sweep:
        return [("", spec)]
    out = []
    base = spec.episode.to_json_dict()
    for idx, entry in enumerate(spec.sweep):
        entry = dict(entry)
        label = str(entry.pop("label", f"variant{idx}"))
        overrides = entry.pop("overrides", entry)
        episode = EpisodeConfig.from_json_dict(_deep_merge(base, overrides))
        out.append((label, replace(spec, episode=episode, sweep=None)))
    return out


def episode_for_run(spec: ExperimentSpec, run_index: int) -> EpisodeConfig:
    """Concrete per-run config: fresh episode seed and fresh profile seed."""
    run_seed = mix64(spec.master_seed, run_index)
    generator = replace(spec.episode.generator, seed=mix64(run_seed, 1))
    return replace(spec.episode, seed=run_seed, generator=generator)


def _run_one(args: tuple[ExperimentSpec, int]) -> RunLog:
    spec, run_index = args
    return run_episode(episode_for_run(spec, run_index))


@dataclass(frozen=True)
class AggregateRow:
    t: int
    stability_rate: float
    mean_max_regret: float
    mean_conflicts: float


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    run_logs: list[RunLog]
    aggregate: list[AggregateRow]


def aggregate_runs(run_logs: Sequence[RunLog]) -> list[AggregateRow]:
    """Cross-run means per snapshot round, in run-index order."""
    if not run_logs:
        return []
    rounds = [s.t for s in run_logs[0].snapshots]
    for log in run_logs:
        if [s.t for s in log.snapshots] != rounds:
            raise ValueError("runs disagree on snapshot rounds; cannot aggregate")
    n = len(run_logs)
    rows = []
    for idx, t in enumerate(rounds):
        stable = sum(1 if log.snapshots[idx].stable else 0 for log in run_logs)
        regret = sum(log.snapshots[idx].max_regret for log in run_logs)
        conflicts = sum(log.snapshots[idx].conflicts for log in run_logs)
        rows.append(AggregateRow(t, stable / n, regret / n, conflicts / n))
    return rows


def run_experiment(spec: ExperimentSpec, n_workers: Optional[int] = None) -> ExperimentResult:
    """Execute all runs (optionally in worker processes) and aggregate.

    Output is independent of ``n_workers``: results are collected by run
    index and every run is individually seeded.
    """
    jobs = [(spec, i) for i in range(spec.n_runs)]
    if n_workers is None or n_workers <= 1 or spec.n_runs == 1:
        run_logs = [_run_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            run_logs = list(pool.map(_run_one, jobs, chunksize=max(1, spec.n_runs // (4 * n_workers))))
    return ExperimentResult(spec=spec, run_logs=run_logs, aggregate=aggregate_runs(run_logs))


def convergence_proxy(
    stability_rates: Sequence[tuple[int, float]],
    window: int,
    threshold: float,
) -> list[tuple[int, float]]:
    """Sliding-window fraction of snapshots whose stability rate beats a threshold.

    ``window`` counts snapshot entries; the window at snapshot index i
    covers the up-to-``window`` most recent entries ending at i, so the
    series is defined from the first snapshot on.  Input order does not
    matter: entries are processed in round order.
    """
    if window < 1:
        raise ValueError("window must be >= 1 snapshot")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    entries = sorted(stability_rates)
    out = []
    hits = 0
    for i, (t, rate) in enumerate(entries):
        hits += 1 if rate > threshold else 0
        if i >= window:
            hits -= 1 if entries[i - window][1] > threshold else 0
        out.append((t, hits / min(i + 1, window)))
    return out


def proxy_convergence_time(proxy: Sequence[tuple[int, float]]) -> Optional[int]:
    """First snapshot round at which the proxy reaches 1.0 (None if never)."""
    for t, value in proxy:
        if value >= 1.0:
            return t
    return None


# ---------------------------------------------------------------------------
# CSV / JSON persistence
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    """Shortest round-tripping decimal form; integers stay integral-looking."""
    return repr(float(x))


def runs_csv_text(run_logs: Sequence[RunLog]) -> str:
    lines = ["run_id,t,stable,max_regret,conflicts"]
    for run_id, log in enumerate(run_logs):
        for s in log.snapshots:
            lines.append(
                f"{run_id},{s.t},{1 if s.stable else 0},{_fmt(s.max_regret)},{s.conflicts}"
            )
    return "\n".join(lines) + "\n"


def aggregate_csv_text(rows: Sequence[AggregateRow]) -> str:
    lines = ["t,stability_rate,mean_max_regret,mean_conflicts"]
    for r in rows:
        lines.append(
            f"{r.t},{_fmt(r.stability_rate)},{_fmt(r.mean_max_regret)},{_fmt(r.mean_conflicts)}"
        )
    return "\n".join(lines) + "\n"


def proxy_csv_text(proxy: Sequence[tuple[int, float]]) -> str:
    lines = ["t,proxy"]
    for t, value in proxy:
        lines.append(f"{t},{_fmt(value)}")
    return "\n".join(lines) + "\n"


def _write_text(path: Path, text: str) -> None:
    # Byte-identical output across platforms: UTF-8, LF only.
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_runs_csv(path: Path) -> list[dict]:
    """Parse runs.csv into row dicts, preserving file order."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "run_id,t,stable,max_regret,conflicts":
            raise ValueError(f"{path}: unexpected runs.csv header {header!r}")
        for line in fh:
            run_id, t, stable, regret, conflicts = line.strip().split(",")
            rows.append(
                {
                    "run_id": int(run_id),
                    "t": int(t),
                    "stable": int(stable),
                    "max_regret": float(regret),
                    "conflicts": int(conflicts),
                }
            )
    return rows


def aggregate_rows_from_runs(rows: Sequence[Mapping]) -> list[AggregateRow]:
    """Recompute the aggregate as the same fold used in-memory.

    Values are accumulated per round in file order (run-major), which
    reproduces ``aggregate_runs`` exactly on round-tripped CSVs.
    """
    by_t: dict[int, list[Mapping]] = {}
    order: list[int] = []
    for row in rows:
        t = row["t"]
        if t not in by_t:
            by_t[t] = []
            order.append(t)
        by_t[t].append(row)
    out = []
    for t in order:
        group = by_t[t]
        n = len(group)
        out.append(
            AggregateRow(
                t=t,
                stability_rate=sum(r["stable"] for r in group) / n,
                mean_max_regret=sum(r["max_regret"] for r in group) / n,
                mean_conflicts=sum(r["conflicts"] for r in group) / n,
            )
        )
    return out


def read_aggregate_csv(path: Path) -> list[AggregateRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "t,stability_rate,mean_max_regret,mean_conflicts":
            raise ValueError(f"{path}: unexpected aggregate.csv header {header!r}")
        for line in fh:
            t, rate, regret, conflicts = line.strip().split(",")
            rows.append(AggregateRow(int(t), float(rate), float(regret), float(conflicts)))
    return rows


def write_experiment_outputs(
    out_dir: Path,
    result: ExperimentResult,
    version: str,
) -> None:
    """Persist runs.csv, aggregate.csv, and the config echo JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_text(out_dir / "runs.csv", runs_csv_text(result.run_logs))
    _write_text(out_dir / "aggregate.csv", aggregate_csv_text(result.aggregate))
    echo = {
        "experiment": result.spec.to_json_dict(),
        "master_seed": result.spec.master_seed,
        "version": version,
    }
    _write_text(out_dir / "config.json", json.dumps(echo, indent=2) + "\n")
