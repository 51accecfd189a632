"""Figure assembly: smoothed stability/regret curves, conflicts, proxy overlays."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import read_aggregate_csv, read_proxy_csv
from .smoothing import loess

FIGURE_KINDS = ("stability_regret", "conflicts", "proxy_compare")

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input CSVs, kind, smoothing span, output path, labels.

    ``inputs`` take aggregate.csv files except for ``proxy_compare``,
    which takes proxy.csv files: ``inputs`` drawn solid and
    ``inputs_dotted`` drawn dotted, paired by label (one pair per market
    size).  Labels default to each input's parent directory name.
    """

    kind: str
    inputs: tuple[Path, ...]
    out_path: Path
    inputs_dotted: tuple[Path, ...] = ()
    span: float = 0.3
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not 0.0 < self.span <= 1.0:
            raise ValueError(f"span must be in (0, 1], got {self.span}")
        if not self.inputs:
            raise ValueError("no input files")
        if self.kind == "proxy_compare" and not self.inputs_dotted:
            raise ValueError("proxy_compare needs a dotted input group")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "inputs_dotted", tuple(Path(p) for p in self.inputs_dotted))
        object.__setattr__(self, "out_path", Path(self.out_path))
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise ValueError("labels must match the number of inputs")


def _labels_for(spec: FigureSpec, paths: Sequence[Path]) -> list[str]:
    if spec.labels is not None and tuple(paths) == spec.inputs:
        return list(spec.labels)
    return [p.parent.name or p.stem for p in paths]


def _smooth_clamped(t, y, span):
    # Smoothing must not escape the observed range (plot-time clamp).
    smoothed = loess(t, y, span)
    return np.clip(smoothed, np.min(y), np.max(y))


def _stability_regret_figure(spec: FigureSpec):
    fig, (ax_stab, ax_regret) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for path, label, color in zip(spec.inputs, _labels_for(spec, spec.inputs), _COLORS):
        data = read_aggregate_csv(path)
        t = data["t"]
        ax_stab.plot(t, _smooth_clamped(t, data["stability_rate"], spec.span),
                     color=color, label=label)
        ax_regret.plot(t, _smooth_clamped(t, data["mean_max_regret"], spec.span),
                       color=color, label=label)
    ax_stab.set_ylabel("probability of stability")
    ax_stab.set_ylim(-0.05, 1.05)
    ax_regret.set_ylabel("mean max player regret")
    ax_regret.set_xlabel("round")
    ax_stab.legend()
    fig.tight_layout()
    return fig


def _conflicts_figure(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path, label, color in zip(spec.inputs, _labels_for(spec, spec.inputs), _COLORS):
        data = read_aggregate_csv(path)
        t = data["t"]
        ax.plot(t, _smooth_clamped(t, data["mean_conflicts"], spec.span),
                color=color, label=label)
    ax.set_xlabel("round")
    ax.set_ylabel("mean conflicts per round")
    ax.legend()
    fig.tight_layout()
    return fig


def _proxy_compare_figure(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    solid_labels = _labels_for(spec, spec.inputs)
    dotted_labels = _labels_for(spec, spec.inputs_dotted)
    color_of = {label: _COLORS[i % len(_COLORS)] for i, label in enumerate(solid_labels)}
    for path, label in zip(spec.inputs, solid_labels):
        data = read_proxy_csv(path)
        ax.plot(data["t"], data["proxy"], color=color_of[label],
                linestyle="-", label=f"{label} (solid group)")
    for path, label in zip(spec.inputs_dotted, dotted_labels):
        color = color_of.get(label, _COLORS[len(color_of) % len(_COLORS)])
        data = read_proxy_csv(path)
        ax.plot(data["t"], data["proxy"], color=color, linestyle=":",
                label=f"{label} (dotted group)")
    ax.set_xlabel("round")
    ax.set_ylabel("convergence proxy")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "stability_regret": _stability_regret_figure,
    "conflicts": _conflicts_figure,
    "proxy_compare": _proxy_compare_figure,
}


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib Figure without writing it (testable form)."""
    return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> Path:
    """Write the figure to ``spec.out_path`` (format from the extension)."""
    fig = build_figure(spec)
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(spec.out_path)
    finally:
        plt.close(fig)
    return spec.out_path
