"""Figure rendering from sweep CSV artifacts.

Five figure kinds mirror the certification experiments: lambda-vs-a
overlays (optionally over a bifurcation point cloud), critical-radius
comparisons, point-vs-interval difference boxplots, time/size progress
curves, and partition-strategy comparisons.

Rendering is a pure function of the inputs: a fixed style, no
timestamps in the image metadata, and a --dump-arrays mode that writes
the exact plotted arrays as canonical JSON for byte-level comparison.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import (
    BoxStats,
    MissingInput,
    SchemaMismatch,
    point_interval_differences,
    read_bifurcation_csv,
    read_sweep_csv,
)

KINDS = (
    "lambda_vs_a",
    "delta_compare",
    "interval_boxplot",
    "time_curves",
    "strategy_compare",
)

_PNG_METADATA = {"Software": "expcert-plots"}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    bifurcation: str | None = None
    labels: tuple[str, ...] = ()
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    dump_arrays: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV required")


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def _label_for(spec: FigureSpec, i: int, rows: list[dict]) -> str:
    if i < len(spec.labels):
        return spec.labels[i]
    delta = rows[0].get("delta")
    if spec.kind == "delta_compare" and delta is not None:
        return f"delta={delta}"
    stem = os.path.splitext(os.path.basename(spec.inputs[i]))[0]
    return stem


def _lambda_overlay(spec: FigureSpec, ax, arrays: dict) -> None:
    if spec.bifurcation:
        cloud = read_bifurcation_csv(spec.bifurcation)
        ax.plot(
            cloud[:, 0], cloud[:, 1], ",", color="0.8", markersize=0.5, zorder=0,
            rasterized=True,
        )
        arrays["bifurcation_a"] = cloud[:, 0].tolist()
        arrays["bifurcation_x"] = cloud[:, 1].tolist()
    series = []
    for i, path in enumerate(spec.inputs):
        rows = read_sweep_csv(path)
        a = [r["a_lo"] for r in rows]
        lam = [r["lambda"] if r["lambda"] is not None else np.nan for r in rows]
        label = _label_for(spec, i, rows)
        ax.plot(a, lam, lw=0.9, label=label, zorder=2 + i)
        series.append({"label": label, "a": a, "lambda": lam})
    arrays["series"] = series
    ax.set_xlabel("a")
    ax.set_ylabel("lambda")
    ax.legend(loc="lower right", fontsize=8)


def _interval_boxplot(spec: FigureSpec, ax, arrays: dict) -> None:
    if len(spec.inputs) % 2 != 0:
        raise SchemaMismatch(
            "interval_boxplot expects point/interval CSV pairs"
        )
    stats = []
    labels = []
    for i in range(0, len(spec.inputs), 2):
        points = read_sweep_csv(spec.inputs[i])
        intervals = read_sweep_csv(spec.inputs[i + 1])
        diffs = point_interval_differences(points, intervals)
        if diffs.size == 0:
            raise SchemaMismatch("no rows above the 0.1 point-lambda filter")
        bs = BoxStats.from_values(diffs)
        stats.append(bs)
        labels.append(
            spec.labels[i // 2] if i // 2 < len(spec.labels) else str(len(intervals))
        )
    bxp_stats = [
        {
            "q1": s.q1,
            "med": s.median,
            "q3": s.q3,
            "whislo": s.whisker_lo,
            "whishi": s.whisker_hi,
            "label": lab,
            "fliers": [],
        }
        for s, lab in zip(stats, labels)
    ]
    ax.bxp(bxp_stats, showfliers=False, medianprops={"color": "tab:orange"})
    ax.set_xlabel("number of parameter intervals")
    ax.set_ylabel("lambda(point) - lambda(interval)")
    arrays["boxes"] = [dict(s.to_json(), label=l) for s, l in zip(stats, labels)]


def _time_curves(spec: FigureSpec, axes, arrays: dict) -> None:
    ax_top, ax_bot = axes
    series = []
    for i, path in enumerate(spec.inputs):
        rows = read_sweep_csv(path)
        order = np.argsort([r["K"] for r in rows])
        t = np.cumsum([rows[j]["elapsed_s"] or 0.0 for j in order])
        lam = [rows[j]["lambda"] if rows[j]["lambda"] is not None else np.nan for j in order]
        k = [rows[j]["k_final"] for j in order]
        label = _label_for(spec, i, rows)
        ax_top.plot(t, lam, marker="o", ms=2.5, lw=0.9, label=label)
        ax_bot.plot(t, k, marker="o", ms=2.5, lw=0.9, label=label)
        series.append({"label": label, "t": t.tolist(), "lambda": lam, "k": k})
    arrays["series"] = series
    ax_top.set_ylabel("lambda")
    ax_bot.set_ylabel("partition size")
    ax_bot.set_xlabel("cumulative CPU time [s]")
    ax_top.legend(fontsize=7, ncols=2)


def render(spec: FigureSpec) -> str:
    """Render the figure; returns the output path."""
    arrays: dict = {"kind": spec.kind}
    if spec.kind == "time_curves":
        fig, axes = plt.subplots(2, 1, figsize=(7.0, 5.0), sharex=True)
        _time_curves(spec, axes, arrays)
        main_ax = axes[0]
    else:
        fig, ax = plt.subplots(figsize=(7.0, 4.2))
        if spec.kind == "interval_boxplot":
            _interval_boxplot(spec, ax, arrays)
        else:
            # lambda_vs_a, delta_compare and strategy_compare share the
            # overlay machinery; they differ in labeling conventions
            _lambda_overlay(spec, ax, arrays)
        main_ax = ax
    if spec.xlim:
        main_ax.set_xlim(*spec.xlim)
    if spec.ylim:
        main_ax.set_ylim(*spec.ylim)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    if spec.dump_arrays:
        with open(spec.dump_arrays, "w") as fh:
            fh.write(_canonical_json(arrays))
    return spec.output
