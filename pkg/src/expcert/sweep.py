"""Parameter sweeps: task generation, parallel execution, CSV/JSON output.

Tasks are embarrassingly parallel; rows are emitted in index order
regardless of completion order, and identical specs produce byte-identical
CSV apart from the elapsed_s column.  A JSON manifest sidecar records the
spec, tool version and wall/CPU time.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__ as _version
from . import _kernels
from .expansion import (
    expansion_lower_bound,
    expansion_static,
    expansion_uniform_baseline,
)
from .intervals import Interval
from .maps import make_family
from .partition import derivative_scaled_partition

MODES = (
    "single",
    "grid",
    "subdiv",
    "delta-compare",
    "strategy-compare",
    "baseline-compare",
)

ROW_FIELDS = (
    "index",
    "a_lo",
    "a_hi",
    "delta",
    "K",
    "k_final",
    "lambda",
    "lambda_max",
    "period",
    "C",
    "iterations",
    "stop_reason",
    "elapsed_s",
)

DEFAULT_BIF_SEED = 2.0 ** -20  # escapes the a=2 fixed point; see module tests


def grid_points(lo: float, hi: float, m: int) -> list[float]:
    """m+1 equally spaced points including both endpoints."""
    if m == 0:
        return [lo]
    width = hi - lo
    pts = [lo + width * i / m for i in range(m + 1)]
    pts[0] = lo
    pts[m] = hi
    return pts


@dataclass(frozen=True)
class SweepSpec:
    mode: str
    family: str = "quadratic"
    omega_lo: float = 1.4
    omega_hi: float = 2.0
    grid: int = 1024
    depth: int = 10
    deltas: tuple[float, ...] = (0.001,)
    K: int = 1000
    strategy: str = "refined"
    with_C: bool = False
    workers: int = 1
    baseline_k: int = 10000

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(self.deltas))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.omega_lo > self.omega_hi:
            raise ValueError("omega_lo > omega_hi")
        if not self.deltas:
            raise ValueError("at least one delta required")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        _parse_strategy(self.strategy)

    def to_json(self) -> dict:
        return asdict(self)


def _parse_strategy(strategy: str) -> tuple[str, int | None]:
    if strategy == "refined":
        return "refined", None
    if strategy.startswith("uniform:"):
        return "uniform", int(strategy.split(":", 1)[1])
    if strategy.startswith("gamma:"):
        idx = int(strategy.split(":", 1)[1])
        if idx not in (-1, 0, 1, 2, 3, 4, 5):
            raise ValueError(f"gamma index {idx} out of range")
        return "gamma", idx
    raise ValueError(f"unknown strategy {strategy!r}")


def _execute_task(task: dict) -> dict:
    """Run one certification task; failures land in stop_reason."""
    started = time.process_time()
    row = {
        "index": task["index"],
        "a_lo": task["a_lo"],
        "a_hi": task["a_hi"],
        "delta": task["delta"],
        "K": task["K"],
        "k_final": None,
        "lambda": None,
        "lambda_max": None,
        "period": None,
        "C": None,
        "iterations": None,
        "stop_reason": None,
        "elapsed_s": None,
    }
    try:
        family = make_family(task["family"], Interval(task["a_lo"], task["a_hi"]))
        kind, arg = _parse_strategy(task["strategy"])
        with_c = task["with_C"]
        if kind == "refined":
            cert = expansion_lower_bound(family, task["delta"], K=task["K"], with_C=with_c)
        elif kind == "uniform":
            cert = expansion_uniform_baseline(family, task["delta"], k=arg, with_C=with_c)
        else:
            nbhd = family.make_critical_neighbourhood(task["delta"])
            part = derivative_scaled_partition(
                family, family.domain, nbhd, task["K"], arg
            )
            cert = expansion_static(family, task["delta"], part, with_C=with_c)
        row["k_final"] = cert.final_partition_size
        row["lambda"] = cert.lam
        row["lambda_max"] = cert.lambda_max
        row["period"] = cert.orbit.period if cert.orbit else None
        row["C"] = cert.C
        row["iterations"] = cert.iterations
        row["stop_reason"] = cert.stop_reason
    except Exception as exc:  # per-row failure must not abort the sweep
        row["stop_reason"] = f"error:{type(exc).__name__}"
    row["elapsed_s"] = time.process_time() - started
    return row


def _tasks_for(spec: SweepSpec) -> list[dict]:
    base = {
        "family": spec.family,
        "K": spec.K,
        "strategy": spec.strategy,
        "with_C": spec.with_C,
    }
    delta = spec.deltas[0]
    tasks: list[dict] = []
    if spec.mode == "single":
        tasks.append(
            dict(base, index=0, a_lo=spec.omega_lo, a_hi=spec.omega_hi, delta=delta)
        )
    elif spec.mode == "grid":
        for i, a in enumerate(grid_points(spec.omega_lo, spec.omega_hi, spec.grid)):
            tasks.append(dict(base, index=i, a_lo=a, a_hi=a, delta=delta))
    elif spec.mode == "subdiv":
        edges = grid_points(spec.omega_lo, spec.omega_hi, 2 ** spec.depth)
        for i in range(len(edges) - 1):
            tasks.append(
                dict(base, index=i, a_lo=edges[i], a_hi=edges[i + 1], delta=delta)
            )
    else:
        raise ValueError(f"mode {spec.mode} expands to multiple sweeps")
    return tasks


def run_tasks(tasks: list[dict], workers: int) -> list[dict]:
    """Execute tasks, restoring index order on output."""
    if workers <= 1 or len(tasks) <= 1:
        rows = [_execute_task(t) for t in tasks]
    else:
        _kernels.warmup()  # compile once; forked workers inherit the JIT cache
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_execute_task, tasks, chunksize=1))
    rows.sort(key=lambda r: r["index"])
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROW_FIELDS)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in ROW_FIELDS])


def read_rows_csv(path: str) -> list[dict]:
    out = []
    with open(path) as fh:
        for rec in csv.DictReader(fh):
            row = {}
            for key in ROW_FIELDS:
                raw = rec[key]
                if key in ("index", "K", "k_final", "period", "iterations"):
                    row[key] = int(raw) if raw else None
                elif key in ("a_lo", "a_hi", "delta", "lambda", "lambda_max", "C", "elapsed_s"):
                    row[key] = float(raw) if raw else None
                else:
                    row[key] = raw
            out.append(row)
    return out


def write_rows_json(rows: list[dict], manifest: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"manifest": manifest, "rows": rows}, fh, indent=1)


def _manifest(spec: SweepSpec, rows: list[dict], wall: float, cpu: float) -> dict:
    failures = sum(
        1 for r in rows if r["stop_reason"] and str(r["stop_reason"]).startswith("error:")
    )
    return {
        "spec": spec.to_json(),
        "tool_version": _version,
        "rows": len(rows),
        "failures": failures,
        "wall_s": wall,
        "cpu_total_s": cpu,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }


def _out_variant(path: str, tag: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}.{tag}{ext or '.csv'}"


def run_sweep(spec: SweepSpec, out: str | None = None, fmt: str = "csv") -> dict:
    """Run a sweep; returns {label: rows} and writes files when out is set.

    Single-label modes use the label "main"; comparison modes emit one
    labelled file per sub-sweep (out stem suffixed with the label).
    """
    wall0 = time.monotonic()
    results: dict[str, list[dict]] = {}
    if spec.mode in ("single", "grid", "subdiv"):
        results["main"] = run_tasks(_tasks_for(spec), spec.workers)
    elif spec.mode == "delta-compare":
        for d in spec.deltas:
            sub = SweepSpec(**{**spec.to_json(), "mode": "grid", "deltas": (d,)})
            results[f"delta{d}"] = run_tasks(_tasks_for(sub), spec.workers)
    elif spec.mode == "strategy-compare":
        for idx in (-1, 0, 1, 2, 3, 4, 5):
            sub = SweepSpec(
                **{**spec.to_json(), "mode": "single", "strategy": f"gamma:{idx}"}
            )
            results[f"gamma{idx}"] = run_tasks(_tasks_for(sub), spec.workers)
    elif spec.mode == "baseline-compare":
        refined = SweepSpec(**{**spec.to_json(), "mode": "grid", "strategy": "refined"})
        uniform = SweepSpec(
            **{
                **spec.to_json(),
                "mode": "grid",
                "strategy": f"uniform:{spec.baseline_k}",
            }
        )
        results["refined"] = run_tasks(_tasks_for(refined), spec.workers)
        results["uniform"] = run_tasks(_tasks_for(uniform), spec.workers)
    wall = time.monotonic() - wall0

    if out:
        for label, rows in results.items():
            cpu = sum(r["elapsed_s"] or 0.0 for r in rows)
            manifest = _manifest(spec, rows, wall, cpu)
            path = out if len(results) == 1 else _out_variant(out, label)
            if fmt == "json":
                write_rows_json(rows, manifest, path)
            else:
                write_rows_csv(rows, path)
                with open(path + ".manifest.json", "w") as fh:
                    json.dump(manifest, fh, indent=1)
    return results


def bifurcation_data(
    omega: Interval,
    columns: int,
    transient: int = 1000,
    samples: int = 200,
    x0: float = DEFAULT_BIF_SEED,
    family: str = "quadratic",
) -> np.ndarray:
    """Non-rigorous (a, x) point cloud for plot backgrounds.

    Iterates plain floats: per column, `transient` warm-up steps from x0,
    then `samples` recorded iterates.
    """
    if columns < 1:
        raise ValueError("columns must be >= 1")
    if family != "quadratic":
        raise ValueError(f"unknown family {family!r}")
    avals = grid_points(omega.lo, omega.hi, columns - 1)
    out = np.empty((columns * samples, 2))
    pos = 0
    for a in avals:
        x = x0
        for _ in range(transient):
            x = a - x * x
        for _ in range(samples):
            x = a - x * x
            out[pos, 0] = a
            out[pos, 1] = x
            pos += 1
    return out


def write_bifurcation_csv(data: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("a,x\n")
        for a, x in data:
            fh.write(f"{float(a)!r},{float(x)!r}\n")
