"""Sweep task generation, reproducibility, parallel equivalence, CLI surface."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from expcert import Interval, SweepSpec, bifurcation_data, grid_points, run_sweep
from expcert.sweep import (
    ROW_FIELDS,
    _tasks_for,
    read_rows_csv,
    run_tasks,
    write_rows_csv,
)


def small_grid_spec(**kw):
    base = dict(
        mode="grid",
        omega_lo=1.5,
        omega_hi=2.0,
        grid=4,
        deltas=(0.01,),
        K=60,
        workers=1,
    )
    base.update(kw)
    return SweepSpec(**base)


def test_grid_points_contract():
    pts = grid_points(1.4, 2.0, 1024)
    assert len(pts) == 1025
    assert pts[0] == 1.4 and pts[-1] == 2.0
    width = 2.0 - 1.4
    for i in (1, 17, 512, 1023):
        assert pts[i] == 1.4 + width * i / 1024
    assert all(a < b for a, b in zip(pts, pts[1:]))


def test_subdiv_tasks():
    spec = SweepSpec(mode="subdiv", omega_lo=1.4, omega_hi=2.0, depth=3,
                     deltas=(0.001,), K=50)
    tasks = _tasks_for(spec)
    assert len(tasks) == 8
    assert tasks[0]["a_lo"] == 1.4 and tasks[-1]["a_hi"] == 2.0
    for t0, t1 in zip(tasks, tasks[1:]):
        assert t0["a_hi"] == t1["a_lo"]


def test_rows_and_csv_round_trip(tmp_path):
    spec = small_grid_spec()
    rows = run_tasks(_tasks_for(spec), workers=1)
    assert [r["index"] for r in rows] == list(range(5))
    path = tmp_path / "rows.csv"
    write_rows_csv(rows, str(path))
    back = read_rows_csv(str(path))
    with open(path) as fh:
        assert fh.readline().strip() == ",".join(ROW_FIELDS)
    for a, b in zip(rows, back):
        assert a["lambda"] == b["lambda"]
        assert a["index"] == b["index"]
        assert a["k_final"] == b["k_final"]


def test_reproducibility_excluding_elapsed(tmp_path):
    spec = small_grid_spec()
    paths = []
    for run in (1, 2):
        rows = run_tasks(_tasks_for(spec), workers=1)
        for r in rows:
            r["elapsed_s"] = 0.0
        path = tmp_path / f"run{run}.csv"
        write_rows_csv(rows, str(path))
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_parallel_equals_serial():
    spec = small_grid_spec(grid=5)
    rows1 = run_tasks(_tasks_for(spec), workers=1)
    rows8 = run_tasks(_tasks_for(spec), workers=8)
    for a, b in zip(rows1, rows8):
        assert a["lambda"] == b["lambda"]
        assert a["lambda_max"] == b["lambda_max"]


def test_failures_recorded_not_raised():
    # K below the initial partition size fails per-row
    spec = small_grid_spec(K=3)
    rows = run_tasks(_tasks_for(spec), workers=1)
    assert all(str(r["stop_reason"]).startswith("error:") for r in rows)
    assert all(r["lambda"] is None for r in rows)


def test_run_sweep_delta_compare(tmp_path):
    spec = small_grid_spec(mode="delta-compare", deltas=(0.1, 0.01), grid=2)
    out = tmp_path / "cmp.csv"
    results = run_sweep(spec, out=str(out))
    assert set(results) == {"delta0.1", "delta0.01"}
    assert (tmp_path / "cmp.delta0.1.csv").exists()
    assert (tmp_path / "cmp.delta0.01.csv").exists()
    assert (tmp_path / "cmp.delta0.1.csv.manifest.json").exists()
    manifest = json.loads((tmp_path / "cmp.delta0.1.csv.manifest.json").read_text())
    assert manifest["rows"] == 3
    assert manifest["failures"] == 0


def test_run_sweep_baseline_compare(tmp_path):
    spec = small_grid_spec(mode="baseline-compare", grid=1, baseline_k=200)
    out = tmp_path / "base.csv"
    results = run_sweep(spec, out=str(out))
    assert set(results) == {"refined", "uniform"}
    uni = read_rows_csv(str(tmp_path / "base.uniform.csv"))
    assert all(r["k_final"] == 200 for r in uni)


def test_bifurcation_chaotic_column():
    data = bifurcation_data(Interval(2.0, 2.0), columns=1, transient=500, samples=10000)
    xs = data[:, 1]
    assert xs.min() < -1.9 and xs.max() > 1.9


def test_bifurcation_periodic_window():
    # inside the period-3 window
    data = bifurcation_data(Interval(1.75, 1.75), columns=1, transient=2000, samples=500)
    xs = np.sort(data[:, 1])
    clusters = 1 + int(np.sum(np.diff(xs) > 1e-6))
    assert clusters <= 40


def test_bifurcation_column_count():
    data = bifurcation_data(Interval(1.4, 2.0), columns=3, transient=10, samples=7)
    assert data.shape == (21, 2)
    assert len(np.unique(data[:, 0])) == 3


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "expcert.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )


def test_cli_single_json(tmp_path):
    out = tmp_path / "cert.json"
    res = run_cli([
        "--mode", "single", "--omega", "2", "--delta", "0.01", "--K", "60",
        "--out", str(out),
        "--dump-partition", str(tmp_path / "part.csv"),
        "--dump-graph", str(tmp_path / "graph.txt"),
    ], tmp_path)
    assert res.returncode == 0, res.stderr
    cert = json.loads(out.read_text())
    assert cert["family"] == "quadratic"
    assert cert["K"] == 60
    assert cert["lambda"] <= math.log(2.0) + 1e-12
    part_lines = (tmp_path / "part.csv").read_text().splitlines()
    assert part_lines[0] == "index,lo,hi"
    assert len(part_lines) == cert["k_final"] + 1
    graph_lines = (tmp_path / "graph.txt").read_text().splitlines()
    src, dst, w = graph_lines[0].split(",")
    float(w)


def test_cli_grid_csv(tmp_path):
    out = tmp_path / "rows.csv"
    res = run_cli([
        "--mode", "grid", "--omega", "1.6:2", "--grid", "2", "--delta", "0.01",
        "--K", "40", "--out", str(out), "--workers", "2",
    ], tmp_path)
    assert res.returncode == 0, res.stderr
    rows = read_rows_csv(str(out))
    assert len(rows) == 3


def test_cli_invalid_spec_exit_2(tmp_path):
    res = run_cli(["--mode", "grid", "--omega", "2:1"], tmp_path)
    assert res.returncode == 2


def test_cli_partial_failures_exit_3(tmp_path):
    out = tmp_path / "rows.csv"
    # K below the initial partition size fails every row, sweep completes
    res = run_cli([
        "--mode", "grid", "--omega", "1.6:2", "--grid", "1", "--delta", "0.01",
        "--K", "3", "--out", str(out),
    ], tmp_path)
    assert res.returncode == 3
    rows = read_rows_csv(str(out))
    assert len(rows) == 2
    assert all(str(r["stop_reason"]).startswith("error:") for r in rows)


def test_cli_bifurcation(tmp_path):
    out = tmp_path / "bif.csv"
    res = run_cli([
        "--bifurcation", "3x5", "--omega", "1.4:2", "--out", str(out),
        "--bif-transient", "20",
    ], tmp_path)
    assert res.returncode == 0, res.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "a,x"
    assert len(lines) == 16
