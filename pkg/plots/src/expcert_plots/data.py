"""Sweep CSV parsing and derived statistics.

This package reads only the public CSV artifacts of the certification
tool; there is no in-process coupling.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

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

_INT_FIELDS = {"index", "K", "k_final", "period", "iterations"}
_FLOAT_FIELDS = {"a_lo", "a_hi", "delta", "lambda", "lambda_max", "C", "elapsed_s"}


class SchemaMismatch(Exception):
    """CSV does not parse against the sweep row schema."""


class MissingInput(Exception):
    """An input file does not exist."""


def read_sweep_csv(path: str) -> list[dict]:
    if not os.path.exists(path):
        raise MissingInput(path)
    with open(path) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ROW_FIELDS:
            raise SchemaMismatch(
                f"{path}: header {reader.fieldnames} != {list(ROW_FIELDS)}"
            )
        rows = []
        for rec in reader:
            row = {}
            try:
                for key in ROW_FIELDS:
                    raw = rec[key]
                    if raw is None:
                        raise SchemaMismatch(f"{path}: short row {rec}")
                    if key in _INT_FIELDS:
                        row[key] = int(raw) if raw else None
                    elif key in _FLOAT_FIELDS:
                        row[key] = float(raw) if raw else None
                    else:
                        row[key] = raw
            except ValueError as exc:
                raise SchemaMismatch(f"{path}: {exc}") from exc
            rows.append(row)
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    return rows


def read_bifurcation_csv(path: str) -> np.ndarray:
    if not os.path.exists(path):
        raise MissingInput(path)
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "a,x":
            raise SchemaMismatch(f"{path}: bifurcation header {header!r} != 'a,x'")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise SchemaMismatch(f"{path}: {exc}") from exc
    if data.size == 0 or data.shape[1] != 2:
        raise SchemaMismatch(f"{path}: expected two columns of floats")
    return data


@dataclass(frozen=True)
class BoxStats:
    """Quartile box with 1.5*IQR whiskers (values, not positions)."""

    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    n: int

    @staticmethod
    def from_values(values: np.ndarray) -> "BoxStats":
        vals = np.sort(np.asarray(values, dtype=np.float64))
        if vals.size == 0:
            raise ValueError("no data for boxplot")
        q1, med, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
        iqr = q3 - q1
        lo_limit = q1 - 1.5 * iqr
        hi_limit = q3 + 1.5 * iqr
        inside = vals[(vals >= lo_limit) & (vals <= hi_limit)]
        return BoxStats(
            q1=float(q1),
            median=float(med),
            q3=float(q3),
            whisker_lo=float(inside[0]),
            whisker_hi=float(inside[-1]),
            n=int(vals.size),
        )

    def to_json(self) -> dict:
        return {
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "whisker_lo": self.whisker_lo,
            "whisker_hi": self.whisker_hi,
            "n": self.n,
        }


def point_interval_differences(
    point_rows: list[dict], interval_rows: list[dict], threshold: float = 0.1
) -> np.ndarray:
    """Differences (point lambda) - (interval lambda), filtered to rows
    whose point value exceeds the threshold."""
    if len(point_rows) != len(interval_rows) + 1:
        raise SchemaMismatch(
            f"expected n+1 point rows for n interval rows, got "
            f"{len(point_rows)} and {len(interval_rows)}"
        )
    diffs = []
    for i, row in enumerate(interval_rows):
        lp = point_rows[i]["lambda"]
        li = row["lambda"]
        if lp is None or li is None:
            continue
        if lp > threshold:
            diffs.append(lp - li)
    return np.asarray(diffs, dtype=np.float64)
