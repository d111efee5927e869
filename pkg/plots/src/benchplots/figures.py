"""Panel figures from benchmark result CSVs.

Input is the harness schema (experiment, algorithm, n, k, seed, threads,
value, queries, rounds, wall_seconds, failed).  One panel per experiment,
one series per algorithm, x = k, y = value or wall time; series are averaged
over seeds with min/max whiskers.  Series extraction is a pure function of
the parsed rows, so identical input bytes always produce identical data.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("experiment", "algorithm", "k", "seed", "value", "wall_seconds")

Y_COLUMNS = {"value": "value", "time": "wall_seconds", "wall_seconds": "wall_seconds"}


class SchemaError(ValueError):
    """The CSV is missing a column the figures need."""


@dataclass
class FigureSpec:
    """What to draw: inputs, panel/series grouping, and the y axis."""

    inputs: list[str]
    panel_key: str = "experiment"
    series_key: str = "algorithm"
    y_axis: str = "value"
    log_time: bool = False

    def y_column(self) -> str:
        if self.y_axis not in Y_COLUMNS:
            raise ValueError(f"y axis must be one of {sorted(set(Y_COLUMNS))}, "
                             f"got {self.y_axis!r}")
        return Y_COLUMNS[self.y_axis]


@dataclass
class Series:
    """One algorithm's aggregated line inside a panel."""

    ks: list[int] = field(default_factory=list)
    mean: list[float] = field(default_factory=list)
    lo: list[float] = field(default_factory=list)
    hi: list[float] = field(default_factory=list)


def read_rows(paths) -> list[dict]:
    """Parse one or more result CSVs; raises SchemaError naming any missing column."""
    rows: list[dict] = []
    for path in paths:
        with open(path) as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [col for col in REQUIRED_COLUMNS if col not in header]
            if missing:
                raise SchemaError(f"{path}: missing required column(s) "
                                  + ", ".join(repr(c) for c in missing))
            for rec in reader:
                rows.append(rec)
    return rows


def series_data(rows: list[dict], fig: FigureSpec) -> dict[str, dict[str, Series]]:
    """{panel: {series: aggregated line}}, means with min/max over seeds."""
    ycol = fig.y_column()
    cells: dict[tuple[str, str, int], list[float]] = {}
    for rec in rows:
        key = (rec[fig.panel_key], rec[fig.series_key], int(rec["k"]))
        cells.setdefault(key, []).append(float(rec[ycol]))
    panels: dict[str, dict[str, Series]] = {}
    for (panel, label, k) in sorted(cells):
        vals = cells[(panel, label, k)]
        s = panels.setdefault(panel, {}).setdefault(label, Series())
        s.ks.append(k)
        s.mean.append(float(np.mean(vals)))
        s.lo.append(float(np.min(vals)))
        s.hi.append(float(np.max(vals)))
    return panels


def _clamp_for_log(series_by_label: dict[str, Series]) -> None:
    positive = [v for s in series_by_label.values() for v in s.mean if v > 0.0]
    floor = min(positive) if positive else 1e-9
    clamped = 0
    for s in series_by_label.values():
        for arr in (s.mean, s.lo, s.hi):
            for i, v in enumerate(arr):
                if v <= 0.0:
                    arr[i] = floor
                    clamped += 1
    if clamped:
        warnings.warn(f"clamped {clamped} non-positive value(s) to {floor} "
                      "for the log-scaled time axis")


def render(fig: FigureSpec, out_dir) -> list[str]:
    """Draw one PNG per panel; returns the written paths."""
    import os

    rows = read_rows(fig.inputs)
    panels = series_data(rows, fig)
    ycol = fig.y_column()
    use_log = fig.log_time and ycol == "wall_seconds"
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    for panel, series_by_label in panels.items():
        if use_log:
            _clamp_for_log(series_by_label)
        figure, ax = plt.subplots(figsize=(5.0, 3.6))
        for label in sorted(series_by_label):
            s = series_by_label[label]
            mean = np.array(s.mean)
            err = np.vstack([mean - np.array(s.lo), np.array(s.hi) - mean])
            ax.errorbar(s.ks, mean, yerr=err, marker="o", capsize=3, label=label)
        ax.set_xlabel("k")
        ax.set_ylabel("parallel wall time (s)" if ycol == "wall_seconds" else "solution value")
        if use_log:
            ax.set_yscale("log")
        ax.set_title(f"{panel} (mean over seeds, min/max whiskers)")
        ax.legend()
        figure.tight_layout()
        path = os.path.join(out_dir, f"{_safe_name(panel)}_{ycol}.png")
        figure.savefig(path, dpi=120)
        plt.close(figure)
        written.append(path)
    return written


def _safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)
