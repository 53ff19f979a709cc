"""File formats: curve CSV, detection report JSONL, model and report JSON.

The curve CSV layout is shared by every command: the first column holds
the grid abscissas, each further column one curve's values, and the
header row carries the curve identifiers.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .curves import DensityFn, GridCurve, density_from_values


def write_curves(path, curves, ids=None) -> None:
    curves = list(curves)
    if ids is None:
        ids = [f"curve_{i}" for i in range(len(curves))]
    grid = curves[0].grid
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", *ids])
        for j, x in enumerate(grid):
            writer.writerow([f"{x:.10g}"] + [f"{c.values[j]:.10g}" for c in curves])


def read_curves(path, as_density: bool = True):
    """Returns (curves, ids); curves are densities unless `as_density` is off."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    grid = data[:, 0]
    start, end = float(grid[0]), float(grid[-1])
    curves = []
    for k in range(1, data.shape[1]):
        if as_density:
            curves.append(density_from_values(data[:, k], start, end))
        else:
            curves.append(GridCurve(start, end, data[:, k]))
    return curves, header[1:]


def read_pairs(g_path, f_path):
    gs, _ = read_curves(g_path)
    fs, _ = read_curves(f_path)
    if len(gs) != len(fs):
        raise ValueError("the two files hold different numbers of curves")
    return list(zip(gs, fs))


def write_report_jsonl(path, report) -> None:
    with open(path, "w") as fh:
        for rec in report.to_records():
            fh.write(json.dumps(rec) + "\n")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2))


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())
