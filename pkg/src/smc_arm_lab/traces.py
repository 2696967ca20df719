"""CSV traces and JSON metrics files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .metrics import RunMetrics

CSV_HEADER = ("t", "th1", "th2", "th3", "th1d", "th2d", "th3d",
              "e1", "e2", "e3", "S1", "S2", "S3", "u1", "u2", "u3")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def trace_table(rec) -> np.ndarray:
    return np.column_stack([rec.t, rec.theta, rec.theta_d, rec.e, rec.s, rec.u])


def trace_csv(rec) -> str:
    table = trace_table(rec)
    lines = [",".join(CSV_HEADER)]
    lines.extend(",".join(map(_fmt, row)) for row in table)
    return "\n".join(lines) + "\n"


def write_trace(rec, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(trace_csv(rec))
    return path


def read_trace(path) -> dict[str, np.ndarray]:
    """Parse a trace CSV into one float array per column."""
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(CSV_HEADER)}


def metrics_json(metrics: RunMetrics, extra: dict | None = None) -> str:
    doc = metrics.to_dict()
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_metrics(metrics: RunMetrics, path, extra: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(metrics_json(metrics, extra))
    return path
