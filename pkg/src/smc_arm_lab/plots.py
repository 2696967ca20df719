"""Minimal self-contained SVG line charts."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
WIDTH, HEIGHT = 720, 420
MARGIN = dict(left=70, right=150, top=40, bottom=50)
MAX_BUCKETS = 800


def _envelope(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # keep the min and max of every bucket so chattering stays visible
    n = len(x)
    if n <= 2 * MAX_BUCKETS:
        return x, y
    edges = np.linspace(0, n, MAX_BUCKETS + 1).astype(int)
    keep = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        seg = y[lo:hi]
        a, b = lo + int(np.argmin(seg)), lo + int(np.argmax(seg))
        keep.extend(sorted({a, b}))
    idx = np.array(keep)
    return x[idx], y[idx]


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    return np.arange(np.ceil(lo / step) * step, hi + 0.5 * step, step)


def line_chart(series: Sequence[tuple[str, np.ndarray, np.ndarray]], title: str,
               xlabel: str = "t [s]", ylabel: str = "") -> str:
    """Render ``(label, x, y)`` series as an SVG document string."""
    x_all = np.concatenate([np.asarray(s[1], float) for s in series])
    y_all = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(x_all.min()), float(x_all.max())
    y0, y1 = float(y_all.min()), float(y_all.max())
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    if x1 <= x0:
        x1 = x0 + 1.0

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for tx in _ticks(x0, x1):
        px = sx(tx)
        out.append(f'<line x1="{px:.2f}" y1="{top}" x2="{px:.2f}" y2="{top + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 16}" text-anchor="middle">{tx:g}</text>')
    for ty in _ticks(y0, y1):
        py = sy(ty)
        out.append(f'<line x1="{left}" y1="{py:.2f}" x2="{left + pw}" y2="{py:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{py + 4:.2f}" text-anchor="end">{ty:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(16 {top + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')

    for i, (label, x, y) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        xs, ys = _envelope(np.asarray(x, float), np.asarray(y, float))
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_chart(path, *args, **kwargs) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(line_chart(*args, **kwargs))
    return path


def comparison_figures(records: dict, out_dir, joint: int = 0) -> list[Path]:
    """Figure analogs for one joint across several controllers.

    ``records`` maps a controller label to its SimRecord.
    """
    out_dir = Path(out_dir)
    j = joint
    n = j + 1
    first = next(iter(records.values()))
    written = []
    tracking = [("reference", first.t, first.theta_d[:, j])]
    tracking += [(name, r.t, r.theta[:, j]) for name, r in records.items()]
    written.append(write_chart(out_dir / f"tracking_joint{n}.svg", tracking,
                               f"Joint {n} position tracking", ylabel="angle [rad]"))
    panels = (
        ("control", "u", f"Joint {n} control effort", "u"),
        ("surface", "s", f"Joint {n} sliding surface", "S"),
        ("velocity", "theta_dot", f"Joint {n} angular velocity", "rate [rad/s]"),
        ("error", "e", f"Joint {n} position tracking error", "error [rad]"),
    )
    for stem, attr, title, ylabel in panels:
        series = [(name, r.t, getattr(r, attr)[:, j]) for name, r in records.items()]
        written.append(write_chart(out_dir / f"{stem}_joint{n}.svg", series, title, ylabel=ylabel))
    return written


def all_joint_figures(rec, out_dir, label: str) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for j in range(3):
        series = [("reference", rec.t, rec.theta_d[:, j]), (label, rec.t, rec.theta[:, j])]
        written.append(write_chart(out_dir / f"{label}_tracking_joint{j + 1}.svg", series,
                                   f"{label}: joint {j + 1} tracking", ylabel="angle [rad]"))
    errors = [(f"e{j + 1}", rec.t, rec.e[:, j]) for j in range(3)]
    written.append(write_chart(out_dir / f"{label}_errors.svg", errors,
                               f"{label}: tracking errors", ylabel="error [rad]"))
    return written
