"""File emission: trajectory CSV, key/value reports and static SVG plots."""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .integrate import Trajectory

__all__ = ["CSV_COLUMNS", "trajectory_csv", "write_csv", "format_report", "write_report", "paths_svg", "write_svg"]

CSV_COLUMNS = ("t", "x", "y", "theta", "v", "omega", "v_r", "v_l", "det_guard")


def trajectory_csv(traj: Trajectory) -> str:
    if len(traj) == 0:
        raise ValueError("cannot emit an empty trajectory")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    cols = (traj.t, traj.x, traj.y, traj.theta, traj.v, traj.omega, traj.v_r, traj.v_l, traj.det_guard)
    for row in zip(*cols):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def write_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(trajectory_csv(traj))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def format_report(entries: dict) -> str:
    """One ``key = value`` line per entry, in insertion order."""
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in entries.items())


def write_report(entries: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_report(entries))


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo, hi, n=6):
    span = hi - lo
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * span:
        out.append(round(v, 12))
        v += step
    return out


def paths_svg(trajs: dict, size: int = 600, margin: int = 50) -> str:
    """SVG with one labelled ``(x, y)`` polyline per trajectory and tick-marked axes."""
    if not trajs:
        raise ValueError("nothing to plot")
    xs = np.concatenate([tr.x for tr in trajs.values()] + [[0.0]])
    ys = np.concatenate([tr.y for tr in trajs.values()] + [[0.0]])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = 0.05 * span
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    w = size - 2 * margin
    sx = w / max(x1 - x0, 1e-12)
    sy = w / max(y1 - y0, 1e-12)

    def X(v):
        return margin + (v - x0) * sx

    def Y(v):
        return size - margin - (v - y0) * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<g stroke="black" stroke-width="1">'
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" y2="{size - margin}"/>'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{size - margin}"/></g>',
    ]
    for v in _ticks(x0, x1):
        px = X(v)
        out.append(
            f'<line x1="{px:.2f}" y1="{size - margin}" x2="{px:.2f}" y2="{size - margin + 5}" stroke="black"/>'
            f'<text x="{px:.2f}" y="{size - margin + 18}" font-size="11" text-anchor="middle">{v:g}</text>'
        )
    for v in _ticks(y0, y1):
        py = Y(v)
        out.append(
            f'<line x1="{margin - 5}" y1="{py:.2f}" x2="{margin}" y2="{py:.2f}" stroke="black"/>'
            f'<text x="{margin - 8}" y="{py + 4:.2f}" font-size="11" text-anchor="end">{v:g}</text>'
        )
    out.append(f'<text x="{size / 2}" y="{size - 8}" font-size="12" text-anchor="middle">x</text>')
    out.append(f'<text x="12" y="{size / 2}" font-size="12" text-anchor="middle">y</text>')
    for i, (label, tr) in enumerate(trajs.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(tr.x, tr.y))
        out.append(
            f'<polyline data-label="{label}" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5">'
            f"<title>{label}</title></polyline>"
        )
        out.append(
            f'<text x="{size - margin - 5}" y="{margin + 15 * (i + 1)}" font-size="12" text-anchor="end" '
            f'fill="{color}">{label}</text>'
        )
    out.append(f'<circle cx="{X(0.0):.2f}" cy="{Y(0.0):.2f}" r="3" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(trajs: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(paths_svg(trajs))
