"""Hand-emitted SVG line plots for verification of tables.

No plotting dependency: the renderer draws axes with numeric tick labels,
one polyline per series (split at NaN gaps), and a legend from the series
labels on a fixed 800x600 canvas.  Identical inputs produce byte-identical
files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import DleitError

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 70, "right": 30, "top": 45, "bottom": 55}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")


class EmptyTableError(DleitError, ValueError):
    """The table holds no rows to plot."""


@dataclass(frozen=True)
class Table:
    """Column-named rows of floats (NaN marks an undefined phase)."""

    columns: tuple[str, ...]
    rows: list

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: series are (x column, y column, label) triples."""

    title: str
    x_label: str
    y_label: str
    series: tuple


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0]
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_svg(table: Table, plot: PlotSpec, path) -> None:
    """Render the plot spec against the table columns into an SVG file."""
    if not table.rows:
        raise EmptyTableError("cannot plot an empty table")
    xs_all: list[float] = []
    ys_all: list[float] = []
    series_points = []
    for x_col, y_col, label in plot.series:
        xs = table.column(x_col)
        ys = table.column(y_col)
        pts = list(zip(xs, ys))
        series_points.append((label, pts))
        xs_all += [x for x, y in pts if math.isfinite(x) and math.isfinite(y)]
        ys_all += [y for x, y in pts if math.isfinite(x) and math.isfinite(y)]
    if not xs_all:
        raise EmptyTableError("no finite points to plot")

    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad_y = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    px_lo, px_hi = MARGIN["left"], WIDTH - MARGIN["right"]
    py_lo, py_hi = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def to_px(x: float, y: float) -> tuple[float, float]:
        fx = (x - x_lo) / (x_hi - x_lo)
        fy = (y - y_lo) / (y_hi - y_lo)
        return px_lo + fx * (px_hi - px_lo), py_lo + fy * (py_hi - py_lo)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="25" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{plot.title}</text>',
    ]
    # axes box
    out.append(
        f'<rect x="{px_lo}" y="{py_hi}" width="{px_hi - px_lo}" height="{py_lo - py_hi}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        px, _ = to_px(t, y_lo)
        out.append(f'<line x1="{px:.2f}" y1="{py_lo}" x2="{px:.2f}" y2="{py_lo + 5}" stroke="black"/>')
        out.append(
            f'<text x="{px:.2f}" y="{py_lo + 20}" font-family="sans-serif" font-size="11" '
            f'text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        _, py = to_px(x_lo, t)
        out.append(f'<line x1="{px_lo - 5}" y1="{py:.2f}" x2="{px_lo}" y2="{py:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{px_lo - 8}" y="{py + 4:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{(px_lo + px_hi) // 2}" y="{HEIGHT - 12}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{plot.x_label}</text>'
    )
    out.append(
        f'<text x="18" y="{(py_lo + py_hi) // 2}" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 18 {(py_lo + py_hi) // 2})">{plot.y_label}</text>'
    )
    for k, (label, pts) in enumerate(series_points):
        color = PALETTE[k % len(PALETTE)]
        segment: list[str] = []
        chunks: list[list[str]] = []
        for x, y in pts:
            if math.isfinite(x) and math.isfinite(y):
                px, py = to_px(x, y)
                segment.append(f"{px:.2f},{py:.2f}")
            elif segment:
                chunks.append(segment)
                segment = []
        if segment:
            chunks.append(segment)
        for chunk in chunks:
            if len(chunk) == 1:
                cx, cy = chunk[0].split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>')
            else:
                out.append(
                    f'<polyline points="{" ".join(chunk)}" fill="none" stroke="{color}" '
                    'stroke-width="1.5"/>'
                )
        ly = MARGIN["top"] + 16 * k + 10
        out.append(f'<line x1="{px_hi - 140}" y1="{ly}" x2="{px_hi - 115}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{px_hi - 110}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
