"""Hand-written SVG figures: a forest plot and employment-versus-hours curves.

Coordinates are printed with a fixed number of decimals so output is
byte-stable. Markers carry ``data-label`` and ``data-hours`` attributes with
the exact solved value, which makes the figures checkable by tests.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

WIDTH = 720
MARGIN_LEFT = 200
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 50
ROW_HEIGHT = 22
PLOT_HEIGHT = 360


def _f(x: float) -> str:
    return f"{x:.3f}"


def _scale(lo: float, hi: float, out_lo: float, out_hi: float):
    span = hi - lo if hi > lo else 1.0

    def to(x):
        return out_lo + (x - lo) / span * (out_hi - out_lo)

    return to


def _ticks(lo: float, hi: float, count: int = 5) -> list:
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def _header(height: int, title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def _x_axis(lines, to_x, lo, hi, y, label):
    x0, x1 = to_x(lo), to_x(hi)
    lines.append(f'<line x1="{_f(x0)}" y1="{_f(y)}" x2="{_f(x1)}" y2="{_f(y)}" stroke="black"/>')
    for t in _ticks(lo, hi):
        x = to_x(t)
        lines.append(f'<line x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x)}" y2="{_f(y + 4)}" stroke="black"/>')
        lines.append(f'<text x="{_f(x)}" y="{_f(y + 16)}" text-anchor="middle">{t:.2f}</text>')
    mid = (x0 + x1) / 2
    lines.append(f'<text x="{_f(mid)}" y="{_f(y + 34)}" text-anchor="middle">{escape(label)}</text>')


def forest_plot(rows: Sequence[dict], r_bar: float, ci: tuple, title: str = "Elasticity estimates") -> str:
    """Forest plot of per-observation estimates with the pooled mean and interval.

    ``rows`` are dicts with ``label``, ``r``, ``lo`` and ``hi``.
    """
    n = len(rows)
    height = MARGIN_TOP + ROW_HEIGHT * (n + 1) + MARGIN_BOTTOM
    values = [r_bar, ci[0], ci[1]] + [v for row in rows for v in (row["lo"], row["hi"])]
    lo, hi = min(values), max(values)
    pad = 0.05 * (hi - lo if hi > lo else 1.0)
    lo, hi = lo - pad, hi + pad
    to_x = _scale(lo, hi, MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
    bottom = MARGIN_TOP + ROW_HEIGHT * (n + 1)
    lines = _header(height, title)
    lines.append(
        f'<rect class="band" x="{_f(to_x(ci[0]))}" y="{MARGIN_TOP}" width="{_f(to_x(ci[1]) - to_x(ci[0]))}" '
        f'height="{_f(bottom - MARGIN_TOP)}" fill="#dde8f5" data-low={quoteattr(repr(float(ci[0])))} '
        f"data-high={quoteattr(repr(float(ci[1])))}/>"
    )
    if lo < 0 < hi:
        x = to_x(0.0)
        lines.append(f'<line x1="{_f(x)}" y1="{MARGIN_TOP}" x2="{_f(x)}" y2="{_f(bottom)}" '
                     'stroke="#999" stroke-dasharray="2,3"/>')
    x = to_x(r_bar)
    lines.append(f'<line class="mean" x1="{_f(x)}" y1="{MARGIN_TOP}" x2="{_f(x)}" y2="{_f(bottom)}" '
                 f'stroke="#1f4e8c" data-value={quoteattr(repr(float(r_bar)))}/>')
    for k, row in enumerate(rows):
        y = MARGIN_TOP + ROW_HEIGHT * (k + 1)
        lines.append(f'<text x="{MARGIN_LEFT - 8}" y="{_f(y + 4)}" text-anchor="end">{escape(row["label"])}</text>')
        lines.append(f'<line x1="{_f(to_x(row["lo"]))}" y1="{_f(y)}" x2="{_f(to_x(row["hi"]))}" y2="{_f(y)}" '
                     'stroke="black"/>')
        lines.append(f'<rect class="estimate" x="{_f(to_x(row["r"]) - 3)}" y="{_f(y - 3)}" width="6" height="6" '
                     f'fill="black" data-value={quoteattr(repr(float(row["r"])))}/>')
    _x_axis(lines, to_x, lo, hi, bottom, "elasticity of employment with respect to hours")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def curve_plot(
    series: Sequence[tuple],
    markers: Sequence[tuple],
    title: str,
    x_label: str = "hours cap",
    y_label: str = "employment",
) -> str:
    """Line chart of one or more ``(name, xs, ys)`` series with vertical markers.

    ``markers`` are ``(label, hours)`` pairs drawn as labelled vertical lines.
    """
    height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM
    xs_all = [x for _, xs, _ in series for x in xs] + [h for _, h in markers]
    ys_all = [y for _, _, ys in series for y in ys if math.isfinite(y)]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = 0.0, max(ys_all) * 1.08 if ys_all and max(ys_all) > 0 else 1.0
    left = 70
    to_x = _scale(x_lo, x_hi, left, WIDTH - MARGIN_RIGHT)
    to_y = _scale(y_lo, y_hi, MARGIN_TOP + PLOT_HEIGHT, MARGIN_TOP)
    lines = _header(height, title)
    bottom = MARGIN_TOP + PLOT_HEIGHT
    lines.append(f'<line x1="{left}" y1="{MARGIN_TOP}" x2="{left}" y2="{bottom}" stroke="black"/>')
    for t in _ticks(y_lo, y_hi):
        y = to_y(t)
        lines.append(f'<text x="{left - 6}" y="{_f(y + 4)}" text-anchor="end">{t:.2f}</text>')
    lines.append(f'<text x="16" y="{_f(MARGIN_TOP + PLOT_HEIGHT / 2)}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {_f(MARGIN_TOP + PLOT_HEIGHT / 2)})">{escape(y_label)}</text>')
    colours = ("#1f4e8c", "#c0392b", "#27ae60")
    for k, (name, xs, ys) in enumerate(series):
        pts = " ".join(f"{_f(to_x(x))},{_f(to_y(y))}" for x, y in zip(xs, ys) if math.isfinite(y))
        colour = colours[k % len(colours)]
        lines.append(f'<polyline class="curve" data-name={quoteattr(name)} points="{pts}" fill="none" '
                     f'stroke="{colour}" stroke-width="1.5"/>')
        lines.append(f'<text x="{WIDTH - MARGIN_RIGHT - 4}" y="{MARGIN_TOP + 14 * (k + 1)}" text-anchor="end" '
                     f'fill="{colour}">{escape(name)}</text>')
    for label, hours in markers:
        x = to_x(hours)
        lines.append(f'<line class="marker" data-label={quoteattr(label)} data-hours={quoteattr(repr(float(hours)))} '
                     f'x1="{_f(x)}" y1="{MARGIN_TOP}" x2="{_f(x)}" y2="{_f(bottom)}" stroke="#555" '
                     'stroke-dasharray="4,3"/>')
        lines.append(f'<text x="{_f(x + 3)}" y="{MARGIN_TOP + 12}">{escape(label)}</text>')
    _x_axis(lines, to_x, x_lo, x_hi, bottom, x_label)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
