"""Minimal self-contained SVG line plots.

CSV is the canonical output; these plots are a best-effort convenience with
no plotting dependency. Output is deterministic: fixed canvas, fixed
formatting.
"""
from __future__ import annotations

import math

_WIDTH = 720
_HEIGHT = 480
_MARGIN = 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def _ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / 4.0))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(t)
        t += step
    return ticks


def write_line_plot(path, x, curves, *, title: str = "", x_label: str = "",
                    y_label: str = "") -> None:
    """Write one or more curves sharing an x grid as an SVG file.

    curves is a sequence of (label, y_values) pairs.
    """
    x = list(map(float, x))
    series = [(label, list(map(float, ys))) for label, ys in curves]
    x_lo, x_hi = min(x), max(x)
    all_y = [v for _, ys in series for v in ys]
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN

    def sx(v: float) -> float:
        return _MARGIN + (v - x_lo) / (x_hi - x_lo) * inner_w

    def sy(v: float) -> float:
        return _HEIGHT - _MARGIN - (v - y_lo) / (y_hi - y_lo) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{inner_w}" height="{inner_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_HEIGHT - _MARGIN}" '
                     f'x2="{_fmt(px)}" y2="{_HEIGHT - _MARGIN + 5}" stroke="#333"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_HEIGHT - _MARGIN + 18}" '
                     f'font-size="11" text-anchor="middle">{tick:.4g}</text>')
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(f'<line x1="{_MARGIN - 5}" y1="{_fmt(py)}" '
                     f'x2="{_MARGIN}" y2="{_fmt(py)}" stroke="#333"/>')
        parts.append(f'<text x="{_MARGIN - 8}" y="{_fmt(py + 4)}" '
                     f'font-size="11" text-anchor="end">{tick:.4g}</text>')
    for idx, (label, ys) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        points = " ".join(f"{_fmt(sx(px))},{_fmt(sy(py))}" for px, py in zip(x, ys))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        if label:
            ly = _MARGIN + 16 + 16 * idx
            parts.append(f'<line x1="{_WIDTH - _MARGIN - 110}" y1="{ly - 4}" '
                         f'x2="{_WIDTH - _MARGIN - 90}" y2="{ly - 4}" '
                         f'stroke="{color}" stroke-width="1.5"/>')
            parts.append(f'<text x="{_WIDTH - _MARGIN - 84}" y="{ly}" '
                         f'font-size="12">{label}</text>')
    if title:
        parts.append(f'<text x="{_WIDTH // 2}" y="{_MARGIN - 20}" font-size="15" '
                     f'text-anchor="middle">{title}</text>')
    if x_label:
        parts.append(f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 12}" font-size="13" '
                     f'text-anchor="middle">{x_label}</text>')
    if y_label:
        parts.append(f'<text x="16" y="{_HEIGHT // 2}" font-size="13" '
                     f'text-anchor="middle" transform="rotate(-90 16 {_HEIGHT // 2})">'
                     f'{y_label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
