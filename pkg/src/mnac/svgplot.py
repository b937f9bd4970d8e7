"""Static SVG line charts for sweep results.

Hand-rolled SVG 1.1 text so chart bytes depend only on the data handed in:
no plotting library, no timestamps, no locale-sensitive float repr.  Every
coordinate goes through one fixed format, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LineSeries",
    "render_line_chart",
    "crossing_point",
    "nice_ticks",
]

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

# Fixed canvas geometry; charts are meant for side-by-side diffing, not theming.
_MARGIN_LEFT = 72.0
_MARGIN_RIGHT = 20.0
_MARGIN_TOP = 40.0
_MARGIN_BOTTOM = 58.0


@dataclass(frozen=True)
class LineSeries:
    """One polyline: x/y samples plus draw options."""

    label: str
    xs: tuple
    ys: tuple
    color: str | None = None
    dashed: bool = False
    marker: bool = True

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys):
            raise ValueError("xs and ys must have equal length")
        if not xs:
            raise ValueError("series needs at least one point")
        if not all(math.isfinite(v) for v in xs + ys):
            raise ValueError("series values must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)


def _px(value: float) -> str:
    return f"{value:.2f}"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def nice_ticks(lo: float, hi: float, target: int = 6) -> list:
    """Round tick positions covering [lo, hi] on the 1-2-5 ladder."""
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError("need a finite, non-empty interval")
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 5.0):
        if mult * mag >= raw:
            step = mult * mag
            break
    i0 = math.ceil(lo / step - 1e-9)
    i1 = math.floor(hi / step + 1e-9)
    return [i * step for i in range(i0, i1 + 1)]


def crossing_point(xs, ys, level: float):
    """Smallest x where the piecewise-linear curve through (xs, ys) first
    reaches `level` from below; None when it never does.

    xs must be strictly increasing and all values finite.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.shape[0] == 0:
        raise ValueError("xs and ys must be equal-length non-empty vectors")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("crossing_point needs finite samples")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    for i in range(xs.shape[0]):
        if ys[i] >= level:
            if i == 0:
                return float(xs[0])
            x0, x1 = xs[i - 1], xs[i]
            y0, y1 = ys[i - 1], ys[i]
            # first reach: y0 < level <= y1, so the slope is positive
            return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))
    return None


def _data_bounds(series, x_range, y_range):
    if x_range is None:
        lo = min(min(s.xs) for s in series)
        hi = max(max(s.xs) for s in series)
    else:
        lo, hi = float(x_range[0]), float(x_range[1])
    if hi <= lo:  # single-point charts still need a window
        pad = max(abs(lo) * 0.05, 0.5)
        lo, hi = lo - pad, hi + pad
    if y_range is None:
        ylo = min(min(s.ys) for s in series)
        yhi = max(max(s.ys) for s in series)
    else:
        ylo, yhi = float(y_range[0]), float(y_range[1])
    if yhi <= ylo:
        pad = max(abs(ylo) * 0.05, 0.5)
        ylo, yhi = ylo - pad, yhi + pad
    return lo, hi, ylo, yhi


def render_line_chart(series, *, title: str = "", x_label: str = "",
                      y_label: str = "", width: float = 720.0,
                      height: float = 480.0, x_range=None,
                      y_range=None) -> str:
    """Render series as a complete standalone SVG document string."""
    series = list(series)
    if not series:
        raise ValueError("need at least one series")
    x0, x1, y0, y1 = _data_bounds(series, x_range, y_range)
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w

    def sy(y: float) -> float:
        return height - _MARGIN_BOTTOM - (y - y0) / (y1 - y0) * plot_h

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{_px(width)}" height="{_px(height)}" '
               f'viewBox="0 0 {_px(width)} {_px(height)}">')
    out.append(f'<rect x="0" y="0" width="{_px(width)}" height="{_px(height)}"'
               f' fill="#ffffff"/>')
    out.append('<defs><clipPath id="plot-area">'
               f'<rect x="{_px(_MARGIN_LEFT)}" y="{_px(_MARGIN_TOP)}" '
               f'width="{_px(plot_w)}" height="{_px(plot_h)}"/>'
               '</clipPath></defs>')

    # gridlines and tick labels
    for tx in nice_ticks(x0, x1):
        if tx < x0 - 1e-12 or tx > x1 + 1e-12:
            continue
        px = sx(tx)
        out.append(f'<line x1="{_px(px)}" y1="{_px(_MARGIN_TOP)}" '
                   f'x2="{_px(px)}" y2="{_px(height - _MARGIN_BOTTOM)}" '
                   f'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{_px(px)}" y="{_px(height - _MARGIN_BOTTOM + 18)}"'
                   f' font-family="sans-serif" font-size="11"'
                   f' text-anchor="middle" fill="#333333">{tx:g}</text>')
    for ty in nice_ticks(y0, y1):
        if ty < y0 - 1e-12 or ty > y1 + 1e-12:
            continue
        py = sy(ty)
        out.append(f'<line x1="{_px(_MARGIN_LEFT)}" y1="{_px(py)}" '
                   f'x2="{_px(width - _MARGIN_RIGHT)}" y2="{_px(py)}" '
                   f'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{_px(_MARGIN_LEFT - 8)}" y="{_px(py + 4)}"'
                   f' font-family="sans-serif" font-size="11"'
                   f' text-anchor="end" fill="#333333">{ty:g}</text>')

    out.append(f'<rect x="{_px(_MARGIN_LEFT)}" y="{_px(_MARGIN_TOP)}" '
               f'width="{_px(plot_w)}" height="{_px(plot_h)}" fill="none" '
               f'stroke="#333333" stroke-width="1"/>')

    for si, s in enumerate(series):
        color = s.color or _PALETTE[si % len(_PALETTE)]
        points = " ".join(f"{_px(sx(x))},{_px(sy(y))}"
                          for x, y in zip(s.xs, s.ys))
        dash = ' stroke-dasharray="7 4"' if s.dashed else ""
        out.append(f'<polyline points="{points}" fill="none" '
                   f'stroke="{color}" stroke-width="2"{dash} '
                   f'clip-path="url(#plot-area)"/>')
        if s.marker:
            for x, y in zip(s.xs, s.ys):
                out.append(f'<circle cx="{_px(sx(x))}" cy="{_px(sy(y))}" '
                           f'r="3" fill="{color}" '
                           f'clip-path="url(#plot-area)"/>')

    # legend block, upper-left inside the frame
    lx = _MARGIN_LEFT + 12.0
    ly = _MARGIN_TOP + 14.0
    for si, s in enumerate(series):
        color = s.color or _PALETTE[si % len(_PALETTE)]
        yy = ly + 16.0 * si
        dash = ' stroke-dasharray="7 4"' if s.dashed else ""
        out.append(f'<line x1="{_px(lx)}" y1="{_px(yy)}" x2="{_px(lx + 22)}" '
                   f'y2="{_px(yy)}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{_px(lx + 28)}" y="{_px(yy + 4)}"'
                   f' font-family="sans-serif" font-size="12"'
                   f' fill="#111111">{_esc(s.label)}</text>')

    if title:
        out.append(f'<text x="{_px(width / 2)}" y="{_px(22.0)}"'
                   f' font-family="sans-serif" font-size="15"'
                   f' text-anchor="middle" fill="#111111">{_esc(title)}</text>')
    if x_label:
        out.append(f'<text x="{_px(_MARGIN_LEFT + plot_w / 2)}" '
                   f'y="{_px(height - 14.0)}" font-family="sans-serif" '
                   f'font-size="13" text-anchor="middle" '
                   f'fill="#111111">{_esc(x_label)}</text>')
    if y_label:
        cy = _MARGIN_TOP + plot_h / 2
        out.append(f'<text x="{_px(18.0)}" y="{_px(cy)}"'
                   f' font-family="sans-serif" font-size="13"'
                   f' text-anchor="middle" fill="#111111"'
                   f' transform="rotate(-90 {_px(18.0)} {_px(cy)})">'
                   f'{_esc(y_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
