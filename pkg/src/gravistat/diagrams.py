"""Standalone SVG bifurcation and energy diagrams.

The default bifurcation view plots log(1+m) against log(1+sup_density),
one polyline per branch, with the eta = 0 branch dashed.  Energy
quantities are plotted against log(1+M) with raw ordinates unless the
log(100+value) compression is requested.  Output is plain SVG 1.1 with
coordinates rounded to 6 significant digits, so identical inputs yield
identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .branch import Branch

QUANTITIES = ("sup_density", "entropy", "potential", "free_energy")

_PALETTE = ("#1f6fb4", "#d95f02", "#1b9e77", "#7570b3", "#e7298a",
            "#66a61e", "#a6761d", "#444444", "#80b1d3", "#b15928",
            "#8dd3c7", "#bc80bd")

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64.0, 16.0, 20.0, 46.0


@dataclass(frozen=True)
class DiagramStyle:
    quantity: str = "sup_density"
    log1p_axes: bool = True          # log(1+.) on both presentation axes
    log100_ordinate: bool = False    # log(100+.) compression for energies
    width: float = 720.0
    height: float = 540.0
    title: str | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity must be one of {QUANTITIES}")
        if self.log100_ordinate and self.quantity == "sup_density":
            raise ValueError("log100 compression applies to energy ordinates only")


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _curve_points(branch: Branch, style: DiagramStyle):
    xs, ys = [], []
    for s in branch.samples:
        if style.quantity == "sup_density":
            x, y = s.m, s.sup_density
            if style.log1p_axes:
                x, y = math.log(1.0 + x), math.log(1.0 + y)
        else:
            x = math.log(1.0 + s.mass) if style.log1p_axes else s.mass
            y = getattr(s, style.quantity)
            if style.log100_ordinate:
                y = math.log(100.0 + y)
        xs.append(x)
        ys.append(y)
    return xs, ys


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / (n - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks or [lo]


def emit_diagram(branches: list[Branch], style: DiagramStyle = DiagramStyle(),
                 labels: list[str] | None = None) -> str:
    """Render branches as one SVG document; raises on empty input."""
    if not branches:
        raise ValueError("no branches to draw")
    for i, branch in enumerate(branches):
        if not branch.samples:
            raise ValueError(f"branch {i} has no samples")
    if labels is None:
        labels = [b.model.label() if b.model is not None else f"branch {i}"
                  for i, b in enumerate(branches)]

    curves = [_curve_points(b, style) for b in branches]
    x_lo = min(min(xs) for xs, _ in curves)
    x_hi = max(max(xs) for xs, _ in curves)
    y_lo = min(min(ys) for _, ys in curves)
    y_hi = max(max(ys) for _, ys in curves)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    plot_w = style.width - _MARGIN_L - _MARGIN_R
    plot_h = style.height - _MARGIN_T - _MARGIN_B

    def sx(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    if style.quantity == "sup_density":
        x_name = "log(1+m)" if style.log1p_axes else "m"
        y_name = "log(1+sup density)" if style.log1p_axes else "sup density"
    else:
        x_name = "log(1+M)" if style.log1p_axes else "M"
        base = style.quantity.replace("_", " ")
        y_name = f"log(100+{base})" if style.log100_ordinate else base

    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'width="{_fmt(style.width)}" height="{_fmt(style.height)}" '
             f'viewBox="0 0 {_fmt(style.width)} {_fmt(style.height)}">',
             f'<rect width="{_fmt(style.width)}" height="{_fmt(style.height)}" '
             f'fill="#ffffff"/>']

    axis_color = "#222222"
    x0px, x1px = _fmt(_MARGIN_L), _fmt(style.width - _MARGIN_R)
    y0px, y1px = _fmt(style.height - _MARGIN_B), _fmt(_MARGIN_T)
    parts.append(f'<line x1="{x0px}" y1="{y0px}" x2="{x1px}" y2="{y0px}" '
                 f'stroke="{axis_color}" stroke-width="1"/>')
    parts.append(f'<line x1="{x0px}" y1="{y0px}" x2="{x0px}" y2="{y1px}" '
                 f'stroke="{axis_color}" stroke-width="1"/>')

    for t in _ticks(x_lo, x_hi):
        px = _fmt(sx(t))
        parts.append(f'<line x1="{px}" y1="{y0px}" x2="{px}" '
                     f'y2="{_fmt(style.height - _MARGIN_B + 4)}" '
                     f'stroke="{axis_color}" stroke-width="1"/>')
        parts.append(f'<text x="{px}" y="{_fmt(style.height - _MARGIN_B + 16)}" '
                     f'font-family="monospace" font-size="11" fill="{axis_color}" '
                     f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        py = _fmt(sy(t))
        parts.append(f'<line x1="{_fmt(_MARGIN_L - 4)}" y1="{py}" x2="{x0px}" '
                     f'y2="{py}" stroke="{axis_color}" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(_MARGIN_L - 7)}" y="{py}" '
                     f'font-family="monospace" font-size="11" fill="{axis_color}" '
                     f'text-anchor="end" dominant-baseline="middle">{_fmt(t)}</text>')

    parts.append(f'<text x="{_fmt(_MARGIN_L + plot_w / 2)}" '
                 f'y="{_fmt(style.height - 8)}" font-family="monospace" '
                 f'font-size="12" fill="{axis_color}" text-anchor="middle">'
                 f'{x_name}</text>')
    parts.append(f'<text x="14" y="{_fmt(_MARGIN_T + plot_h / 2)}" '
                 f'font-family="monospace" font-size="12" fill="{axis_color}" '
                 f'text-anchor="middle" transform="rotate(-90 14 '
                 f'{_fmt(_MARGIN_T + plot_h / 2)})">{y_name}</text>')
    if style.title:
        parts.append(f'<text x="{_fmt(style.width / 2)}" y="14" '
                     f'font-family="monospace" font-size="12" '
                     f'fill="{axis_color}" text-anchor="middle">{style.title}</text>')

    for i, (branch, (xs, ys)) in enumerate(zip(branches, curves)):
        color = _PALETTE[i % len(_PALETTE)]
        eta = branch.model.eta if branch.model is not None else None
        dashed = ' stroke-dasharray="7 4"' if eta == 0.0 else ""
        if len(xs) == 1:
            parts.append(f'<circle cx="{_fmt(sx(xs[0]))}" cy="{_fmt(sy(ys[0]))}" '
                         f'r="3" fill="{color}"/>')
        else:
            pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="1.3"{dashed}/>')
        parts.append(f'<text x="{_fmt(style.width - _MARGIN_R - 6)}" '
                     f'y="{_fmt(_MARGIN_T + 14 + 14 * i)}" font-family="monospace" '
                     f'font-size="11" fill="{color}" text-anchor="end">'
                     f'{labels[i]}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
