"""Deterministic figure emitters: confetti plots (SVG) and heat maps (PPM).

A confetti plot draws one dot per cell with dot *area* proportional to the
cell probability (the proportionality law is fixed here; radius-encoding
would exaggerate small differences) and color interpolated along a ramp.
Structural zeros stay visible as 1-pixel outline circles, since the zero
pattern is the dominant feature of a dependence structure.  Output bytes
are identical across runs for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tabcop.errors import ValidationError
from tabcop.infinite import DensityGrid
from tabcop.pmf_core import JointPmf

#: Default color ramp: light gray to dark red.
DEFAULT_RAMP = ((211, 211, 211), (139, 0, 0))


@dataclass(frozen=True)
class ConfettiOptions:
    cell_size: float = 48.0
    color_ramp_ends: tuple = DEFAULT_RAMP
    show_margins: bool = True
    dot_area_scale: float = 1.0

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ValidationError("cell_size must be positive")
        if self.dot_area_scale <= 0:
            raise ValidationError("dot_area_scale must be positive")
        lo, hi = self.color_ramp_ends
        for c in (*lo, *hi):
            if not (isinstance(c, (int, np.integer)) and 0 <= c <= 255):
                raise ValidationError("ramp colors must be integer RGB in 0..255")


def _ramp_color(t: float, ramp) -> str:
    (r0, g0, b0), (r1, g1, b1) = ramp
    r = round(r0 + t * (r1 - r0))
    g = round(g0 + t * (g1 - g0))
    b = round(b0 + t * (b1 - b0))
    return f"rgb({r},{g},{b})"


def _fmt(x: float) -> str:
    # repr keeps full double precision, so equal inputs give equal bytes
    # and area ratios survive a round trip through the SVG text
    return repr(float(x))


def confetti_svg(p: JointPmf, opts: ConfettiOptions | None = None) -> str:
    """Render a probability table as an SVG confetti plot.

    One circle per cell, radius sqrt(dot_area_scale * p[x, y]) * cell/2,
    at matrix orientation (row 0 on top).  With ``show_margins`` the row
    margins appear as black dots in a right gutter and the column margins
    in a bottom gutter, on the same area scale.
    """
    if opts is None:
        opts = ConfettiOptions()
    n_rows, n_cols = p.shape
    cell = opts.cell_size
    width = (n_cols + (1 if opts.show_margins else 0)) * cell
    height = (n_rows + (1 if opts.show_margins else 0)) * cell
    peak = p.values.max()

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    for x in range(n_rows):
        cy = (x + 0.5) * cell
        for y in range(n_cols):
            cx = (y + 0.5) * cell
            mass = p.values[x, y]
            if mass > 0.0:
                radius = math.sqrt(opts.dot_area_scale * mass) * cell / 2.0
                fill = _ramp_color(mass / peak, opts.color_ramp_ends)
                parts.append(
                    f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                    f'r="{_fmt(radius)}" fill="{fill}"/>'
                )
            else:
                parts.append(
                    f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="1" '
                    f'fill="none" stroke="black" stroke-width="1"/>'
                )
    if opts.show_margins:
        row_sums = p.values.sum(axis=1)
        col_sums = p.values.sum(axis=0)
        gx = (n_cols + 0.5) * cell
        for x in range(n_rows):
            radius = math.sqrt(opts.dot_area_scale * row_sums[x]) * cell / 2.0
            parts.append(
                f'<circle cx="{_fmt(gx)}" cy="{_fmt((x + 0.5) * cell)}" '
                f'r="{_fmt(radius)}" fill="black"/>'
            )
        gy = (n_rows + 0.5) * cell
        for y in range(n_cols):
            radius = math.sqrt(opts.dot_area_scale * col_sums[y]) * cell / 2.0
            parts.append(
                f'<circle cx="{_fmt((y + 0.5) * cell)}" cy="{_fmt(gy)}" '
                f'r="{_fmt(radius)}" fill="black"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap_ppm(grid: DensityGrid, gamma: float = 1.0,
                ramp=DEFAULT_RAMP) -> bytes:
    """Render a density grid as a binary P6 PPM image, one pixel per cell.

    Colors follow (height/max)**gamma along the ramp; gamma < 1 lifts the
    low end, which helps when a grid has a sharp ridge.
    """
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    h = grid.heights
    peak = h.max()
    scaled = (h / peak) ** gamma if peak > 0 else np.zeros_like(h)
    (r0, g0, b0), (r1, g1, b1) = ramp
    rgb = np.empty((grid.n, grid.n, 3), dtype=np.uint8)
    rgb[:, :, 0] = np.round(r0 + scaled * (r1 - r0))
    rgb[:, :, 1] = np.round(g0 + scaled * (g1 - g0))
    rgb[:, :, 2] = np.round(b0 + scaled * (b1 - b0))
    header = f"P6\n{grid.n} {grid.n}\n255\n".encode("ascii")
    return header + rgb.tobytes()
