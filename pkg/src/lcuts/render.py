"""Static SVG rendering of clustered clouds.

2-D clouds draw directly (raster convention, y down). 3-D clouds render as
three orthographic panels: xy, xz, and yz. Every group gets its own color
from a golden-angle hue walk; outliers are hollow gray circles; fitted axes
draw as a line through the group centroid spanning its extent.
"""

from __future__ import annotations

import colorsys
from pathlib import Path

import numpy as np

_POINT_R = 2.0
_PAD = 12.0


def group_palette(count: int) -> list[str]:
    """Deterministic visually-spread colors, one per group, all distinct."""
    colors: list[str] = []
    used: set[str] = set()
    value = 0.95
    for i in range(count):
        hue = (i * 0.6180339887498949) % 1.0
        rgb = colorsys.hsv_to_rgb(hue, 0.85, value)
        hexcode = "#{:02x}{:02x}{:02x}".format(*(int(round(c * 255)) for c in rgb))
        while hexcode in used:  # guard against rare rounding collisions
            value = value - 0.07 if value > 0.3 else 0.95
            rgb = colorsys.hsv_to_rgb(hue, 0.85, value)
            hexcode = "#{:02x}{:02x}{:02x}".format(*(int(round(c * 255)) for c in rgb))
        used.add(hexcode)
        colors.append(hexcode)
    return colors


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _panel(parts: list[str], locs2: np.ndarray, groups: list[list[int]],
           outliers: list[int], axes2: list[tuple[np.ndarray, np.ndarray, float] | None],
           colors: list[str], offset: tuple[float, float]) -> None:
    ox, oy = offset
    for gi, members in enumerate(groups):
        fit = axes2[gi]
        if fit is not None:
            centroid, axis, extent = fit
            half = 0.5 * extent * axis
            a = centroid - half
            b = centroid + half
            parts.append(
                f'<line x1="{_fmt(ox + a[0])}" y1="{_fmt(oy + a[1])}" '
                f'x2="{_fmt(ox + b[0])}" y2="{_fmt(oy + b[1])}" '
                f'stroke="{colors[gi]}" stroke-width="1" opacity="0.6"/>')
        for nid in members:
            x, y = locs2[nid]
            parts.append(
                f'<circle cx="{_fmt(ox + x)}" cy="{_fmt(oy + y)}" r="{_POINT_R}" '
                f'fill="{colors[gi]}"/>')
    for nid in outliers:
        x, y = locs2[nid]
        parts.append(
            f'<circle cx="{_fmt(ox + x)}" cy="{_fmt(oy + y)}" r="{_POINT_R}" '
            f'fill="none" stroke="#888888" stroke-width="1"/>')


def render_svg(locs: np.ndarray, groups: list[list[int]], outliers: list[int],
               fits: list[dict | None] | None = None) -> str:
    """Build the SVG document text for a clustered cloud.

    ``fits`` optionally carries per-group dicts with centroid/axis/extent
    (same order as groups); when absent no axes are drawn.
    """
    locs = np.asarray(locs, dtype=np.float64)
    n, dim = locs.shape if locs.size else (0, 2)
    colors = group_palette(len(groups))
    if fits is None:
        fits = [None] * len(groups)

    if n:
        lo = locs.min(axis=0)
        hi = locs.max(axis=0)
    else:
        lo = np.zeros(dim)
        hi = np.ones(dim)
    span = np.maximum(hi - lo, 1.0)

    planes = [(0, 1)] if dim == 2 else [(0, 1), (0, 2), (1, 2)]
    labels = ["xy", "xz", "yz"]
    panel_w = span[[p[0] for p in planes]]
    panel_h = max(span[p[1]] for p in planes)
    width = float(sum(panel_w) + _PAD * (len(planes) + 1))
    height = float(panel_h + 2 * _PAD + (14 if dim == 3 else 0))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    ox = _PAD
    for pi, (ax0, ax1) in enumerate(planes):
        locs2 = locs[:, [ax0, ax1]] - np.array([lo[ax0], lo[ax1]]) if n else np.zeros((0, 2))
        axes2: list[tuple[np.ndarray, np.ndarray, float] | None] = []
        for fit in fits:
            if fit is None:
                axes2.append(None)
                continue
            centroid = np.asarray(fit["centroid"], float)[[ax0, ax1]] - np.array([lo[ax0], lo[ax1]])
            axis = np.asarray(fit["axis"], float)[[ax0, ax1]]
            axes2.append((centroid, axis, float(fit["extent"])))
        if dim == 3:
            parts.append(f'<text x="{_fmt(ox)}" y="{_fmt(_PAD)}" font-size="10" '
                         f'fill="#444444">{labels[pi]}</text>')
        _panel(parts, locs2, groups, outliers, axes2, colors,
               (ox, _PAD + (14 if dim == 3 else 0)))
        ox += float(span[ax0]) + _PAD
    parts.append("</svg>")
    return "\n".join(parts)


def write_svg(path: str | Path, svg_text: str) -> None:
    Path(path).write_text(svg_text, encoding="utf-8")
