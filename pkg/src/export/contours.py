"""
Contour plots as standalone SVG (marching squares via scikit-image).
"""
from pathlib import Path
from typing import List, Tuple
from xml.sax.saxutils import escape

import numpy as np
from loguru import logger
from skimage.measure import find_contours

from src.export.writer import atomic_write
from src.seeds.fields import ScalarField

CANVAS = 800
MARGIN = 70
LEVELS = 15


def contour_levels(values: np.ndarray, count: int = LEVELS) -> List[float]:
    """``count`` evenly spaced levels strictly between min and max; empty for a constant field."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo <= 1e-14 * max(1.0, abs(lo), abs(hi)):
        return []
    return [float(v) for v in np.linspace(lo, hi, count + 2)[1:-1]]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def contours_svg(
    values: np.ndarray,
    x_range: Tuple[float, float],
    y_range: Tuple[float, float],
    title: str = "",
    labels: Tuple[str, str] = ("H", "r"),
    config_hash: str = "",
) -> str:
    """Axis 0 of ``values`` runs left to right, axis 1 bottom to top."""
    n0, n1 = values.shape
    side = CANVAS - 2 * MARGIN
    left, bottom = MARGIN, CANVAS - MARGIN

    def to_canvas(row: np.ndarray, col: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return left + row / (n0 - 1) * side, bottom - col / (n1 - 1) * side

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">',
        f"<!-- schema=contours/1 config_hash={config_hash} -->",
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        f'<rect x="{left}" y="{MARGIN}" width="{side}" height="{side}" fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{CANVAS // 2}" y="{MARGIN // 2}" text-anchor="middle" font-family="sans-serif" font-size="18">{escape(title)}</text>',
        f'<text x="{CANVAS // 2}" y="{CANVAS - 20}" text-anchor="middle" font-family="sans-serif" font-size="14">'
        f'{escape(labels[0])} in [{_fmt(x_range[0])}, {_fmt(x_range[1])}]</text>',
        f'<text x="20" y="{CANVAS // 2}" text-anchor="middle" font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 20 {CANVAS // 2})">{escape(labels[1])} in [{_fmt(y_range[0])}, {_fmt(y_range[1])}]</text>',
    ]
    for x, label in ((left, x_range[0]), (left + side, x_range[1])):
        parts.append(f'<text x="{x}" y="{bottom + 20}" text-anchor="middle" font-family="sans-serif" font-size="12">{_fmt(label)}</text>')
    for y, label in ((bottom, y_range[0]), (MARGIN, y_range[1])):
        parts.append(f'<text x="{left - 8}" y="{y + 4}" text-anchor="end" font-family="sans-serif" font-size="12">{_fmt(label)}</text>')

    levels = contour_levels(values)
    if not levels:
        parts.append(
            f'<text x="{CANVAS // 2}" y="{CANVAS // 2}" text-anchor="middle" font-family="sans-serif" font-size="16">'
            f'constant field: single level {float(values.flat[0]):.6g}</text>'
        )
    for k, level in enumerate(levels):
        shade = int(40 + 160 * k / max(len(levels) - 1, 1))
        for path in find_contours(values, level):
            xs, ys = to_canvas(path[:, 0], path[:, 1])
            points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="rgb({shade},0,{240 - shade})" '
                f'stroke-width="1.2" data-level="{level:.17g}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_contours(field: ScalarField, path: str, config_hash: str = "", title: str = "") -> Path:
    g = field.grid
    svg = contours_svg(field.values, g.H_range, g.r_range, title or field.name, config_hash=config_hash)
    out = atomic_write(path, svg)
    logger.info(f"[export] Wrote contour plot {out}")
    return out
