"""Minimal deterministic SVG rendering for diagnostic plots.

Cosmetic output only: golden-file comparisons cover the CSV/JSON artifacts,
not these renderings.
"""

from __future__ import annotations

import math

import numpy as np

_WIDTH, _HEIGHT = 640, 420
_MARGIN = 52
_COLORS = ("#1f6fb2", "#d1495b", "#3a7d44", "#8d6a9f")


def _finite_pairs(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    return x[keep], y[keep]


def render_lines(series, xlabel: str = "", ylabel: str = "",
                 scatter: bool = False) -> str:
    """Render (x, y, label) series as an SVG document string."""
    cleaned = [(_finite_pairs(x, y), label) for x, y, label in series]
    cleaned = [((x, y), label) for (x, y), label in cleaned if x.size > 0]
    if not cleaned:
        return ('<svg xmlns="http://www.w3.org/2000/svg" width="640" height="420">'
                "<text x=\"20\" y=\"40\">no finite data</text></svg>\n")
    all_x = np.concatenate([x for (x, _), _ in cleaned])
    all_y = np.concatenate([y for (_, y), _ in cleaned])
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(v: float) -> float:
        return _MARGIN + (v - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)

    def sy(v: float) -> float:
        return _HEIGHT - _MARGIN - (v - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
             f'height="{_HEIGHT}" font-family="monospace" font-size="11">',
             f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_WIDTH - 2 * _MARGIN}" '
             f'height="{_HEIGHT - 2 * _MARGIN}" fill="none" stroke="#444"/>']
    for (x, y), label in cleaned:
        color = _COLORS[len(parts) % len(_COLORS)]
        if scatter or x.size == 1:
            for xv, yv in zip(x, y):
                parts.append(f'<circle cx="{sx(xv):.2f}" cy="{sy(yv):.2f}" r="1.6" '
                             f'fill="{color}"/>')
        else:
            pts = " ".join(f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x, y))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="1.2"/>')
        if label:
            parts.append(f'<text x="{_MARGIN + 6}" y="{_MARGIN - 6}" '
                         f'fill="{color}">{label}</text>')
    for frac in (0.0, 0.5, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(f'<text x="{sx(xv):.2f}" y="{_HEIGHT - _MARGIN + 16}" '
                     f'text-anchor="middle">{xv:.4g}</text>')
        parts.append(f'<text x="{_MARGIN - 6}" y="{sy(yv):.2f}" '
                     f'text-anchor="end">{yv:.4g}</text>')
    if xlabel:
        parts.append(f'<text x="{_WIDTH / 2:.0f}" y="{_HEIGHT - 12}" '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="14" y="{_HEIGHT / 2:.0f}" text-anchor="middle" '
                     f'transform="rotate(-90 14 {_HEIGHT / 2:.0f})">{ylabel}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
