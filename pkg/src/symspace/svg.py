"""Minimal SVG drawings of polygons in two-dimensional model spaces."""
from __future__ import annotations

import numpy as np

from .models import Hyperbolic, ModelSpace

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _project(space: ModelSpace, pts):
    pts = np.atleast_2d(pts)
    if isinstance(space, Hyperbolic):
        # Poincare disk
        return pts[:, :2] / (1 + pts[:, 2:3])
    c = space._chart(pts)
    if c.shape[1] == 1:
        c = np.hstack([c, np.zeros_like(c)])
    return c[:, :2]


def _edge(space, p, q, steps=24):
    """Geodesic from p to q where a logarithm exists, else the chart segment."""
    if space.has_log and space.has_group:
        from .geometry import exp_at, log_at

        V = log_at(space, p, q)
        return np.array([exp_at(space, p, t * V) for t in np.linspace(0, 1, steps)])
    c = space._chart(np.array([p, q]))
    ts = np.linspace(0, 1, steps)[:, None]
    return space._from_chart((1 - ts) * c[0] + ts * c[1])


def polygons_svg(space: ModelSpace, polygons, size=480, labels=None) -> str:
    """One closed polyline per polygon (each an array of points)."""
    if space.dim > 2:
        raise ValueError(f"cannot draw {space.name}: only 1- and 2-dimensional spaces")
    paths = []
    for poly in polygons:
        poly = np.asarray(poly, dtype=float)
        ring = list(poly) + [poly[0]]
        pts = np.vstack([_edge(space, a, b) for a, b in zip(ring[:-1], ring[1:])])
        paths.append(_project(space, pts))
    allpts = np.vstack(paths) if paths else np.zeros((1, 2))
    allpts = allpts[np.all(np.isfinite(allpts), axis=1)]
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    if isinstance(space, Hyperbolic):
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    span = max(float(np.max(hi - lo)), 1e-9)
    pad = 0.05 * span
    lo, span = lo - pad, span + 2 * pad
    scale = size / span

    def fmt(p):
        x = (p[0] - lo[0]) * scale
        y = size - (p[1] - lo[1]) * scale
        return f"{x:.3f},{y:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if isinstance(space, Hyperbolic):
        c = fmt(np.zeros(2)).split(",")
        out.append(
            f'<circle cx="{c[0]}" cy="{c[1]}" r="{scale:.3f}" fill="none" stroke="#888888"/>'
        )
    for k, path in enumerate(paths):
        pts = " ".join(fmt(p) for p in path if np.all(np.isfinite(p)))
        color = COLORS[k % len(COLORS)]
        title = f"<title>{labels[k]}</title>" if labels else ""
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5">{title}</polyline>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
