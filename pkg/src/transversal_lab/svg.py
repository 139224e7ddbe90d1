"""Plain SVG 1.1 rendering of planar scenes (3-D scenes are drawn as their z-projection)."""

from __future__ import annotations

import numpy as np

from .geometry import Ball, CompoundBody, Interval, Polyline

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _num(x: float) -> str:
    return "%.6f" % x


def _outline(S):
    """('circle', c, r) | ('poly', V, closed) for a piece in the plane (first two coordinates)."""
    if isinstance(S, Ball):
        return [("circle", np.array(S.center[:2]), S.radius)]
    if isinstance(S, Polyline):
        return [("poly", np.array(S.vertices_seq)[:, :2], False)]
    if isinstance(S, CompoundBody):
        return [o for p in S.parts for o in _outline(p)]
    V = np.atleast_2d(S.vertices())[:, :2]
    if len(V) > 4 or S.dim == 3:
        V = _hull2(V)
    return [("poly", V, len(V) > 2)]


def _hull2(V: np.ndarray) -> np.ndarray:
    pts = sorted(set(map(tuple, np.round(V, 12))))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _bounds(outlines):
    lo = np.array([np.inf, np.inf])
    hi = -lo
    for kind, a, b in outlines:
        if kind == "circle":
            lo = np.minimum(lo, a - b)
            hi = np.maximum(hi, a + b)
        else:
            lo = np.minimum(lo, a.min(axis=0))
            hi = np.maximum(hi, a.max(axis=0))
    return lo, hi


def render_svg(bodies, highlight: bool = False, unit_circle: bool = False, axes: bool = False,
               heights=None, size: int = 800) -> str:
    """SVG text for a list of planar (or 3-D, projected) bodies."""
    bodies = list(bodies)
    if any(isinstance(b, Interval) for b in bodies):
        raise ValueError("intervals are not rendered; plot planar scenes")
    outlines = [_outline(b) for b in bodies]
    flat = [o for group in outlines for o in group]
    if unit_circle:
        flat.append(("circle", np.zeros(2), 1.0))
    if flat:
        lo, hi = _bounds(flat)
    else:
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    span = float(max(hi - lo)) or 1.0
    pad = 0.05 * span
    lo, hi = lo - pad, hi + pad
    w, h = hi - lo
    stroke = _num(span / 400)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{_num(lo[0])} {_num(-hi[1])} {_num(w)} {_num(h)}">',
        f'<g transform="scale(1,-1)" fill-opacity="0.25" stroke-width="{stroke}">',
    ]
    if axes:
        out.append(f'<line x1="{_num(lo[0])}" y1="0" x2="{_num(hi[0])}" y2="0" stroke="#888888"/>')
        out.append(f'<line x1="0" y1="{_num(lo[1])}" x2="0" y2="{_num(hi[1])}" stroke="#888888"/>')
    if unit_circle:
        out.append(f'<circle cx="0" cy="0" r="1" fill="none" stroke="#000000"/>')
    for idx, group in enumerate(outlines):
        color = PALETTE[idx % len(PALETTE)]
        extra = f' stroke-width="{_num(3 * span / 400)}"' if highlight else ""
        out.append(f'<g id="body-{idx + 1}" stroke="{color}" fill="{color}"{extra}>')
        for kind, a, b in group:
            if kind == "circle":
                out.append(f'<circle cx="{_num(a[0])}" cy="{_num(a[1])}" r="{_num(b)}"/>')
            else:
                pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in a)
                tag = "polygon" if b else "polyline"
                fill = "" if b else ' fill="none"'
                out.append(f'<{tag} points="{pts}"{fill}/>')
        out.append("</g>")
    out.append("</g>")
    if highlight or heights is not None:
        font = _num(span / 40)
        for idx, group in enumerate(outlines):
            c = _bounds(group)
            mid = 0.5 * (c[0] + c[1])
            label = str(idx + 1)
            if heights is not None:
                label += f" z={heights[idx]:g}"
            out.append(f'<text x="{_num(mid[0])}" y="{_num(-mid[1])}" font-size="{font}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
