"""Independent oracles used by the tests; written without the library's solvers."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog


def interval_brute_min(intervals) -> int:
    """Smallest subset of endpoints hitting every interval, by exhaustive search."""
    cands = sorted({e for lo, hi in intervals for e in (lo, hi)})
    masks = []
    for c in cands:
        m = 0
        for i, (lo, hi) in enumerate(intervals):
            if lo <= c <= hi:
                m |= 1 << i
        masks.append(m)
    full = (1 << len(intervals)) - 1
    for size in range(1, len(intervals) + 1):
        for combo in itertools.combinations(masks, size):
            acc = 0
            for m in combo:
                acc |= m
            if acc == full:
                return size
    raise AssertionError("endpoints always cover")


def boxes_disjoint(lo_a, hi_a, lo_b, hi_b) -> bool:
    return any(hi_a[t] < lo_b[t] or hi_b[t] < lo_a[t] for t in range(len(lo_a)))


def exists_disjoint_boxes(los, his, m) -> bool:
    n = len(los)
    dis = [[boxes_disjoint(los[a], his[a], los[b], his[b]) for b in range(n)] for a in range(n)]
    return any(all(dis[a][b] for a, b in itertools.combinations(c, 2)) for c in itertools.combinations(range(n), m))


def rect_corners(center, u, hl, hw) -> np.ndarray:
    c, u = np.asarray(center, float), np.asarray(u, float)
    w = np.array([-u[1], u[0]])
    return np.array([c + sa * hl * u + sb * hw * w for sa, sb in ((-1, -1), (1, -1), (1, 1), (-1, 1))])


def polygons_meet_lp(VA, VB) -> bool:
    """Feasibility of conv(VA) and conv(VB) sharing a point, by linear programming."""
    na, nb = len(VA), len(VB)
    A_eq = np.zeros((2 + 2, na + nb))
    A_eq[:2, :na] = np.asarray(VA).T
    A_eq[:2, na:] = -np.asarray(VB).T
    A_eq[2, :na] = 1
    A_eq[3, na:] = 1
    res = linprog(np.zeros(na + nb), A_eq=A_eq, b_eq=[0, 0, 1, 1], bounds=(0, None), method="highs")
    return res.status == 0


def dist_point_rect(p, center, u, hl, hw) -> float:
    c, u = np.asarray(center, float), np.asarray(u, float)
    w = np.array([-u[1], u[0]])
    q = np.asarray(p, float) - c
    a, b = abs(q @ u), abs(q @ w)
    return math.hypot(max(a - hl, 0.0), max(b - hw, 0.0))


def grid_line_gap(centers, radii, samples: int = 100_000) -> float:
    """min over a dense angle grid of (max lower end - min upper end) of the disk projections."""
    C = np.asarray(centers, float)
    r = np.asarray(radii, float)
    phi = np.linspace(0.0, math.pi, samples, endpoint=False)
    N = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
    proj = N @ C.T
    g = (proj - r).max(axis=1) - (proj + r).min(axis=1)
    return float(g.min())


def point_in_convex_polygon(p, V, tol=1e-9) -> bool:
    """V counter-clockwise or clockwise; checks all edge sides agree."""
    V = np.asarray(V, float)
    s = []
    for a, b in zip(V, np.roll(V, -1, axis=0)):
        e = b - a
        s.append(e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]))
    s = np.array(s) / max(1.0, float(np.abs(V).max()))
    return bool((s >= -tol).all() or (s <= tol).all())


def convex_hull_2d(P) -> np.ndarray:
    pts = sorted(set(map(tuple, np.asarray(P, float))))

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


def line_hits_lifted_rect(base, direction, vertices3, tol=1e-7) -> bool:
    """Line base + t*direction meets the planar polygon at height z = vertices3[:, 2]."""
    V = np.asarray(vertices3, float)
    z = V[0, 2]
    base, direction = np.asarray(base, float), np.asarray(direction, float)
    if abs(direction[2]) < 1e-15:
        return False
    t = (z - base[2]) / direction[2]
    p = base + t * direction
    return point_in_convex_polygon(p[:2], convex_hull_2d(V[:, :2]), tol)
