"""Piercing predicates and common-transversal feasibility.

Answers are three-valued.  ``Pierced`` always carries a witness flat that has
been re-checked against every body; ``Empty`` is flagged ``certified`` only
when it comes from an exact procedure; everything in the numerical grey zone
between the accept and reject tolerances is ``Unknown``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import DimensionMismatch, Inconclusive, VerificationFailed
from .geometry import (
    AxisBox,
    Ball,
    CompoundBody,
    ConvexPolygon2,
    GEOM_TOL,
    Interval,
    KFlat,
    OrientedRect2,
    Polytope,
    Triangle2,
    body_distance,
    dist_body_flat,
)

ACCEPT_TOL = 1e-9
REJECT_TOL = 1e-6
WITNESS_TOL = 1e-7

PIERCED = "pierced"
EMPTY = "empty"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class TransversalAnswer:
    status: str
    witness: KFlat | None = None
    certified: bool = False
    method: str = ""
    value: float = math.nan

    @property
    def pierced(self) -> bool:
        return self.status == PIERCED

    @property
    def empty(self) -> bool:
        return self.status == EMPTY

    @property
    def certified_empty(self) -> bool:
        return self.status == EMPTY and self.certified


@dataclass(frozen=True)
class DependenceCertificate:
    indices: tuple[int, ...]  # 1-based positions in the sequence
    flat: KFlat


def pierces(K: KFlat, S, tol: float = ACCEPT_TOL) -> bool:
    return dist_body_flat(S, K) <= tol


def _shared_dim(bodies) -> int:
    if not bodies:
        raise ValueError("need at least one body")
    dims = {b.dim for b in bodies}
    if len(dims) != 1:
        raise DimensionMismatch(f"bodies live in different dimensions: {sorted(dims)}")
    return dims.pop()


def _ensure_witness(answer: TransversalAnswer, bodies) -> TransversalAnswer:
    """Soundness guard: a Pierced witness must meet every body."""
    if answer.pierced:
        worst = max(dist_body_flat(S, answer.witness) for S in bodies)
        if worst > WITNESS_TOL:
            raise VerificationFailed(f"witness misses a body by {worst:.3e} ({answer.method})")
    return answer


def _grade(value: float, witness: KFlat | None, method: str, certified_empty: bool) -> TransversalAnswer:
    if value <= ACCEPT_TOL and witness is not None:
        return TransversalAnswer(PIERCED, witness, False, method, value)
    if value > REJECT_TOL:
        return TransversalAnswer(EMPTY, None, certified_empty, method, value)
    return TransversalAnswer(UNKNOWN, None, False, method, value)


def _expand_compound(bodies, solver):
    """Run ``solver`` over every choice of one convex piece per compound body."""
    choices = [b.pieces() if isinstance(b, CompoundBody) else [b] for b in bodies]
    all_certified = True
    best = None
    for combo in itertools.product(*choices):
        ans = solver(list(combo))
        if ans.pierced:
            return TransversalAnswer(PIERCED, ans.witness, False, ans.method + "+pieces", ans.value)
        if not ans.certified_empty:
            all_certified = False
        if best is None or ans.value < best.value:
            best = ans
    if all_certified:
        return TransversalAnswer(EMPTY, None, True, best.method + "+pieces", best.value)
    if best.status == EMPTY:
        return TransversalAnswer(EMPTY, None, False, best.method + "+pieces", best.value)
    return TransversalAnswer(UNKNOWN, None, False, best.method + "+pieces", best.value)


# ---------------------------------------------------------------------------
# k = 0: common point
# ---------------------------------------------------------------------------


def _max_dist(bodies, p) -> float:
    return max(S.distance(p) for S in bodies)


def _vertex_lp(bodies, d: int, slopes: Sequence[float] | None = None):
    """min t such that a point (or a line p0 + z w) lies within L-inf distance t of every hull.

    With ``slopes`` given, body i is matched against ``p0 + slopes[i] * w``.
    Returns (t, p0, w).
    """
    V = [np.atleast_2d(S.vertices()) for S in bodies]
    nl = sum(len(v) for v in V)
    nw = d if slopes is not None else 0
    nvar = d + nw + 1 + nl  # p0, w, t, lambdas
    it = d + nw
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    off = it + 1
    for i, v in enumerate(V):
        m = len(v)
        for ax in range(d):
            row = np.zeros(nvar)
            row[ax] = 1.0
            if slopes is not None:
                row[d + ax] = slopes[i]
            row[off:off + m] = -v[:, ax]
            r1 = row.copy()
            r1[it] = -1.0
            A_ub.append(r1)
            b_ub.append(0.0)
            r2 = -row
            r2[it] = -1.0
            A_ub.append(r2)
            b_ub.append(0.0)
        row = np.zeros(nvar)
        row[off:off + m] = 1.0
        A_eq.append(row)
        b_eq.append(1.0)
        off += m
    c = np.zeros(nvar)
    c[it] = 1.0
    bounds = [(None, None)] * (d + nw) + [(0, None)] + [(0, None)] * nl
    res = linprog(
        c,
        A_ub=np.array(A_ub),
        b_ub=np.array(b_ub),
        A_eq=np.array(A_eq),
        b_eq=np.array(b_eq),
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        return math.inf, None, None
    x = res.x
    return float(x[it]), x[:d], (x[d:d + nw] if nw else None)


def _pairwise_screen(bodies):
    """Largest rigorous pairwise separation, with the pair achieving it."""
    best = (-math.inf, None)
    for i, j in itertools.combinations(range(len(bodies)), 2):
        _, lower = body_distance(bodies[i], bodies[j])
        if lower > best[0]:
            best = (lower, (i, j))
    return best


def _disk_candidates(disks) -> list[np.ndarray]:
    """Leftmost points plus pairwise circle intersections: the leftmost point of a
    nonempty intersection of disks is always one of these."""
    cands = [np.array(D.center) - np.array([D.radius, 0.0]) for D in disks]
    cands += [np.array(D.center) for D in disks]
    for A, B in itertools.combinations(disks, 2):
        cands.extend(_circle_intersections(np.array(A.center), A.radius, np.array(B.center), B.radius))
    return cands


def _circle_intersections(c1, r1, c2, r2) -> list[np.ndarray]:
    v = c2 - c1
    dd = float(np.linalg.norm(v))
    if dd == 0.0 or dd > r1 + r2 + 1e-12 or dd < abs(r1 - r2) - 1e-12:
        return []
    a = (r1 * r1 - r2 * r2 + dd * dd) / (2 * dd)
    h = math.sqrt(max(0.0, r1 * r1 - a * a))
    base = c1 + a * v / dd
    perp = np.array([-v[1], v[0]]) / dd
    return [base + h * perp, base - h * perp]


def _farthest_projection(bodies, p, max_iter: int = 10_000):
    """Polyak subgradient steps with target value 0 (project onto the farthest body)."""
    best_p, best_v = p, _max_dist(bodies, p)
    stall = 0
    for _ in range(max_iter):
        dists = [S.distance(p) for S in bodies]
        i = int(np.argmax(dists))
        v = dists[i]
        if v < best_v - 1e-15:
            if v < best_v * 0.999:
                stall = 0
            best_p, best_v = p, v
        else:
            stall += 1
        if best_v <= 1e-11 or stall > 200:
            break
        p = bodies[i].project(p)
    return best_p, best_v


def _epigraph_refine(bodies, p0):
    """Smooth epigraph formulation of min_p max_i dist(p, S_i)."""
    d = len(p0)
    x0 = np.append(p0, _max_dist(bodies, p0))
    cons = [{"type": "ineq", "fun": (lambda x, S=S: x[-1] - S.distance(x[:-1]))} for S in bodies]
    res = minimize(lambda x: x[-1], x0, constraints=cons, method="SLSQP", options={"maxiter": 200, "ftol": 1e-14})
    p = res.x[:d]
    return p, _max_dist(bodies, p)


def _common_point_convex(bodies) -> TransversalAnswer:
    d = _shared_dim(bodies)
    if len(bodies) == 1:
        p = bodies[0].reference_point()
        p = bodies[0].project(p)
        return TransversalAnswer(PIERCED, KFlat.point(p), False, "single", 0.0)

    sep, _ = _pairwise_screen(bodies)
    if sep > REJECT_TOL:
        return TransversalAnswer(EMPTY, None, True, "pairwise-separation", sep)

    if all(isinstance(S, (AxisBox, Interval)) for S in bodies):
        lo = np.max([np.atleast_1d(S.vertices().min(axis=0)) for S in bodies], axis=0)
        hi = np.min([np.atleast_1d(S.vertices().max(axis=0)) for S in bodies], axis=0)
        gap = float(np.max(lo - hi))
        p = 0.5 * (lo + hi)
        return _grade(max(gap, 0.0), KFlat.point(p), "box-axes", True)

    if all(S.polyhedral for S in bodies):
        t, p, _ = _vertex_lp(bodies, d)
        if p is not None:
            value = _max_dist(bodies, p)
            if value > ACCEPT_TOL and t <= ACCEPT_TOL:
                p, value = _farthest_projection(bodies, p)
            if value <= ACCEPT_TOL:
                return TransversalAnswer(PIERCED, KFlat.point(p), False, "hull-lp", value)
            return _grade(t, None, "hull-lp", True)

    if d == 2 and all(isinstance(S, Ball) for S in bodies):
        best_p, best_v = None, math.inf
        for q in _disk_candidates(bodies):
            v = _max_dist(bodies, q)
            if v < best_v:
                best_p, best_v = q, v
        if best_v <= ACCEPT_TOL:
            return TransversalAnswer(PIERCED, KFlat.point(best_p), False, "disk-candidates", best_v)
        p, v = _farthest_projection(bodies, best_p)
        p, v = min([(p, v), _epigraph_refine(bodies, p)], key=lambda t: t[1])
        return _grade(v, KFlat.point(p), "disk-candidates", True)

    start = np.mean([S.reference_point() for S in bodies], axis=0)
    p, v = _farthest_projection(bodies, start)
    if v > ACCEPT_TOL:
        q, w = _epigraph_refine(bodies, p)
        if w < v:
            p, v = q, w
    return _grade(v, KFlat.point(p), "subgradient", False)


def common_point(bodies) -> TransversalAnswer:
    """Decide whether the bodies share a point."""
    bodies = list(bodies)
    _shared_dim(bodies)
    if any(isinstance(S, CompoundBody) for S in bodies):
        ans = _expand_compound(bodies, _common_point_convex)
    else:
        ans = _common_point_convex(bodies)
    return _ensure_witness(ans, bodies)


# ---------------------------------------------------------------------------
# k = 1, d = 2: exact angular sweep
# ---------------------------------------------------------------------------


def _sweep_terms(bodies):
    """Sinusoid terms <n(phi), p> + e for the lower and upper offset of each body."""
    lower, upper = [], []
    for S in bodies:
        if isinstance(S, Ball):
            c = np.array(S.center)
            lower.append((np.array([c]), np.array([-S.radius])))
            upper.append((np.array([c]), np.array([S.radius])))
        else:
            V = np.atleast_2d(S.vertices())
            z = np.zeros(len(V))
            lower.append((V, z))
            upper.append((V, z))
    return lower, upper


def _normals(phi):
    phi = np.atleast_1d(phi)
    return np.stack([-np.sin(phi), np.cos(phi)], axis=1)


def _sweep_eval(lower, upper, phi):
    """g(phi) = max_i lower_i - min_j upper_j, plus the two envelopes."""
    N = _normals(phi)
    lo = np.stack([np.min(N @ P.T + E, axis=1) for P, E in lower], axis=1)
    up = np.stack([np.max(N @ P.T + E, axis=1) for P, E in upper], axis=1)
    L = lo.max(axis=1)
    U = up.min(axis=1)
    return L - U, L, U


def _sweep_candidates(lower, upper) -> np.ndarray:
    pts = [P for P, _ in lower] + [P for P, _ in upper]
    offs = [E for _, E in lower] + [E for _, E in upper]
    P = np.concatenate(pts)
    E = np.concatenate(offs)
    # dedupe identical terms (polygon vertices appear in both envelopes)
    key = np.round(np.column_stack([P, E]), 15)
    _, idx = np.unique(key, axis=0, return_index=True)
    P, E = P[idx], E[idx]
    i, j = np.triu_indices(len(P), 1)
    W = P[i] - P[j]
    R = E[j] - E[i]
    nw = np.linalg.norm(W, axis=1)
    ok = nw > 1e-15
    W, R, nw = W[ok], R[ok], nw[ok]
    psi = np.arctan2(W[:, 1], W[:, 0]) - np.pi / 2
    cands = [psi]
    fine = np.abs(R) <= nw
    acs = np.arccos(np.clip(R[fine] / nw[fine], -1.0, 1.0))
    cands += [psi[fine] + acs, psi[fine] - acs]
    cands.append(np.array([0.0, np.pi / 2]))
    out = np.mod(np.concatenate(cands), np.pi)
    return np.unique(out)


def _golden(f, a, b, iters=60):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def planar_sweep_min(bodies):
    """(g_min, phi, offset) for the exact line sweep over planar bodies."""
    lower, upper = _sweep_terms(bodies)
    cands = _sweep_candidates(lower, upper)
    # include both ends of each bracket so the minimum over the candidates is exact
    g, L, U = _sweep_eval(lower, upper, cands)
    k = int(np.argmin(g))
    best_phi, best_g = float(cands[k]), float(g[k])
    n = len(cands)
    f = lambda t: float(_sweep_eval(lower, upper, np.array([t]))[0][0])
    for idx in np.argsort(g)[:3]:
        a = float(cands[idx - 1]) if idx > 0 else float(cands[-1]) - np.pi
        b = float(cands[idx + 1]) if idx + 1 < n else float(cands[0]) + np.pi
        phi, val = _golden(f, a, b)
        if val < best_g:
            best_phi, best_g = phi % np.pi, val
    _, L, U = _sweep_eval(lower, upper, np.array([best_phi]))
    return best_g, best_phi, 0.5 * float(L[0] + U[0])


def _line_from_sweep(phi, s) -> KFlat:
    n = _normals(phi)[0]
    return KFlat.line(s * n, (math.cos(phi), math.sin(phi)))


def _planar_line(bodies) -> TransversalAnswer:
    if len(bodies) == 1:
        c = bodies[0].reference_point()
        return TransversalAnswer(PIERCED, KFlat.line(c, (1.0, 0.0)), False, "line-sweep", 0.0)
    g, phi, s = planar_sweep_min(bodies)
    return _grade(g, _line_from_sweep(phi, s), "line-sweep", True)


_PLANAR = (Ball, OrientedRect2, Triangle2, ConvexPolygon2, Polytope, AxisBox)


def line_transversal_2d(disks) -> TransversalAnswer:
    """Exact line transversal for disks in the plane."""
    disks = list(disks)
    if not disks:
        raise ValueError("need at least one disk")
    if not all(isinstance(D, Ball) for D in disks):
        raise TypeError("line_transversal_2d accepts disks (Ball in R^2) only")
    if _shared_dim(disks) != 2:
        raise DimensionMismatch("line_transversal_2d works in the plane")
    return _ensure_witness(_planar_line(disks), disks)


# ---------------------------------------------------------------------------
# general k-flats
# ---------------------------------------------------------------------------


def axis_flat_transversal(k: int, boxes, axis_set) -> TransversalAnswer:
    """Exact test for a k-flat spanned by coordinate axes (0-based indices)."""
    boxes = list(boxes)
    axes = sorted(set(int(a) for a in axis_set))
    if len(axes) != k or len(list(axis_set)) != k:
        raise ValueError(f"axis_set must list exactly k={k} distinct axes")
    d = _shared_dim(boxes)
    if any(a < 0 or a >= d for a in axes):
        raise ValueError("axis index out of range")
    if not all(isinstance(B, AxisBox) for B in boxes):
        raise TypeError("axis_flat_transversal needs AxisBox inputs")
    lo = np.max([B.lo for B in boxes], axis=0)
    hi = np.min([B.hi for B in boxes], axis=0)
    free = [i for i in range(d) if i not in axes]
    gap = max([float(lo[i] - hi[i]) for i in free] + [0.0])
    base = np.zeros(d)
    for i in free:
        base[i] = 0.5 * (lo[i] + hi[i])
    basis = [np.eye(d)[a] for a in axes]
    flat = KFlat(base, basis)
    return _ensure_witness(_grade(gap, flat, "axis-boxes", True), boxes)


def _lifted_levels(bodies):
    """Heights if every body is polyhedral and flat in a distinct level x_d = z."""
    zs = []
    for S in bodies:
        if not getattr(S, "polyhedral", False):
            return None
        V = np.atleast_2d(S.vertices())
        z = V[:, -1]
        if np.ptp(z) > 1e-12:
            return None
        zs.append(float(z[0]))
    if len(set(zs)) != len(zs):
        return None
    return zs


def _slab_line(bodies, zs) -> TransversalAnswer:
    d = bodies[0].dim
    flat_bodies = [Polytope(np.atleast_2d(S.vertices())[:, :-1]) for S in bodies]
    t, p0, w = _vertex_lp(flat_bodies, d - 1, slopes=zs)
    if p0 is None:
        return TransversalAnswer(UNKNOWN, None, False, "level-lp", math.inf)
    line = KFlat.line(np.append(p0, 0.0), np.append(w, 1.0))
    value = max(dist_body_flat(S, line) for S in bodies)
    if value <= ACCEPT_TOL:
        return TransversalAnswer(PIERCED, line, False, "level-lp", value)
    return _grade(t, None, "level-lp", True)


def _fibonacci_directions(n: int, d: int) -> np.ndarray:
    if d == 2:
        a = np.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    i = np.arange(n) + 0.5
    z = i / n  # upper hemisphere suffices for lines
    phi = np.pi * (1 + 5**0.5) * i
    r = np.sqrt(1 - z * z)
    base = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    if d == 3:
        return base
    pad = np.zeros((n, d - 3))
    return np.hstack([base, pad])


def _project_body(S, N: np.ndarray):
    """Image of a body under x -> N^T x (N has orthonormal columns)."""
    if isinstance(S, Ball):
        return Ball(np.array(S.center) @ N, S.radius)
    V = np.atleast_2d(S.vertices()) @ N
    if V.shape[1] == 1:
        return Interval(float(V.min()), float(V.max()))
    return Polytope(V)


def _frame_value(bodies, frame: np.ndarray, iters: int = 300):
    """Cheap minimax value of the projected problem for a k-frame (rows)."""
    from scipy.linalg import null_space

    N = null_space(frame)
    proj = [_project_body(S, N) for S in bodies]
    start = np.mean([P.reference_point() for P in proj], axis=0)
    p, v = _farthest_projection(proj, start, max_iter=iters)
    return v, p, N


def _orthonormal_frame(M: np.ndarray) -> np.ndarray:
    Q, _ = np.linalg.qr(M.T)
    return Q.T


def _heuristic_flat(k, bodies, budget, seed) -> TransversalAnswer:
    d = _shared_dim(bodies)
    rng = np.random.default_rng(seed)
    frames = []
    if k == 1:
        frames += [row[None, :] for row in _fibonacci_directions(max(budget, 8), d)]
    frames += [_orthonormal_frame(rng.standard_normal((k, d))) for _ in range(budget)]
    frames += [np.eye(d)[list(c)] for c in itertools.combinations(range(d), k)]
    scored = []
    for F in frames:
        v, p, N = _frame_value(bodies, F)
        scored.append((v, F, p, N))
        if v <= 1e-11:
            break
    scored.sort(key=lambda t: t[0])
    best = scored[0]
    if best[0] > ACCEPT_TOL:
        # local refinement of the best frame by a perturbation parameterization
        F0 = best[1]

        def obj(x):
            F = _orthonormal_frame(F0 + x.reshape(F0.shape))
            return _frame_value(bodies, F, iters=200)[0]

        res = minimize(obj, np.zeros(F0.size), method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 400 * F0.size})
        F = _orthonormal_frame(F0 + res.x.reshape(F0.shape))
        v, p, N = _frame_value(bodies, F, iters=2000)
        if v < best[0]:
            best = (v, F, p, N)
    v, F, p, N = best
    flat = KFlat(N @ p, [tuple(r) for r in F])
    value = max(dist_body_flat(S, flat) for S in bodies)
    if value <= ACCEPT_TOL:
        return TransversalAnswer(PIERCED, flat, False, "frame-search", value)
    return TransversalAnswer(UNKNOWN, None, False, "frame-search", value)


def _flat_through_points(points, k: int, d: int) -> KFlat:
    """A k-flat through at most k+1 points."""
    base = np.asarray(points[0], dtype=float)
    basis: list[np.ndarray] = []
    for v in [np.asarray(p, dtype=float) - base for p in points[1:]] + list(np.eye(d)):
        for b in basis:
            v = v - (v @ b) * b
        n = float(np.linalg.norm(v))
        if n > 1e-9:
            basis.append(v / n)
        if len(basis) == k:
            break
    return KFlat(base, basis)


def _flat_convex(k, bodies, budget, seed) -> TransversalAnswer:
    d = _shared_dim(bodies)
    if k == 0:
        return _common_point_convex(bodies)
    if len(bodies) <= k + 1:
        pts = [S.project(S.reference_point()) for S in bodies]
        return TransversalAnswer(PIERCED, _flat_through_points(pts, k, d), False, "through-points", 0.0)
    if k == 1 and d == 2 and all(isinstance(S, _PLANAR) for S in bodies):
        return _planar_line(bodies)
    if k == 1 and d >= 3:
        zs = _lifted_levels(bodies)
        if zs is not None:
            return _slab_line(bodies, zs)
    return _heuristic_flat(k, bodies, budget, seed)


def flat_transversal(k: int, bodies, budget: int = 64, seed: int = 0) -> TransversalAnswer:
    """Search for a single k-flat meeting every body."""
    bodies = list(bodies)
    d = _shared_dim(bodies)
    if not (0 <= k <= d - 1):
        raise ValueError(f"k must lie in [0, {d - 1}] for bodies in R^{d}")
    solver = lambda bs: _flat_convex(k, bs, budget, seed)
    if any(isinstance(S, CompoundBody) for S in bodies):
        ans = _expand_compound(bodies, solver)
    else:
        ans = solver(bodies)
    return _ensure_witness(ans, bodies)


def transversal(k: int, bodies, budget: int = 64, seed: int = 0) -> TransversalAnswer:
    """Dispatch: points for k = 0, otherwise flat_transversal."""
    if k == 0:
        return common_point(bodies)
    return flat_transversal(k, bodies, budget, seed)


# ---------------------------------------------------------------------------
# dependence and (p, q)
# ---------------------------------------------------------------------------


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        for it in items:
            yield it, fn(it)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        batch = []
        for it in items:
            batch.append(it)
            if len(batch) == 4 * threads:
                yield from zip(batch, pool.map(fn, batch))
                batch = []
        if batch:
            yield from zip(batch, pool.map(fn, batch))


def is_k_dependent(sequence, k: int, budget: int = 64, seed: int = 0, threads: int = 1):
    """First (lexicographic) certificate of k+2 members on one k-flat, or None."""
    seq = list(sequence)
    if len(seq) < k + 2:
        raise ValueError(f"sequence needs at least k+2={k + 2} members")
    unresolved = []
    subsets = itertools.combinations(range(len(seq)), k + 2)
    solve = lambda idx: transversal(k, [seq[i] for i in idx], budget, seed)
    for idx, ans in _map_ordered(solve, subsets, threads):
        if ans.pierced:
            return DependenceCertificate(tuple(i + 1 for i in idx), ans.witness)
        if not ans.certified_empty:
            unresolved.append(tuple(i + 1 for i in idx))
    if unresolved:
        raise Inconclusive(f"{len(unresolved)} subsets could not be decided", unresolved)
    return None


def has_pq_property(bodies, p: int, q: int, k: int = 0, budget: int = 64, seed: int = 0):
    """(holds, counterexample) where the counterexample lists 1-based indices of a bad p-subset."""
    bodies = list(bodies)
    if not (len(bodies) >= p >= q >= 1):
        raise ValueError("need |bodies| >= p >= q >= 1")
    cache: dict[tuple[int, ...], TransversalAnswer] = {}

    def answer(idx):
        if idx not in cache:
            if len(idx) <= 1:
                cache[idx] = TransversalAnswer(PIERCED, None, False, "single", 0.0)
            else:
                cache[idx] = transversal(k, [bodies[i] for i in idx], budget, seed)
        return cache[idx]

    unresolved = []
    for P in itertools.combinations(range(len(bodies)), p):
        found = False
        gray = False
        for Q in itertools.combinations(P, q):
            a = answer(Q)
            if a.pierced:
                found = True
                break
            if not a.certified_empty:
                gray = True
        if not found:
            if gray:
                unresolved.append(tuple(i + 1 for i in P))
                continue
            return False, tuple(i + 1 for i in P)
    if unresolved:
        raise Inconclusive("some p-subsets could not be decided", unresolved)
    return True, None
