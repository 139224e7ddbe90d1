"""Geometric primitives: convex bodies, affine flats, radii, cones and ray regions.

All bodies are immutable value objects that store plain float tuples.  Each
one knows how to report its support function, project a point onto itself,
and (when polyhedral) list its vertices; every higher-level routine in the
package is written against that small surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    DegenerateBody,
    DimensionMismatch,
    NonConvergence,
    ZeroVector,
)

GEOM_TOL = 1e-9
NORM_TOL = 1e-12


def _tup(x) -> tuple[float, ...]:
    return tuple(float(v) for v in np.asarray(x, dtype=float).ravel())


def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _check_finite(coords, what):
    if not all(math.isfinite(c) for c in coords):
        raise ValueError(f"{what} has non-finite coordinates: {coords}")


def _unit(v, what="direction") -> tuple[float, ...]:
    v = _arr(v)
    norm = float(np.linalg.norm(v))
    if norm <= NORM_TOL:
        raise ZeroVector(f"{what} has zero length")
    return _tup(v / norm)


# ---------------------------------------------------------------------------
# small numerical kernels
# ---------------------------------------------------------------------------


def _affine_min(Q: np.ndarray) -> np.ndarray:
    """Barycentric weights of the min-norm point of aff(Q)."""
    r = Q.shape[0]
    M = np.zeros((r + 1, r + 1))
    M[:r, :r] = Q @ Q.T
    M[:r, r] = 1.0
    M[r, :r] = 1.0
    rhs = np.zeros(r + 1)
    rhs[r] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:r]


def min_norm_point(P: np.ndarray, eps: float = 1e-13) -> np.ndarray:
    """Wolfe's algorithm: the point of conv(rows of P) closest to the origin."""
    P = np.atleast_2d(_arr(P))
    if P.shape[0] == 1:
        return P[0].copy()
    scale = max(1.0, float(np.max(np.sum(P * P, axis=1))))
    j = int(np.argmin(np.sum(P * P, axis=1)))
    S = [j]
    w = np.array([1.0])
    x = P[j].copy()
    for _ in range(100 * P.shape[0] + 100):
        dots = P @ x
        i = int(np.argmin(dots))
        if float(x @ x) - dots[i] <= eps * scale or i in S:
            break
        S.append(i)
        w = np.append(w, 0.0)
        while True:
            alpha = _affine_min(P[S])
            if np.all(alpha > eps):
                w = alpha
                x = alpha @ P[S]
                break
            mask = alpha < w
            theta = np.min(w[mask] / (w[mask] - alpha[mask])) if np.any(mask) else 1.0
            theta = min(1.0, max(0.0, float(theta)))
            w = theta * alpha + (1.0 - theta) * w
            keep = w > eps
            if not np.any(keep):
                keep[int(np.argmax(w))] = True
            S = [s for s, k in zip(S, keep) if k]
            w = w[keep]
            w = w / w.sum()
            x = w @ P[S]
            if len(S) == 1:
                break
    return x


def _segment_project(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    ab = b - a
    den = float(ab @ ab)
    if den == 0.0:
        return a.copy()
    t = min(1.0, max(0.0, float((x - a) @ ab) / den))
    return a + t * ab


def _minimum_enclosing_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Move-to-front incremental smallest enclosing ball of a finite point set."""
    pts = [p for p in np.atleast_2d(_arr(points))]
    d = len(pts[0])

    def ball_from(support):
        if not support:
            return np.zeros(d), -1.0
        p0 = support[0]
        if len(support) == 1:
            return p0.copy(), 0.0
        Q = np.array([s - p0 for s in support[1:]])
        G = Q @ Q.T
        rhs = 0.5 * np.diag(G)
        lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
        c = p0 + lam @ Q
        return c, float(np.linalg.norm(c - p0))

    def inside(c, r, p):
        return r >= 0 and float(np.linalg.norm(p - c)) <= r * (1 + 1e-12) + 1e-14

    def mtf(n_end, support):
        c, r = ball_from(support)
        if len(support) == d + 1:
            return c, r
        i = 0
        while i < n_end:
            p = pts[i]
            if not inside(c, r, p):
                c, r = mtf(i, support + [p])
                pts.insert(0, pts.pop(i))
            i += 1
        return c, r

    c, r = mtf(len(pts), [])
    # final exact radius over all points removes support-solve round-off
    r = float(max(np.linalg.norm(np.array(pts) - c, axis=1)))
    return c, r


def _polygon_halfspaces(verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit outward normals A and offsets b with A x <= b for a CCW polygon."""
    nxt = np.roll(verts, -1, axis=0)
    e = nxt - verts
    normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    b = np.sum(normals * verts, axis=1)
    return normals, b


# ---------------------------------------------------------------------------
# flats
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KFlat:
    """Affine k-flat: ``base + span(basis)`` with an orthonormal basis."""

    base: tuple[float, ...]
    basis: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base", _tup(self.base))
        object.__setattr__(self, "basis", tuple(_tup(b) for b in self.basis))
        _check_finite(self.base, "flat base")
        d = len(self.base)
        if any(len(b) != d for b in self.basis):
            raise DimensionMismatch("basis vectors must match the base dimension")
        if self.k > d - 1 and d > 0 and self.k > 0:
            raise ValueError(f"a {self.k}-flat does not fit properly in R^{d}")
        if self.k:
            B = np.array(self.basis)
            if np.max(np.abs(B @ B.T - np.eye(self.k))) > 1e-9:
                raise ValueError("flat basis is not orthonormal")

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.base)

    @classmethod
    def point(cls, p) -> "KFlat":
        return cls(_tup(p), ())

    @classmethod
    def through(cls, base, directions: Iterable) -> "KFlat":
        """Flat through ``base`` spanned by (not necessarily orthonormal) directions."""
        dirs = [np.asarray(v, dtype=float) for v in directions]
        if not dirs:
            return cls.point(base)
        Q, R = np.linalg.qr(np.array(dirs).T)
        if np.min(np.abs(np.diag(R))) <= NORM_TOL:
            raise ZeroVector("flat directions are linearly dependent")
        return cls(_tup(base), tuple(_tup(q) for q in Q.T))

    @classmethod
    def line(cls, p, direction) -> "KFlat":
        return cls(_tup(p), (_unit(direction),))

    def basis_array(self) -> np.ndarray:
        return np.array(self.basis, dtype=float).reshape(self.k, self.dim)

    def project(self, x) -> np.ndarray:
        x = _arr(x)
        base = _arr(self.base)
        if self.k == 0:
            return base.copy()
        B = self.basis_array()
        return base + B.T @ (B @ (x - base))

    def complement(self) -> np.ndarray:
        """Orthonormal basis (columns) of the orthogonal complement of the direction space."""
        if self.k == 0:
            return np.eye(self.dim)
        return null_space(self.basis_array())


def dist_point_flat(p, K: KFlat) -> float:
    p = _arr(p)
    if p.shape != (K.dim,):
        raise DimensionMismatch(f"point of dimension {p.size} vs flat in R^{K.dim}")
    return float(np.linalg.norm(p - K.project(p)))


# ---------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------


class ConvexBody:
    """Common behaviour for the closed convex bodies."""

    polyhedral = False

    @property
    def dim(self) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def support(self, u) -> float:
        """max over the body of <u, x>."""
        V = self.vertices()
        return float(np.max(V @ _arr(u)))

    def vertices(self) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} is not polyhedral")

    def project(self, x) -> np.ndarray:
        x = _arr(x)
        return x + min_norm_point(self.vertices() - x)

    def distance(self, x) -> float:
        x = _arr(x)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol: float = GEOM_TOL) -> bool:
        return self.distance(x) <= tol

    def farthest_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices(), axis=1)))

    def reference_point(self) -> np.ndarray:
        return np.mean(self.vertices(), axis=0)

    def pieces(self) -> list["ConvexBody"]:
        return [self]


@dataclass(frozen=True)
class Interval(ConvexBody):
    lo: float
    hi: float
    polyhedral = True

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        _check_finite((self.lo, self.hi), "interval")
        if self.lo > self.hi:
            raise ValueError(f"interval with lo > hi: [{self.lo}, {self.hi}]")

    @property
    def dim(self) -> int:
        return 1

    def vertices(self):
        return np.array([[self.lo], [self.hi]])

    def project(self, x):
        return np.clip(_arr(x).reshape(1), self.lo, self.hi)

    def overlaps(self, other: "Interval", tol: float = GEOM_TOL) -> bool:
        return max(self.lo, other.lo) <= min(self.hi, other.hi) + tol


@dataclass(frozen=True)
class AxisBox(ConvexBody):
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    polyhedral = True

    def __post_init__(self):
        object.__setattr__(self, "lo", _tup(self.lo))
        object.__setattr__(self, "hi", _tup(self.hi))
        _check_finite(self.lo + self.hi, "box")
        if len(self.lo) != len(self.hi):
            raise DimensionMismatch("box corners differ in dimension")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box with lo > hi on some axis")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def vertices(self):
        lo, hi = _arr(self.lo), _arr(self.hi)
        corners = np.array(np.meshgrid(*[[0, 1]] * self.dim, indexing="ij")).reshape(self.dim, -1).T
        return lo + corners * (hi - lo)

    def support(self, u):
        u = _arr(u)
        return float(np.sum(np.where(u > 0, u * _arr(self.hi), u * _arr(self.lo))))

    def project(self, x):
        return np.clip(_arr(x), self.lo, self.hi)

    def projection(self, axis: int) -> Interval:
        return Interval(self.lo[axis], self.hi[axis])

    def farthest_norm(self):
        lo, hi = np.abs(_arr(self.lo)), np.abs(_arr(self.hi))
        return float(np.linalg.norm(np.maximum(lo, hi)))

    def reference_point(self):
        return 0.5 * (_arr(self.lo) + _arr(self.hi))


@dataclass(frozen=True)
class Ball(ConvexBody):
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _tup(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        _check_finite(self.center + (self.radius,), "ball")
        if not self.radius > 0:
            raise DegenerateBody(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return len(self.center)

    def support(self, u):
        u = _arr(u)
        return float(u @ _arr(self.center) + self.radius * np.linalg.norm(u))

    def project(self, x):
        x = _arr(x)
        c = _arr(self.center)
        v = x - c
        n = float(np.linalg.norm(v))
        if n <= self.radius:
            return x.copy()
        return c + v * (self.radius / n)

    def distance(self, x):
        return max(0.0, float(np.linalg.norm(_arr(x) - _arr(self.center))) - self.radius)

    def farthest_norm(self):
        return float(np.linalg.norm(self.center)) + self.radius

    def reference_point(self):
        return _arr(self.center)


class _Polygon2(ConvexBody):
    """Shared machinery for the planar polygon types."""

    polyhedral = True

    @property
    def dim(self) -> int:
        return 2

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        return _polygon_halfspaces(self.vertices())

    def project(self, x):
        x = _arr(x)
        A, b = self.halfspaces()
        if np.all(A @ x <= b):
            return x.copy()
        V = self.vertices()
        best, best_d = None, math.inf
        for a, c in zip(V, np.roll(V, -1, axis=0)):
            q = _segment_project(a, c, x)
            dq = float(np.linalg.norm(q - x))
            if dq < best_d:
                best, best_d = q, dq
        return best

    def area(self) -> float:
        V = self.vertices()
        x, y = V[:, 0], V[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class OrientedRect2(_Polygon2):
    """Rectangle with long axis ``axis_u``; half extents along ``axis_u`` and its normal."""

    center: tuple[float, float]
    axis_u: tuple[float, float]
    half_len: float
    half_wid: float

    def __post_init__(self):
        object.__setattr__(self, "center", _tup(self.center))
        object.__setattr__(self, "axis_u", _tup(self.axis_u))
        object.__setattr__(self, "half_len", float(self.half_len))
        object.__setattr__(self, "half_wid", float(self.half_wid))
        if len(self.center) != 2 or len(self.axis_u) != 2:
            raise DimensionMismatch("OrientedRect2 lives in the plane")
        if abs(math.hypot(*self.axis_u) - 1.0) > 1e-12:
            raise ValueError("axis_u must be a unit vector")
        if not (self.half_len > 0 and self.half_wid > 0):
            raise DegenerateBody("rectangle half extents must be positive")

    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        u = _arr(self.axis_u)
        return u, np.array([-u[1], u[0]])

    def vertices(self):
        c = _arr(self.center)
        u, w = self.frame()
        hl, hw = self.half_len, self.half_wid
        return np.array([c - hl * u - hw * w, c + hl * u - hw * w, c + hl * u + hw * w, c - hl * u + hw * w])

    def project(self, x):
        c = _arr(self.center)
        u, w = self.frame()
        r = _arr(x) - c
        a = min(self.half_len, max(-self.half_len, float(r @ u)))
        b = min(self.half_wid, max(-self.half_wid, float(r @ w)))
        return c + a * u + b * w


@dataclass(frozen=True)
class Triangle2(_Polygon2):
    v1: tuple[float, float]
    v2: tuple[float, float]
    v3: tuple[float, float]

    def __post_init__(self):
        for name in ("v1", "v2", "v3"):
            object.__setattr__(self, name, _tup(getattr(self, name)))
            if len(getattr(self, name)) != 2:
                raise DimensionMismatch("Triangle2 lives in the plane")
        if abs(self._signed_area()) <= 1e-12:
            raise DegenerateBody("triangle has (near) zero area")

    def _signed_area(self) -> float:
        (x1, y1), (x2, y2), (x3, y3) = self.v1, self.v2, self.v3
        return 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))

    def vertices(self):
        V = np.array([self.v1, self.v2, self.v3])
        return V if self._signed_area() > 0 else V[::-1].copy()


@dataclass(frozen=True)
class ConvexPolygon2(_Polygon2):
    vertices_ccw: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple(_tup(v) for v in self.vertices_ccw)
        object.__setattr__(self, "vertices_ccw", verts)
        if len(verts) < 3 or any(len(v) != 2 for v in verts):
            raise DegenerateBody("polygon needs at least three planar vertices")
        V = np.array(verts)
        e = np.roll(V, -1, axis=0) - V
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        if np.any(cross <= 1e-12):
            raise DegenerateBody("polygon vertices must be strictly convex and CCW")

    def vertices(self):
        return np.array(self.vertices_ccw)


@dataclass(frozen=True)
class Polytope(ConvexBody):
    """Convex hull of finitely many points in R^d; may be lower dimensional."""

    points: tuple[tuple[float, ...], ...]
    polyhedral = True

    def __post_init__(self):
        pts = tuple(_tup(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise DegenerateBody("polytope needs at least one point")
        if len({len(p) for p in pts}) != 1:
            raise DimensionMismatch("polytope points differ in dimension")
        for p in pts:
            _check_finite(p, "polytope")

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def vertices(self):
        return np.array(self.points)

    def project(self, x):
        x = _arr(x)
        V = self.vertices()
        if len(V) == 2:
            return _segment_project(V[0], V[1], x)
        return x + min_norm_point(V - x)


@dataclass(frozen=True)
class Polyline:
    """Open polygonal curve (not convex); used only as a piece of a CompoundBody."""

    vertices_seq: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices_seq", tuple(_tup(v) for v in self.vertices_seq))
        if len(self.vertices_seq) < 2:
            raise DegenerateBody("polyline needs two vertices")

    @property
    def dim(self) -> int:
        return len(self.vertices_seq[0])

    def segments(self) -> list[Polytope]:
        v = self.vertices_seq
        return [Polytope((a, b)) for a, b in zip(v[:-1], v[1:])]


@dataclass(frozen=True)
class CompoundBody:
    """Union of convex bodies and polylines (deliberately non-convex)."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise DegenerateBody("compound body needs at least one piece")
        if len({p.dim for p in self.parts}) != 1:
            raise DimensionMismatch("compound pieces differ in dimension")

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def pieces(self) -> list[ConvexBody]:
        out: list[ConvexBody] = []
        for p in self.parts:
            out.extend(p.segments() if isinstance(p, Polyline) else [p])
        return out

    def distance(self, x) -> float:
        return min(p.distance(x) for p in self.pieces())

    def contains(self, x, tol: float = GEOM_TOL) -> bool:
        return self.distance(x) <= tol

    def farthest_norm(self) -> float:
        return max(p.farthest_norm() for p in self.pieces())

    def reference_point(self) -> np.ndarray:
        return self.parts[0].reference_point()


def _check_dims(*objs):
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def _axis_parallel_axes(K: KFlat) -> list[int] | None:
    axes = []
    for b in K.basis:
        a = np.abs(_arr(b))
        i = int(np.argmax(a))
        if abs(a[i] - 1.0) > 1e-12:
            return None
        axes.append(i)
    return axes


def alternating_projection(S, K: KFlat, tol: float = 1e-10, max_iter: int = 10_000):
    """Closest pair between a body and a flat by alternating projections.

    Returns ``(x_in_body, y_in_flat)``; raises NonConvergence at the cap.
    """
    y = _arr(K.base)
    x = S.project(y)
    for _ in range(max_iter):
        y_new = K.project(x)
        x_new = S.project(y_new)
        move = max(np.linalg.norm(x_new - x), np.linalg.norm(y_new - y))
        x, y = x_new, y_new
        if move < tol:
            return x, y
    raise NonConvergence(f"alternating projection still moving after {max_iter} steps")


def dist_body_flat(S, K: KFlat) -> float:
    """Euclidean distance between a body and an affine flat."""
    _check_dims(S, K)
    if isinstance(S, CompoundBody):
        return min(dist_body_flat(p, K) for p in S.pieces())
    if isinstance(S, Ball):
        return max(0.0, dist_point_flat(S.center, K) - S.radius)
    if K.k == 0:
        return S.distance(K.base)
    if isinstance(S, AxisBox):
        axes = _axis_parallel_axes(K)
        if axes is not None:
            free = [i for i in range(S.dim) if i not in axes]
            b = K.base
            gaps = [max(0.0, S.lo[i] - b[i], b[i] - S.hi[i]) for i in free]
            return float(math.sqrt(sum(g * g for g in gaps)))
    if S.polyhedral:
        N = K.complement()
        coords = (S.vertices() - _arr(K.base)) @ N
        if N.shape[1] == 1:
            lo, hi = float(coords.min()), float(coords.max())
            return max(0.0, lo, -hi)
        return float(np.linalg.norm(min_norm_point(coords)))
    x, y = alternating_projection(S, K)
    return float(np.linalg.norm(x - y))


def separation_lower_bound(A, B, direction) -> float:
    """min over A minus max over B along ``direction``; > 0 certifies disjointness (A on the + side)."""
    n = _arr(direction)
    nn = float(np.linalg.norm(n))
    if nn == 0:
        return -math.inf
    n = n / nn
    return -A.support(-n) - B.support(n)


def body_distance(A, B, max_iter: int = 4000) -> tuple[float, float]:
    """(approximate distance, rigorous lower bound) between two convex bodies."""
    _check_dims(A, B)
    if isinstance(A, Ball) and isinstance(B, Ball):
        d = float(np.linalg.norm(_arr(A.center) - _arr(B.center))) - A.radius - B.radius
        return max(0.0, d), d
    if isinstance(A, Ball) and B.polyhedral:
        d = B.distance(A.center) - A.radius
        return max(0.0, d), d
    if isinstance(B, Ball) and A.polyhedral:
        d = A.distance(B.center) - B.radius
        return max(0.0, d), d
    y = B.project(A.reference_point())
    x = A.project(y)
    for _ in range(max_iter):
        y_new = B.project(x)
        x_new = A.project(y_new)
        move = max(np.linalg.norm(x_new - x), np.linalg.norm(y_new - y))
        x, y = x_new, y_new
        if move < 1e-12:
            break
    approx = float(np.linalg.norm(x - y))
    if approx <= NORM_TOL:
        return 0.0, 0.0
    return approx, separation_lower_bound(A, B, x - y)


# ---------------------------------------------------------------------------
# radii and condition number
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadiiReport:
    in_radius: float
    out_radius: float
    in_center: tuple[float, ...]
    out_center: tuple[float, ...]

    @property
    def sigma(self) -> float:
        return self.in_radius / self.out_radius


def _inscribed_ball_lp(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Chebyshev center of {A x <= b} (rows of A unit length)."""
    d = A.shape[1]
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((A.shape[0], 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status != 0:
        raise DegenerateBody(f"inscribed-ball LP failed: {res.message}")
    return res.x[:d], float(res.x[-1])


def radii(S) -> RadiiReport:
    """In-radius, out-radius and their centres; ``sigma`` is the condition number."""
    if isinstance(S, Ball):
        return RadiiReport(S.radius, S.radius, S.center, S.center)
    if isinstance(S, Interval):
        h = 0.5 * (S.hi - S.lo)
        if h <= 0:
            raise DegenerateBody("point interval has zero in-radius")
        m = (0.5 * (S.lo + S.hi),)
        return RadiiReport(h, h, m, m)
    if isinstance(S, AxisBox):
        sides = _arr(S.hi) - _arr(S.lo)
        if np.min(sides) <= 0:
            raise DegenerateBody("flat box has zero in-radius")
        c = _tup(0.5 * (_arr(S.lo) + _arr(S.hi)))
        return RadiiReport(float(sides.min()) / 2, float(np.linalg.norm(sides)) / 2, c, c)
    if isinstance(S, OrientedRect2):
        return RadiiReport(min(S.half_len, S.half_wid), math.hypot(S.half_len, S.half_wid), S.center, S.center)
    if isinstance(S, Triangle2):
        V = S.vertices()
        a = np.linalg.norm(V[1] - V[2])
        b = np.linalg.norm(V[2] - V[0])
        c = np.linalg.norm(V[0] - V[1])
        s = 0.5 * (a + b + c)
        r = abs(S._signed_area()) / s
        incenter = (a * V[0] + b * V[1] + c * V[2]) / (a + b + c)
        oc, R = _minimum_enclosing_ball(V)
        return RadiiReport(float(r), R, _tup(incenter), _tup(oc))
    if isinstance(S, ConvexPolygon2):
        A, b = S.halfspaces()
        xc, r = _inscribed_ball_lp(A, b)
        oc, R = _minimum_enclosing_ball(S.vertices())
        return RadiiReport(r, R, _tup(xc), _tup(oc))
    if isinstance(S, Polytope):
        V = S.vertices()
        try:
            hull = ConvexHull(V)
        except (QhullError, ValueError) as exc:
            raise DegenerateBody("polytope is not full dimensional") from exc
        A, b = hull.equations[:, :-1], -hull.equations[:, -1]
        xc, r = _inscribed_ball_lp(A, b)
        if r <= NORM_TOL:
            raise DegenerateBody("polytope has zero in-radius")
        oc, R = _minimum_enclosing_ball(V)
        return RadiiReport(r, R, _tup(xc), _tup(oc))
    if isinstance(S, CompoundBody):
        convex = [p for p in S.pieces() if isinstance(p, Ball)]
        if not convex:
            raise DegenerateBody("compound body has no full-dimensional piece")
        big = max(convex, key=lambda p: p.radius)
        c = _arr(big.center)
        R = max(
            big.radius,
            max(
                float(np.linalg.norm(c - _arr(p.center))) + p.radius if isinstance(p, Ball)
                else float(np.max(np.linalg.norm(p.vertices() - c, axis=1)))
                for p in S.pieces()
            ),
        )
        # out-radius here is the enclosing ball about the main piece: an upper bound
        return RadiiReport(big.radius, R, big.center, big.center)
    raise TypeError(f"no radii for {type(S).__name__}")


def family_sigma(bodies: Iterable) -> float:
    return min(radii(S).sigma for S in bodies)


# ---------------------------------------------------------------------------
# directions, cones, ray regions
# ---------------------------------------------------------------------------


def central_projection(x) -> tuple[float, ...]:
    return _unit(x, "point")


@dataclass(frozen=True)
class Cone:
    """Closed circular cone ``apex + {w : angle(w, axis) <= half_angle}``."""

    apex: tuple[float, ...]
    axis: tuple[float, ...]
    half_angle: float

    def __post_init__(self):
        object.__setattr__(self, "apex", _tup(self.apex))
        object.__setattr__(self, "axis", _unit(self.axis, "cone axis"))
        object.__setattr__(self, "half_angle", float(self.half_angle))
        if len(self.apex) != len(self.axis):
            raise DimensionMismatch("cone apex and axis differ in dimension")
        if not (0 < self.half_angle < math.pi / 2):
            raise ValueError("cone half-angle must lie in (0, pi/2)")

    @property
    def dim(self) -> int:
        return len(self.apex)

    def clearance(self, x) -> float:
        """Signed distance-like margin: >= 0 inside, and for interior points the
        Euclidean distance to the cone boundary."""
        return _cone_clearance(_arr(x), _arr(self.apex), _arr(self.axis), self.half_angle)


def _cone_clearance(x, apex, axis, alpha) -> float:
    w = x - apex
    s = float(w @ axis)
    rho = float(np.linalg.norm(w - s * axis))
    return s * math.sin(alpha) - rho * math.cos(alpha)


def _body_in_cone(S, apex, axis, alpha, tol=GEOM_TOL) -> bool:
    if isinstance(S, CompoundBody):
        return all(_body_in_cone(p, apex, axis, alpha, tol) for p in S.pieces())
    if isinstance(S, Ball):
        return _cone_clearance(_arr(S.center), apex, axis, alpha) >= S.radius - tol
    V = S.vertices()
    return all(_cone_clearance(v, apex, axis, alpha) >= -tol for v in V)


def cone_contains(C: Cone, S) -> bool:
    _check_dims(C, S)
    return _body_in_cone(S, _arr(C.apex), _arr(C.axis), C.half_angle)


NEAR = "near"
FAR = "far"


@dataclass(frozen=True)
class RayRegion:
    """``R(ray, 1/n)`` (kind near) or ``Q(ray, n)`` (kind far) around the ray ``p + t v``."""

    origin: tuple[float, ...]
    direction: tuple[float, ...]
    n: int
    kind: str = NEAR

    def __post_init__(self):
        object.__setattr__(self, "origin", _tup(self.origin))
        object.__setattr__(self, "direction", _unit(self.direction, "ray direction"))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("ray region index n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if self.kind not in (NEAR, FAR):
            raise ValueError(f"unknown ray region kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return len(self.origin)


def ray_cone_contains(p, v, t: float, S, tol: float = GEOM_TOL) -> bool:
    """Whether S lies in {x : dist(x, ray) <= t * |x - p|}.

    For t < 1 this set is the circular cone at p of half-angle asin(t);
    for t >= 1 it is all of space.
    """
    if t >= 1:
        return True
    return _body_in_cone(S, _arr(p), _arr(v), math.asin(t), tol)


def ray_region_contains(R: RayRegion, S) -> bool:
    _check_dims(R, S)
    p = _arr(R.origin)
    if not ray_cone_contains(p, R.direction, 1.0 / R.n, S):
        return False
    if R.kind == NEAR:
        rad = 1.0 / R.n
        if isinstance(S, Ball):
            return float(np.linalg.norm(_arr(S.center) - p)) + S.radius <= rad + NORM_TOL
        pieces = S.pieces() if isinstance(S, CompoundBody) else [S]
        for piece in pieces:
            if isinstance(piece, Ball):
                if float(np.linalg.norm(_arr(piece.center) - p)) + piece.radius > rad + NORM_TOL:
                    return False
            elif np.max(np.linalg.norm(piece.vertices() - p, axis=1)) > rad + NORM_TOL:
                return False
        return True
    if isinstance(S, CompoundBody):
        return all(piece.distance(p) > R.n for piece in S.pieces())
    return S.distance(p) > R.n


def m_growth(n: int, sigma: float) -> int:
    """ceil(2 sigma (2^n + 2 sigma)), evaluated exactly on the float sigma."""
    if n < 1 or not (0 < sigma <= 1):
        raise ValueError("m_growth needs n >= 1 and 0 < sigma <= 1")
    s = Fraction(sigma)
    value = 2 * s * (2**n + 2 * s)
    return int(math.ceil(value))
