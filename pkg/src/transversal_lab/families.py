"""Deterministic generators for the explicit constructions, plus escape and limiting directions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateBody, DegenerateIndex, NoFarSamples, UnsupportedCase
from .geometry import (
    Ball,
    CompoundBody,
    KFlat,
    OrientedRect2,
    Polyline,
    Polytope,
    Triangle2,
    radii,
)
from .transversal import pierces, planar_sweep_min

# ---------------------------------------------------------------------------
# tangent rectangles and triangles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TangentRectSpec:
    n: int
    i: int

    def __post_init__(self):
        if self.n < 2:
            raise DegenerateIndex(f"tangent index n must be >= 2, got {self.n}")
        if self.i < 1:
            raise DegenerateIndex(f"thickness index i must be >= 1, got {self.i}")

    @property
    def theta(self) -> float:
        return math.pi / 2**self.n

    @property
    def u(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def a(self) -> np.ndarray:
        """Where the tangent at u_n meets x2 = 1."""
        t = self.theta
        return np.array([(1 - math.sin(t)) / math.cos(t), 1.0])

    @property
    def b(self) -> np.ndarray:
        """Where the tangent at u_n meets x1 = 1."""
        return np.array([1.0, math.tan(self.theta / 2)])

    @property
    def width(self) -> float:
        return 1.0 / 2**self.i


def gen_tangent_rect(spec: TangentRectSpec | tuple) -> OrientedRect2:
    """s_n thickened by 1/2^i along u_n, away from the unit circle."""
    if not isinstance(spec, TangentRectSpec):
        spec = TangentRectSpec(*spec)
    a, b, u, w = spec.a, spec.b, spec.u, spec.width
    seg = b - a
    length = float(np.linalg.norm(seg))
    center = 0.5 * (a + b) + 0.5 * w * u
    return OrientedRect2(center, seg / length, 0.5 * length, 0.5 * w)


def rects_intersect(A: OrientedRect2, B: OrientedRect2, tol: float = 1e-9) -> bool:
    """Separating-axis test over the edge normals of both rectangles."""
    VA, VB = A.vertices(), B.vertices()
    for R in (A, B):
        for axis in R.frame():
            pa, pb = VA @ axis, VB @ axis
            if pa.min() > pb.max() + tol or pb.min() > pa.max() + tol:
                return False
    return True


def polygons_intersect(VA: np.ndarray, VB: np.ndarray, tol: float = 1e-9) -> bool:
    """Separating-axis test for two convex polygons given by vertex arrays."""
    for V in (VA, VB):
        E = np.roll(V, -1, axis=0) - V
        for e in E:
            axis = np.array([-e[1], e[0]])
            axis = axis / np.linalg.norm(axis)
            pa, pb = VA @ axis, VB @ axis
            if pa.min() > pb.max() + tol or pb.min() > pa.max() + tol:
                return False
    return True


@dataclass(frozen=True)
class IntersectionReport:
    pairs_checked: int
    failures: tuple


def verify_pairwise_intersection(n_range: Sequence[int], i_range: Sequence[int], shape: str = "rect",
                                 width_override: float | None = None, tol: float = 1e-9) -> IntersectionReport:
    """Exact pairwise intersection check over all generated members in the ranges."""
    specs = [(n, i) for n in n_range for i in i_range]
    polys = {}
    for n, i in specs:
        if shape == "rect":
            R = gen_tangent_rect(TangentRectSpec(n, i))
            if width_override is not None:
                R = OrientedRect2(
                    np.array(R.center) - (R.half_wid - 0.5 * width_override) * TangentRectSpec(n, i).u,
                    R.axis_u, R.half_len, 0.5 * width_override,
                )
        elif shape == "triangle":
            R = gen_right_triangles(n, i)
        else:
            raise ValueError(f"unknown shape {shape!r}")
        polys[(n, i)] = R.vertices()
    # separating-axis test for all pairs at once: project every polygon on every edge normal
    V = np.array([polys[s] for s in specs])  # (m, nv, 2)
    E = np.roll(V, -1, axis=1) - V
    N = np.stack([-E[..., 1], E[..., 0]], axis=-1)
    N /= np.linalg.norm(N, axis=-1, keepdims=True)
    proj = np.einsum("pvc,aec->aepv", V, N)  # (owner, edge, polygon, vertex)
    lo, hi = proj.min(axis=-1), proj.max(axis=-1)
    m = len(specs)
    iu, ju = np.triu_indices(m, 1)
    separated = np.zeros(len(iu), dtype=bool)
    for owner in (iu, ju):
        l_i, h_i = lo[owner, :, iu], hi[owner, :, iu]
        l_j, h_j = lo[owner, :, ju], hi[owner, :, ju]
        separated |= ((l_i > h_j + tol) | (l_j > h_i + tol)).any(axis=-1)
    failures = [(specs[a], specs[b]) for a, b in zip(iu[separated], ju[separated])]
    return IntersectionReport(len(iu), tuple(failures))


def gen_right_triangles(n: int, i: int) -> Triangle2:
    """Right triangle with legs s_n and 1/2^i * u_n, right angle at a_n."""
    spec = TangentRectSpec(n, i)
    a, b = spec.a, spec.b
    return Triangle2(a, b, a + spec.width * spec.u)


def gen_lifted_rect(n: int, i: int) -> Polytope:
    """The planar rectangle B_n^(i) placed in the plane z = n of R^3."""
    R = gen_tangent_rect(TangentRectSpec(n, i))
    V = R.vertices()
    return Polytope(np.hstack([V, np.full((4, 1), float(n))]))


# ---------------------------------------------------------------------------
# escape from a finite point set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EscapeCertificate:
    n0: int
    i0: int
    delta: float
    lam: float
    clearance: float  # dist(q1, tangent line at u_{n0})
    rect: OrientedRect2
    margin: float  # min distance from rect to the original points


def _escape_indices(P: np.ndarray):
    b = np.array([1.0, 0.0])
    on_edge = P[:, 0] == 1.0
    C1, C2 = P[on_edge], P[~on_edge]
    delta = float(np.min(1.0 - C2[:, 0])) if len(C2) else math.inf
    C1b = np.array([p for p in C1 if not np.array_equal(p, b)])
    dists = np.linalg.norm(C1b - b, axis=1)
    lam = float(dists.min())
    q1 = C1b[int(np.argmin(dists))]
    return delta, lam, q1


def escape_rectangle(C, max_n: int = 60) -> EscapeCertificate:
    """A tangent rectangle avoiding every point of the finite set C."""
    original = np.atleast_2d(np.asarray(C, dtype=float)).reshape(-1, 2) if len(C) else np.zeros((0, 2))
    P = original[(original[:, 0] >= 0) & (original[:, 1] >= 0)] if len(original) else original
    P = np.minimum(P, 1.0)
    if len(P):
        P = P[np.einsum("ij,ij->i", P, P) >= 1.0]
    P = np.vstack([P.reshape(-1, 2), [[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]])
    delta, lam, q1 = _escape_indices(P)
    c = np.array([1.0, 1.0])
    b = np.array([1.0, 0.0])
    n0 = 2
    while True:
        spec = TangentRectSpec(n0, 1)
        if np.linalg.norm(spec.a - c) < delta and np.linalg.norm(spec.b - b) < lam:
            break
        n0 += 1
        if n0 > max_n:
            raise DegenerateBody("escape index exceeds the double-precision range")
    check = original if len(original) else np.zeros((0, 2))
    for n in range(n0, max_n + 1):
        u = TangentRectSpec(n, 1).u
        clearance = abs(float(q1 @ u) - 1.0)
        i0 = 1
        while 1.0 / 2**i0 >= clearance:
            i0 += 1
        for i in range(i0, i0 + 30):
            rect = gen_tangent_rect(TangentRectSpec(n, i))
            margin = min((rect.distance(p) for p in check), default=math.inf)
            if margin > 0:
                return EscapeCertificate(n, i, delta, lam, clearance, rect, float(margin))
    raise DegenerateBody("no escaping rectangle found within the index range")


# ---------------------------------------------------------------------------
# unit-ball grid
# ---------------------------------------------------------------------------

_RING = ((1.5, 0.0), (-1.5, 0.0), (0.0, 1.5), (0.0, -1.5))


def gen_unit_ball_grid(n: int, j: int = 1) -> Ball:
    """F_1 = {B(O,1)}, F_2 = four unit balls at distance 1.5, F_n = {B((4j, 4n), 1)} for n >= 3."""
    if n < 1 or j < 1:
        raise ValueError("grid indices start at 1")
    if n == 1:
        if j != 1:
            raise ValueError("the first family has a single ball")
        return Ball((0.0, 0.0), 1.0)
    if n == 2:
        if j > 4:
            raise ValueError("the second family has four balls")
        return Ball(_RING[j - 1], 1.0)
    return Ball((4.0 * j, 4.0 * n), 1.0)


def grid_family(n: int, count: int) -> list[Ball]:
    size = {1: 1, 2: 4}.get(n, count)
    return [gen_unit_ball_grid(n, j) for j in range(1, min(size, count) + 1)]


# ---------------------------------------------------------------------------
# non-convex ball with tail
# ---------------------------------------------------------------------------

TAIL_RHO = 0.5
TAIL_LANE = 0.01


def _tail_layout(m: int):
    """Centres x_k and radii r_k for k = 1..m."""
    xs, rs = [0.0], [1.0]
    extent = 1.0  # right-most x reached by bodies so far
    for _ in range(1, m):
        r = 2.0 * extent + 4.0
        x = extent + r + 1.0
        xs.append(x)
        rs.append(r)
        extent = x + r
    return xs, rs


def gen_ball_with_tail(m: int) -> CompoundBody:
    """Ball F_m plus a lane-m polyline reaching back through every earlier ball.

    Ball m sits on the x-axis, disjoint from all earlier bodies, and every
    earlier body lies inside the ball of radius r_m / rho about its centre.
    The tail climbs inside ball m to height m * lane, then runs left along
    that horizontal lane to x = 0, crossing balls 1..m-1.  Lanes are distinct,
    so no point is shared by three bodies.
    """
    if m < 1:
        raise ValueError("index m starts at 1")
    xs, rs = _tail_layout(m)
    x, r = xs[-1], rs[-1]
    ball = Ball((x, 0.0), r)
    if m == 1:
        return CompoundBody((ball,))
    y = m * TAIL_LANE * rs[0]
    tail = Polyline(((x, 0.0), (x, y), (xs[0], y)))
    return CompoundBody((ball, tail))


# ---------------------------------------------------------------------------
# A_i regions and packings
# ---------------------------------------------------------------------------


def _rotate_towards(u: np.ndarray, w: np.ndarray, angle: float) -> np.ndarray:
    """Rotate unit u towards unit w by ``angle`` inside their common plane."""
    perp = w - (w @ u) * u
    n = np.linalg.norm(perp)
    if n < 1e-15:
        return u
    perp /= n
    return math.cos(angle) * u + math.sin(angle) * perp


def ai_witness_line(x, base: Sequence[Ball], k: int = 1) -> KFlat | None:
    """A line through x meeting both base balls, or None when there is none."""
    if k != 1 or len(base) != 2:
        raise UnsupportedCase("A_i regions are supported for k = 1 with two base balls")
    x = np.asarray(x, dtype=float)
    d = len(x)
    if d not in (2, 3) or any(B.dim != d for B in base):
        raise UnsupportedCase("A_i regions are supported in dimensions 2 and 3")
    dirs, halfs = [], []
    for B in base:
        v = np.asarray(B.center) - x
        dist = float(np.linalg.norm(v))
        if dist <= B.radius:
            dirs.append(None)
            halfs.append(math.pi)
        else:
            dirs.append(v / dist)
            halfs.append(math.asin(B.radius / dist))
    if dirs[0] is None and dirs[1] is None:
        return KFlat.line(x, np.eye(d)[0])
    if dirs[0] is None or dirs[1] is None:
        return KFlat.line(x, dirs[0] if dirs[0] is not None else dirs[1])
    u1, u2 = dirs
    if u1 @ u2 < 0:
        u2 = -u2  # lines are unoriented
    gap = math.acos(max(-1.0, min(1.0, float(u1 @ u2))))
    if gap > halfs[0] + halfs[1] + 1e-12:
        return None
    step = min(halfs[0], gap)
    v = _rotate_towards(u1, u2, step)
    line = KFlat.line(x, v)
    return line


def ai_region_member(x, base: Sequence[Ball], k: int = 1) -> bool:
    line = ai_witness_line(x, base, k)
    return line is not None and all(pierces(line, B) for B in base)


def _boundary_samples(d: int) -> np.ndarray:
    if d == 2:
        a = 2 * np.pi * np.arange(12) / 12
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    g = (1 + 5**0.5) / 2
    V = np.array([(0, s1, s2 * g) for s1 in (-1, 1) for s2 in (-1, 1)], dtype=float)
    V = np.vstack([V, np.roll(V, 1, axis=1), np.roll(V, 2, axis=1)])
    return V / np.linalg.norm(V, axis=1)[:, None]


def _lattice(d: int, lo: np.ndarray, hi: np.ndarray, spacing: float) -> np.ndarray:
    if d == 2:
        rows = np.arange(math.floor(lo[1] / (spacing * math.sqrt(3) / 2)) - 1,
                         math.ceil(hi[1] / (spacing * math.sqrt(3) / 2)) + 2)
        pts = []
        for r in rows:
            y = r * spacing * math.sqrt(3) / 2
            shift = 0.5 * spacing * (r % 2)
            for c in range(math.floor(lo[0] / spacing) - 1, math.ceil(hi[0] / spacing) + 2):
                pts.append((c * spacing + shift, y))
        return np.array(pts)
    a = spacing / math.sqrt(2)
    rng = [range(math.floor(lo[t] / a) - 1, math.ceil(hi[t] / a) + 2) for t in range(3)]
    pts = [(i * a, j * a, k * a) for i in rng[0] for j in rng[1] for k in rng[2] if (i + j + k) % 2 == 0]
    return np.array(pts)


def gen_ai_packing(base: Sequence[Ball], k: int, extent, radius: float = 1.0) -> list[Ball]:
    """Lattice packing of unit balls whose centres and 12 boundary samples lie in A_i."""
    lo, hi = (np.asarray(e, dtype=float) for e in extent)
    d = len(lo)
    if k != 1 or d not in (2, 3):
        raise UnsupportedCase("packings are supported for k = 1 in dimensions 2 and 3")
    samples = _boundary_samples(d) * radius
    out = []
    for c in _lattice(d, lo, hi, 2 * radius):
        if np.any(c - radius < lo) or np.any(c + radius > hi):
            continue
        if ai_region_member(c, base, k) and all(ai_region_member(c + s, base, k) for s in samples):
            out.append(Ball(c, radius))
    return out


def gen_independent_disks(count: int, spread: float = 10.0) -> list[Ball]:
    """Unit disks on a convex curve, with no line meeting any three (certified)."""
    disks = [Ball((spread * t, spread * t * t), 1.0) for t in range(count)]
    for tri in itertools.combinations(disks, 3):
        g, _, _ = planar_sweep_min(list(tri))
        if g <= 1e-6:
            raise DegenerateBody("spread too small: three disks admit a common line")
    return disks


# ---------------------------------------------------------------------------
# limiting directions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LdsEstimate:
    clusters: tuple  # ((direction tuple, support count), ...)
    span_dim: int

    def k_unbounded(self, k: int) -> bool:
        return self.span_dim >= k


def sample_point(S) -> np.ndarray:
    """In-centre when the body has interior, else the vertex centroid."""
    try:
        return np.asarray(radii(S).in_center, dtype=float)
    except (DegenerateBody, TypeError):
        return np.asarray(S.reference_point(), dtype=float)


def lds_estimate(bodies, threshold: float, cluster_radius: float, samples=None) -> LdsEstimate:
    pts = [np.asarray(s, dtype=float) for s in samples] if samples is not None else [sample_point(S) for S in bodies]
    far = [p for p in pts if np.linalg.norm(p) >= threshold]
    if not far:
        raise NoFarSamples(f"no sample reaches norm {threshold}")
    dirs = [p / np.linalg.norm(p) for p in far]
    centers: list[np.ndarray] = []
    members: list[list[np.ndarray]] = []
    for v in dirs:
        for c, group in zip(centers, members):
            if np.linalg.norm(v - c) <= cluster_radius:
                group.append(v)
                break
        else:
            centers.append(v)
            members.append([v])
    clusters = []
    for group in members:
        m = np.mean(group, axis=0)
        m = m / np.linalg.norm(m)
        clusters.append((tuple(float(t) for t in m), len(group)))
    M = np.array([c for c, _ in clusters])
    span = int(np.linalg.matrix_rank(M, tol=1e-6))
    return LdsEstimate(tuple(clusters), span)


def gen_impossibility_prefix(base_count: int = 3, margin: float = 10.0, spread: float = 10.0):
    """Finite prefix of the A_i construction for lines in the plane.

    Families 1 and 2 are the base disks (no three on a line); then one packed
    family per multiset {j1, j2} of base indices, in lexicographic order.
    Returns (families, multisets).
    """
    base = gen_independent_disks(base_count, spread)
    C = np.array([B.center for B in base])
    extent = (C.min(axis=0) - margin, C.max(axis=0) + margin)
    fams = [list(base), list(base)]
    multisets = list(itertools.combinations_with_replacement(range(1, base_count + 1), 2))
    for j1, j2 in multisets:
        packed = gen_ai_packing([base[j1 - 1], base[j2 - 1]], 1, extent)
        if not packed:
            raise DegenerateBody(f"A region for {(j1, j2)} holds no ball inside the extent")
        fams.append(packed)
    return fams, multisets


CONE_LAYOUT_STEP = 10.0


def cone_layout_disk(n: int, j: int) -> Ball:
    """Member j of family n in the nested-cone layout: a unit disk at (10 * 2^j, 10 n)."""
    if n < 1 or j < 1:
        raise ValueError("layout indices start at 1")
    return Ball((CONE_LAYOUT_STEP * 2.0**j, CONE_LAYOUT_STEP * n), 1.0)


def row_ball(n: int, j: int) -> Ball:
    """Member j of row family n: the unit ball at (4j, 4n + 8)."""
    return Ball((4.0 * j, 4.0 * n + 8.0), 1.0)
