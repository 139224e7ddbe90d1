"""Sequence builders: greedy distance escalation and the cone-exclusion construction."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    ParallelFlat,
    PrereqViolated,
    StreamExhausted,
    StuckError,
    VerificationFailed,
)
from .geometry import Ball, Cone, KFlat, cone_contains, radii
from .stabbing import DisjointChain, bodies_disjoint
from .transversal import _sweep_candidates, _sweep_eval, _sweep_terms, planar_sweep_min

DEFAULT_HORIZON = 10_000


# ---------------------------------------------------------------------------
# streams and predicates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FarFromOrigin:
    min_dist: float

    def __call__(self, S) -> bool:
        return S.distance(np.zeros(S.dim)) >= self.min_dist


@dataclass(frozen=True)
class InsideCone:
    cone: Cone

    def __call__(self, S) -> bool:
        return cone_contains(self.cone, S)


def projection_interval(S, normal) -> tuple[float, float]:
    """Image of S under x -> <normal, x>."""
    n = np.asarray(normal, dtype=float)
    return -S.support(-n), S.support(n)


@dataclass(frozen=True)
class InsideConeAndProjectionDisjoint:
    cone: Cone
    direction: tuple
    obstacles: tuple = ()

    def projection_clear(self, S) -> bool:
        n = _perp(self.direction)
        lo, hi = projection_interval(S, n)
        for T in self.obstacles:
            a, b = projection_interval(T, n)
            if not (lo > b + 1e-9 or a > hi + 1e-9):
                return False
        return True

    def __call__(self, S) -> bool:
        return cone_contains(self.cone, S) and self.projection_clear(S)


class FamilyStream:
    """A lazily generated family F_n: ``member(j)`` for j = 1, 2, ... up to ``horizon``."""

    def __init__(self, index: int, member: Callable[[int], object], horizon: int = DEFAULT_HORIZON,
                 size: int | None = None, name: str = ""):
        self.index = index
        self.member = member
        self.horizon = horizon if size is None else min(horizon, size)
        self.name = name or f"F{index}"
        self.used: set[int] = set()

    def query(self, predicate) -> tuple[int, object] | None:
        """First unused member (in generation order) satisfying the predicate."""
        for j in range(1, self.horizon + 1):
            if j in self.used:
                continue
            S = self.member(j)
            if predicate(S):
                self.used.add(j)
                return j, S
        return None

    def scan(self, predicate) -> bool:
        """Whether some member within the horizon satisfies the predicate (nothing consumed)."""
        return any(predicate(self.member(j)) for j in range(1, self.horizon + 1) if j not in self.used)

    @classmethod
    def from_list(cls, index: int, bodies: Sequence, name: str = "") -> "FamilyStream":
        bodies = list(bodies)
        return cls(index, lambda j: bodies[j - 1], size=len(bodies), name=name)


def _perp(direction) -> np.ndarray:
    v = np.asarray(direction, dtype=float)
    if v.shape != (2,):
        raise DimensionMismatch("the exclusion cone construction works in the plane")
    return np.array([-v[1], v[0]])


# ---------------------------------------------------------------------------
# greedy distance escalation (k = 0)
# ---------------------------------------------------------------------------


def _reach(S) -> float:
    """||centre|| + out-radius, a bound on sup |x| over S."""
    try:
        rep = radii(S)
        return float(np.linalg.norm(rep.out_center)) + rep.out_radius
    except Exception:
        return S.farthest_norm()


def greedy_disjoint_heterochromatic(streams: Sequence[FamilyStream], M: int) -> DisjointChain:
    """One body per stream, each beyond the reach of all earlier ones."""
    if M > len(streams):
        raise StreamExhausted(len(streams) + 1)
    members = []
    picks = []
    reach = -math.inf
    for m in range(M):
        stream = streams[m]
        pred = FarFromOrigin(reach + 1.0) if members else (lambda S: True)
        got = stream.query(pred)
        if got is None:
            raise StreamExhausted(stream.index)
        j, S = got
        members.append((stream.index, S))
        picks.append(j - 1)
        reach = max(reach, _reach(S))
    bodies = [b for _, b in members]
    for a, b in itertools.combinations(bodies, 2):
        if not bodies_disjoint(a, b):
            raise VerificationFailed("greedy chain members intersect")
    return DisjointChain(tuple(members), True, tuple(picks))


# ---------------------------------------------------------------------------
# cone exclusion (k = 1, d = 2)
# ---------------------------------------------------------------------------


def _angle_of(v) -> float:
    return math.atan2(v[1], v[0]) % math.pi


def _pair_sweep(Si, Sj):
    lower, upper = _sweep_terms([Si, Sj])
    cands = _sweep_candidates(lower, upper)
    g = lambda phi: _sweep_eval(lower, upper, np.atleast_1d(phi))[0]
    return lower, upper, cands, g


def _first_root(g, phi0: float, cands: np.ndarray, sign: int) -> float:
    """Angular distance from phi0 (moving in ``sign`` direction) to the first angle with g <= 0."""
    rel = np.sort(np.mod(sign * (cands - phi0), np.pi))
    rel = rel[rel > 0]
    prev = 0.0
    for r in np.append(rel, np.pi):
        if g(phi0 + sign * r)[0] <= 0:
            a, b = prev, r
            for _ in range(100):
                mid = 0.5 * (a + b)
                if g(phi0 + sign * mid)[0] <= 0:
                    b = mid
                else:
                    a = mid
            return b
        prev = r
    return math.pi


def pair_direction_gap(Si, Sj, direction) -> float:
    """Angular distance from ``direction`` to the set of directions of lines meeting both bodies."""
    n = _perp(direction)
    a, b = projection_interval(Si, n), projection_interval(Sj, n)
    if not (a[0] > b[1] + 1e-9 or b[0] > a[1] + 1e-9):
        raise PrereqViolated("a line parallel to the direction meets both bodies")
    _, _, cands, g = _pair_sweep(Si, Sj)
    phi0 = _angle_of(direction)
    eps = min(_first_root(g, phi0, cands, +1), _first_root(g, phi0, cands, -1))
    return min(eps, math.pi / 2)


def pair_distance_bound(Si, Sj) -> float:
    """min(sup |p| over S_i, sup |q| over S_j): every common line passes that close to O."""
    return min(Si.farthest_norm(), Sj.farthest_norm())


def _axis_crossing_sup(Si, Sj, direction, samples: int = 2048) -> float:
    """Largest coordinate along ``direction`` at which a line meeting both bodies crosses the axis."""
    lower, upper, cands, g = _pair_sweep(Si, Sj)
    xhat = np.asarray(direction, dtype=float)
    grid = np.unique(np.concatenate([cands, np.linspace(0, np.pi, samples, endpoint=False)]))

    def crossing(phi):
        phi = np.atleast_1d(phi)
        gv, L, U = _sweep_eval(lower, upper, phi)
        N = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
        den = N @ xhat
        out = np.full(len(phi), -np.inf)
        ok = (gv <= 0) & (np.abs(den) > 1e-15)
        out[ok] = np.maximum(L[ok] / den[ok], U[ok] / den[ok])
        return out

    vals = crossing(grid)
    best = float(np.max(vals))
    # polish around the best few samples
    for k in np.argsort(vals)[-3:]:
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        fine = np.linspace(lo, hi, 257)
        best = max(best, float(np.max(crossing(fine))))
    return best


@dataclass
class IndependenceState:
    chosen: list = field(default_factory=list)  # (family_index, body)
    k: int = 1
    direction: tuple = (1.0, 0.0)

    @property
    def bodies(self) -> list:
        return [b for _, b in self.chosen]


EMPTY_CONE_HALF_ANGLE = math.pi / 4


def build_exclusion_cone(state: IndependenceState) -> Cone:
    """Cone D*x + C_eps whose members cannot share a line with any chosen pair."""
    xhat = np.asarray(state.direction, dtype=float)
    bodies = state.bodies
    if len(bodies) < 2:
        return Cone((0.0,) * len(xhat), xhat, EMPTY_CONE_HALF_ANGLE)
    gaps, bounds = [], []
    for Si, Sj in itertools.combinations(bodies, 2):
        gaps.append(pair_direction_gap(Si, Sj, xhat))
        bounds.append(max(pair_distance_bound(Si, Sj), _axis_crossing_sup(Si, Sj, xhat)))
    eps = 0.5 * min(gaps)
    D = max(bounds) + 1.0
    return Cone(tuple(D * xhat), xhat, min(eps, EMPTY_CONE_HALF_ANGLE))


def _certified_no_line(bodies) -> bool:
    g, _, _ = planar_sweep_min(list(bodies))
    return g > 1e-6


def _verify_state(state: IndependenceState, new_index: int):
    n = _perp(state.direction)
    bodies = state.bodies
    new = bodies[new_index]
    for i, S in enumerate(bodies):
        if i == new_index:
            continue
        a, b = projection_interval(S, n), projection_interval(new, n)
        if not (a[0] > b[1] + 1e-9 or b[0] > a[1] + 1e-9):
            raise VerificationFailed("new member shares a line parallel to the direction")
    others = [i for i in range(len(bodies)) if i != new_index]
    for i, j in itertools.combinations(others, 2):
        if not _certified_no_line([bodies[i], bodies[j], new]):
            raise VerificationFailed(f"members {i + 1}, {j + 1}, {new_index + 1} admit a common line")


def extend_independent(state: IndependenceState, streams: Sequence[FamilyStream]) -> IndependenceState:
    """Append one body from the next stream, keeping no k+2 members on a k-flat."""
    m = len(state.chosen)
    if m >= len(streams):
        raise StreamExhausted(m + 1)
    stream = streams[m]
    if state.k == 0:
        reach = max((_reach(S) for S in state.bodies), default=-math.inf)
        pred = FarFromOrigin(reach + 1.0) if state.chosen else (lambda S: True)
        got = stream.query(pred)
        if got is None:
            raise StreamExhausted(stream.index)
        new = IndependenceState(state.chosen + [(stream.index, got[1])], 0, state.direction)
        for a, b in itertools.combinations(new.bodies, 2):
            if not bodies_disjoint(a, b):
                raise VerificationFailed("k = 0 extension produced intersecting members")
        return new
    if state.k != 1 or len(state.direction) != 2:
        raise PrereqViolated("the cone construction is implemented for k = 1 in the plane")
    cone = build_exclusion_cone(state)
    pred = InsideConeAndProjectionDisjoint(cone, tuple(state.direction), tuple(state.bodies))
    got = stream.query(pred)
    if got is None:
        if stream.scan(InsideCone(cone)):
            raise StuckError(
                f"every member of {stream.name} inside the cone shares a parallel line with a chosen body",
                {"family": stream.index, "cone": cone, "length": m},
            )
        raise StreamExhausted(stream.index)
    new = IndependenceState(state.chosen + [(stream.index, got[1])], 1, tuple(state.direction))
    _verify_state(new, m)
    return new


def build_independent(streams: Sequence[FamilyStream], M: int, k: int = 1, direction=(1.0, 0.0)) -> IndependenceState:
    state = IndependenceState([], k, tuple(direction))
    for _ in range(M):
        state = extend_independent(state, streams)
    return state


# ---------------------------------------------------------------------------
# flat / ray clearance
# ---------------------------------------------------------------------------


def flat_ray_clearance(K: KFlat, p, v, c: float) -> float:
    """dist(K, shifted ray) / |u_K - p| where u_K is the ray point closest to K."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    if p.shape != (K.dim,):
        raise DimensionMismatch("ray and flat live in different dimensions")
    B = K.basis_array()
    along = B @ v if K.k else np.zeros(0)
    if K.k and float(np.linalg.norm(along)) >= 1 - 1e-9:
        raise ParallelFlat("the flat contains a line parallel to the ray")
    q = p + c * v
    perp = lambda x: x - (B.T @ (B @ x) if K.k else 0.0)
    pv = perp(v)
    pq = perp(q - np.asarray(K.base))
    s = max(0.0, -float(pv @ pq) / float(pv @ pv))
    u = q + s * v
    dist = float(np.linalg.norm(perp(u - np.asarray(K.base))))
    if dist <= 1e-15:
        return 0.0
    scale = float(np.linalg.norm(u - p))
    return dist / scale if scale > 0 else math.inf
