"""Exact combinatorial stabbing: intervals, axis boxes, exchange steps and small piercing numbers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import PrereqViolated, TooLarge, UnsupportedCase, VerificationFailed
from .geometry import (
    GEOM_TOL,
    AxisBox,
    Ball,
    ConvexPolygon2,
    Interval,
    OrientedRect2,
    Polytope,
    Triangle2,
    body_distance,
)

PIERCING_GUARD = 24
SEARCH_NODE_CAP = 500_000


@dataclass(frozen=True)
class StabResult:
    points: tuple  # floats for intervals, tuples for boxes
    covered: tuple[int, ...]  # covered[i] = index into points stabbing body i


@dataclass(frozen=True)
class DisjointChain:
    members: tuple  # (family_index, body) pairs; family_index is 1-based
    pairwise_disjoint: bool = True
    member_indices: tuple[int, ...] = ()  # 0-based index of each member inside its family

    def __len__(self):
        return len(self.members)

    @property
    def bodies(self) -> list:
        return [b for _, b in self.members]


@dataclass(frozen=True)
class Stuck:
    reason: str
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# disjointness
# ---------------------------------------------------------------------------


def intervals_disjoint(a: Interval, b: Interval, tol: float = GEOM_TOL) -> bool:
    return a.lo > b.hi + tol or b.lo > a.hi + tol


def boxes_disjoint(a: AxisBox, b: AxisBox, tol: float = GEOM_TOL) -> bool:
    return any(a.lo[i] > b.hi[i] + tol or b.lo[i] > a.hi[i] + tol for i in range(a.dim))


def bodies_disjoint(a, b, tol: float = GEOM_TOL) -> bool:
    """Closed bodies are disjoint when their distance exceeds ``tol``."""
    if isinstance(a, Interval) and isinstance(b, Interval):
        return intervals_disjoint(a, b, tol)
    if isinstance(a, AxisBox) and isinstance(b, AxisBox):
        return boxes_disjoint(a, b, tol)
    return body_distance(a, b)[0] > tol


def _assert_pairwise_disjoint(bodies, disjoint=bodies_disjoint):
    for a, b in itertools.combinations(bodies, 2):
        if not disjoint(a, b):
            raise VerificationFailed("chain members intersect")


# ---------------------------------------------------------------------------
# one dimension
# ---------------------------------------------------------------------------


def min_point_stab_intervals(intervals: Sequence[Interval]) -> StabResult:
    """Minimum point transversal of closed intervals (greedy by right endpoint)."""
    intervals = list(intervals)
    if not intervals:
        raise ValueError("need at least one interval")
    order = sorted(range(len(intervals)), key=lambda i: (intervals[i].hi, intervals[i].lo))
    points: list[float] = []
    for i in order:
        I = intervals[i]
        if not points or points[-1] < I.lo:
            points.append(I.hi)
    covered = []
    for I in intervals:
        # the first greedy point at or past lo lies inside I
        k = int(np.searchsorted(points, I.lo, side="left"))
        if k >= len(points) or points[k] > I.hi:
            raise VerificationFailed("greedy stabbing missed an interval")
        covered.append(k)
    return StabResult(tuple(points), tuple(covered))


def max_disjoint_intervals(intervals: Sequence[Interval]) -> list[int]:
    """Indices of a maximum pairwise-disjoint subfamily (earliest right endpoint first)."""
    order = sorted(range(len(intervals)), key=lambda i: (intervals[i].hi, intervals[i].lo))
    chosen: list[int] = []
    for i in order:
        if not chosen or intervals[i].lo > intervals[chosen[-1]].hi + GEOM_TOL:
            chosen.append(i)
    return chosen


def find_nested_disjoint_pair(F: Sequence[Interval], chain: Sequence[Interval]):
    """(j, J, J') with J, J' disjoint members of F strictly inside chain[j-1], or None."""
    F, chain = list(F), list(chain)
    _assert_pairwise_disjoint(chain, intervals_disjoint)
    classes: dict[int, list[Interval]] = {j: [] for j in range(len(chain))}
    for I in F:
        hits = [j for j, C in enumerate(chain) if not intervals_disjoint(I, C)]
        if not hits:
            raise PrereqViolated(f"{I} meets no chain interval")
        if len(hits) == 1:
            classes[hits[0]].append(I)
        # members meeting two or more chain intervals are pierced by the gaps
    for j, C in enumerate(chain):
        inner = [
            I for I in classes[j]
            if not (I.lo <= C.lo <= I.hi) and not (I.lo <= C.hi <= I.hi)
        ]
        if len(inner) < 2:
            continue
        J = min(inner, key=lambda I: (I.hi, I.lo))
        Jp = max(inner, key=lambda I: (I.lo, I.hi))
        if intervals_disjoint(J, Jp):
            return j + 1, J, Jp
    return None


def extend_disjoint_chain(F: Sequence[Interval], chain: Sequence[Interval]):
    """Grow a pairwise-disjoint chain from F by one, by appending or by the exchange step."""
    F, chain = list(F), list(chain)
    _assert_pairwise_disjoint(chain, intervals_disjoint)

    def pos(I):
        return F.index(I) + 1 if I in F else 0

    for I in F:
        if I in chain:
            continue
        if all(intervals_disjoint(I, C) for C in chain):
            new = chain + [I]
            _assert_pairwise_disjoint(new, intervals_disjoint)
            return DisjointChain(tuple((pos(B), B) for B in new))
    found = find_nested_disjoint_pair(F, chain)
    if found is None:
        return Stuck("no disjoint member and no nested disjoint pair", {"chain": chain})
    j, J, Jp = found
    new = chain[: j - 1] + [J, Jp] + chain[j:]
    _assert_pairwise_disjoint(new, intervals_disjoint)
    return DisjointChain(tuple((pos(B), B) for B in new))


# ---------------------------------------------------------------------------
# one member per family
# ---------------------------------------------------------------------------


def _select_one_per_family(families, M: int, disjoint: Callable, node_cap: int = SEARCH_NODE_CAP):
    """Exhaustive backtracking for a pairwise-disjoint choice from families[0..M-1].

    Returns (member indices, complete?) where complete is False when the node
    cap cut the search short.
    """
    chosen: list[int] = []
    nodes = 0

    def rec(f):
        nonlocal nodes
        if f == M:
            return True
        for k, B in enumerate(families[f]):
            nodes += 1
            if nodes > node_cap:
                return False
            if all(disjoint(B, families[g][chosen[g]]) for g in range(f)):
                chosen.append(k)
                if rec(f + 1):
                    return True
                chosen.pop()
        return False

    ok = rec(0)
    return (list(chosen) if ok else None), nodes <= node_cap


def _cascade_intervals(families, M: int):
    """The exchange argument for heterochromatic disjoint intervals, run on finite families.

    Slots are filled in order.  When family m has no member disjoint from the
    current chain, the nested pair found inside some chain interval I_j takes
    slot m, and slot j is re-chased, preferring members disjoint from either
    element of the pair.  Returns member indices or None.
    """
    chain: dict[int, int] = {}
    for m in range(M):
        fam = families[m]
        fresh = [k for k, I in enumerate(fam)
                 if all(intervals_disjoint(I, families[s][c]) for s, c in chain.items())]
        if fresh:
            chain[m] = min(fresh, key=lambda k: fam[k].hi)
            continue
        vacant = m
        visited = set()
        while vacant is not None:
            if vacant in visited:
                return None
            visited.add(vacant)
            fam = families[vacant]
            fixed = {s: families[s][c] for s, c in chain.items() if s != vacant}
            fresh = [k for k, I in enumerate(fam)
                     if all(intervals_disjoint(I, C) for C in fixed.values())]
            if fresh:
                chain[vacant] = min(fresh, key=lambda k: fam[k].hi)
                vacant = None
                break
            slots = sorted(fixed)
            try:
                found = find_nested_disjoint_pair(fam, [fixed[s] for s in slots])
            except PrereqViolated:
                return None
            if found is None:
                return None
            j, J, Jp = found
            blocked = slots[j - 1]
            others = [families[s][c] for s, c in chain.items() if s not in (vacant, blocked)]
            # pick whichever of the pair leaves room for the displaced colour
            pick = J
            for cand in (J, Jp):
                room = any(
                    intervals_disjoint(I, cand) and all(intervals_disjoint(I, C) for C in others)
                    for I in families[blocked]
                )
                if room:
                    pick = cand
                    break
            chain[vacant] = fam.index(pick)
            del chain[blocked]
            vacant = blocked
    return [chain[m] for m in range(M)]


def heterochromatic_disjoint_intervals(families: Sequence[Sequence[Interval]], M: int):
    """Pairwise-disjoint chain with member i taken from family i (i = 1..M)."""
    families = [list(f) for f in families]
    if M == 0:
        return DisjointChain(())
    if M > len(families):
        return Stuck("fewer families than requested length", {"families": len(families), "M": M})
    if any(not f for f in families[:M]):
        raise ValueError("every family must be nonempty")
    picks = _cascade_intervals(families, M)
    route = "exchange"
    if picks is None:
        picks, complete = _select_one_per_family(families, M, intervals_disjoint)
        route = "search"
        if picks is None:
            why = "no pairwise-disjoint selection exists" if complete else "search budget exhausted"
            return Stuck(why, {"M": M, "exhaustive": complete})
    members = tuple((f + 1, families[f][k]) for f, k in enumerate(picks))
    _assert_pairwise_disjoint([b for _, b in members], intervals_disjoint)
    return DisjointChain(members, True, tuple(picks))


# ---------------------------------------------------------------------------
# boxes
# ---------------------------------------------------------------------------


def _max_disjoint_boxes(boxes, m: int):
    """Exact search for m pairwise-disjoint boxes; returns indices or None."""
    n = len(boxes)
    adj = [0] * n
    for i, j in itertools.combinations(range(n), 2):
        if boxes_disjoint(boxes[i], boxes[j]):
            adj[i] |= 1 << j
            adj[j] |= 1 << i

    def rec(cands: int, picked: list[int]):
        if len(picked) == m:
            return picked
        if bin(cands).count("1") < m - len(picked):
            return None
        while cands:
            i = cands.bit_length() - 1
            cands &= ~(1 << i)
            got = rec(cands & adj[i], picked + [i])
            if got:
                return got
        return None

    found = rec((1 << n) - 1, [])
    return sorted(found) if found else None


def box_point_transversal(boxes: Sequence[AxisBox], m: int | None = None):
    """Product piercing set P_1 x ... x P_d, or m pairwise-disjoint boxes when asked and present."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("need at least one box")
    d = boxes[0].dim
    if m is not None and m >= 1:
        for axis in range(d):
            proj = [B.projection(axis) for B in boxes]
            dis = max_disjoint_intervals(proj)
            if len(dis) >= m:
                pick = sorted(dis[:m])
                return DisjointChain(tuple((i + 1, boxes[i]) for i in pick), True, tuple(pick))
        pick = _max_disjoint_boxes(boxes, m)
        if pick is not None:
            _assert_pairwise_disjoint([boxes[i] for i in pick], boxes_disjoint)
            return DisjointChain(tuple((i + 1, boxes[i]) for i in pick), True, tuple(pick))
    axes = [min_point_stab_intervals([B.projection(a) for B in boxes]) for a in range(d)]
    grid = list(itertools.product(*[r.points for r in axes]))
    covered = []
    for B in boxes:
        idx = next((k for k, p in enumerate(grid) if all(B.lo[a] <= p[a] <= B.hi[a] for a in range(d))), None)
        if idx is None:
            raise VerificationFailed("product set misses a box")
        covered.append(idx)
    return StabResult(tuple(grid), tuple(covered))


def heterochromatic_disjoint_boxes(families: Sequence[Sequence[AxisBox]], M: int):
    """Strictly heterochromatic pairwise-disjoint boxes via an axis projection."""
    families = [list(f) for f in families]
    if M == 0:
        return DisjointChain(())
    if M > len(families):
        return Stuck("fewer families than requested length", {"families": len(families), "M": M})
    d = families[0][0].dim
    scores = []
    for axis in range(d):
        s = sum(min(len(max_disjoint_intervals([B.projection(axis) for B in f])), M) for f in families[:M])
        scores.append((-s, axis))
    for _, axis in sorted(scores):
        proj = [[B.projection(axis) for B in f] for f in families[:M]]
        res = heterochromatic_disjoint_intervals(proj, M)
        if isinstance(res, DisjointChain):
            picks = list(res.member_indices)
            members = tuple((f + 1, families[f][k]) for f, k in enumerate(picks))
            _assert_pairwise_disjoint([b for _, b in members], boxes_disjoint)
            return DisjointChain(members, True, tuple(picks))
    picks, complete = _select_one_per_family(families, M, boxes_disjoint)
    if picks is None:
        why = "no pairwise-disjoint selection exists" if complete else "search budget exhausted"
        return Stuck(why, {"M": M, "exhaustive": complete})
    members = tuple((f + 1, families[f][k]) for f, k in enumerate(picks))
    _assert_pairwise_disjoint([b for _, b in members], boxes_disjoint)
    return DisjointChain(members, True, tuple(picks))


# ---------------------------------------------------------------------------
# exact minimum piercing for small families
# ---------------------------------------------------------------------------


def _segment_intersection(p, p2, q, q2):
    r, s = p2 - p, q2 - q
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-15:
        # collinear overlap: endpoints already among the candidates
        return []
    w = q - p
    t = (w[0] * s[1] - w[1] * s[0]) / den
    u = (w[0] * r[1] - w[1] * r[0]) / den
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return [p + t * r]
    return []


def _circle_segment(c, rad, a, b):
    d = b - a
    f = a - c
    A = float(d @ d)
    B = 2 * float(f @ d)
    C = float(f @ f) - rad * rad
    disc = B * B - 4 * A * C
    if A == 0 or disc < -1e-12:
        return []
    disc = math.sqrt(max(0.0, disc))
    out = []
    for t in ((-B - disc) / (2 * A), (-B + disc) / (2 * A)):
        if -1e-12 <= t <= 1 + 1e-12:
            out.append(a + t * d)
    return out


def _circle_circle(c1, r1, c2, r2):
    v = c2 - c1
    dd = float(np.linalg.norm(v))
    if dd == 0.0 or dd > r1 + r2 + 1e-12 or dd < abs(r1 - r2) - 1e-12:
        return []
    a = (r1 * r1 - r2 * r2 + dd * dd) / (2 * dd)
    h = math.sqrt(max(0.0, r1 * r1 - a * a))
    base = c1 + a * v / dd
    perp = np.array([-v[1], v[0]]) / dd
    return [base + h * perp, base - h * perp]


def _planar_candidates(bodies) -> list[np.ndarray]:
    """Leftmost points and pairwise boundary crossings.

    For any point p, the bodies containing p have a nonempty convex
    intersection whose leftmost point is either the leftmost point of one of
    them or a crossing of two boundaries; that point pierces at least the same
    bodies, so the candidate list is sufficient.
    """
    cands: list[np.ndarray] = []
    edges = []
    for S in bodies:
        if isinstance(S, Ball):
            c = np.array(S.center)
            cands += [c - np.array([S.radius, 0.0]), c]
            edges.append(("circle", c, S.radius))
        else:
            V = np.atleast_2d(S.vertices())
            cands += list(V)
            segs = [(V[i], V[(i + 1) % len(V)]) for i in range(len(V))] if len(V) > 2 else [(V[0], V[-1])]
            edges.append(("poly", segs))
    for A, B in itertools.combinations(edges, 2):
        if A[0] == "circle" and B[0] == "circle":
            cands += _circle_circle(A[1], A[2], B[1], B[2])
        elif A[0] == "circle" or B[0] == "circle":
            circ, poly = (A, B) if A[0] == "circle" else (B, A)
            for a, b in poly[1]:
                cands += _circle_segment(circ[1], circ[2], a, b)
        else:
            for (a, b), (c, d) in itertools.product(A[1], B[1]):
                cands += _segment_intersection(a, b, c, d)
    return cands


def _candidates(bodies) -> list[np.ndarray]:
    if all(isinstance(S, Interval) for S in bodies):
        return [np.array([S.hi]) for S in bodies]
    if all(isinstance(S, AxisBox) for S in bodies):
        d = bodies[0].dim
        coords = [sorted({S.hi[a] for S in bodies}) for a in range(d)]
        return [np.array(p) for p in itertools.product(*coords)]
    planar = (Ball, OrientedRect2, Triangle2, ConvexPolygon2, Polytope, AxisBox)
    if all(isinstance(S, planar) and S.dim == 2 for S in bodies):
        return _planar_candidates(bodies)
    raise UnsupportedCase("exact piercing supports intervals, boxes and planar disks/polygons")


def _greedy_disjoint_lower(masks_by_body: list[int], bodies_left: int) -> int:
    """Bodies no two of which share a candidate: each needs its own point."""
    count = 0
    used = 0
    rest = bodies_left
    while rest:
        i = rest.bit_length() - 1
        rest &= ~(1 << i)
        if masks_by_body[i] & used:
            continue
        used |= masks_by_body[i]
        count += 1
    return count


def set_cover_exact(masks: list[int], n: int) -> list[int]:
    """Indices of a minimum subfamily of ``masks`` whose union covers range(n)."""
    full = (1 << n) - 1
    # candidates covering each body, as a bitmask over candidates
    by_body = [0] * n
    for k, m in enumerate(masks):
        for i in range(n):
            if m >> i & 1:
                by_body[i] |= 1 << k
    if any(b == 0 for b in by_body):
        raise VerificationFailed("some body is covered by no candidate")

    # greedy upper bound
    greedy: list[int] = []
    cov = 0
    while cov != full:
        k = max(range(len(masks)), key=lambda t: bin(masks[t] & ~cov).count("1"))
        greedy.append(k)
        cov |= masks[k]
    best = list(greedy)

    def rec(cov: int, picked: list[int]):
        nonlocal best
        if cov == full:
            if len(picked) < len(best):
                best = list(picked)
            return
        left = full & ~cov
        if len(picked) + _greedy_disjoint_lower(by_body, left) >= len(best):
            return
        # branch on the uncovered body with the fewest options
        i = min((i for i in range(n) if left >> i & 1), key=lambda i: bin(by_body[i]).count("1"))
        opts = [k for k in range(len(masks)) if by_body[i] >> k & 1]
        opts.sort(key=lambda k: -bin(masks[k] & left).count("1"))
        for k in opts:
            rec(cov | masks[k], picked + [k])

    rec(0, [])
    return best


def min_piercing_number(bodies, k: int = 0):
    """(count, points): exact minimum number of points meeting every body."""
    bodies = list(bodies)
    if k != 0:
        raise UnsupportedCase("exact piercing numbers are computed for points only")
    if len(bodies) > PIERCING_GUARD:
        raise TooLarge(f"{len(bodies)} bodies exceeds the exact-solver guard of {PIERCING_GUARD}")
    if not bodies:
        return 0, []
    cands = _candidates(bodies)
    masks: dict[int, np.ndarray] = {}
    for p in cands:
        m = 0
        for i, S in enumerate(bodies):
            if S.distance(p) <= GEOM_TOL:
                m |= 1 << i
        if m and m not in masks:
            masks[m] = p
    # drop dominated coverage sets
    keys = sorted(masks, key=lambda m: -bin(m).count("1"))
    kept: list[int] = []
    for m in keys:
        if not any((m | K) == K for K in kept):
            kept.append(m)
    pick = set_cover_exact(kept, len(bodies))
    points = [tuple(float(x) for x in masks[kept[t]]) for t in pick]
    lower = len(_greedy_disjoint_family(bodies))
    if len(points) < lower:
        raise VerificationFailed("piercing number below a disjointness lower bound")
    return len(points), points


def _greedy_disjoint_family(bodies) -> list[int]:
    chosen: list[int] = []
    for i, S in enumerate(bodies):
        if all(bodies_disjoint(S, bodies[j]) for j in chosen):
            chosen.append(i)
    return chosen
