import itertools
import math

import numpy as np
import pytest

from oracles import grid_line_gap
from transversal_lab.errors import ParallelFlat, PrereqViolated, StreamExhausted, StuckError
from transversal_lab.families import cone_layout_disk, row_ball
from transversal_lab.geometry import AxisBox, Ball, Cone, KFlat, cone_contains
from transversal_lab.sequences import (
    FamilyStream,
    FarFromOrigin,
    IndependenceState,
    InsideCone,
    build_exclusion_cone,
    build_independent,
    extend_independent,
    flat_ray_clearance,
    greedy_disjoint_heterochromatic,
    pair_direction_gap,
    pair_distance_bound,
)
from transversal_lab.transversal import transversal


def _disk_gap_oracle(c1, c2, r1, r2, xhat=(1.0, 0.0), samples=400_000):
    """Dense grid over directions: smallest angle to xhat where the two normal projections overlap."""
    phi = np.linspace(0, np.pi, samples, endpoint=False)
    N = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
    hit = np.abs(N @ (np.asarray(c1) - np.asarray(c2))) <= r1 + r2
    phi0 = math.atan2(xhat[1], xhat[0]) % math.pi
    delta = np.abs(phi[hit] - phi0)
    return float(np.min(np.minimum(delta, np.pi - delta)))


def _no_common_line(bodies):
    return transversal(1, list(bodies)).certified_empty


# --- greedy escalation -------------------------------------------------------


def test_greedy_rows_twelve():
    streams = [FamilyStream(n, lambda j, n=n: row_ball(n, j), horizon=2000) for n in range(1, 13)]
    chain = greedy_disjoint_heterochromatic(streams, 12)
    assert [f for f, _ in chain.members] == list(range(1, 13))
    for A, B in itertools.combinations(chain.bodies, 2):
        assert np.linalg.norm(np.subtract(A.center, B.center)) > A.radius + B.radius


def test_greedy_single_member():
    streams = [FamilyStream(1, lambda j: row_ball(1, j))]
    chain = greedy_disjoint_heterochromatic(streams, 1)
    assert chain.bodies == [row_ball(1, 1)]


def test_greedy_boxes_on_shells():
    def member(n, j):
        r = 2.0 ** j
        a = 0.7 * n
        c = r * np.array([math.cos(a), math.sin(a)])
        return AxisBox(c - 0.5 * r ** 0.5, c + 0.5 * r ** 0.5)

    streams = [FamilyStream(n, lambda j, n=n: member(n, j), horizon=200) for n in range(1, 11)]
    chain = greedy_disjoint_heterochromatic(streams, 10)
    assert len(chain) == 10
    for A, B in itertools.combinations(chain.bodies, 2):
        assert np.any(np.asarray(A.lo) > B.hi) or np.any(np.asarray(B.lo) > A.hi)


def test_greedy_exhausted():
    streams = [FamilyStream.from_list(1, [Ball((0, 0), 1)]), FamilyStream.from_list(2, [Ball((1, 0), 1)])]
    with pytest.raises(StreamExhausted):
        greedy_disjoint_heterochromatic(streams, 2)
    with pytest.raises(StreamExhausted):
        greedy_disjoint_heterochromatic(streams[:1], 2)


def test_stream_query_answers_satisfy_predicate():
    stream = FamilyStream(1, lambda j: Ball((float(j), 0.0), 0.5), horizon=50)
    pred = FarFromOrigin(10.0)
    got = [stream.query(pred) for _ in range(5)]
    assert [j for j, _ in got] == [11, 12, 13, 14, 15]
    assert all(pred(S) for _, S in got)


# --- pair quantities ------------------------------------------------------------


def test_pair_direction_gap_disks():
    A, B = Ball((0, 5), 1), Ball((0, -5), 1)
    eps = pair_direction_gap(A, B, (1.0, 0.0))
    assert 0 < eps <= math.pi / 2
    assert abs(eps - _disk_gap_oracle((0, 5), (0, -5), 1, 1)) < 1e-4
    assert abs(eps - math.acos(0.2)) < 1e-6


def test_pair_direction_gap_prereq():
    with pytest.raises(PrereqViolated):
        pair_direction_gap(Ball((5, 0), 1), Ball((-5, 0), 1), (1.0, 0.0))


def test_pair_direction_gap_monotone_in_separation():
    gaps = []
    for s in (6.0, 30.0):
        c1, c2 = (3.0, s), (-2.0, -s)
        eps = pair_direction_gap(Ball(c1, 1), Ball(c2, 1), (1.0, 0.0))
        assert abs(eps - _disk_gap_oracle(c1, c2, 1, 1)) < 1e-4
        gaps.append(eps)
    assert gaps[1] > gaps[0]


def test_pair_direction_gap_polygon_against_sampling():
    A = AxisBox((-1, 4), (2, 5))
    B = AxisBox((0, -6), (1, -3))
    eps = pair_direction_gap(A, B, (1.0, 0.0))
    # lines joining corner pairs give hitting directions; none may be closer to x than eps
    VA, VB = A.vertices(), B.vertices()
    for p in VA:
        for q in VB:
            w = p - q
            phi = math.atan2(w[1], w[0]) % math.pi
            assert min(phi, math.pi - phi) >= eps - 1e-9


def test_pair_distance_bound_examples():
    assert pair_distance_bound(Ball((3, 0), 1), Ball((0, 100), 1)) == pytest.approx(4.0)
    assert pair_distance_bound(Ball((5, 0), 1), Ball((7, 0), 1)) == pytest.approx(6.0)
    assert pair_distance_bound(Ball((0, 0), 1), Ball((9, 0), 1)) == pytest.approx(1.0)


# --- exclusion cone ---------------------------------------------------------------


def test_exclusion_cone_two_disks():
    A, B = Ball((0, 5), 1), Ball((0, -5), 1)
    cone = build_exclusion_cone(IndependenceState([(1, A), (2, B)], 1, (1.0, 0.0)))
    assert cone.apex == pytest.approx((7.0, 0.0))
    assert cone.axis == pytest.approx((1.0, 0.0))
    assert cone.half_angle == pytest.approx(0.5 * pair_direction_gap(A, B, (1.0, 0.0)))


def test_exclusion_cone_empty_state():
    cone = build_exclusion_cone(IndependenceState([], 1, (1.0, 0.0)))
    assert cone.apex == (0.0, 0.0) and cone.half_angle == pytest.approx(math.pi / 4)


def test_exclusion_cone_three_disks_uses_min_gap():
    disks = [Ball((0, 5), 1), Ball((0, -5), 1), Ball((3, 12), 1)]
    cone = build_exclusion_cone(IndependenceState(list(enumerate(disks, 1)), 1, (1.0, 0.0)))
    gaps = [pair_direction_gap(a, b, (1.0, 0.0)) for a, b in itertools.combinations(disks, 2)]
    assert cone.half_angle == pytest.approx(0.5 * min(gaps))


def test_exclusion_cone_safety_sampling():
    disks = [Ball((0, 5), 1), Ball((0, -5), 1), Ball((2, 14), 1.5)]
    cone = build_exclusion_cone(IndependenceState(list(enumerate(disks, 1)), 1, (1.0, 0.0)))
    rng = np.random.default_rng(11)
    samples = 20_000
    tested = 0
    while tested < 1000:
        t = rng.uniform(1, 400)
        ang = rng.uniform(-cone.half_angle, cone.half_angle)
        c = np.asarray(cone.apex) + t * np.array([math.cos(ang), math.sin(ang)])
        S = Ball(c, rng.uniform(0.05, 3))
        if not cone_contains(cone, S):
            continue
        tested += 1
        for a, b in itertools.combinations(disks, 2):
            C = [a.center, b.center, S.center]
            # the gap is Lipschitz in the angle with constant 2 max|c|, so a grid margin certifies it
            lip = 2 * float(np.max(np.linalg.norm(C, axis=1)))
            assert grid_line_gap(C, [a.radius, b.radius, S.radius], samples) > lip * math.pi / samples


# --- extension --------------------------------------------------------------------


def test_extend_independent_cone_layout():
    streams = [FamilyStream(n, lambda j, n=n: cone_layout_disk(n, j), horizon=40) for n in range(1, 7)]
    state = build_independent(streams, 6, 1, (1.0, 0.0))
    assert [f for f, _ in state.chosen] == [1, 2, 3, 4, 5, 6]
    for triple in itertools.combinations(state.bodies, 3):
        assert _no_common_line(triple)
    n = np.array([0.0, 1.0])
    for A, B in itertools.combinations(state.bodies, 2):
        assert abs(float(np.subtract(A.center, B.center) @ n)) > A.radius + B.radius


def test_extend_independent_k0_is_escalation():
    streams = [FamilyStream(n, lambda j, n=n: row_ball(n, j), horizon=500) for n in range(1, 6)]
    state = build_independent(streams, 5, k=0)
    streams2 = [FamilyStream(n, lambda j, n=n: row_ball(n, j), horizon=500) for n in range(1, 6)]
    chain = greedy_disjoint_heterochromatic(streams2, 5)
    assert state.bodies == chain.bodies


def test_extend_independent_stuck():
    first = FamilyStream.from_list(1, [Ball((10, 0), 1)])
    second = FamilyStream(2, lambda j: Ball((10.0 * 2 ** j, 0.0), 1.0), horizon=20)
    state = extend_independent(IndependenceState([], 1, (1.0, 0.0)), [first, second])
    with pytest.raises(StuckError):
        extend_independent(state, [first, second])


def test_extend_independent_exhausted():
    first = FamilyStream.from_list(1, [Ball((10, 0), 1)])
    behind = FamilyStream.from_list(2, [Ball((-50.0, 7.0), 1.0)])
    state = extend_independent(IndependenceState([], 1, (1.0, 0.0)), [first, behind])
    with pytest.raises(StreamExhausted):
        extend_independent(state, [first, behind])
    with pytest.raises(StreamExhausted):
        extend_independent(state, [first])


def test_inside_cone_predicate():
    cone = Cone((0.0, 0.0), (1.0, 0.0), math.pi / 6)
    assert InsideCone(cone)(Ball((10.0, 0.0), 1.0))
    assert not InsideCone(cone)(Ball((1.0, 0.0), 1.0))


# --- flat / ray clearance ----------------------------------------------------------


def test_flat_ray_clearance_examples():
    xaxis = KFlat.line((0.0, 0.0), (1.0, 0.0))
    assert flat_ray_clearance(xaxis, (0.0, 0.0), (0.0, 1.0), 1.0) == pytest.approx(1.0)
    yaxis = KFlat.line((0.0, 0.0), (0.0, 1.0))
    with pytest.raises(ParallelFlat):
        flat_ray_clearance(yaxis, (0.0, 0.0), (0.0, 1.0), 1.0)
    crossing = KFlat.line((0.0, 3.0), (1.0, 0.0))
    assert flat_ray_clearance(crossing, (0.0, 0.0), (0.0, 1.0), 1.0) == 0.0


def test_flat_ray_clearance_scale_invariant():
    rng = np.random.default_rng(2)
    for _ in range(50):
        base, dirv = rng.normal(size=3), rng.normal(size=3)
        p, v = rng.normal(size=3), rng.normal(size=3)
        c = rng.uniform(0.5, 3)
        f1 = flat_ray_clearance(KFlat.line(base, dirv), p, v, c)
        t = rng.uniform(0.1, 10)
        f2 = flat_ray_clearance(KFlat.line(t * base, dirv), t * p, v, t * c)
        assert f2 == pytest.approx(f1, rel=1e-9, abs=1e-12)


def test_flat_ray_clearance_positive_iff_missed():
    rng = np.random.default_rng(9)
    for _ in range(100):
        K = KFlat.point(rng.normal(size=2) * 3)
        p, v = rng.normal(size=2), rng.normal(size=2)
        v = v / np.linalg.norm(v)
        c = rng.uniform(0, 2)
        f = flat_ray_clearance(K, p, v, c)
        q = p + c * v
        w = np.asarray(K.base) - q
        s = max(0.0, float(w @ v))
        miss = float(np.linalg.norm(w - s * v))
        assert (f > 0) == (miss > 1e-9)
