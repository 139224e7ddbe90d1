import itertools
import math

import numpy as np
import pytest

from oracles import dist_point_rect, grid_line_gap, polygons_meet_lp, rect_corners
from transversal_lab.errors import DegenerateBody, DegenerateIndex, NoFarSamples, UnsupportedCase
from transversal_lab.families import (
    TangentRectSpec,
    ai_region_member,
    ai_witness_line,
    cone_layout_disk,
    escape_rectangle,
    gen_ai_packing,
    gen_ball_with_tail,
    gen_independent_disks,
    gen_lifted_rect,
    gen_right_triangles,
    gen_tangent_rect,
    gen_unit_ball_grid,
    grid_family,
    lds_estimate,
    rects_intersect,
    verify_pairwise_intersection,
)
from transversal_lab.geometry import Ball, KFlat, Polytope, radii
from transversal_lab.stabbing import min_piercing_number
from transversal_lab.transversal import common_point, pierces


# --- tangent rectangles ---------------------------------------------------------------


def test_tangent_rect_n2():
    spec = TangentRectSpec(2, 1)
    assert spec.a == pytest.approx((math.sqrt(2) - 1, 1.0), abs=1e-15)
    assert spec.b == pytest.approx((1.0, math.sqrt(2) - 1), abs=1e-15)
    R = gen_tangent_rect(spec)
    assert 2 * R.half_wid == 0.5
    assert abs(abs(R.axis_u[0] * spec.u[0] + R.axis_u[1] * spec.u[1])) < 1e-15
    assert spec.u == pytest.approx((math.sqrt(0.5), math.sqrt(0.5)))


def test_tangent_rect_limits_and_incidences():
    spec = TangentRectSpec(16, 1)
    assert np.linalg.norm(spec.a - (1, 1)) < 1e-3
    assert np.linalg.norm(spec.b - (1, 0)) < 1e-3
    for n in range(2, 30):
        s = TangentRectSpec(n, 3)
        assert s.a[1] == 1.0 and s.b[0] == 1.0
        assert abs(s.a @ s.u - 1) < 1e-12 and abs(s.b @ s.u - 1) < 1e-12
        V = gen_tangent_rect(s).vertices()
        heights = np.sort(V @ s.u)
        # inner side on the tangent line, outer side 1/2^i further out
        assert np.allclose(heights[:2], 1.0, atol=1e-12)
        assert np.allclose(heights[2:], 1.0 + s.width, atol=1e-12)


def test_tangent_rect_degenerate_index():
    with pytest.raises(DegenerateIndex):
        TangentRectSpec(1, 1)
    with pytest.raises(DegenerateIndex):
        gen_tangent_rect((3, 0))
    with pytest.raises(DegenerateIndex):
        gen_right_triangles(1, 2)
    with pytest.raises(DegenerateIndex):
        gen_lifted_rect(0, 1)


def test_pairwise_intersection_rects():
    rep = verify_pairwise_intersection(range(2, 17), range(1, 9))
    assert rep.pairs_checked == 120 * 119 // 2 and rep.failures == ()


def test_pairwise_intersection_thin_and_identical():
    rep = verify_pairwise_intersection(range(2, 10), range(1, 3), width_override=1e-9)
    assert rep.failures == ()
    R = gen_tangent_rect((5, 2))
    assert rects_intersect(R, R)


def test_pairwise_intersection_matches_lp_oracle():
    specs = [(n, i) for n in range(2, 9) for i in (1, 4)]
    for (n, i), (m, j) in itertools.combinations(specs, 2):
        A, B = gen_tangent_rect((n, i)), gen_tangent_rect((m, j))
        assert polygons_meet_lp(A.vertices(), B.vertices())


def test_triangles_pairwise_and_contain_segment():
    rep = verify_pairwise_intersection(range(2, 13), range(1, 7), shape="triangle")
    assert rep.failures == ()
    for n, i in itertools.product(range(2, 13), range(1, 7)):
        T = gen_right_triangles(n, i)
        s = TangentRectSpec(n, i)
        V = T.vertices()
        e1, e2 = V[1] - V[0], V[2] - V[0]
        assert abs(e1[0] * e2[1] - e1[1] * e2[0]) > 0
        for t in np.linspace(0, 1, 5):
            assert T.distance(s.a + t * (s.b - s.a)) <= 1e-12


def test_lifted_rect_projection_and_heights():
    for n, i in [(2, 1), (3, 2), (7, 4)]:
        L = gen_lifted_rect(n, i)
        V = L.vertices()
        assert np.all(V[:, 2] == n)
        assert np.array_equal(V[:, :2], gen_tangent_rect((n, i)).vertices())
    A, B = gen_lifted_rect(2, 1), gen_lifted_rect(3, 1)
    assert A.vertices()[:, 2].max() < B.vertices()[:, 2].min()


def test_lifted_rects_near_vertical_line():
    V2, V3 = gen_tangent_rect((2, 1)).vertices(), gen_tangent_rect((3, 1)).vertices()
    # a common point of the two planar rectangles via linear programming
    assert polygons_meet_lp(V2, V3)
    p = None
    for t in np.linspace(0, 1, 201):
        for s in np.linspace(0, 1, 201):
            q = V3[0] + t * (V3[1] - V3[0]) + s * (V3[3] - V3[0])
            if dist_point_rect(q, *_rect_args((2, 1))) <= 1e-12:
                p = q
                break
        if p is not None:
            break
    assert p is not None
    line = KFlat.line((p[0], p[1], 0.0), (0.0, 0.0, 1.0))
    assert pierces(line, gen_lifted_rect(2, 1)) and pierces(line, gen_lifted_rect(3, 1))


def _rect_args(spec):
    R = gen_tangent_rect(spec)
    return np.asarray(R.center), np.asarray(R.axis_u), R.half_len, R.half_wid


def test_rect_corners_oracle_agrees():
    R = gen_tangent_rect((4, 2))
    assert np.allclose(np.sort(rect_corners(*_rect_args((4, 2))), axis=0), np.sort(R.vertices(), axis=0))


# --- escape -----------------------------------------------------------------------


def _assert_escape(C):
    cert = escape_rectangle(C)
    assert cert.margin > 0
    assert 1.0 / 2**cert.i0 < cert.clearance
    for p in np.asarray(C, dtype=float).reshape(-1, 2):
        assert dist_point_rect(p, *_rect_args((cert.n0, cert.i0))) > 0
    return cert


def test_escape_corner_points_only():
    cert = _assert_escape([(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)])
    assert cert.delta == 1.0 and cert.lam == 1.0 and cert.n0 == 2


def test_escape_random_sets():
    rng = np.random.default_rng(8)
    for _ in range(30):
        _assert_escape(rng.uniform(-0.5, 1.5, (12, 2)))


def test_escape_point_on_a_segment():
    s = TangentRectSpec(5, 1)
    C = [0.5 * (s.a + s.b), (1.0, 0.3), (0.9, 1.0)]
    cert = _assert_escape(C)
    assert (cert.n0, cert.i0) != (5, 1)


def test_escape_empty_set():
    assert escape_rectangle([]).margin == math.inf


# --- unit-ball grid -------------------------------------------------------------


def test_grid_second_family_meets_first():
    B1 = gen_unit_ball_grid(1)
    F2 = grid_family(2, 10)
    assert len(F2) == 4
    for B in F2:
        assert np.linalg.norm(np.subtract(B.center, B1.center)) == 1.5
    count, _ = min_piercing_number([B1] + F2)
    assert count <= 5


def test_grid_far_balls_disjoint():
    balls = [gen_unit_ball_grid(n, j) for n in range(3, 7) for j in range(1, 6)]
    for A, B in itertools.combinations(balls, 2):
        assert np.linalg.norm(np.subtract(A.center, B.center)) >= 4


def test_grid_piercing_signature():
    for n in (3, 5):
        for j in range(1, 7):
            count, _ = min_piercing_number([gen_unit_ball_grid(n, t) for t in range(1, j + 1)])
            assert count == j


def test_grid_index_errors():
    with pytest.raises(ValueError):
        gen_unit_ball_grid(1, 2)
    with pytest.raises(ValueError):
        gen_unit_ball_grid(2, 5)


# --- ball with tail ------------------------------------------------------------------


def test_ball_with_tail_pairs_meet_triples_do_not():
    bodies = [gen_ball_with_tail(m) for m in range(1, 7)]
    for A, B in itertools.combinations(bodies[:5], 2):
        assert any(common_point([p, q]).pierced for p in A.pieces() for q in B.pieces())
    for A, B, C in itertools.combinations(bodies, 3):
        for p, q, r in itertools.product(A.pieces(), B.pieces(), C.pieces()):
            ans = common_point([p, q, r])
            assert not ans.pierced and ans.certified_empty


def test_ball_with_tail_pieces():
    body = gen_ball_with_tail(4)
    balls = [p for p in body.pieces() if isinstance(p, Ball)]
    assert len(balls) == 1
    rep = radii(balls[0])
    assert rep.out_radius / rep.in_radius == pytest.approx(1.0)


# --- A_i regions -----------------------------------------------------------------


def test_ai_member_on_center_segment():
    base = [Ball((0.0, 0.0), 1.0), Ball((10.0, 3.0), 1.0)]
    for t in np.linspace(-0.5, 1.5, 9):
        x = t * np.array([10.0, 3.0])
        assert ai_region_member(x, base)


def test_ai_nonmember_against_angle_grid():
    base = [Ball((0.0, 0.0), 1.0), Ball((10.0, 0.0), 1.0)]
    rng = np.random.default_rng(4)
    phi = np.linspace(0, np.pi, 100_000, endpoint=False)
    D = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    N = np.stack([-D[:, 1], D[:, 0]], axis=1)
    seen = {True: 0, False: 0}
    for _ in range(60):
        x = rng.uniform((-5, -3), (15, 3)) + (0, rng.choice([0.0, 4.0]))
        # grid oracle: some direction whose line through x passes within radius of both centres
        dist = [np.abs(N @ (np.asarray(B.center) - x)) for B in base]
        grid = bool(np.any((dist[0] <= 1.0) & (dist[1] <= 1.0)))
        member = ai_region_member(x, base)
        seen[member] += 1
        if member:
            assert grid or np.min(np.maximum(dist[0] - 1, dist[1] - 1)) < 1e-4
        else:
            assert not grid
    assert seen[True] and seen[False]


def test_ai_witness_is_verified_3d():
    base = [Ball((0.0, 0.0, 0.0), 1.0), Ball((6.0, 2.0, -1.0), 1.5)]
    line = ai_witness_line((12.0, 4.5, -2.0), base)
    assert line is not None and all(pierces(line, B) for B in base)


def test_ai_packing_members_have_witnesses():
    base = gen_independent_disks(2)
    packed = gen_ai_packing(base, 1, ((-5.0, -5.0), (15.0, 15.0)))
    assert packed
    for B in packed:
        line = ai_witness_line(B.center, base)
        assert line is not None and all(pierces(line, D) for D in base)
    for A, B in itertools.combinations(packed, 2):
        assert np.linalg.norm(np.subtract(A.center, B.center)) >= 2 - 1e-12


def test_ai_unsupported():
    base = [Ball((0.0, 0.0), 1.0), Ball((5.0, 0.0), 1.0)]
    with pytest.raises(UnsupportedCase):
        ai_region_member((1.0, 1.0), base, k=2)
    with pytest.raises(UnsupportedCase):
        gen_ai_packing([Ball((0.0,) * 4, 1.0)] * 2, 1, ((0.0,) * 4, (1.0,) * 4))


def test_independent_disks_no_line_through_three():
    with pytest.raises(DegenerateBody):
        gen_independent_disks(5)
    disks = gen_independent_disks(5, spread=40.0)
    for tri in itertools.combinations(disks, 3):
        C = [D.center for D in tri]
        lip = 2 * float(np.max(np.linalg.norm(C, axis=1)))
        assert grid_line_gap(C, [1, 1, 1], 100_000) > lip * math.pi / 100_000


# --- limiting directions ------------------------------------------------------------


def test_lds_lifted_rects():
    est = lds_estimate([gen_lifted_rect(n, 1) for n in range(2, 61)], 10, 0.2)
    assert len(est.clusters) == 1 and est.span_dim == 1
    assert est.clusters[0][0] == pytest.approx((0.0, 0.0, 1.0), abs=0.1)
    assert est.k_unbounded(1) and not est.k_unbounded(2)


def test_lds_grid_rows():
    est = lds_estimate([gen_unit_ball_grid(n, 1) for n in range(3, 60)], 40, 0.2)
    assert est.span_dim == 1
    assert est.clusters[0][0] == pytest.approx((0.0, 1.0), abs=0.2)


def test_lds_no_far_samples():
    with pytest.raises(NoFarSamples):
        lds_estimate([Ball((1.0, 1.0), 1.0)], 10, 0.1)


def test_lds_two_directions_span_two():
    pts = [(t, 0.0) for t in range(20, 30)] + [(0.0, t) for t in range(20, 30)]
    est = lds_estimate([], 10, 0.1, samples=pts)
    assert est.span_dim == 2 and sorted(c for _, c in est.clusters) == [10, 10]


def test_lds_degenerate_polytope_sample_point():
    P = Polytope([(10.0, 10.0, 0.0), (12.0, 10.0, 0.0), (10.0, 12.0, 0.0)])
    est = lds_estimate([P], 1, 0.1)
    assert est.clusters[0][1] == 1


def test_cone_layout_disks_are_deterministic():
    assert cone_layout_disk(3, 2) == Ball((40.0, 30.0), 1.0)
    with pytest.raises(ValueError):
        cone_layout_disk(0, 1)
