import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import interval_brute_min
from transversal_lab.errors import PrereqViolated, TooLarge, UnsupportedCase
from transversal_lab.geometry import AxisBox, Ball, Interval, OrientedRect2
from transversal_lab.stabbing import (
    DisjointChain,
    StabResult,
    Stuck,
    bodies_disjoint,
    box_point_transversal,
    extend_disjoint_chain,
    find_nested_disjoint_pair,
    heterochromatic_disjoint_boxes,
    heterochromatic_disjoint_intervals,
    max_disjoint_intervals,
    min_piercing_number,
    min_point_stab_intervals,
    set_cover_exact,
)

I = Interval


def _pairwise_disjoint(bodies):
    return all(bodies_disjoint(a, b) for a, b in itertools.combinations(bodies, 2))


# --- intervals ------------------------------------------------------------------


def test_min_point_stab_examples():
    r = min_point_stab_intervals([I(0, 1), I(2, 3), I(0.5, 2.5)])
    assert len(r.points) == 2 and interval_brute_min([(0, 1), (2, 3), (0.5, 2.5)]) == 2
    assert min_point_stab_intervals([I(0, 5), I(1, 4), I(2, 3)]).points == (3.0,)
    assert len(min_point_stab_intervals([I(0, 1), I(2, 3), I(4, 5)]).points) == 3


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 100), st.integers(0, 30)), min_size=1, max_size=9))
def test_min_point_stab_optimal_and_valid(items):
    ivs = [(float(a), float(a + w)) for a, w in items]
    r = min_point_stab_intervals([I(a, b) for a, b in ivs])
    assert list(r.points) == sorted(r.points)
    for (a, b), k in zip(ivs, r.covered):
        assert a <= r.points[k] <= b
    assert len(r.points) == interval_brute_min(ivs)
    assert len(r.points) == len(max_disjoint_intervals([I(a, b) for a, b in ivs]))


def test_find_nested_disjoint_pair_examples():
    assert find_nested_disjoint_pair([I(0.1, 0.2), I(0.3, 0.4)], [I(0, 1)]) == (1, I(0.1, 0.2), I(0.3, 0.4))
    assert find_nested_disjoint_pair([I(0.1, 0.9)], [I(0, 1)]) is None
    F = [I(0, 0.5), I(0.4, 1), I(2.1, 2.2), I(2.3, 2.4)]
    assert find_nested_disjoint_pair(F, [I(0, 1), I(2, 3)]) == (2, I(2.1, 2.2), I(2.3, 2.4))
    with pytest.raises(PrereqViolated):
        find_nested_disjoint_pair([I(5, 6)], [I(0, 1)])


def test_extend_disjoint_chain_examples():
    out = extend_disjoint_chain([I(0, 1), I(2, 3), I(4, 5)], [I(0, 1)])
    assert isinstance(out, DisjointChain) and out.bodies == [I(0, 1), I(2, 3)]
    out = extend_disjoint_chain([I(0, 1), I(0.1, 0.2), I(0.3, 0.4)], [I(0, 1)])
    assert out.bodies == [I(0.1, 0.2), I(0.3, 0.4)]
    assert isinstance(extend_disjoint_chain([I(0, 1), I(0.5, 1.5)], [I(0, 1)]), Stuck)


def test_extend_disjoint_chain_grows_or_stops():
    rng = np.random.default_rng(3)
    for _ in range(40):
        F = [I(a, a + w) for a, w in zip(rng.uniform(0, 20, 12), rng.uniform(0.1, 4, 12))]
        chain = [F[0]]
        while True:
            out = extend_disjoint_chain(F, chain)
            if isinstance(out, Stuck):
                break
            assert len(out) == len(chain) + 1 and _pairwise_disjoint(out.bodies)
            chain = out.bodies


def _exhaustive_selection(families, M):
    for pick in itertools.product(*families[:M]):
        if _pairwise_disjoint(pick):
            return True
    return False


def test_heterochromatic_intervals_examples():
    fams = [[I(3 * n, 3 * n + 1)] for n in range(1, 5)]
    out = heterochromatic_disjoint_intervals(fams, 4)
    assert isinstance(out, DisjointChain) and len(out) == 4
    fams = [[I(0, 10)], [I(1, 2), I(4, 5)], [I(1.5, 1.7), I(4.2, 4.4)]]
    assert isinstance(heterochromatic_disjoint_intervals(fams, 3), Stuck)
    assert not _exhaustive_selection(fams, 3)
    N = 5
    fams = [[I(j + n / (2 * N), j + n / (2 * N) + 1 / (4 * N)) for j in range(21)] for n in range(1, N + 1)]
    out = heterochromatic_disjoint_intervals(fams, 5)
    assert isinstance(out, DisjointChain) and len(out) == 5
    assert [f for f, _ in out.members] == [1, 2, 3, 4, 5]
    assert _pairwise_disjoint(out.bodies)


def test_heterochromatic_intervals_never_false_stuck():
    rng = np.random.default_rng(21)
    for _ in range(60):
        nf = int(rng.integers(2, 7))
        fams = [
            [I(a, a + w) for a, w in zip(rng.uniform(0, 15, m), rng.uniform(0.2, 3, m))]
            for m in rng.integers(1, 5, nf)
        ]
        out = heterochromatic_disjoint_intervals(fams, nf)
        if _exhaustive_selection(fams, nf):
            assert isinstance(out, DisjointChain)
        if isinstance(out, DisjointChain):
            assert [f for f, _ in out.members] == list(range(1, nf + 1))
            assert _pairwise_disjoint(out.bodies)


# --- boxes ---------------------------------------------------------------------


def test_box_point_transversal_examples():
    r = box_point_transversal([AxisBox((0, 0), (1, 1)), AxisBox((0.5, 0.5), (2, 2))])
    assert isinstance(r, StabResult) and r.points == ((1.0, 1.0),)
    diag = [AxisBox((2 * t, 2 * t), (2 * t + 1, 2 * t + 1)) for t in range(5)]
    out = box_point_transversal(diag, m=5)
    assert isinstance(out, DisjointChain) and len(out) == 5
    assert len(box_point_transversal([AxisBox((0, 0, 0), (1, 1, 1))]).points) == 1


def test_box_product_structure():
    rng = np.random.default_rng(5)
    for _ in range(30):
        lo = rng.uniform(0, 10, (8, 3))
        boxes = [AxisBox(l, l + rng.uniform(0.5, 4, 3)) for l in lo]
        r = box_point_transversal(boxes)
        sizes = [len(min_point_stab_intervals([B.projection(a) for B in boxes]).points) for a in range(3)]
        assert len(r.points) == math.prod(sizes)
        for B, k in zip(boxes, r.covered):
            assert B.contains(r.points[k])


def test_heterochromatic_boxes_examples():
    fams = [[AxisBox((4 * n + j / 10, 0), (4 * n + j / 10 + 0.05, 10)) for j in range(5)] for n in range(6)]
    out = heterochromatic_disjoint_boxes(fams, 6)
    assert isinstance(out, DisjointChain) and len(out) == 6 and _pairwise_disjoint(out.bodies)
    fams = [[AxisBox((0, 3 * n), (1, 3 * n + 1))] for n in range(4)]
    out = heterochromatic_disjoint_boxes(fams, 4)
    assert isinstance(out, DisjointChain) and len(out) == 4
    out = heterochromatic_disjoint_boxes(fams, 1)
    assert out.bodies == [fams[0][0]]


# --- exact piercing -----------------------------------------------------------------


def test_min_piercing_examples():
    balls = [Ball((4.0 * j, 0.0), 1.0) for j in range(5)]
    assert min_piercing_number(balls)[0] == 5
    grid = [Ball((4.0 * j, 12.0), 1.0) for j in range(1, 5)]
    assert min_piercing_number(grid)[0] == 4
    prop = [Ball(c, 1.0) for c in [(0.0, 0.0), (1.5, 0.0), (-1.5, 0.0), (0.0, 1.5), (0.0, -1.5)]]
    count, points = min_piercing_number(prop)
    assert 2 <= count <= 5
    for B in prop:
        assert any(B.distance(p) <= 1e-9 for p in points)
    # brute force over a fine grid: no set of count - 1 candidate points pierces all five
    xs = np.linspace(-2.5, 2.5, 51)
    cover = {sum(1 << i for i, B in enumerate(prop) if B.distance(np.array((x, y))) <= 1e-9) for x in xs for y in xs}
    for combo in itertools.combinations(sorted(cover), count - 1):
        union = 0
        for c in combo:
            union |= c
        assert union != 31


def test_min_piercing_guards():
    with pytest.raises(TooLarge):
        min_piercing_number([Ball((4.0 * j, 0.0), 1.0) for j in range(25)])
    with pytest.raises(UnsupportedCase):
        min_piercing_number([Ball((0.0, 0.0), 1.0)], k=1)


def test_min_piercing_random_disks_against_random_point_sets():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        disks = [Ball(c, r) for c, r in zip(rng.uniform(0, 8, (n, 2)), rng.uniform(0.5, 2, n))]
        count, pts = min_piercing_number(disks)
        assert all(any(D.distance(p) <= 1e-9 for p in pts) for D in disks)
        # random point sets of size count-1 never pierce everything
        if count > 1:
            for _ in range(200):
                P = rng.uniform(-2, 10, (count - 1, 2))
                assert not all(any(D.distance(p) <= 1e-9 for p in P) for D in disks)


def test_min_piercing_polygons_and_boxes():
    rects = [OrientedRect2((2.0 * t, 0.0), (1.0, 0.0), 1.2, 0.5) for t in range(4)]
    count, pts = min_piercing_number(rects)
    assert count == 2
    boxes = [AxisBox((t, t), (t + 1.5, t + 1.5)) for t in range(6)]
    count, _ = min_piercing_number(boxes)
    assert count == 3


def test_set_cover_exact_small():
    masks = [0b0011, 0b0110, 0b1100, 0b1001, 0b0101]
    pick = set_cover_exact(masks, 4)
    assert len(pick) == 2
    assert int(np.bitwise_or.reduce([masks[p] for p in pick])) == 0b1111
