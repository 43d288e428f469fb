import math
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from oracles import period_crossings, repeat_period, wiggle_points
from quiltfloer.curves import (CurveError, Locator, develop_arc, fiber_product, is_embedded_lift,
                               translation_class)
from quiltfloer.exact import cross, segment_intersection
from quiltfloer.fixtures import geodesic, polyline, wiggled
from quiltfloer.surface import (Disconnected, MalformedGluing, NonOrientable, build_surface,
                                from_permutations, torus)

T = torus(1, 1, "T")


# -- build_surface ----------------------------------------------------------


def test_single_square_straight_gluing_is_genus_one_torus():
    s = build_surface(1, [(0, "right", 0, "left"), (0, "top", 0, "bottom")])
    assert s.genus == 1
    assert s.euler_characteristic == 0


def test_two_squares_side_by_side_is_genus_one():
    s = build_surface(2, [(0, "right", 1, "left"), (1, "right", 0, "left"),
                          (0, "top", 0, "bottom"), (1, "top", 1, "bottom")])
    assert s.genus == 1
    assert s.n == 2


def test_klein_bottle_gluing_rejected():
    with pytest.raises(NonOrientable):
        build_surface(1, [(0, "right", 0, "left", True), (0, "top", 0, "bottom", True)])


def test_incomplete_gluing_rejected():
    with pytest.raises(MalformedGluing):
        build_surface(1, [(0, "right", 0, "left")])


def test_disconnected_gluing_rejected():
    with pytest.raises(Disconnected):
        build_surface(2, [(0, "right", 0, "left"), (0, "top", 0, "bottom"),
                          (1, "right", 1, "left"), (1, "top", 1, "bottom")])


@given(st.integers(1, 3), st.integers(1, 3))
def test_euler_characteristic_matches_genus(w, h):
    s = torus(w, h)
    assert s.euler_characteristic == 2 - 2 * s.genus


def test_genus_two_surface_from_permutations():
    # three-square L shape: one cone point of angle 6 pi
    s = from_permutations([1, 0, 2], [2, 1, 0])
    assert s.genus == 2
    assert s.euler_characteristic == -2


# -- fiber products ---------------------------------------------------------


def test_horizontal_vs_vertical_one_transverse_point():
    h = geodesic(T, (1, 0), (F(1, 3), F(1, 2)), "h")
    v = geodesic(T, (0, 1), (F(1, 2), F(1, 3)), "v")
    pts = fiber_product(h, v)
    assert len(pts) == 1 and pts[0].transverse


def test_parallel_horizontals_disjoint():
    a = geodesic(T, (1, 0), (F(1, 3), F(1, 4)), "a")
    b = geodesic(T, (1, 0), (F(1, 3), F(3, 4)), "b")
    assert fiber_product(a, b) == []


def test_class_10_vs_12_two_points_against_brute_force():
    a_pts = [(F(1, 3), F(1, 5)), (F(4, 3), F(1, 5))]
    b_pts = [(F(1, 7), F(2, 9)), (F(8, 7), F(20, 9))]
    a = polyline(T, a_pts, "a")
    b = polyline(T, b_pts, "b")
    expected = len(period_crossings(a_pts, b_pts))
    assert expected == 2
    pts = fiber_product(a, b)
    assert len(pts) == expected and all(p.transverse for p in pts)


classes = st.tuples(st.integers(-2, 2), st.integers(-2, 2)).filter(
    lambda v: v != (0, 0) and math.gcd(*v) == 1)
offsets = st.lists(st.integers(-3, 3).map(lambda k: F(k, 12)), max_size=2)
bases = st.tuples(st.integers(1, 46).map(lambda k: F(k, 47)), st.integers(1, 42).map(lambda k: F(k, 43)))


def _curve(direction, base, offs, label):
    try:
        return wiggled(T, direction, base, offs, label), wiggle_points(direction, base, offs)
    except (CurveError, ValueError):
        return None, None


@given(classes, bases, offsets, classes, bases, offsets)
def test_fiber_product_count_matches_brute_force(d1, b1, o1, d2, b2, o2):
    a, ap = _curve(d1, b1, o1, "a")
    b, bp = _curve(d2, b2, o2, "b")
    assume(a is not None and b is not None)
    pts = fiber_product(a, b)
    assume(all(p.transverse for p in pts))
    assert len(pts) == len(period_crossings(ap, bp))


@given(classes, bases, classes, bases)
def test_fiber_product_bounded_below_by_algebraic_count_with_same_parity(d1, b1, d2, b2):
    a, _ = _curve(d1, b1, [], "a")
    b, _ = _curve(d2, b2, [], "b")
    assume(a is not None and b is not None)
    pts = fiber_product(a, b)
    assume(all(p.transverse for p in pts))
    alg = abs(cross(translation_class(a), translation_class(b)))
    assert len(pts) >= alg
    assert (len(pts) - alg) % 2 == 0


@given(classes, bases, offsets, classes, bases, offsets)
def test_fiber_product_swap_bijection(d1, b1, o1, d2, b2, o2):
    a, _ = _curve(d1, b1, o1, "a")
    b, _ = _curve(d2, b2, o2, "b")
    assume(a is not None and b is not None)
    ab = {p.key() for p in fiber_product(a, b)}
    ba = {p.swapped().key() for p in fiber_product(b, a)}
    assert ab == ba


def test_fiber_product_count_invariant_under_square_relabelling():
    s = from_permutations([1, 2, 0], [0, 1, 2])
    relabelled = from_permutations([2, 0, 1], [0, 1, 2])   # squares listed in reverse order
    pts = [(F(1, 5), F(1, 3)), (F(16, 5), F(1, 3))]
    wig = [(F(1, 7), F(1, 9)), (F(8, 7), F(1, 2)), (F(1, 7), F(10, 9))]
    counts = []
    for surf, sq in ((s, 0), (relabelled, 2)):
        a = polyline(surf, pts, "a", sq)
        b = polyline(surf, wig, "b", sq)
        counts.append(len(fiber_product(a, b)))
    assert counts[0] == counts[1]


# -- developing -------------------------------------------------------------


def test_horizontal_loop_develops_straight_length_three():
    h = geodesic(T, (1, 0), (F(1, 3), F(1, 2)), "h")
    arc = develop_arc(h, Locator(0, 0, F(0)), 3)
    dx = arc.points[-1][0] - arc.points[0][0]
    dy = arc.points[-1][1] - arc.points[0][1]
    assert (dx, dy) == (3, 0)
    assert all(cross((dx, dy), (p[0] - arc.points[0][0], p[1] - arc.points[0][1])) == 0
               for p in arc.points)


def test_diagonal_loop_develops_to_direction_11_length_2_sqrt2():
    d = geodesic(T, (1, 1), (F(1, 3), F(1, 2)), "d")
    arc = develop_arc(d, Locator(0, 0, F(0)), 2)
    dx = arc.points[-1][0] - arc.points[0][0]
    dy = arc.points[-1][1] - arc.points[0][1]
    assert (dx, dy) == (2, 2)          # length 2 sqrt 2


def test_wiggled_loop_develops_like_hand_unfolding():
    offs = [F(1, 6), F(-1, 4)]
    c = wiggled(T, (1, 2), (F(1, 5), F(1, 7)), offs, "w")
    arc = develop_arc(c, Locator(0, 0, F(0)), 2)
    expected = repeat_period(wiggle_points((1, 2), (F(1, 5), F(1, 7)), offs), 2)
    start = arc.points[0]
    shift = (start[0] - expected[0][0], start[1] - expected[0][1])
    hand = [(x + shift[0], y + shift[1]) for x, y in expected]
    # every hand-unfolded vertex appears in order on the developed arc
    it = iter(arc.points)
    assert all(any(v == w for w in it) for v in hand)


@given(st.integers(1, 3), st.integers(1, 3))
def test_develop_arc_extends_segment_for_segment(k, m):
    c = wiggled(T, (2, 1), (F(1, 5), F(1, 7)), [F(1, 8)], "w")
    short = develop_arc(c, Locator(0, 0, F(0)), k)
    long = develop_arc(c, Locator(0, 0, F(0)), k + m)
    assert long.points[:len(short.points)] == short.points


def test_geodesic_has_embedded_lift():
    assert is_embedded_lift(geodesic(T, (2, 1), (F(1, 5), F(1, 7)), "g"))


def _self_crossing(pts):
    segs = list(zip(pts, pts[1:] + pts[:1]))
    for i in range(len(segs)):
        for j in range(i + 2, len(segs)):
            if i == 0 and j == len(segs) - 1:
                continue
            if segment_intersection(*segs[i], *segs[j]) is not None:
                return True
    return False


def test_figure_eight_has_no_embedded_lift():
    pts = [(F(1, 4), F(1, 5)), (F(3, 4), F(4, 5)), (F(3, 4), F(1, 5)), (F(1, 4), F(4, 5)),
           (F(1, 4), F(1, 5))]
    assert _self_crossing(pts[:-1])          # oracle: the planar loop crosses itself
    c = polyline(T, pts, "eight")
    assert not is_embedded_lift(c)


def test_wiggled_geodesic_has_embedded_lift():
    offs = [F(1, 6), F(-1, 4), F(1, 3)]
    pts = repeat_period(wiggle_points((1, 1), (F(1, 5), F(1, 7)), offs), 4)
    # oracle: projection onto the period direction is strictly increasing, so the lift is a graph
    proj = [x + y for x, y in pts]
    assert all(a < b for a, b in zip(proj, proj[1:]))
    assert is_embedded_lift(wiggled(T, (1, 1), (F(1, 5), F(1, 7)), offs, "w"))
