import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import shoelace
from quiltfloer.curves import fiber_product
from quiltfloer.discs import (AdmissibilityUnverified, DiscError, NonTransverseInput,
                              RegionBoundTooSmall, TriplePoint, check_triple_points,
                              count_bigons, count_triangles, deck_words,
                              oracle_enumerate, revalidate)
from quiltfloer.fixtures import geodesic, polyline, random_wiggled
from quiltfloer.surface import from_permutations, torus

T = torus(1, 1, "T")
HORIZONTAL = geodesic(T, (1, 0), (F(0), F(1, 2)), "a")
# vertical class that dips back across y = 1/2: crossings at x = 1/4, 3/8, 5/8
ZIGZAG = polyline(T, [(F(1, 4), 0), (F(1, 4), F(3, 4)), (F(1, 2), F(1, 4)), (F(3, 4), F(3, 4)),
                      (F(3, 4), F(7, 8)), (F(1, 4), 1)], "b")


def _by_x(points):
    return {p.point[0]: p for p in points}


def test_zigzag_has_three_crossings_with_the_horizontal():
    assert sorted(_by_x(fiber_product(HORIZONTAL, ZIGZAG))) == [F(1, 4), F(3, 8), F(5, 8)]


def test_zigzag_bigons_match_the_hand_drawn_triangles():
    x = _by_x(fiber_product(HORIZONTAL, ZIGZAG))
    # above the line: corners (1/4,1/2), (3/8,1/2), apex (1/4,3/4)
    above = count_bigons(HORIZONTAL, ZIGZAG, x[F(3, 8)], x[F(1, 4)])
    # below the line: corners (3/8,1/2), (5/8,1/2), apex (1/2,1/4)
    below = count_bigons(HORIZONTAL, ZIGZAG, x[F(3, 8)], x[F(5, 8)])
    assert len(above) == len(below) == 1
    assert above[0].area == shoelace([(F(1, 4), F(1, 2)), (F(3, 8), F(1, 2)), (F(1, 4), F(3, 4))])
    assert below[0].area == shoelace([(F(3, 8), F(1, 2)), (F(1, 2), F(1, 4)), (F(5, 8), F(1, 2))])
    assert above[0].area == F(1, 64) and below[0].area == F(1, 32)


def test_bigon_direction_matters():
    x = _by_x(fiber_product(HORIZONTAL, ZIGZAG))
    assert count_bigons(HORIZONTAL, ZIGZAG, x[F(1, 4)], x[F(3, 8)]) == []
    assert count_bigons(HORIZONTAL, ZIGZAG, x[F(5, 8)], x[F(3, 8)]) == []
    total = sum(len(count_bigons(HORIZONTAL, ZIGZAG, p, q))
                for p in x.values() for q in x.values() if p is not q)
    assert total == 2


def test_zigzag_bigons_agree_with_arrangement_search():
    pts = fiber_product(HORIZONTAL, ZIGZAG)
    for p in pts:
        for q in pts:
            if p is not q:
                assert deck_words(count_bigons(HORIZONTAL, ZIGZAG, p, q)) == \
                    deck_words(oracle_enumerate([HORIZONTAL, ZIGZAG], [p, q]))


def test_disc_records_revalidate():
    x = _by_x(fiber_product(HORIZONTAL, ZIGZAG))
    for d in count_bigons(HORIZONTAL, ZIGZAG, x[F(3, 8)], x[F(1, 4)]):
        assert revalidate(d, T)
        assert d.area == shoelace(d.polygon) > 0


# -- input checks -----------------------------------------------------------


def test_tangential_input_is_rejected():
    a = polyline(T, [(0, F(1, 4)), (F(1, 2), F(3, 4)), (1, F(1, 4))], "v")
    b = geodesic(T, (1, 0), (F(0), F(3, 4)), "h")
    pts = fiber_product(a, b)
    assert any(not p.transverse for p in pts)
    with pytest.raises(NonTransverseInput):
        count_bigons(a, b, pts[0], pts[0])


def test_figure_eight_fails_admissibility_certificate():
    eight = polyline(T, [(F(1, 4), F(1, 5)), (F(3, 4), F(4, 5)), (F(3, 4), F(1, 5)),
                         (F(1, 4), F(4, 5)), (F(1, 4), F(1, 5))], "eight")
    x = fiber_product(HORIZONTAL, eight)
    with pytest.raises(AdmissibilityUnverified):
        count_bigons(HORIZONTAL, eight, x[0], x[1])


def test_non_flat_surface_is_rejected():
    s = from_permutations([1, 0, 2], [2, 1, 0])
    a = polyline(s, [(F(1, 3), F(1, 5)), (F(7, 3), F(1, 5))], "a")
    b = polyline(s, [(F(1, 7), F(1, 3)), (F(1, 7), F(7, 3))], "b", 0)
    pts = fiber_product(a, b)
    assert pts
    with pytest.raises(DiscError):
        count_bigons(a, b, pts[0], pts[-1])


# -- properties -------------------------------------------------------------


def _pair(seed):
    rng = random.Random(seed)
    a = random_wiggled(rng, T, "a")
    b = random_wiggled(rng, T, "b")
    pts = fiber_product(a, b)
    return a, b, pts


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_bigon_search_agrees_with_arrangement_search(seed):
    a, b, pts = _pair(seed)
    assume(pts and len(pts) <= 4 and all(p.transverse for p in pts))
    for p in pts:
        for q in pts:
            if p is q:
                continue
            found = count_bigons(a, b, p, q)
            assert deck_words(found) == deck_words(oracle_enumerate([a, b], [p, q]))
            assert all(revalidate(d, T) for d in found)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_triangle_search_agrees_with_arrangement_search(seed):
    rng = random.Random(seed)
    a, b, c = (random_wiggled(rng, T, lab) for lab in "abc")
    ab, bc, ac = fiber_product(a, b), fiber_product(b, c), fiber_product(a, c)
    assume(all(p.transverse for p in ab + bc + ac))
    assume(0 < len(ab) * len(bc) * len(ac) <= 27)
    try:
        check_triple_points(a, b, c)
    except TriplePoint:
        assume(False)
    # one corner triple per example: each arrangement walk takes about a second
    x, y, z = rng.choice(ab), rng.choice(bc), rng.choice(ac)
    assert deck_words(count_triangles(a, b, c, x, y, z)) == \
        deck_words(oracle_enumerate([a, b, c], [x, y, z]))


# corners whose third triangle has an arc about six periods long
LONG_TRIANGLE_SEED = 459


def test_triangle_counts_grow_with_depth_in_both_searches():
    rng = random.Random(LONG_TRIANGLE_SEED)
    a, b, c = (random_wiggled(rng, T, lab) for lab in "abc")
    x, y, z = (rng.choice(fiber_product(u, v)) for u, v in ((a, b), (b, c), (a, c)))
    counts = []
    for depth in (2, 4, 7):
        found = count_triangles(a, b, c, x, y, z, depth=depth)
        assert deck_words(found) == deck_words(oracle_enumerate([a, b, c], [x, y, z], depth=depth))
        assert all(shoelace(d.polygon) == d.area > 0 for d in found)
        counts.append(len(found))
    assert counts == [1, 2, 3]


def test_small_explicit_window_is_reported():
    a, b = HORIZONTAL, ZIGZAG
    xs = _by_x(fiber_product(a, b))
    with pytest.raises(RegionBoundTooSmall):
        oracle_enumerate([a, b], [xs[F(3, 8)], xs[F(5, 8)]], bound=F(1, 2))
