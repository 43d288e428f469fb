import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import rank_mod2
from quiltfloer.curves import fiber_product
from quiltfloer.floer import (BoundingCochain, DifferentialNotSquareZero, FloerComplex, Mu2,
                              apply, build_cf, homology, maurer_cartan, rank,
                              twisted_differential)
from quiltfloer.fixtures import geodesic, polyline, random_wiggled
from quiltfloer.surface import torus

T = torus(1, 1, "T")
HORIZONTAL = geodesic(T, (1, 0), (F(0), F(1, 2)), "a")
ZIGZAG = polyline(T, [(F(1, 4), 0), (F(1, 4), F(3, 4)), (F(1, 2), F(1, 4)), (F(3, 4), F(3, 4)),
                      (F(3, 4), F(7, 8)), (F(1, 4), 1)], "b")


def _oracle_homology(cf):
    return cf.size - 2 * rank_mod2(cf.columns)


def test_horizontal_and_vertical_give_rank_one():
    cf = build_cf(HORIZONTAL, geodesic(T, (0, 1), (F(1, 2), F(1, 3)), "v"))
    assert cf.size == 1 and homology(cf) == 1


def test_classes_10_and_12_give_rank_two_with_no_differential():
    cf = build_cf(HORIZONTAL, geodesic(T, (1, 2), (F(1, 7), F(1, 3)), "d"))
    assert cf.size == 2 and cf.columns == [0, 0]
    assert homology(cf) == 2


def test_zigzag_differential_matches_hand_count():
    cf = build_cf(HORIZONTAL, ZIGZAG)
    xs = {g.point[0]: i for i, g in enumerate(cf.generators)}
    middle, left, right = xs[F(3, 8)], xs[F(1, 4)], xs[F(5, 8)]
    # one bigon from the middle crossing to each of its neighbours
    assert cf.columns[middle] == (1 << left) | (1 << right)
    assert cf.columns[left] == cf.columns[right] == 0
    assert homology(cf) == 1 == _oracle_homology(cf)


def test_non_square_zero_differential_is_reported():
    cf = FloerComplex("a", "b", (None, None, None), [0b010, 0b100, 0])
    with pytest.raises(DifferentialNotSquareZero):
        homology(cf)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_differential_squares_to_zero_on_random_pairs(seed):
    rng = random.Random(seed)
    a, b = random_wiggled(rng, T, "a"), random_wiggled(rng, T, "b")
    pts = fiber_product(a, b)
    assume(0 < len(pts) <= 8 and all(p.transverse for p in pts))
    cf = build_cf(a, b)
    assert cf.is_square_zero()
    assert homology(cf) == _oracle_homology(cf)


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_homology_rank_invariant_under_basis_change(n, seed):
    rng = random.Random(seed)
    # random square-zero differential: d = P N P^-1 with N strictly upper triangular pairs
    pairs = rng.randint(0, n // 2)
    nil = [0] * n
    for k in range(pairs):
        nil[2 * k + 1] = 1 << (2 * k)
    # random invertible change of basis, built as a product of elementary moves
    basis = [1 << i for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            basis[i] ^= basis[j]
    inverse = _invert(basis, n)
    conj = [apply(basis, apply(nil, inverse[j])) for j in range(n)]
    cf = FloerComplex("a", "b", tuple(range(n)), conj)
    assert cf.is_square_zero()
    assert homology(cf) == n - 2 * pairs == _oracle_homology(cf)


def _invert(columns, n):
    """Inverse of an invertible mod-2 matrix given column-wise, by Gauss-Jordan."""
    rows = [[(columns[j] >> i) & 1 for j in range(n)] + [int(i == k) for k in range(n)]
            for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if rows[r][c])
        rows[c], rows[p] = rows[p], rows[c]
        for r in range(n):
            if r != c and rows[r][c]:
                rows[r] = [x ^ y for x, y in zip(rows[r], rows[c])]
    return [sum(rows[i][n + j] << i for i in range(n)) for j in range(n)]


def test_rank_matches_independent_elimination():
    rng = random.Random(7)
    for _ in range(50):
        vecs = [rng.randrange(64) for _ in range(rng.randint(0, 6))]
        assert rank(vecs) == rank_mod2(vecs)


# -- bounding cochains ------------------------------------------------------


def test_zero_cochain_leaves_differential_unchanged():
    cf = build_cf(HORIZONTAL, ZIGZAG)
    empty = Mu2(cf, cf, cf, {}, {})
    assert twisted_differential(cf, left=(0, empty)).columns == cf.columns
    assert maurer_cartan(BoundingCochain(0, 0), cf)


def test_maurer_cartan_requires_mu0_to_cancel_mu1():
    cf = build_cf(HORIZONTAL, ZIGZAG)
    xs = {g.point[0]: i for i, g in enumerate(cf.generators)}
    b = 1 << xs[F(3, 8)]
    boundary = cf.mu1(b)
    assert boundary != 0
    assert maurer_cartan(BoundingCochain(b, boundary), cf)
    assert not maurer_cartan(BoundingCochain(b, 0), cf)
    assert not maurer_cartan(BoundingCochain(b, b), cf)


def test_cycle_with_zero_mu0_satisfies_maurer_cartan():
    cf = build_cf(HORIZONTAL, ZIGZAG)
    xs = {g.point[0]: i for i, g in enumerate(cf.generators)}
    cycle = 1 << xs[F(1, 4)]
    assert cf.mu1(cycle) == 0
    assert maurer_cartan(BoundingCochain(cycle, 0), cf)
