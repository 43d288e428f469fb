"""Independent brute-force oracles for the test suite.

Nothing here calls the library's geometry: curves are handled as developed
planar polylines (one period each) on a rectangular torus ``R^2 / (W Z x H Z)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence, Tuple

Point = Tuple[Fraction, Fraction]


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def crossing_params(p: Point, q: Point, r: Point, s: Point):
    """Parameters (t, u) with p + t(q-p) = r + u(s-r), or None if parallel."""
    d1, d2 = _sub(q, p), _sub(s, r)
    den = _cross(d1, d2)
    if den == 0:
        return None
    w = _sub(r, p)
    return _cross(w, d2) / den, _cross(w, d1) / den


def period_crossings(a: Sequence[Point], b: Sequence[Point], width: int = 1,
                     height: int = 1) -> List[Point]:
    """Points of ``a`` x ``b`` on the torus, counted once per pair of curve positions.

    ``a`` and ``b`` are one developed period each (last vertex is a lift of the
    first).  Every segment is half-open at its end, so each curve position is
    counted exactly once; translates of ``b`` by the lattice are scanned.
    """
    sa = list(zip(a, a[1:]))
    sb = list(zip(b, b[1:]))
    xs = [p[0] for p in a] + [p[0] for p in b]
    ys = [p[1] for p in a] + [p[1] for p in b]
    span_x = math.ceil((max(xs) - min(xs)) / width) + 1
    span_y = math.ceil((max(ys) - min(ys)) / height) + 1
    hits = []
    for i in range(-span_x, span_x + 1):
        for j in range(-span_y, span_y + 1):
            off = (Fraction(i * width), Fraction(j * height))
            for p, q in sa:
                for r, s in sb:
                    r2 = (r[0] + off[0], r[1] + off[1])
                    s2 = (s[0] + off[0], s[1] + off[1])
                    res = crossing_params(p, q, r2, s2)
                    if res is None:
                        continue
                    t, u = res
                    if 0 <= t < 1 and 0 <= u < 1:
                        hits.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return hits


def wiggle_points(direction, base, offsets) -> List[Point]:
    """Developed period of a wiggled geodesic, rebuilt from its defining data."""
    p, q = direction
    bx, by = Fraction(base[0]), Fraction(base[1])
    m = len(offsets) + 1
    pts = [(bx, by)]
    for i, off in enumerate(offsets, start=1):
        t = Fraction(i, m)
        pts.append((bx + p * t - q * Fraction(off), by + q * t + p * Fraction(off)))
    pts.append((bx + p, by + q))
    return pts


def translate(pts: Sequence[Point], dx, dy) -> List[Point]:
    return [(x + dx, y + dy) for x, y in pts]


def repeat_period(pts: Sequence[Point], times: int) -> List[Point]:
    """Concatenate ``times`` consecutive periods of a developed closed curve."""
    shift = _sub(pts[-1], pts[0])
    out = list(pts)
    for k in range(1, times):
        out += [(x + k * shift[0], y + k * shift[1]) for x, y in pts[1:]]
    return out


def shoelace(poly: Sequence[Point]) -> Fraction:
    n = len(poly)
    return sum((_cross(poly[i], poly[(i + 1) % n]) for i in range(n)), Fraction(0)) / 2


def point_in_closed_polygon(p: Point, poly: Sequence[Point]) -> bool:
    """Closed point-in-polygon test by ray casting, with explicit boundary check."""
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if _cross(_sub(b, a), _sub(p, a)) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) \
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
            return True
    inside = False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if (a[1] > p[1]) != (b[1] > p[1]):
            x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if x > p[0]:
                inside = not inside
    return inside


def rank_mod2(vectors: Sequence[int]) -> int:
    """Gaussian elimination over the two-element field, written from scratch."""
    rows = [v for v in vectors if v]
    rank = 0
    while rows:
        pivot = rows.pop()
        if not pivot:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
        rows = [r for r in rows if r]
    return rank
