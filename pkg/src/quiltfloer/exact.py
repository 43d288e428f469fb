"""Exact planar geometry over the rationals.

Points are plain ``(x, y)`` tuples of :class:`fractions.Fraction`.  Every
predicate here is exact; nothing takes a tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Tuple

Point = Tuple[Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise TypeError("floats are not accepted; use p/q strings or Fractions")
    return Fraction(v)


def pt(x, y) -> Point:
    return (frac(x), frac(y))


def add(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def scale(p: Point, c) -> Point:
    return (p[0] * c, p[1] * c)


def lerp(p: Point, q: Point, t) -> Point:
    return (p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)


def dot(p: Point, q: Point) -> Fraction:
    return p[0] * q[0] + p[1] * q[1]


def cross(p: Point, q: Point) -> Fraction:
    return p[0] * q[1] - p[1] * q[0]


def orient(a: Point, b: Point, c: Point) -> Fraction:
    """Twice the signed area of triangle abc (positive when counterclockwise)."""
    return cross(sub(b, a), sub(c, a))


def sign(x) -> int:
    return (x > 0) - (x < 0)


def norm2(p: Point) -> Fraction:
    return dot(p, p)


def rot90(p: Point, k: int = 1) -> Point:
    k %= 4
    x, y = p
    if k == 0:
        return (x, y)
    if k == 1:
        return (-y, x)
    if k == 2:
        return (-x, -y)
    return (y, -x)


def half_plane(v: Point) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2pi)
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def angle_key_lt(u: Point, v: Point) -> bool:
    """Strict comparison of the polar angles of two nonzero vectors in [0, 2pi)."""
    hu, hv = half_plane(u), half_plane(v)
    if hu != hv:
        return hu < hv
    return cross(u, v) > 0


def same_direction(u: Point, v: Point) -> bool:
    return cross(u, v) == 0 and dot(u, v) > 0


def ccw_angle_less_than_pi(u: Point, v: Point) -> bool:
    """True when rotating ``u`` counterclockwise to ``v`` takes strictly between 0 and pi."""
    return cross(u, v) > 0


def on_segment(p: Point, a: Point, b: Point) -> bool:
    if orient(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segment_param(p: Point, a: Point, b: Point) -> Fraction:
    d = sub(b, a)
    if d[0] != 0:
        return (p[0] - a[0]) / d[0]
    return (p[1] - a[1]) / d[1]


def bbox_overlap(a: Point, b: Point, c: Point, d: Point) -> bool:
    return not (max(a[0], b[0]) < min(c[0], d[0]) or max(c[0], d[0]) < min(a[0], b[0])
                or max(a[1], b[1]) < min(c[1], d[1]) or max(c[1], d[1]) < min(a[1], b[1]))


def segment_intersection(a: Point, b: Point, c: Point, d: Point):
    """Intersect closed segments ab and cd.

    Returns ``None`` when disjoint, ``("point", s, t)`` for a single point at
    parameters s on ab and t on cd, or ``("overlap", (s0, t0), (s1, t1))``
    for collinear overlaps (parameters of the overlap's two ends).
    """
    if not bbox_overlap(a, b, c, d):
        return None
    r = sub(b, a)
    s = sub(d, c)
    denom = cross(r, s)
    qp = sub(c, a)
    if denom != 0:
        u = cross(qp, s) / denom
        v = cross(qp, r) / denom
        if 0 <= u <= 1 and 0 <= v <= 1:
            return ("point", u, v)
        return None
    if cross(qp, r) != 0:
        return None
    # collinear
    rr = dot(r, r)
    t0 = dot(qp, r) / rr
    t1 = t0 + dot(s, r) / rr
    lo, hi = max(ZERO, min(t0, t1)), min(ONE, max(t0, t1))
    if lo > hi:
        return None

    def back(tab):
        p = lerp(a, b, tab)
        return segment_param(p, c, d)

    if lo == hi:
        return ("point", lo, back(lo))
    return ("overlap", (lo, back(lo)), (hi, back(hi)))


def point_segment_dist2(p: Point, a: Point, b: Point) -> Fraction:
    d = sub(b, a)
    dd = dot(d, d)
    if dd == 0:
        return norm2(sub(p, a))
    t = dot(sub(p, a), d) / dd
    t = min(ONE, max(ZERO, t))
    return norm2(sub(p, lerp(a, b, t)))


def segment_segment_dist2(a: Point, b: Point, c: Point, d: Point) -> Fraction:
    if segment_intersection(a, b, c, d) is not None:
        return ZERO
    return min(point_segment_dist2(a, c, d), point_segment_dist2(b, c, d),
               point_segment_dist2(c, a, b), point_segment_dist2(d, a, b))


def signed_area(poly: Sequence[Point]) -> Fraction:
    n = len(poly)
    return sum((cross(poly[i], poly[(i + 1) % n]) for i in range(n)), ZERO) / 2


def dedupe_polygon(poly: Sequence[Point]) -> list:
    """Drop repeated consecutive vertices and collinear pass-through vertices."""
    pts = []
    for p in poly:
        if not pts or pts[-1] != p:
            pts.append(p)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if orient(a, b, c) == 0 and dot(sub(b, a), sub(c, b)) > 0:
                del pts[i]
                changed = True
                break
    return pts


def is_simple_polygon(poly: Sequence[Point]) -> bool:
    """Exact O(n^2) test that a closed polygon has no self-contact.

    Consecutive edges may only share their common vertex; a zero-angle spike
    (edge folding back onto its predecessor) counts as self-contact.
    """
    n = len(poly)
    if n < 3:
        return False
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        if a == b:
            return False
        for j in range(i + 1, n):
            c, d = edges[j]
            hit = segment_intersection(a, b, c, d)
            if hit is None:
                continue
            if hit[0] == "overlap":
                return False
            _, s, t = hit
            if j == i + 1:
                if not (s == 1 and t == 0):
                    return False
            elif i == 0 and j == n - 1:
                if not (s == 0 and t == 1):
                    return False
            else:
                return False
    return True


def point_in_triangle_strict(p: Point, a: Point, b: Point, c: Point) -> bool:
    return orient(a, b, p) > 0 and orient(b, c, p) > 0 and orient(c, a, p) > 0


def point_in_triangle_closed(p: Point, a: Point, b: Point, c: Point) -> bool:
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0


def ear_clip(poly: Sequence[Point]):
    """Triangulate a counterclockwise simple polygon by ear clipping.

    Returns a list of index triples, or ``None`` if no ear can be found at
    some stage (which certifies that the input was not a ccw simple polygon).
    """
    idx = list(range(len(poly)))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * len(poly) ** 2 + 10:
            return None
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = poly[i0], poly[i1], poly[i2]
            if orient(a, b, c) <= 0:
                continue
            blocked = False
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                q = poly[j]
                if q in (a, b, c) or point_in_triangle_closed(q, a, b, c):
                    blocked = True
                    break
            if blocked:
                continue
            tris.append((i0, i1, i2))
            del idx[k]
            break
        else:
            return None
    if len(idx) == 3:
        a, b, c = (poly[i] for i in idx)
        if orient(a, b, c) <= 0:
            return None
        tris.append(tuple(idx))
    return tris


def winding_number(p: Point, poly: Sequence[Point]) -> int:
    """Winding number of a closed polygon around a point not on it."""
    w = 0
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if a[1] <= p[1]:
            if b[1] > p[1] and orient(a, b, p) > 0:
                w += 1
        elif b[1] <= p[1] and orient(a, b, p) < 0:
            w -= 1
    return w


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_point(p: Point) -> str:
    return f"{fmt(p[0])},{fmt(p[1])}"


def parse_frac(s: str) -> Fraction:
    s = s.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"decimal literal not allowed: {s!r}")
    return Fraction(s)


def parse_point(s: str) -> Point:
    x, y = s.split(",")
    return (parse_frac(x), parse_frac(y))


def bounding_box(points: Iterable[Point]):
    pts = list(points)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)
