"""Immersed bigons and triangles with convex corners, found in the developed plane.

Two independent searches are provided.  :func:`count_bigons` and
:func:`count_triangles` follow lifts of the curves through a fixed lift of
the first corner.  :func:`oracle_enumerate` tiles a window of the plane with
square copies, builds the arrangement of all curve pieces in it and walks
its edges.  Both return discs keyed by the square-crossing word of their
boundary.

Convention: a bigon from ``x+`` to ``x-`` between curves ``a`` and ``b`` has
counterclockwise boundary running along ``a`` from ``x-`` to ``x+`` and then
along ``b`` from ``x+`` to ``x-``.  A triangle with corners ``x`` (on a, b),
``y`` (on b, c), ``z`` (on a, c) runs along ``a`` from ``z`` to ``x``, along
``b`` from ``x`` to ``y`` and along ``c`` from ``y`` to ``z``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .curves import (ImmersedCurve, IntersectionPoint, Lift, Locator, chart_change,
                     fiber_product, is_embedded_lift, lift, retile)
from .exact import (ZERO, Point, dedupe_polygon, ear_clip, is_simple_polygon,
                    lerp, orient, signed_area, sub)
from .surface import IDENTITY, Motion, SquareTiledSurface, sides_containing


class DiscError(ValueError):
    pass


class NonTransverseInput(DiscError):
    pass


class TriplePoint(DiscError):
    pass


class AdmissibilityUnverified(DiscError):
    pass


class RegionBoundTooSmall(DiscError):
    pass


DEFAULT_DEPTH = 4


@dataclass(frozen=True)
class BoundaryArc:
    label: str
    start: Locator
    end: Locator
    direction: int       # +1 along the curve's orientation, -1 against it


@dataclass(frozen=True)
class CombinatorialDisc:
    kind: str                                  # "bigon" or "triangle"
    corners: Tuple[IntersectionPoint, ...]
    arcs: Tuple[BoundaryArc, ...]
    polygon: Tuple[Point, ...]                 # ccw, starts at the first corner
    corner_points: Tuple[Point, ...]
    triangles: Tuple[Tuple[int, int, int], ...]
    deck_word: Tuple[Tuple[int, int], ...]
    chart: int                                 # square whose frame is the planar frame
    area: Fraction
    index: int = 1

    def describe(self) -> str:
        c = " ".join(str(x) for x in self.corners)
        w = ".".join(f"{s}{'BRTL'[d]}" for s, d in self.deck_word) or "-"
        return f"{self.kind} [{c}] word={w} area={self.area}"


# ---------------------------------------------------------------------------
# shared checks


def _check_inputs(curves: Sequence[ImmersedCurve], depth: int, allow_unverified: bool):
    surf = curves[0].surface
    if any(c.surface != surf for c in curves):
        raise DiscError("curves live on different surfaces")
    if not surf.is_flat_torus:
        raise DiscError("disc search needs a flat torus (developing map must be an isometry)")
    if not allow_unverified:
        for c in curves:
            if not is_embedded_lift(c, depth):
                raise AdmissibilityUnverified(
                    f"{c.label}: lift not certified embedded within {depth} periods")
    return surf


def _require_transverse(points: Sequence[IntersectionPoint], what: str):
    for p in points:
        if not p.transverse:
            raise NonTransverseInput(f"{what}: tangential intersection {p}")


def check_triple_points(a, b, c):
    surf = a.surface
    keys = []
    for u, v in ((a, b), (b, c), (a, c)):
        keys.append({surf.canonical(p.square, p.point) for p in fiber_product(u, v)})
    common = keys[0] & keys[1] & keys[2]
    if common:
        raise TriplePoint(f"curves {a.label}, {b.label}, {c.label} share the point {min(common)}")


def boundary_word(surface: SquareTiledSurface, chart: int, polygon: Sequence[Point]):
    """Square-crossing word of a closed planar boundary read in ``chart``'s frame."""
    pts = list(polygon) + [polygon[0]]
    segs, _ = retile(surface, chart, pts, merge=False)
    word = []
    for s, t in zip(segs, segs[1:]):
        if s.square != t.square or s.end != t.start:
            sides = [x for x in sides_containing(s.end) if surface.partner(s.square, x)[0] == t.square]
            word.append((s.square, sides[0]))
    return tuple(word)


def certify(polygon: Sequence[Point], corner_points: Sequence[Point]):
    """Immersion certificate for a boundary walk, or ``None`` with no certificate.

    Requires a simple counterclockwise polygon, strict left turns at every
    marked corner and a complete ear-clipping triangulation.
    """
    poly = [p for i, p in enumerate(polygon) if i == 0 or p != polygon[i - 1]]
    if len(poly) > 1 and poly[0] == poly[-1]:
        poly.pop()
    if len(poly) < 3 or signed_area(poly) <= 0:
        return None
    n = len(poly)
    for c in corner_points:
        if c not in poly:
            return None
        i = poly.index(c)
        if orient(poly[i - 1], poly[i], poly[(i + 1) % n]) <= 0:
            return None
    if not is_simple_polygon(poly):
        return None
    core = dedupe_polygon(poly)
    tris = ear_clip(core)
    if tris is None:
        return None
    total = sum((orient(core[i], core[j], core[k]) for i, j, k in tris), ZERO) / 2
    if total != signed_area(core):
        return None
    return poly, core, tris


def revalidate(disc: CombinatorialDisc, surface: SquareTiledSurface) -> bool:
    res = certify(disc.polygon, disc.corner_points)
    if res is None:
        return False
    if disc.polygon[0] != disc.corner_points[0]:
        return False
    return boundary_word(surface, disc.chart, disc.polygon) == disc.deck_word


def _make_disc(kind, surface, chart, corners, arcs, polygon, corner_points):
    res = certify(polygon, corner_points)
    if res is None:
        return None
    poly, core, tris = res
    i0 = poly.index(corner_points[0])
    poly = poly[i0:] + poly[:i0]
    word = boundary_word(surface, chart, poly)
    return CombinatorialDisc(kind, tuple(corners), tuple(arcs), tuple(poly), tuple(corner_points),
                             tuple(tris), word, chart, signed_area(core))


def _dedupe(discs: List[CombinatorialDisc]) -> List[CombinatorialDisc]:
    seen = {}
    for d in discs:
        seen.setdefault(d.deck_word, d)
    return [seen[k] for k in sorted(seen)]


# ---------------------------------------------------------------------------
# lift-based search


@dataclass(frozen=True)
class _Pos:
    piece: int
    u: Fraction
    point: Point

    def key(self):
        return (self.piece, self.u)


def _base_pos(L: Lift) -> _Pos:
    return _Pos(L.base, ZERO, L.vertices[L.base].point)


def _arc(L: Lift, p: _Pos, q: _Pos) -> Tuple[List[Point], int]:
    """Planar points of the lift from p to q and the direction travelled."""
    if p.key() == q.key():
        return [], 0
    if p.key() < q.key():
        pts = [p.point] + [L.vertices[k].point for k in range(p.piece + 1, q.piece + 1)] + [q.point]
        direction = 1
    else:
        rev, _ = _arc(L, q, p)
        pts, direction = rev[::-1], -1
    out = []
    for x in pts:
        if not out or out[-1] != x:
            out.append(x)
    return out, direction


def _copies(L: Lift, loc: Locator) -> List[_Pos]:
    return [_Pos(i, u, pt) for i, u, pt in L.copies(loc)]


def _lift_through(curve: ImmersedCurve, loc: Locator, frame: Motion, depth: int) -> Lift:
    steps = depth * curve.nseg(loc.component)
    return lift(curve, loc, frame, steps, steps)


def _frame_at(curve: ImmersedCurve, loc: Locator, other: ImmersedCurve, oloc: Locator,
              frame: Motion) -> Motion:
    """Frame for ``other``'s segment at a shared point, given ``curve``'s frame there."""
    sq, p = curve.point(loc)
    osq, op = other.point(oloc)
    return frame.then(chart_change(curve.surface, osq, op, sq, p))


def count_bigons(a: ImmersedCurve, b: ImmersedCurve, x_plus: IntersectionPoint,
                 x_minus: IntersectionPoint, depth: int = DEFAULT_DEPTH,
                 allow_unverified: bool = False, check: bool = True) -> List[CombinatorialDisc]:
    """Convex immersed bigons from ``x_plus`` to ``x_minus`` (``a`` then ``b`` convention)."""
    surf = _check_inputs([a, b], depth, allow_unverified)
    if check:
        _require_transverse(fiber_product(a, b), f"{a.label} x {b.label}")
    chart = a.segment(x_plus.a.component, x_plus.a.segment).square
    La = _lift_through(a, x_plus.a, IDENTITY, depth)
    Lb = _lift_through(b, x_plus.b, _frame_at(a, x_plus.a, b, x_plus.b, IDENTITY), depth)
    P = _base_pos(La)
    Pb = _base_pos(Lb)
    b_copies = {q.point: q for q in _copies(Lb, x_minus.b)}
    discs = []
    for qa in _copies(La, x_minus.a):
        qb = b_copies.get(qa.point)
        if qb is None:
            continue
        b_pts, db = _arc(Lb, Pb, qb)
        a_pts, da = _arc(La, qa, P)
        if not b_pts or not a_pts:
            continue
        poly = b_pts[:-1] + a_pts[:-1]
        arcs = (BoundaryArc(b.label, x_plus.b, x_minus.b, db),
                BoundaryArc(a.label, x_minus.a, x_plus.a, da))
        d = _make_disc("bigon", surf, chart, (x_plus, x_minus), arcs, poly, [P.point, qa.point])
        if d is not None:
            discs.append(d)
    return _dedupe(discs)


def count_triangles(a: ImmersedCurve, b: ImmersedCurve, c: ImmersedCurve,
                    x: IntersectionPoint, y: IntersectionPoint, z: IntersectionPoint,
                    depth: int = DEFAULT_DEPTH, allow_unverified: bool = False,
                    check: bool = True) -> List[CombinatorialDisc]:
    """Convex immersed triangles; ``x`` in a x b, ``y`` in b x c, ``z`` in a x c."""
    surf = _check_inputs([a, b, c], depth, allow_unverified)
    if check:
        for u, v in ((a, b), (b, c), (a, c)):
            _require_transverse(fiber_product(u, v), f"{u.label} x {v.label}")
        check_triple_points(a, b, c)
    chart = a.segment(x.a.component, x.a.segment).square
    La = _lift_through(a, x.a, IDENTITY, depth)
    Lb = _lift_through(b, x.b, _frame_at(a, x.a, b, x.b, IDENTITY), depth)
    X = _base_pos(La)
    Xb = _base_pos(Lb)
    za_copies = _copies(La, z.a)
    discs = []
    for yb in _copies(Lb, y.a):
        fb = Lb.vertices[yb.piece].frame
        Lc = _lift_through(c, y.b, _frame_at(b, y.a, c, y.b, fb), depth)
        Yc = _base_pos(Lc)
        zc_by_point = {q.point: q for q in _copies(Lc, z.b)}
        for za in za_copies:
            zc = zc_by_point.get(za.point)
            if zc is None:
                continue
            b_pts, db = _arc(Lb, Xb, yb)
            c_pts, dc = _arc(Lc, Yc, zc)
            a_pts, da = _arc(La, za, X)
            if not (b_pts and c_pts and a_pts):
                continue
            poly = b_pts[:-1] + c_pts[:-1] + a_pts[:-1]
            arcs = (BoundaryArc(b.label, x.b, y.a, db), BoundaryArc(c.label, y.b, z.b, dc),
                    BoundaryArc(a.label, z.a, x.a, da))
            d = _make_disc("triangle", surf, chart, (x, y, z), arcs, poly,
                           [X.point, yb.point, za.point])
            if d is not None:
                discs.append(d)
    return _dedupe(discs)


# ---------------------------------------------------------------------------
# oracle: arrangement walk in a tiled window


@dataclass
class _Arrangement:
    segs: List[Tuple[int, int, int, Point, Point]]           # curve, comp, seg, start, end
    succ: Dict[int, int]
    pred: Dict[int, int]
    by_seg: Dict[Tuple[int, int, int], List[int]]


def _tile_window(surface: SquareTiledSurface, chart: int, lo: Point, hi: Point):
    """All (square, frame) copies meeting the box, found by breadth-first unfolding."""
    def inside(fr: Motion):
        corners = [fr(p) for p in ((ZERO, ZERO), (1, 0), (1, 1), (0, 1))]
        xs = [p[0] for p in corners]
        ys = [p[1] for p in corners]
        return not (max(xs) < lo[0] or min(xs) > hi[0] or max(ys) < lo[1] or min(ys) > hi[1])

    start = (chart, IDENTITY)
    seen = {start}
    queue = [start]
    while queue:
        sq, fr = queue.pop()
        for s in range(4):
            j, _ = surface.partner(sq, s)
            fr2 = fr.then(surface.transition(sq, s))
            key = (j, fr2)
            if key in seen or not inside(fr2):
                continue
            seen.add(key)
            queue.append(key)
    return sorted(seen, key=lambda k: (k[0], k[1].k, k[1].tx, k[1].ty))


def _build_arrangement(curves: Sequence[ImmersedCurve], copies) -> _Arrangement:
    segs = []
    by_start, by_end = {}, {}
    by_seg: Dict[Tuple[int, int, int], List[int]] = {}
    for sq, fr in copies:
        for ci, curve in enumerate(curves):
            for comp, csegs in enumerate(curve.components):
                for k, s in enumerate(csegs):
                    if s.square != sq:
                        continue
                    idx = len(segs)
                    p, q = fr(s.start), fr(s.end)
                    segs.append((ci, comp, k, p, q))
                    by_start[(ci, comp, k, p)] = idx
                    by_end[(ci, comp, k, q)] = idx
                    by_seg.setdefault((ci, comp, k), []).append(idx)
    succ, pred = {}, {}
    for idx, (ci, comp, k, p, q) in enumerate(segs):
        n = curves[ci].nseg(comp)
        j = by_start.get((ci, comp, (k + 1) % n, q))
        if j is not None:
            succ[idx] = j
            pred[j] = idx
    return _Arrangement(segs, succ, pred, by_seg)


def _where(arr: _Arrangement, ci: int, loc: Locator, point: Optional[Point] = None):
    """Arrangement pieces carrying ``loc`` of curve ``ci`` (optionally at ``point``)."""
    out = []
    for idx in arr.by_seg.get((ci, loc.component, loc.segment), ()):
        _, _, _, p, q = arr.segs[idx]
        pt = lerp(p, q, loc.t)
        if point is None or pt == point:
            out.append((idx, pt))
    return out


def oracle_enumerate(curves: Sequence[ImmersedCurve], corners: Sequence[IntersectionPoint],
                     bound: Optional[Fraction] = None, depth: int = DEFAULT_DEPTH) -> List[CombinatorialDisc]:
    """Exhaustive arrangement search for bigons (2 curves) or triangles (3 curves).

    ``curves``/``corners`` are ``(a, b), (x+, x-)`` or ``(a, b, c), (x, y, z)``
    with the conventions of :func:`count_bigons` and :func:`count_triangles`.
    Each boundary arc may run over at most ``depth`` periods of its curve
    (``depth * nseg`` pieces of positive length), the same truncation the
    lifting search uses.  The window is the box of half-width ``bound``
    around the first corner.  The default is half the longest possible
    perimeter, so every admissible disc fits; a disc reaching within one unit
    of the edge of a smaller explicit window raises
    :class:`RegionBoundTooSmall`.
    """
    surf = curves[0].surface
    if not surf.is_flat_torus:
        raise DiscError("disc search needs a flat torus (developing map must be an isometry)")
    explicit = bound is not None
    if len(curves) == 2:
        a, b = curves
        xp, xm = corners
        kind = "bigon"
        # legs: b from x+ to x-, a from x- to x+
        legs = [(1, xp.b, xm.b, 0, xm.a), (0, xm.a, xp.a, None, None)]
        labels = [b.label, a.label]
        first_loc = xp.a
    elif len(curves) == 3:
        a, b, c = curves
        x, y, z = corners
        kind = "triangle"
        legs = [(1, x.b, y.a, 2, y.b), (2, y.b, z.b, 0, z.a), (0, z.a, x.a, None, None)]
        labels = [b.label, c.label, a.label]
        first_loc = x.a
    else:
        raise DiscError("oracle handles bigons and triangles only")

    caps = [depth * curves[leg[0]].nseg(leg[1].component) for leg in legs]
    if not explicit:
        # every boundary point is within half the perimeter of the first corner
        bound = sum(depth * _period_length(curves[leg[0]], leg[1].component) for leg in legs) / 2 + 1
    bound = Fraction(bound)
    chart = a.segment(first_loc.component, first_loc.segment).square
    P0 = a.segment(first_loc.component, first_loc.segment).at(first_loc.t)
    lo = (P0[0] - bound, P0[1] - bound)
    hi = (P0[0] + bound, P0[1] + bound)
    copies = _tile_window(surf, chart, lo, hi)
    arr = _build_arrangement(curves, copies)
    start_hits = _where(arr, 1, legs[0][1], P0)
    if not start_hits:
        return []

    found: List[CombinatorialDisc] = []
    limit = len(arr.segs) + 1

    def walk(leg: int, idx: int, point: Point, path: List[Point], corner_pts: List[Point],
             arcs: List[BoundaryArc]):
        ci, sloc, eloc, nxt_ci, nxt_loc = legs[leg]
        for direction in (1, -1):
            cur, here = idx, point
            pts = [point]
            entered = False
            used = 0    # pieces of positive length already on this arc
            for _ in range(limit):
                _, comp, k, p, q = arr.segs[cur]
                # candidate ends on this piece, strictly ahead of `here`
                cand = []
                if (comp, k) == (eloc.component, eloc.segment):
                    e = lerp(p, q, eloc.t)
                    pe, ph = _param(p, q, e), _param(p, q, here)
                    if direction == 1:
                        ahead = pe > ph or (entered and pe == ph)
                    else:
                        ahead = pe < ph
                    if ahead and used + (e != here) <= caps[leg]:
                        cand.append(e)
                for e in cand:
                    leg_pts = pts + [e]
                    arc = BoundaryArc(labels[leg], sloc, eloc, direction)
                    if nxt_ci is None:
                        if e == P0:
                            poly = path + leg_pts[:-1]
                            poly = [v for i, v in enumerate(poly) if i == 0 or v != poly[i - 1]]
                            d = _make_disc(kind, surf, chart, corners, arcs + [arc], poly, corner_pts)
                            if d is not None:
                                found.append(d)
                    else:
                        for j, _ in _where(arr, nxt_ci, nxt_loc, e):
                            walk(leg + 1, j, e, path + leg_pts[:-1], corner_pts + [e], arcs + [arc])
                # advance
                nxt_point = q if direction == 1 else p
                used += nxt_point != here
                if used > caps[leg]:
                    break
                pts.append(nxt_point)
                here = nxt_point
                step = arr.succ.get(cur) if direction == 1 else arr.pred.get(cur)
                if step is None:
                    break
                cur = step
                entered = True

    for idx, _ in start_hits:
        walk(0, idx, P0, [], [P0], [])
    inner_lo = (lo[0] + 1, lo[1] + 1)
    inner_hi = (hi[0] - 1, hi[1] - 1)
    for d in found if explicit else ():
        for v in d.polygon:
            if not (inner_lo[0] <= v[0] <= inner_hi[0] and inner_lo[1] <= v[1] <= inner_hi[1]):
                raise RegionBoundTooSmall(f"disc {d.describe()} reaches the edge of the window")
    return _dedupe(found)


def _period_length(curve: ImmersedCurve, component: int) -> Fraction:
    """Sup-norm length of one period of a component."""
    return sum((max(abs(s.direction[0]), abs(s.direction[1])) for s in curve.components[component]),
               Fraction(0))


def _param(p: Point, q: Point, x: Point) -> Fraction:
    d = sub(q, p)
    if d[0] != 0:
        return (x[0] - p[0]) / d[0]
    return (x[1] - p[1]) / d[1]


def deck_words(discs: Sequence[CombinatorialDisc]) -> Counter:
    return Counter(d.deck_word for d in discs)
