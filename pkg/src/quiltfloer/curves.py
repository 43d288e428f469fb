"""Piecewise-linear immersed (multi)curves on square-tiled surfaces.

A curve is a cyclic list of straight :class:`Segment` s, each inside one unit
square.  Consecutive segments meet either inside a square (a bend) or on a
glued side, where the end point of one and the start point of the next are
identified by the gluing.  Bends may sit anywhere except on square corners.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import (ONE, ZERO, Point, add, angle_key_lt, cross, dot, is_simple_polygon,
                    lerp, norm2, same_direction, segment_intersection, sub, dedupe_polygon,
                    fmt_point)
from .surface import (IDENTITY, Motion, SquareTiledSurface, in_closed_square, is_corner,
                      sides_containing)


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    square: int
    start: Point
    end: Point

    @property
    def direction(self) -> Point:
        return sub(self.end, self.start)

    def at(self, t) -> Point:
        return lerp(self.start, self.end, t)

    def reversed(self) -> "Segment":
        return Segment(self.square, self.end, self.start)


@dataclass(frozen=True, order=True)
class Locator:
    """Position on a curve: component, segment index, parameter in [0, 1)."""

    component: int
    segment: int
    t: Fraction

    def __str__(self):
        t = self.t
        ts = str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"
        return f"{self.component}:{self.segment}@{ts}"


@dataclass(frozen=True, eq=False)
class ImmersedCurve:
    """Closed PL immersed multicurve.

    ``provenance`` is optional bookkeeping attached by composition: one tuple
    per component, one entry per segment.
    """

    surface: SquareTiledSurface
    components: Tuple[Tuple[Segment, ...], ...]
    label: str = "L"
    provenance: Optional[Tuple[Tuple[object, ...], ...]] = field(default=None, compare=False)

    def __post_init__(self):
        validate_curve(self)

    def __eq__(self, other):
        if not isinstance(other, ImmersedCurve):
            return NotImplemented
        return self.surface == other.surface and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    @property
    def segments(self) -> Tuple[Segment, ...]:
        if len(self.components) != 1:
            raise CurveError(f"{self.label} has {len(self.components)} components")
        return self.components[0]

    def segment(self, comp: int, k: int) -> Segment:
        segs = self.components[comp]
        return segs[k % len(segs)]

    def nseg(self, comp: int = 0) -> int:
        return len(self.components[comp])

    def point(self, loc: Locator) -> Tuple[int, Point]:
        seg = self.segment(loc.component, loc.segment)
        return seg.square, seg.at(loc.t)

    def normalize(self, comp: int, k: int, t) -> Locator:
        n = self.nseg(comp)
        t = Fraction(t)
        if t == 1:
            return Locator(comp, (k + 1) % n, ZERO)
        return Locator(comp, k % n, t)

    def with_label(self, label: str) -> "ImmersedCurve":
        return ImmersedCurve(self.surface, self.components, label, self.provenance)

    def component_curve(self, i: int, label: Optional[str] = None) -> "ImmersedCurve":
        prov = None if self.provenance is None else (self.provenance[i],)
        return ImmersedCurve(self.surface, (self.components[i],), label or f"{self.label}#{i}", prov)

    def __repr__(self):
        sizes = ",".join(str(len(c)) for c in self.components)
        return f"ImmersedCurve({self.label!r}, segments=[{sizes}])"


# ---------------------------------------------------------------------------
# chart changes and validation


def chart_change(surface: SquareTiledSurface, sq_from: int, p_from: Point,
                 sq_to: int, p_to: Point) -> Motion:
    """Motion carrying ``sq_from`` coordinates to ``sq_to`` coordinates near a shared point."""
    if sq_from == sq_to and p_from == p_to:
        return IDENTITY
    for s in sides_containing(p_from):
        j, s2 = surface.partner(sq_from, s)
        if j != sq_to:
            continue
        m = surface.transition(sq_from, s).inverse()
        if m(p_from) == p_to:
            return m
    raise CurveError(f"points {(sq_from, p_from)} and {(sq_to, p_to)} are not adjacent charts")


def _linked(surface, a: Segment, b: Segment) -> Optional[Motion]:
    """Chart change from ``a``'s square to ``b``'s square if ``a`` ends where ``b`` starts."""
    if a.square == b.square and a.end == b.start:
        return IDENTITY
    try:
        return chart_change(surface, a.square, a.end, b.square, b.start)
    except CurveError:
        return None


def validate_curve(curve: ImmersedCurve) -> None:
    surf = curve.surface
    if not curve.components:
        raise CurveError("curve has no components")
    for ci, segs in enumerate(curve.components):
        if not segs:
            raise CurveError(f"component {ci} is empty")
        n = len(segs)
        for k, s in enumerate(segs):
            if not 0 <= s.square < surf.n:
                raise CurveError(f"segment {k}: bad square {s.square}")
            for p in (s.start, s.end):
                if not in_closed_square(p):
                    raise CurveError(f"segment {k}: point {p} outside its square")
                if is_corner(p):
                    raise CurveError(f"segment {k}: vertex on a square corner")
            if s.start == s.end:
                raise CurveError(f"segment {k}: zero length")
            if set(sides_containing(s.start)) & set(sides_containing(s.end)):
                raise CurveError(f"segment {k}: runs along a square side")
        for k in range(n):
            a, b = segs[k], segs[(k + 1) % n]
            m = _linked(surf, a, b)
            if m is None:
                raise CurveError(f"component {ci}: segments {k} and {(k + 1) % n} do not meet")
            din = m.linear(a.direction)
            dout = b.direction
            if cross(din, dout) == 0 and dot(din, dout) < 0:
                raise CurveError(f"component {ci}: curve doubles back at vertex {(k + 1) % n}")


# ---------------------------------------------------------------------------
# construction from planar polylines


def merge_collinear(segs: List[Segment], cyclic: bool = True) -> List[Segment]:
    out: List[Segment] = []
    for s in segs:
        if out:
            p = out[-1]
            if (p.square == s.square and p.end == s.start and cross(p.direction, s.direction) == 0
                    and dot(p.direction, s.direction) > 0):
                out[-1] = Segment(p.square, p.start, s.end)
                continue
        out.append(s)
    if cyclic and len(out) > 1:
        a, b = out[-1], out[0]
        if (a.square == b.square and a.end == b.start and cross(a.direction, b.direction) == 0
                and dot(a.direction, b.direction) > 0):
            out[0] = Segment(a.square, a.start, b.end)
            out.pop()
    return out


def retile(surface: SquareTiledSurface, square: int, points: Sequence[Point],
           merge: bool = True) -> Tuple[List[Segment], Tuple[int, Point, Motion]]:
    """Cut a planar polyline (in ``square``'s frame) into per-square segments.

    Returns the segments and the end chart ``(square, local point, frame)``.
    Raises :class:`CornerHit` when the polyline touches a square corner.
    """
    if not in_closed_square(points[0]):
        square, p0 = surface.locate(square, points[0])
        shift = sub(p0, points[0])
        points = [add(p, shift) for p in points]
    segs: List[Segment] = []
    cur, frame = square, IDENTITY
    here = points[0]
    for nxt in points[1:]:
        target = frame.inverse()(nxt)
        pieces, (cur2, end, fr) = surface.walk(cur, here, target)
        for sq, a, b in pieces:
            segs.append(Segment(sq, a, b))
        frame = frame.then(fr)
        cur, here = cur2, end
    if merge:
        segs = merge_collinear(segs, cyclic=False)
    return segs, (cur, here, frame)


def curve_from_polyline(surface: SquareTiledSurface, square: int, points: Sequence[Point],
                        label: str = "L") -> ImmersedCurve:
    """Build a closed curve from developed vertices ``v0 .. vm``.

    ``vm`` must be a lift of ``v0`` (same ambient point), e.g. ``v0`` plus a
    period vector on a translation torus.  A contractible loop simply repeats
    ``v0`` at the end.
    """
    pts = [tuple(map(Fraction, p)) for p in points]
    segs, (sq_end, p_end, _) = retile(surface, square, pts)
    if not segs:
        raise CurveError("empty polyline")
    first = segs[0]
    if surface.canonical(sq_end, p_end) != surface.canonical(first.square, first.start):
        raise CurveError("polyline does not close up on the surface")
    segs = merge_collinear(segs, cyclic=True)
    return ImmersedCurve(surface, (tuple(segs),), label)


def multicurve(curves: Iterable[ImmersedCurve], label: str = "L") -> ImmersedCurve:
    curves = list(curves)
    comps = tuple(c for cv in curves for c in cv.components)
    provs = [cv.provenance for cv in curves]
    prov = None
    if all(p is not None for p in provs):
        prov = tuple(p for pv in provs for p in pv)
    return ImmersedCurve(curves[0].surface, comps, label, prov)


def canonical_components(curve: ImmersedCurve):
    """Rotation-normalised components, for comparing curves up to re-parameterisation."""
    out = []
    for segs in curve.components:
        segs = merge_collinear(list(segs), cyclic=True)
        n = len(segs)
        keys = [tuple((s.square, s.start, s.end) for s in segs[i:] + segs[:i]) for i in range(n)]
        out.append(min(keys))
    return sorted(out)


def same_curve(a: ImmersedCurve, b: ImmersedCurve) -> bool:
    return a.surface == b.surface and canonical_components(a) == canonical_components(b)


# ---------------------------------------------------------------------------
# tangent rays and intersections


def rays_at(curve: ImmersedCurve, loc: Locator) -> Tuple[int, Point, List[Point]]:
    """Chart ``(square, point)`` at a locator and the [incoming, outgoing] tangent rays.

    The incoming ray points backwards along the curve.
    """
    seg = curve.segment(loc.component, loc.segment)
    p = seg.at(loc.t)
    d = seg.direction
    if loc.t != 0:
        return seg.square, p, [(-d[0], -d[1]), d]
    prev = curve.segment(loc.component, loc.segment - 1)
    m = _linked(curve.surface, prev, seg)
    back = m.linear(prev.direction)
    return seg.square, p, [(-back[0], -back[1]), d]


def _classify(rays_a: List[Point], rays_b: List[Point]) -> bool:
    """Transverse crossing test: the four rays are distinct and alternate."""
    tagged = [(r, "a") for r in rays_a] + [(r, "b") for r in rays_b]
    for i in range(4):
        for j in range(i + 1, 4):
            if same_direction(tagged[i][0], tagged[j][0]):
                return False
    # insertion sort by polar angle
    order = []
    for item in tagged:
        pos = 0
        while pos < len(order) and angle_key_lt(order[pos][0], item[0]):
            pos += 1
        order.insert(pos, item)
    labels = [t for _, t in order]
    return labels in (["a", "b", "a", "b"], ["b", "a", "b", "a"])


@dataclass(frozen=True)
class IntersectionPoint:
    """Element of the fiber product: a pair of locators over one ambient point."""

    a: Locator
    b: Locator
    square: int
    point: Point
    transverse: bool

    def swapped(self) -> "IntersectionPoint":
        return IntersectionPoint(self.b, self.a, self.square, self.point, self.transverse)

    def key(self):
        return (self.a, self.b)

    def __str__(self):
        tag = "" if self.transverse else " (tangential)"
        return f"[{self.a} x {self.b} at sq{self.square}({fmt_point(self.point)})]{tag}"


def is_transverse_at(a: ImmersedCurve, la: Locator, b: ImmersedCurve, lb: Locator) -> bool:
    sa, pa, ra = rays_at(a, la)
    sb, pb, rb = rays_at(b, lb)
    m = chart_change(a.surface, sb, pb, sa, pa)
    rb = [m.linear(r) for r in rb]
    return _classify(ra, rb)


def _vertex_locators(curve: ImmersedCurve):
    for ci, segs in enumerate(curve.components):
        for k, s in enumerate(segs):
            yield Locator(ci, k, ZERO), s


def fiber_product(a: ImmersedCurve, b: ImmersedCurve) -> List[IntersectionPoint]:
    """All pairs of preimages over common ambient points, sorted by locators.

    Tangential contacts are kept with ``transverse=False``.  When ``a`` and
    ``b`` are the same curve the diagonal pairs are dropped.
    """
    if a.surface != b.surface:
        raise CurveError("curves live on different surfaces")
    same = a is b
    by_square: Dict[int, List[Tuple[int, int, Segment]]] = {}
    for ci, segs in enumerate(b.components):
        for k, s in enumerate(segs):
            by_square.setdefault(s.square, []).append((ci, k, s))
    found: Dict[Tuple[Locator, Locator], Tuple[int, Point]] = {}
    for ci, segs in enumerate(a.components):
        for k, s in enumerate(segs):
            for cj, m, t in by_square.get(s.square, ()):
                if same and (ci, k) == (cj, m):
                    continue
                hit = segment_intersection(s.start, s.end, t.start, t.end)
                if hit is None:
                    continue
                if hit[0] == "point":
                    params = [(hit[1], hit[2])]
                else:
                    params = [hit[1], hit[2]]
                for u, v in params:
                    la = a.normalize(ci, k, u)
                    lb = b.normalize(cj, m, v)
                    if same and la == lb:
                        continue
                    found[(la, lb)] = a.point(la)
    # vertices sitting on glued sides, touching from different squares
    edge_b: Dict[object, List[Locator]] = {}
    for lb, s in _vertex_locators(b):
        if sides_containing(s.start):
            edge_b.setdefault(b.surface.canonical(s.square, s.start), []).append(lb)
    for la, s in _vertex_locators(a):
        if not sides_containing(s.start):
            continue
        for lb in edge_b.get(a.surface.canonical(s.square, s.start), ()):
            if same and la == lb:
                continue
            found.setdefault((la, lb), a.point(la))
    out = []
    for (la, lb), (sq, p) in sorted(found.items()):
        out.append(IntersectionPoint(la, lb, sq, p, is_transverse_at(a, la, b, lb)))
    return out


def self_intersections(curve: ImmersedCurve) -> List[IntersectionPoint]:
    return fiber_product(curve, curve)


def all_transverse(points: Iterable[IntersectionPoint]) -> bool:
    return all(p.transverse for p in points)


# ---------------------------------------------------------------------------
# developing


@dataclass(frozen=True)
class LiftVertex:
    point: Point          # planar position
    locator: Locator      # curve position of this vertex
    square: int           # square of the segment *leaving* this vertex (forward)
    frame: Motion         # chart of that square in the plane


@dataclass
class Lift:
    """Finite piece of a lift of one component to the developed plane.

    ``vertices[i] -> vertices[i+1]`` is a straight piece lying in one square;
    ``base`` indexes the vertex at the starting locator.
    """

    curve: ImmersedCurve
    component: int
    vertices: List[LiftVertex]
    base: int

    def piece(self, i: int):
        """(segment index, t0, t1, square) of planar piece i."""
        v, w = self.vertices[i], self.vertices[i + 1]
        k = v.locator.segment
        t1 = w.locator.t if w.locator.segment == k and w.locator.t != 0 else ONE
        return k, v.locator.t, t1, v.square

    def copies(self, loc: Locator) -> List[Tuple[int, Fraction, Point]]:
        """Planar occurrences of ``loc``: (piece index, fraction along piece, point)."""
        out = []
        if loc.component != self.component:
            return out
        for i in range(len(self.vertices) - 1):
            k, t0, t1, _ = self.piece(i)
            if k != loc.segment or not (t0 <= loc.t < t1):
                continue
            u = (loc.t - t0) / (t1 - t0)
            out.append((i, u, lerp(self.vertices[i].point, self.vertices[i + 1].point, u)))
        return out

    def points(self) -> List[Point]:
        return [v.point for v in self.vertices]


def lift(curve: ImmersedCurve, loc: Locator, frame: Motion = IDENTITY,
         back: int = 0, fwd: int = 0) -> Lift:
    """Develop ``back`` segment-steps backwards and ``fwd`` forwards from ``loc``."""
    ci = loc.component
    n = curve.nseg(ci)
    surf = curve.surface
    seg = curve.segment(ci, loc.segment)
    base = LiftVertex(frame(seg.at(loc.t)), loc, seg.square, frame)

    fwd_vs = []
    k, fr = loc.segment % n, frame
    for _ in range(fwd):
        s = curve.segment(ci, k)
        nxt = curve.segment(ci, k + 1)
        m = _linked(surf, s, nxt).inverse()  # nxt coords -> s coords
        fr2 = fr.then(m)
        k2 = (k + 1) % n
        fwd_vs.append(LiftVertex(fr(s.end), Locator(ci, k2, ZERO), nxt.square, fr2))
        k, fr = k2, fr2

    back_vs = []
    k, fr = loc.segment % n, frame
    t = loc.t
    for step in range(back):
        s = curve.segment(ci, k)
        if t != 0:
            back_vs.append(LiftVertex(fr(s.start), Locator(ci, k, ZERO), s.square, fr))
            t = ZERO
            continue
        prev = curve.segment(ci, k - 1)
        m = _linked(surf, prev, s)  # prev coords -> s coords
        fr = fr.then(m)
        k = (k - 1) % n
        back_vs.append(LiftVertex(fr(prev.start), Locator(ci, k, ZERO), prev.square, fr))
    back_vs.reverse()
    return Lift(curve, ci, back_vs + [base] + fwd_vs, len(back_vs))


@dataclass(frozen=True)
class DevelopedArc:
    base_point: Point
    points: Tuple[Point, ...]
    deck_word: Tuple[Tuple[int, int], ...]   # (square, side) crossings in order
    squares: Tuple[int, ...]                 # square of each planar segment

    @property
    def segments(self):
        return list(zip(self.points[:-1], self.points[1:]))

    def is_embedded(self) -> bool:
        return polyline_is_simple(list(self.points))


def develop_arc(curve: ImmersedCurve, start: Locator, steps: int) -> DevelopedArc:
    """Planar unfolding of ``steps`` full periods of the component holding ``start``.

    The start square's coordinates are used as the planar frame.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    L = lift(curve, start, IDENTITY, 0, steps * curve.nseg(start.component))
    pts = [v.point for v in L.vertices]
    squares = tuple(v.square for v in L.vertices[:-1])
    word = []
    ci = start.component
    for i in range(1, len(L.vertices)):
        prev_seg = curve.segment(ci, L.vertices[i].locator.segment - 1)
        cur_seg = curve.segment(ci, L.vertices[i].locator.segment)
        if prev_seg.square != cur_seg.square or prev_seg.end != cur_seg.start:
            sides = [s for s in sides_containing(prev_seg.end)
                     if curve.surface.partner(prev_seg.square, s)[0] == cur_seg.square]
            word.append((prev_seg.square, sides[0] if sides else -1))
    return DevelopedArc(pts[0], tuple(pts), tuple(word), squares)


def holonomy(curve: ImmersedCurve, comp: int = 0) -> Motion:
    """Motion taking the start of a component's lift to the start of its next period."""
    n = curve.nseg(comp)
    L = lift(curve, Locator(comp, 0, ZERO), IDENTITY, 0, n)
    return L.vertices[-1].frame


def translation_class(curve: ImmersedCurve, comp: int = 0) -> Point:
    """Holonomy translation vector of a component (its homology class on a flat torus)."""
    h = holonomy(curve, comp)
    if h.k % 4:
        raise CurveError("component has rotational holonomy")
    return (h.tx, h.ty)


def polyline_is_simple(pts: List[Point]) -> bool:
    m = len(pts) - 1
    segs = [(pts[i], pts[i + 1]) for i in range(m)]
    boxes = [(min(a[0], b[0]), min(a[1], b[1]), max(a[0], b[0]), max(a[1], b[1])) for a, b in segs]
    for i in range(m):
        a, b = segs[i]
        if a == b:
            return False
        bi = boxes[i]
        for j in range(i + 1, m):
            bj = boxes[j]
            if bi[2] < bj[0] or bj[2] < bi[0] or bi[3] < bj[1] or bj[3] < bi[1]:
                continue
            c, d = segs[j]
            hit = segment_intersection(a, b, c, d)
            if hit is None:
                continue
            if hit[0] == "overlap":
                return False
            if j == i + 1 and hit[1] == 1 and hit[2] == 0:
                continue
            return False
    return True


def is_embedded_lift(curve: ImmersedCurve, period_bound: int = 4) -> bool:
    """Bounded certificate that each component lifts to an embedded planar arc.

    Develops ``period_bound`` periods of every component.  A component with
    trivial holonomy must close up into a simple polygon; otherwise the
    developed polyline must be simple.  Crossings between copies more than
    ``period_bound`` periods apart are not examined.
    """
    if period_bound < 1:
        raise ValueError("period_bound must be >= 1")
    for ci in range(len(curve.components)):
        n = curve.nseg(ci)
        h = holonomy(curve, ci)
        if h.is_identity:
            L = lift(curve, Locator(ci, 0, ZERO), IDENTITY, 0, n)
            poly = [v.point for v in L.vertices[:-1]]
            poly = dedupe_polygon(poly)
            if not is_simple_polygon(poly):
                return False
            continue
        L = lift(curve, Locator(ci, 0, ZERO), IDENTITY, 0, n * period_bound)
        if not polyline_is_simple([v.point for v in L.vertices]):
            return False
    return True


def algebraic_intersection(u: Point, v: Point) -> Fraction:
    return cross(u, v)


def curve_length2_parts(curve: ImmersedCurve) -> List[Fraction]:
    return [norm2(s.direction) for segs in curve.components for s in segs]
