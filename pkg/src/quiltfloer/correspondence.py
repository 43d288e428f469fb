"""Piecewise-affine surface maps and correspondences between surfaces.

A :class:`SurfaceMap` assigns to each source square an affine map into the
developed chart of an anchor square of the target.  Folds are edges across
which the determinant changes sign.  A :class:`Correspondence` is a pair of
maps out of one surface; composing with a curve pulls the curve back along
one leg and pushes it forward along the other, keeping a trace of where
every output segment came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .curves import (CurveError, ImmersedCurve, Segment, retile)
from .exact import (ONE, ZERO, Point, add, cross, dot, lerp,
                    point_segment_dist2, segment_param, sub)
from .surface import (CornerHit, SquareTiledSurface, in_closed_square, is_corner as _corner,
                      side_point, sides_containing)


class CorrespondenceError(ValueError):
    pass


class NotComposable(CorrespondenceError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class CurveThroughCriticalValueTangency(NotComposable):
    pass


class NonGenericPosition(NotComposable):
    pass


class BadCylinder(CorrespondenceError):
    pass


# ---------------------------------------------------------------------------
# affine maps


@dataclass(frozen=True)
class Affine:
    """``(x, y) -> (a x + b y + c, d x + e y + f)``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    f: Fraction

    @staticmethod
    def of(rows) -> "Affine":
        (a, b, c), (d, e, f) = rows
        return Affine(*(Fraction(v) for v in (a, b, c, d, e, f)))

    @staticmethod
    def translation(tx, ty) -> "Affine":
        return Affine.of(((1, 0, tx), (0, 1, ty)))

    def __call__(self, p: Point) -> Point:
        return (self.a * p[0] + self.b * p[1] + self.c, self.d * p[0] + self.e * p[1] + self.f)

    def linear(self, v: Point) -> Point:
        return (self.a * v[0] + self.b * v[1], self.d * v[0] + self.e * v[1])

    @property
    def det(self) -> Fraction:
        return self.a * self.e - self.b * self.d

    @property
    def matrix(self):
        return ((self.a, self.b), (self.d, self.e))

    def inverse(self) -> "Affine":
        det = self.det
        if det == 0:
            raise CorrespondenceError("singular affine map")
        a, b, d, e = self.e / det, -self.b / det, -self.d / det, self.a / det
        c = -(a * self.c + b * self.f)
        f = -(d * self.c + e * self.f)
        return Affine(a, b, c, d, e, f)

    def then(self, other: "Affine") -> "Affine":
        """``self`` after ``other``."""
        return Affine(self.a * other.a + self.b * other.d, self.a * other.b + self.b * other.e,
                      self.a * other.c + self.b * other.f + self.c,
                      self.d * other.a + self.e * other.d, self.d * other.b + self.e * other.e,
                      self.d * other.c + self.e * other.f + self.f)

    def rows(self):
        return ((self.a, self.b, self.c), (self.d, self.e, self.f))


IDENTITY_AFFINE = Affine.of(((1, 0, 0), (0, 1, 0)))


def _motion_affine(m) -> Affine:
    (a, d) = m.linear((ONE, ZERO))
    (b, e) = m.linear((ZERO, ONE))
    return Affine(a, b, m.tx, d, e, m.ty)


KINDS = ("covering", "shear", "fold", "affine")

_SAMPLES = (ZERO, ONE, Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), Fraction(1, 7),
            Fraction(1, 11))


@dataclass(frozen=True, eq=False)
class SurfaceMap:
    """Continuous piecewise-affine map ``source -> target``.

    ``affine[i]`` sends source square ``i`` into the (extended) chart of target
    square ``assignment[i]``.  Requires a translation-surface target.
    """

    source: SquareTiledSurface
    target: SquareTiledSurface
    assignment: Tuple[int, ...]
    affine: Tuple[Affine, ...]
    kinds: Tuple[str, ...]
    name: str = "f"

    def __post_init__(self):
        validate_map(self)

    def developed(self, sq: int, p: Point) -> Point:
        return self.affine[sq](p)

    def image(self, sq: int, p: Point) -> Tuple[int, Point]:
        return self.target.locate(self.assignment[sq], self.affine[sq](p))

    def image_key(self, sq: int, p: Point):
        return self.target.canonical(*self.image(sq, p))

    def det(self, sq: int) -> Fraction:
        return self.affine[sq].det

    def parallelogram(self, sq: int) -> List[Point]:
        """Counterclockwise image of the unit square in the anchor chart."""
        A = self.affine[sq]
        poly = [A(p) for p in ((ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE))]
        return poly if A.det > 0 else poly[::-1]

    def fold_reflection(self, sq: int, side: int) -> Affine:
        """Linear part ``A^-1 A'`` across a side (``A'`` read in ``sq``'s coordinates)."""
        j, _ = self.source.partner(sq, side)
        m = _motion_affine(self.source.transition(sq, side).inverse())   # sq -> j coords
        other = self.affine[j].then(m)
        A = self.affine[sq]
        lin = Affine(other.a, other.b, ZERO, other.d, other.e, ZERO)
        return Affine(A.a, A.b, ZERO, A.d, A.e, ZERO).inverse().then(lin)

    def __repr__(self):
        return f"SurfaceMap({self.name!r}: {self.source.n} squares -> {self.target.n})"


def validate_map(f: SurfaceMap) -> None:
    src, tgt = f.source, f.target
    if not tgt.is_translation:
        raise CorrespondenceError("surface maps need a translation-surface target")
    if not (len(f.assignment) == len(f.affine) == len(f.kinds) == src.n):
        raise CorrespondenceError("map data must have one entry per source square")
    for i, (t, A, kind) in enumerate(zip(f.assignment, f.affine, f.kinds)):
        if not 0 <= t < tgt.n:
            raise CorrespondenceError(f"square {i}: bad target square {t}")
        if kind not in KINDS:
            raise CorrespondenceError(f"square {i}: unknown kind {kind!r}")
        if A.det == 0:
            raise CorrespondenceError(f"square {i}: degenerate affine map")
        if kind == "covering":
            ok = (A.det == 1 and {A.a, A.b, A.d, A.e} <= {-1, 0, 1}
                  and A.c.denominator == 1 and A.f.denominator == 1)
            if not ok:
                raise CorrespondenceError(f"square {i}: covering map is not a square isometry")
        elif kind == "shear":
            if not (A.a == A.e == 1 and (A.b == 0 or A.d == 0)):
                raise CorrespondenceError(f"square {i}: shear must be unit triangular")
        elif kind == "fold":
            if A.det > 0:
                raise CorrespondenceError(f"square {i}: fold squares reverse orientation")
    for i in range(src.n):
        for s in range(4):
            j, s2 = src.partner(i, s)
            for t in _SAMPLES:
                a = f.image_key(i, side_point(s, t))
                b = f.image_key(j, side_point(s2, ONE - t))
                if a != b:
                    raise CorrespondenceError(
                        f"map {f.name} is discontinuous across side {s} of square {i}")


def identity_map(surface: SquareTiledSurface, name: str = "id") -> SurfaceMap:
    n = surface.n
    return SurfaceMap(surface, surface, tuple(range(n)), (IDENTITY_AFFINE,) * n,
                      ("covering",) * n, name)


def grid_map(source: SquareTiledSurface, target: SquareTiledSurface, width: int,
             linear=((1, 0), (0, 1)), shift=(0, 0), name: str = "f") -> SurfaceMap:
    """Map a ``width``-wide grid torus by ``p -> M p + shift`` onto a torus target.

    Source square ``x + width*y`` sits at (x, y); every square is anchored at
    target square 0.
    """
    (a, b), (d, e) = linear
    a, b, d, e = (Fraction(v) for v in (a, b, d, e))
    sx, sy = Fraction(shift[0]), Fraction(shift[1])
    affs, kinds = [], []
    for i in range(source.n):
        x, y = i % width, i // width
        A = Affine(a, b, a * x + b * y + sx, d, e, d * x + e * y + sy)
        affs.append(A)
        if A.det < 0:
            kinds.append("fold")
        elif {a, b, d, e} <= {-1, 0, 1} and A.det == 1 and A.c.denominator == 1 and A.f.denominator == 1:
            kinds.append("covering")
        elif a == e == 1 and (b == 0 or d == 0):
            kinds.append("shear")
        else:
            kinds.append("affine")
    return SurfaceMap(source, target, (0,) * source.n, tuple(affs), tuple(kinds), name)


# ---------------------------------------------------------------------------
# folds


@dataclass(frozen=True)
class CriticalSegment:
    """Image of one fold edge, as a straight segment in a target square's chart."""

    square: int
    start: Point
    end: Point


@dataclass(frozen=True)
class FoldLocus:
    edges: Tuple[Tuple[int, int], ...]                   # (square, side), one per glued pair
    circles: Tuple[Tuple[Tuple[int, int], ...], ...]
    critical_values: Tuple[Tuple[CriticalSegment, ...], ...]
    embedded: bool

    @property
    def empty(self) -> bool:
        return not self.edges

    def contains_edge(self, sq: int, side: int, source: SquareTiledSurface) -> bool:
        j, s2 = source.partner(sq, side)
        return min((sq, side), (j, s2)) in self.edges

    def segments(self) -> List[CriticalSegment]:
        return [c for circ in self.critical_values for c in circ]


def detect_folds(f: SurfaceMap) -> FoldLocus:
    src = f.source
    edges = set()
    for i in range(src.n):
        for s in range(4):
            j, s2 = src.partner(i, s)
            if (f.det(i) > 0) != (f.det(j) > 0):
                edges.add(min((i, s), (j, s2)))
    edges = sorted(edges)
    # group into circles through shared source vertices
    ends = {}
    for e in edges:
        i, s = e
        ends[e] = (src.vertex_id(i, s), src.vertex_id(i, (s + 1) % 4))
    degree: Dict[int, int] = {}
    for a, b in ends.values():
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    embedded = all(d == 2 for d in degree.values())
    remaining = list(edges)
    circles = []
    while remaining:
        e = remaining.pop(0)
        circ = [e]
        start, cur = ends[e]
        while cur != start:
            nxt = next((x for x in remaining if cur in ends[x]), None)
            if nxt is None:
                break
            remaining.remove(nxt)
            circ.append(nxt)
            a, b = ends[nxt]
            cur = b if a == cur else a
        circles.append(tuple(circ))
    crit = []
    for circ in circles:
        segs = []
        for i, s in circ:
            A = f.affine[i]
            segs.append(CriticalSegment(f.assignment[i], A(side_point(s, ZERO)), A(side_point(s, ONE))))
        crit.append(tuple(segs))
    return FoldLocus(tuple(edges), tuple(circles), tuple(crit), embedded)


def translation_copies(surface: SquareTiledSurface, anchor: int, lo: Point, hi: Point):
    """Integer offsets (dx, dy) and squares tiling the box [lo, hi] of ``anchor``'s chart."""
    out = []
    for dx in range(math.floor(lo[0]) - 1, math.ceil(hi[0]) + 1):
        for dy in range(math.floor(lo[1]) - 1, math.ceil(hi[1]) + 1):
            if dx + 1 < lo[0] or dx > hi[0] or dy + 1 < lo[1] or dy > hi[1]:
                continue
            out.append(((Fraction(dx), Fraction(dy)), surface.offset(anchor, dx, dy)))
    return out


def distance2_to_segment(surface: SquareTiledSurface, sq: int, p: Point,
                         seg: CriticalSegment, reach: Fraction) -> Optional[Fraction]:
    """Squared flat distance from ``(sq, p)`` to a segment, if below ``reach``^2."""
    lo = (min(seg.start[0], seg.end[0]) - reach, min(seg.start[1], seg.end[1]) - reach)
    hi = (max(seg.start[0], seg.end[0]) + reach, max(seg.start[1], seg.end[1]) + reach)
    best = None
    for off, t in translation_copies(surface, seg.square, lo, hi):
        if t != sq:
            continue
        d = point_segment_dist2(add(p, off), seg.start, seg.end)
        if best is None or d < best:
            best = d
    if best is not None and best < reach * reach:
        return best
    return None


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TracePiece:
    """Sub-range ``[t0, t1]`` of a segment, traced to the correspondence surface.

    ``sheet``/``f0``/``f1`` are the source square and local points at the ends;
    ``(component, segment, u0, u1)`` is the matching stretch of the curve the
    composition started from.  Everything in between is affine.
    """

    t0: Fraction
    t1: Fraction
    sheet: int
    f0: Point
    f1: Point
    component: int
    segment: int
    u0: Fraction
    u1: Fraction

    def at(self, t):
        """(sheet, F point, origin locator params) at parameter t in [t0, t1]."""
        s = (t - self.t0) / (self.t1 - self.t0)
        return self.sheet, lerp(self.f0, self.f1, s), self.u0 + (self.u1 - self.u0) * s

    def restrict(self, a, b) -> "TracePiece":
        _, fa, ua = self.at(a)
        _, fb, ub = self.at(b)
        return TracePiece(a, b, self.sheet, fa, fb, self.component, self.segment, ua, ub)

    def reparam(self, t0, t1) -> "TracePiece":
        return TracePiece(t0, t1, self.sheet, self.f0, self.f1, self.component, self.segment,
                          self.u0, self.u1)

    def flipped(self) -> "TracePiece":
        return TracePiece(ONE - self.t1, ONE - self.t0, self.sheet, self.f1, self.f0,
                          self.component, self.segment, self.u1, self.u0)


Trace = Tuple[TracePiece, ...]


def trace_at(trace: Trace, t) -> TracePiece:
    for piece in trace:
        if piece.t0 <= t <= piece.t1:
            return piece
    raise CorrespondenceError(f"parameter {t} outside trace")


def _restrict_trace(trace: Trace, a, b) -> Trace:
    """Sub-trace over [a, b] of a segment, reparametrised to [0, 1]."""
    out = []
    span = b - a
    for piece in trace:
        lo, hi = max(a, piece.t0), min(b, piece.t1)
        if lo >= hi:
            continue
        r = piece.restrict(lo, hi)
        out.append(r.reparam((lo - a) / span, (hi - a) / span))
    return tuple(out)


def _merge_traced(segs: List[Segment], traces: List[Trace], cyclic: bool):
    def mergeable(p: Segment, s: Segment):
        return (p.square == s.square and p.end == s.start and cross(p.direction, s.direction) == 0
                and dot(p.direction, s.direction) > 0)

    def join(p, tp, s, ts):
        whole = Segment(p.square, p.start, s.end)
        lam = segment_param(p.end, whole.start, whole.end)
        tr = tuple(x.reparam(x.t0 * lam, x.t1 * lam) for x in tp)
        tr += tuple(x.reparam(lam + x.t0 * (1 - lam), lam + x.t1 * (1 - lam)) for x in ts)
        return whole, tr

    out, outt = [], []
    for s, t in zip(segs, traces):
        if out and mergeable(out[-1], s):
            out[-1], outt[-1] = join(out[-1], outt[-1], s, t)
            continue
        out.append(s)
        outt.append(t)
    if cyclic and len(out) > 1 and mergeable(out[-1], out[0]):
        out[0], outt[0] = join(out[-1], outt[-1], out[0], outt[0])
        out.pop()
        outt.pop()
    return out, outt


# ---------------------------------------------------------------------------
# preimages and pushforwards


def _clip_to_convex(p: Point, q: Point, poly: Sequence[Point]):
    """Parameter interval of segment pq inside a ccw convex polygon, or None."""
    lo, hi = ZERO, ONE
    d = sub(q, p)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        e = sub(b, a)
        # inside: cross(e, x - a) >= 0
        f0 = cross(e, sub(p, a))
        df = cross(e, d)
        if df == 0:
            if f0 < 0:
                return None
            continue
        t = -f0 / df
        if df > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo > hi:
            return None
    return lo, hi


def _raw_preimage_pieces(f: SurfaceMap, c: ImmersedCurve):
    tgt = f.target
    by_square: Dict[int, List[Tuple[int, int, Segment]]] = {}
    for ci, segs in enumerate(c.components):
        for k, s in enumerate(segs):
            by_square.setdefault(s.square, []).append((ci, k, s))
    pieces = []
    for S in range(f.source.n):
        A = f.affine[S]
        Ainv = A.inverse()
        poly = f.parallelogram(S)
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        for off, tsq in translation_copies(tgt, f.assignment[S], (min(xs), min(ys)), (max(xs), max(ys))):
            for ci, k, seg in by_square.get(tsq, ()):
                p, q = add(seg.start, off), add(seg.end, off)
                hit = _clip_to_convex(p, q, poly)
                if hit is None or hit[0] >= hit[1]:
                    continue
                u0, u1 = hit
                a, b = Ainv(lerp(p, q, u0)), Ainv(lerp(p, q, u1))
                pieces.append((S, a, b, ci, k, u0, u1))
    return pieces


def preimage_curve(f: SurfaceMap, c: ImmersedCurve, label: Optional[str] = None) -> ImmersedCurve:
    """Full preimage ``f^-1(c)`` as a traced multicurve on the source."""
    if c.surface != f.target:
        raise CorrespondenceError("curve is not on the map's target surface")
    src = f.source
    folds = detect_folds(f)
    raw = _raw_preimage_pieces(f, c)
    # drop exact duplicates produced by overlapping chart copies on shared sides
    raw = sorted(set(raw), key=lambda r: (r[0], r[1], r[2], r[3], r[4], r[5]))
    for S, a, b, ci, k, u0, u1 in raw:
        witness = (c.segment(ci, k).square, c.segment(ci, k).at(u0))
        if _corner(a) or _corner(b):
            raise NonGenericPosition(f"preimage of {c.label} passes through a corner of square {S}",
                                     witness)
        common = set(sides_containing(a)) & set(sides_containing(b))
        if common:
            side = common.pop()
            if folds.contains_edge(S, side, src):
                raise CurveThroughCriticalValueTangency(
                    f"{c.label} runs along a critical value of {f.name}", witness)
            raise NonGenericPosition(f"preimage of {c.label} runs along a square side", witness)
    ends: Dict[object, List[Tuple[int, int]]] = {}
    keys = []
    for idx, (S, a, b, ci, k, u0, u1) in enumerate(raw):
        ka = (src.canonical(S, a), c.normalize(ci, k, u0))
        kb = (src.canonical(S, b), c.normalize(ci, k, u1))
        keys.append((ka, kb))
        ends.setdefault(ka, []).append((idx, 0))
        ends.setdefault(kb, []).append((idx, 1))
    for key, lst in ends.items():
        if len(lst) != 2:
            loc = key[1]
            witness = c.point(loc)
            raise CurveThroughCriticalValueTangency(
                f"{c.label} meets a critical value of {f.name} without crossing it", witness)
    visited = [False] * len(raw)
    comps, traces = [], []
    for start in range(len(raw)):
        if visited[start]:
            continue
        segs, trs = [], []
        idx, fwd = start, True
        while not visited[idx]:
            visited[idx] = True
            S, a, b, ci, k, u0, u1 = raw[idx]
            if not fwd:
                a, b, u0, u1 = b, a, u1, u0
            segs.append(Segment(S, a, b))
            trs.append((TracePiece(ZERO, ONE, S, a, b, ci, k, u0, u1),))
            exit_key = keys[idx][1 if fwd else 0]
            other = [e for e in ends[exit_key] if e != (idx, 1 if fwd else 0)][0]
            idx, fwd = other[0], other[1] == 0
        segs, trs = _merge_traced(segs, trs, cyclic=True)
        comps.append(tuple(segs))
        traces.append(tuple(trs))
    try:
        return ImmersedCurve(src, tuple(comps), label or f"{f.name}^-1({c.label})", tuple(traces))
    except CurveError as exc:
        raise NonGenericPosition(f"preimage of {c.label} is degenerate: {exc}") from exc


def push_curve(f: SurfaceMap, curve: ImmersedCurve, label: str) -> ImmersedCurve:
    """Image ``f(curve)`` of a traced curve, carrying its trace along."""
    if curve.surface != f.source:
        raise CorrespondenceError("curve is not on the map's source surface")
    comps, traces = [], []
    for ci, segs in enumerate(curve.components):
        out, outt = [], []
        trace = curve.provenance[ci] if curve.provenance else tuple(
            (TracePiece(ZERO, ONE, s.square, s.start, s.end, ci, k, ZERO, ONE),)
            for k, s in enumerate(segs))
        for seg, tr in zip(segs, trace):
            A = f.affine[seg.square]
            P, Q = A(seg.start), A(seg.end)
            D = sub(Q, P)
            scale = max(abs(D[0]), abs(D[1]))
            try:
                pieces, _ = retile(f.target, f.assignment[seg.square], [P, Q], merge=False)
            except CornerHit as exc:
                raise NonGenericPosition(f"image under {f.name} hits a corner",
                                         (f.assignment[seg.square], P)) from exc
            sigma = ZERO
            for piece in pieces:
                v = piece.direction
                lam = max(abs(v[0]), abs(v[1])) / scale
                out.append(piece)
                outt.append(_restrict_trace(tr, sigma, sigma + lam))
                sigma += lam
        out, outt = _merge_traced(out, outt, cyclic=True)
        comps.append(tuple(out))
        traces.append(tuple(outt))
    try:
        return ImmersedCurve(f.target, tuple(comps), label, tuple(traces))
    except CurveError as exc:
        raise NotComposable(f"image under {f.name} is not immersed: {exc}") from exc


def point_preimages(f: SurfaceMap, sq: int, p: Point) -> List[Tuple[int, Point]]:
    """All source points over the target point ``(sq, p)``, one per canonical point."""
    seen = {}
    for S in range(f.source.n):
        poly = f.parallelogram(S)
        xs = [v[0] for v in poly]
        ys = [v[1] for v in poly]
        Ainv = f.affine[S].inverse()
        for off, t in translation_copies(f.target, f.assignment[S], (min(xs), min(ys)), (max(xs), max(ys))):
            if t != sq:
                continue
            x = Ainv(add(p, off))
            if in_closed_square(x):
                seen.setdefault(f.source.canonical(S, x), (S, x))
    return [seen[k] for k in sorted(seen, key=repr)]


# ---------------------------------------------------------------------------
# correspondences


@dataclass(frozen=True, eq=False)
class Correspondence:
    total: SquareTiledSurface
    g1: SurfaceMap
    g2: SurfaceMap
    name: str = "F"

    def __post_init__(self):
        validate_correspondence(self)

    @property
    def left(self) -> SquareTiledSurface:
        return self.g1.target

    @property
    def right(self) -> SquareTiledSurface:
        return self.g2.target


def validate_correspondence(F: Correspondence) -> None:
    if F.g1.source != F.total or F.g2.source != F.total:
        raise CorrespondenceError("both legs must start at the correspondence surface")
    for i in range(F.total.n):
        if F.g1.det(i) != F.g2.det(i):
            raise CorrespondenceError(
                f"square {i}: area forms disagree ({F.g1.det(i)} vs {F.g2.det(i)}), not Lagrangian")
    f1, f2 = detect_folds(F.g1), detect_folds(F.g2)
    for e in set(f1.edges) & set(f2.edges):
        if F.g1.fold_reflection(*e) == F.g2.fold_reflection(*e):
            raise CorrespondenceError(f"legs fold identically along edge {e}: not an immersion")


def diagonal(surface: SquareTiledSurface) -> Correspondence:
    return Correspondence(surface, identity_map(surface, "id1"), identity_map(surface, "id2"),
                          "diagonal")


def compose(F: Correspondence, L2: ImmersedCurve, label: Optional[str] = None) -> ImmersedCurve:
    """``g1(g2^-1(L2))`` on the left surface, traced to F and L2."""
    pre = preimage_curve(F.g2, L2)
    return push_curve(F.g1, pre, label or f"{F.name}o{L2.label}")


def compose_left(L1: ImmersedCurve, F: Correspondence, label: Optional[str] = None) -> ImmersedCurve:
    """``g2(g1^-1(L1))`` on the right surface, traced to F and L1."""
    pre = preimage_curve(F.g1, L1)
    return push_curve(F.g2, pre, label or f"{L1.label}o{F.name}")


@dataclass(frozen=True)
class Composability:
    ok: bool
    witness: Optional[Tuple[int, Point]] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def composability(F: Correspondence, L2: ImmersedCurve, left: bool = False) -> Composability:
    """Whether ``F o L2`` (or ``L2 o F`` when ``left``) is a generic immersed curve."""
    try:
        compose_left(L2, F) if left else compose(F, L2)
    except NotComposable as exc:
        return Composability(False, exc.witness, str(exc))
    return Composability(True)


# ---------------------------------------------------------------------------
# Dehn twists


def cylinder(surface: SquareTiledSurface, selector) -> Tuple[str, Tuple[int, ...]]:
    """Resolve ``("row", sq)`` / ``("column", sq)`` to the cylinder of squares through ``sq``."""
    if not surface.is_translation:
        raise BadCylinder("cylinders need a translation surface")
    kind, sq = selector
    if kind not in ("row", "column") or not 0 <= sq < surface.n:
        raise BadCylinder(f"bad selector {selector!r}")
    step = surface.right if kind == "row" else surface.up
    squares = [sq]
    cur = step(sq)
    while cur != sq:
        squares.append(cur)
        cur = step(cur)
    return kind, tuple(squares)


def dehn_shear(surface: SquareTiledSurface, selector, amount: int,
               reading: str = "shear", name: str = "twist") -> SurfaceMap:
    """``amount`` full twists along a horizontal or vertical cylinder.

    ``reading="shear"`` is the affine twist.  ``reading="reglue"`` cuts the
    cylinder and reglues it with the matching square shift; for integer
    amounts this is the identity on every square.
    """
    if reading not in ("shear", "reglue"):
        raise ValueError(f"unknown twist reading {reading!r}")
    kind, squares = cylinder(surface, selector)
    w = len(squares)
    affs = [IDENTITY_AFFINE] * surface.n
    kinds = ["covering"] * surface.n
    if reading == "shear" and amount:
        for pos, sq in enumerate(squares):
            s = Fraction(amount * w)
            if kind == "row":
                affs[sq] = Affine(ONE, s, ZERO, ZERO, ONE, ZERO)
            else:
                affs[sq] = Affine(ONE, ZERO, ZERO, s, ONE, ZERO)
            kinds[sq] = "shear"
    return SurfaceMap(surface, surface, tuple(range(surface.n)), tuple(affs), tuple(kinds), name)


def _composite_kind(C: Affine) -> str:
    if C.det < 0:
        return "fold"
    if C.a == C.e == 1 and (C.b == 0 or C.d == 0) and not (C.b == C.d == 0):
        return "shear"
    if (C.det == 1 and {C.a, C.b, C.d, C.e} <= {-1, 0, 1}
            and C.c.denominator == 1 and C.f.denominator == 1):
        return "covering"
    return "affine"


def compose_maps(outer: SurfaceMap, inner: SurfaceMap, name: str = "") -> SurfaceMap:
    """``outer o inner`` for maps whose inner images stay in one outer square's chart.

    Each inner square is located through its image center; the outer affine
    map of that square is extended across its chart.
    """
    if inner.target != outer.source:
        raise CorrespondenceError("maps do not compose")
    affs, assign, kinds = [], [], []
    half = (Fraction(1, 2), Fraction(1, 2))
    for i in range(inner.source.n):
        A = inner.affine[i]
        anchor = inner.assignment[i]
        c = A(half)
        mid_sq, mid_p = inner.target.locate(anchor, c)
        shift = sub(c, mid_p)   # anchor chart = mid_sq chart + shift on translation surfaces
        B = outer.affine[mid_sq]
        moved = Affine.translation(-shift[0], -shift[1]).then(A)
        C = B.then(moved)
        affs.append(C)
        assign.append(outer.assignment[mid_sq])
        kinds.append(_composite_kind(C))
    return SurfaceMap(inner.source, outer.target, tuple(assign), tuple(affs), tuple(kinds),
                      name or f"{outer.name}o{inner.name}")
