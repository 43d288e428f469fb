"""Quilted generators, the strip/quilt fold and lifting bigons through a correspondence.

A quilted generator is a triple ``(x1, f, x2)`` with ``g1(f) = L1(x1)`` and
``g2(f) = L2(x2)``.  Such triples are read off three ways: from
``L1 x (F o L2)`` on the left surface, from ``(L1 o F) x L2`` on the right
surface, and directly from ``g1^-1(L1) x g2^-1(L2)`` on ``F``.

A bigon on the left surface between ``L1`` and ``F o L2`` lifts to ``F``
through the developed inverse of ``g1`` anchored at the sheet recorded in the
composition trace of its first corner.  The lifted region is cut into
per-square patches; ``g2`` of the patches is the right half of the quilt.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .correspondence import (Correspondence, NotComposable, compose, compose_left,
                             detect_folds, preimage_curve, trace_at)
from .curves import CurveError, ImmersedCurve, IntersectionPoint, Locator, fiber_product, retile
from .discs import CombinatorialDisc, certify
from .exact import Point, add, fmt_point, lerp, signed_area, sub
from .floer import FloerComplex
from .surface import SurfaceError, sides_containing


class QuiltError(ValueError):
    pass


class NonTransverse(QuiltError):
    pass


class GeneratorMismatch(QuiltError):
    """The three views of the generators disagree (never expected on valid input)."""


class NotLiftable(QuiltError):
    pass


class MissingProvenance(QuiltError):
    pass


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class QuiltedGenerator:
    x1: Locator
    sheet: int
    point: Point
    x2: Locator
    f_key: tuple

    def key(self):
        return (self.x1.component, self.x1.segment, self.x1.t,
                self.x2.component, self.x2.segment, self.x2.t, repr(self.f_key))

    def __str__(self):
        return f"({self.x1} | sq{self.sheet}({fmt_point(self.point)}) | {self.x2})"


def _generator(F: Correspondence, x1: Locator, sheet: int, point: Point, x2: Locator):
    return QuiltedGenerator(x1, sheet, point, x2, F.total.canonical(sheet, point))


def _traced(curve: ImmersedCurve, loc: Locator):
    """(sheet, F point, origin locator) of a traced curve at ``loc``."""
    if not curve.provenance:
        raise MissingProvenance(f"{curve.label} carries no composition trace")
    piece = trace_at(curve.provenance[loc.component][loc.segment], loc.t)
    sheet, f, u = piece.at(loc.t)
    return sheet, f, piece.component, piece.segment, u


def from_left_view(F: Correspondence, L2: ImmersedCurve, right: ImmersedCurve,
                   x: IntersectionPoint) -> QuiltedGenerator:
    """Quilted generator of a point of ``L1 x (F o L2)``."""
    sheet, f, ci, k, u = _traced(right, x.b)
    return _generator(F, x.a, sheet, f, L2.normalize(ci, k, u))


def from_right_view(F: Correspondence, L1: ImmersedCurve, left: ImmersedCurve,
                    x: IntersectionPoint) -> QuiltedGenerator:
    """Quilted generator of a point of ``(L1 o F) x L2``."""
    sheet, f, ci, k, u = _traced(left, x.a)
    return _generator(F, L1.normalize(ci, k, u), sheet, f, x.b)


def check_consistency(q: QuiltedGenerator, L1: ImmersedCurve, F: Correspondence,
                      L2: ImmersedCurve) -> bool:
    ok1 = F.g1.image_key(q.sheet, q.point) == F.left.canonical(*L1.point(q.x1))
    ok2 = F.g2.image_key(q.sheet, q.point) == F.right.canonical(*L2.point(q.x2))
    return ok1 and ok2


@dataclass(frozen=True)
class GeneratorTable:
    generators: Tuple[QuiltedGenerator, ...]
    left_view: Tuple[IntersectionPoint, ...]     # L1 x (F o L2) on the left surface
    right_view: Tuple[IntersectionPoint, ...]    # (L1 o F) x L2 on the right surface
    to_left: Tuple[int, ...]                     # generator index -> left_view index
    to_right: Tuple[int, ...]

    def __len__(self):
        return len(self.generators)


def _index(gens: Sequence[QuiltedGenerator], what: str) -> Dict[tuple, int]:
    out = {}
    for i, g in enumerate(gens):
        if g.key() in out:
            raise GeneratorMismatch(f"{what}: generator {g} appears twice")
        out[g.key()] = i
    return out


def direct_generators(L1: ImmersedCurve, F: Correspondence,
                      L2: ImmersedCurve) -> List[QuiltedGenerator]:
    """Triples read from ``g1^-1(L1) x g2^-1(L2)`` on the correspondence surface."""
    P1 = preimage_curve(F.g1, L1)
    P2 = preimage_curve(F.g2, L2)
    out = []
    for y in fiber_product(P1, P2):
        if not y.transverse:
            raise NonTransverse(f"preimages meet tangentially at {y}")
        _, _, c1, k1, u1 = _traced(P1, y.a)
        _, _, c2, k2, u2 = _traced(P2, y.b)
        out.append(_generator(F, L1.normalize(c1, k1, u1), y.square, y.point,
                              L2.normalize(c2, k2, u2)))
    return out


def identify_generators(L1: ImmersedCurve, F: Correspondence, L2: ImmersedCurve,
                        right: Optional[ImmersedCurve] = None,
                        left: Optional[ImmersedCurve] = None) -> GeneratorTable:
    """Three-way generator table; ``right = F o L2`` and ``left = L1 o F`` may be supplied."""
    right = right if right is not None else compose(F, L2)
    left = left if left is not None else compose_left(L1, F)
    A = tuple(fiber_product(L1, right))
    B = tuple(fiber_product(left, L2))
    for x in A + B:
        if not x.transverse:
            raise NonTransverse(f"tangential intersection {x}")
    ga = [from_left_view(F, L2, right, x) for x in A]
    gb = [from_right_view(F, L1, left, x) for x in B]
    gq = direct_generators(L1, F, L2)
    ia, ib, iq = _index(ga, "left view"), _index(gb, "right view"), _index(gq, "quilted view")
    if set(ia) != set(iq) or set(ib) != set(iq):
        raise GeneratorMismatch(
            f"views disagree: |left|={len(ia)} |right|={len(ib)} |quilted|={len(iq)}")
    order = sorted(iq)
    return GeneratorTable(tuple(gq[iq[k]] for k in order), A, B,
                          tuple(ia[k] for k in order), tuple(ib[k] for k in order))


# ---------------------------------------------------------------------------
# region patches


@dataclass(frozen=True)
class Patch:
    """Polygon in one square's chart (coordinates may leave the unit square for images)."""

    square: int
    points: Tuple[Point, ...]

    @property
    def area(self) -> Fraction:
        return signed_area(self.points)


def _clip(poly: List[Point], axis: int, bound: Fraction, keep_ge: bool) -> List[Point]:
    def inside(p):
        return p[axis] >= bound if keep_ge else p[axis] <= bound

    out = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        if inside(p):
            out.append(p)
        if inside(p) != inside(q):
            t = (bound - p[axis]) / (q[axis] - p[axis])
            out.append(lerp(p, q, t))
    return out


def _clean(poly: List[Point]) -> List[Point]:
    out = []
    for p in poly:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def cut_into_cells(poly: Sequence[Point]) -> List[Tuple[Tuple[int, int], List[Point]]]:
    """Pieces of a convex planar polygon in the unit grid cells, with their cell index."""
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    pieces = []
    for i in range(int(min(xs) // 1), int(-(-max(xs) // 1))):
        for j in range(int(min(ys) // 1), int(-(-max(ys) // 1))):
            piece = list(poly)
            for axis, lo in ((0, i), (1, j)):
                piece = _clip(piece, axis, Fraction(lo), True) if piece else piece
                piece = _clip(piece, axis, Fraction(lo + 1), False) if piece else piece
            piece = _clean(piece)
            if len(piece) >= 3 and signed_area(piece) != 0:
                pieces.append(((i, j), piece))
    return pieces


# ---------------------------------------------------------------------------
# quilted discs


@dataclass(frozen=True)
class Seam:
    on_total: Tuple[Tuple[int, Point, Point], ...]   # lifted F o L2 arc, per-square pieces on F
    left_image: Tuple[Tuple[int, Point, Point], ...]  # g1 of the seam: the bigon's F o L2 side
    right_image: Tuple[Tuple[int, Point, Point], ...]  # g2 of the seam: an arc of L2


@dataclass(frozen=True)
class QuiltedDisc:
    u1: CombinatorialDisc
    u2: Tuple[Patch, ...]                 # g2 image of the lifted region, in anchor charts
    region: Tuple[Patch, ...]             # lifted region on F, local coordinates
    seam: Seam
    endpoints: Tuple[QuiltedGenerator, QuiltedGenerator]
    lift_chart: int                       # square of F anchoring the developed lift
    lifted_polygon: Tuple[Point, ...]     # boundary of the lift in lift_chart's frame

    def key(self):
        return tuple(sorted((p.square, p.points) for p in self.region))


def _pieces(surface, square, pts) -> Tuple[Tuple[int, Point, Point], ...]:
    try:
        segs, _ = retile(surface, square, pts)
    except (CurveError, SurfaceError) as exc:
        raise NotLiftable(f"seam is not generic on {surface.name or 'the surface'}: {exc}") from exc
    return tuple((s.square, s.start, s.end) for s in segs)


def lift_bigon_to_quilt(u: CombinatorialDisc, F: Correspondence, L1: ImmersedCurve,
                        right: ImmersedCurve, L2: Optional[ImmersedCurve] = None) -> QuiltedDisc:
    """Lift a bigon of ``CF(L1, F o L2)`` to a quilted disc through ``F``.

    ``right`` must be the traced curve ``F o L2`` the bigon was counted on.
    ``L2`` is only used to normalise the endpoint locators.
    """
    if u.kind != "bigon":
        raise QuiltError("only bigons lift to quilted strips")
    if not right.provenance:
        raise MissingProvenance(f"{right.label} carries no composition trace")
    if u.arcs[0].label != right.label or u.arcs[1].label != L1.label:
        raise QuiltError(f"disc is not bounded by {L1.label} and {right.label}")
    total, left_surface = F.total, F.left
    if not (total.is_flat_torus and left_surface.is_flat_torus):
        raise NotLiftable("developed lifting needs flat tori on both ends of g1")
    x_plus, x_minus = u.corners
    s0, f0, *_ = _traced(right, x_plus.b)
    s1, f1, *_ = _traced(right, x_minus.b)

    A = F.g1.affine[s0]
    Ainv = A.inverse()
    shift = sub(A(f0), u.corner_points[0])

    def lift_point(P: Point) -> Point:
        return Ainv(add(P, shift))

    if total.canonical(s0, lift_point(u.corner_points[1])) != total.canonical(s1, f1):
        raise NotLiftable("trace sheets at the two corners are not joined by one developed lift")

    res = certify(u.polygon, u.corner_points)
    if res is None:
        raise QuiltError("disc has no immersion certificate")
    _, core, tris = res
    folds = detect_folds(F.g1)
    region = []
    for tri in tris:
        for (i, j), piece in cut_into_cells([lift_point(core[v]) for v in tri]):
            sq = total.offset(s0, i, j)
            local = tuple((p[0] - i, p[1] - j) for p in piece)
            for a, b in zip(local, local[1:] + local[:1]):
                for side in set(sides_containing(a)) & set(sides_containing(b)):
                    if folds.contains_edge(sq, side, total):
                        raise NotLiftable(
                            f"region crosses a critical value of {F.g1.name} in square {sq}")
            for v, w in zip(local, piece):
                back = sub(A(w), shift)
                if F.g1.image_key(sq, v) != left_surface.canonical(u.chart, back):
                    raise NotLiftable("developed lift does not project back onto the bigon")
            region.append(Patch(sq, local))

    stop = u.polygon.index(u.corner_points[1])
    arc = list(u.polygon[:stop + 1])
    on_total = _pieces(total, s0, [lift_point(P) for P in arc])
    left_image = _pieces(left_surface, u.chart, arc)
    right_image = []
    for sq, a, b in on_total:
        A2 = F.g2.affine[sq]
        right_image.extend(_pieces(F.right, F.g2.assignment[sq], [A2(a), A2(b)]))
    u2 = tuple(Patch(F.g2.assignment[p.square], tuple(F.g2.affine[p.square](v) for v in p.points))
               for p in region)

    ends = (_generator(F, x_plus.a, s0, f0, _origin_locator(right, L2, x_plus.b)),
            _generator(F, x_minus.a, s1, f1, _origin_locator(right, L2, x_minus.b)))
    return QuiltedDisc(u, u2, tuple(region), Seam(on_total, left_image, tuple(right_image)),
                       ends, s0, tuple(lift_point(P) for P in u.polygon))


def _origin_locator(right: ImmersedCurve, origin: Optional[ImmersedCurve], loc: Locator) -> Locator:
    _, _, ci, k, t = _traced(right, loc)
    return origin.normalize(ci, k, t) if origin is not None else Locator(ci, k, t)


def left_patches(q: QuiltedDisc, F: Correspondence) -> Tuple[Patch, ...]:
    """g1 image of the lifted region, in anchor charts."""
    return tuple(Patch(F.g1.assignment[p.square], tuple(F.g1.affine[p.square](v) for v in p.points))
                 for p in q.region)


# ---------------------------------------------------------------------------
# strip <-> quilt


@dataclass(frozen=True)
class ProductStrip:
    """Single strip in ``F1 x F2``: the left half as is, the right half reflected in t."""

    first: CombinatorialDisc
    second_reflected: Tuple[Patch, ...]
    region: Tuple[Patch, ...]
    seam: Seam
    endpoints: Tuple[QuiltedGenerator, QuiltedGenerator]
    lift_chart: int
    lifted_polygon: Tuple[Point, ...]


def _reflect(patches: Sequence[Patch]) -> Tuple[Patch, ...]:
    return tuple(Patch(p.square, tuple(reversed(p.points))) for p in patches)


def fold_quilt_to_strip(q: QuiltedDisc) -> ProductStrip:
    return ProductStrip(q.u1, _reflect(q.u2), q.region, q.seam, q.endpoints, q.lift_chart,
                        q.lifted_polygon)


def unfold_strip(s: ProductStrip) -> QuiltedDisc:
    return QuiltedDisc(s.first, _reflect(s.second_reflected), s.region, s.seam, s.endpoints,
                       s.lift_chart, s.lifted_polygon)


# ---------------------------------------------------------------------------
# batch lifting


@dataclass(frozen=True)
class LiftStatus:
    out: int
    inp: int
    disc: CombinatorialDisc
    quilt: Optional[QuiltedDisc]
    error: str = ""


def lift_all(cf: FloerComplex, F: Correspondence, L1: ImmersedCurve, right: ImmersedCurve,
             L2: Optional[ImmersedCurve] = None) -> List[LiftStatus]:
    """Try to lift every bigon recorded in ``cf = CF(L1, F o L2)``."""
    out = []
    for (i, j) in sorted(cf.provenance):
        for d in cf.provenance[(i, j)]:
            try:
                out.append(LiftStatus(i, j, d, lift_bigon_to_quilt(d, F, L1, right, L2)))
            except (NotLiftable, MissingProvenance, NotComposable) as exc:
                out.append(LiftStatus(i, j, d, None, str(exc)))
    return out


def lift_collisions(statuses: Sequence[LiftStatus]) -> List[Tuple[LiftStatus, LiftStatus]]:
    """Pairs of distinct bigons whose lifts coincide (reported as fixture anomalies)."""
    seen: Dict[tuple, LiftStatus] = {}
    clashes = []
    for s in statuses:
        if s.quilt is None:
            continue
        k = (s.out, s.inp, s.quilt.key())
        if k in seen and seen[k].disc.deck_word != s.disc.deck_word:
            clashes.append((seen[k], s))
        seen.setdefault(k, s)
    return clashes


def quilted_columns(cf: FloerComplex, statuses: Sequence[LiftStatus]) -> List[int]:
    """Differential counting only the bigons that lift to quilts."""
    cols = [0] * cf.size
    for s in statuses:
        if s.quilt is not None:
            cols[s.inp] ^= 1 << s.out
    return cols
