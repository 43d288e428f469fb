"""Finger moves: nudging curves into transverse position, and lifting moves to a correspondence.

A finger move displaces a sub-arc of one curve component.  The arc ends stay
put; every bend strictly inside the arc is translated by the displacement (or
the arc's midpoint, if the arc is straight).  Because the move is defined by
the geometry of the arc, it does not depend on how the arc is subdivided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .correspondence import (Correspondence, CriticalSegment, SurfaceMap, TracePiece,
                             compose, detect_folds, distance2_to_segment, preimage_curve,
                             translation_copies, trace_at)
from .curves import (CurveError, ImmersedCurve, IntersectionPoint, Locator, chart_change,
                     curve_from_polyline, fiber_product, lift, rays_at)
from .exact import (ZERO, Point, add, cross, dot, lerp, on_segment, rot90, scale,
                    segment_segment_dist2, sub)
from .surface import IDENTITY, Motion, SquareTiledSurface, SurfaceError

MIN_HALVINGS = 3   # largest finger displacement is 1/8 of a square side
MAX_HALVINGS = 40


class PerturbationError(ValueError):
    pass


class Unresolvable(PerturbationError):
    pass


class SupportHitsSingularity(PerturbationError):
    pass


@dataclass(frozen=True, order=True)
class FingerMove:
    """Displace the arc ``start -> end`` of ``component`` (``whole`` moves everything).

    ``displacement`` is in the chart of the square holding ``start``.
    """

    component: int
    start: Locator
    end: Locator
    displacement: Point
    radius: Fraction
    whole: bool = False


@dataclass(frozen=True)
class Zone:
    """Capsule of ``radius`` around a segment in ``square``'s chart."""

    square: int
    start: Point
    end: Point
    radius: Fraction


@dataclass(frozen=True)
class PerturbationPlan:
    """Moves applied in order to the curve labelled ``target_curve``.

    Each move's locators refer to the curve produced by the moves before it.
    """

    target_curve: str
    moves: Tuple[FingerMove, ...] = ()
    fixed_zones: Tuple[Zone, ...] = ()

    def __post_init__(self):
        for m in self.moves:
            d = m.displacement
            if not d[0] * d[0] + d[1] * d[1] < m.radius * m.radius:
                raise PerturbationError(f"displacement {d} not inside support radius {m.radius}")

    @property
    def is_identity(self) -> bool:
        return not self.moves


def zones_around(f: SurfaceMap, radius: Fraction) -> Tuple[Zone, ...]:
    """Fixed zones covering the fold images of ``f``."""
    out = []
    for circle in detect_folds(f).critical_values:
        for seg in circle:
            out.append(Zone(seg.square, seg.start, seg.end, Fraction(radius)))
    return tuple(out)


# ---------------------------------------------------------------------------
# developed periods


def _linf(v: Point) -> Fraction:
    return max(abs(v[0]), abs(v[1]))


@dataclass
class _Period:
    """One period of a component developed in the plane.

    ``points[k]`` starts segment ``k``; ``points[n]`` is ``shift(points[0])``.
    ``frames[k]`` carries segment ``k``'s square chart into the plane.
    """

    points: List[Point]
    frames: List[Motion]
    squares: List[int]
    shift: Motion

    @property
    def n(self) -> int:
        return len(self.points) - 1

    def at(self, s: Fraction) -> Point:
        q = math.floor(s / self.n)
        r = s - q * self.n
        k = math.floor(r)
        p = lerp(self.points[k], self.points[k + 1], r - k)
        for _ in range(q):
            p = self.shift(p)
        return p

    def carry(self, v: Point, periods: int) -> Point:
        for _ in range(periods):
            v = self.shift.linear(v)
        return v

    def offset_param(self, s: Fraction, h: Fraction, sign: int) -> Optional[Fraction]:
        """Parameter at sup-norm arc length ``h`` from ``s`` (``sign`` = direction)."""
        left = h
        cur = s
        for _ in range(4 * self.n + 4):
            k = math.floor(cur) if sign > 0 else math.ceil(cur) - 1
            kk = k % self.n
            seg_len = _linf(sub(self.points[kk + 1], self.points[kk]))
            edge = Fraction(k + 1) if sign > 0 else Fraction(k)
            avail = abs(edge - cur) * seg_len
            if avail >= left:
                return cur + sign * left / seg_len
            left -= avail
            cur = edge
            if abs(cur - s) >= self.n:
                return None
        return None


def _develop(curve: ImmersedCurve, ci: int) -> _Period:
    n = curve.nseg(ci)
    lf = lift(curve, Locator(ci, 0, ZERO), IDENTITY, 0, n)
    pts = [v.point for v in lf.vertices]
    frames = [v.frame for v in lf.vertices]
    squares = [curve.segment(ci, k).square for k in range(n)]
    return _Period(pts, frames[:n], squares, frames[n])


def _param(loc: Locator) -> Fraction:
    return loc.segment + loc.t


def _locator(comp: int, n: int, s: Fraction) -> Locator:
    s = s % n
    k = math.floor(s)
    return Locator(comp, k, s - k)


def _finger(period: _Period, s0: Fraction, s1: Fraction, disp: Point) -> List[Point]:
    """Displaced interior of the arc ``[s0, s1]``: bends moved, or the midpoint."""
    raw = [period.at(s0)]
    k = math.floor(s0) + 1
    while k < s1:
        raw.append(period.at(Fraction(k)))
        k += 1
    raw.append(period.at(s1))
    bends = []
    for i in range(1, len(raw) - 1):
        u, v = sub(raw[i], raw[i - 1]), sub(raw[i + 1], raw[i])
        if cross(u, v) != 0 or dot(u, v) < 0:
            bends.append(raw[i])
    if not bends:
        bends = [lerp(raw[0], raw[-1], Fraction(1, 2))]
    return [add(b, disp) for b in bends]


def _rebuild_component(period: _Period, moves: Sequence[Tuple[Fraction, Fraction, Point]],
                       ) -> Tuple[List[Point], int, Motion]:
    """Planar polyline of one period after the moves, with its start chart.

    ``moves`` are ``(s0, s1, planar displacement)`` with ``0 <= s0 < n``.
    """
    n = period.n
    arcs = sorted(moves)
    for (a0, a1, _), (b0, _, _) in zip(arcs, arcs[1:]):
        if a1 >= b0:
            raise PerturbationError("finger moves overlap")
    if arcs and arcs[-1][1] >= arcs[0][0] + n:
        raise PerturbationError("finger moves overlap")
    start = arcs[0][1] % n if arcs else Fraction(0)
    shifted = []
    for s0, s1, d in arcs:
        q = 1 if s0 < start else 0
        shifted.append((s0 + q * n, s1 + q * n, period.carry(d, q)))
    shifted.sort()
    out = [period.at(start)]
    cur = start
    for s0, s1, d in shifted + [(start + n, start + n, None)]:
        k = math.floor(cur) + 1
        while k < s0:
            out.append(period.at(Fraction(k)))
            k += 1
        if d is None:
            break
        out.append(period.at(s0))
        out.extend(_finger(period, s0, s1, d))
        out.append(period.at(s1))
        cur = s1
    out.append(period.at(start + n))
    k = math.floor(start) % n
    return out, k, period.frames[k]


def _dedupe_consecutive(pts: List[Point]) -> List[Point]:
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    return out


def apply_moves(curve: ImmersedCurve, moves: Sequence[FingerMove]) -> ImmersedCurve:
    """Apply moves to the components of ``curve`` simultaneously (no chaining)."""
    comps = list(curve.components)
    by_comp = {}
    for m in moves:
        by_comp.setdefault(m.component, []).append(m)
    surf = curve.surface
    for ci, ms in sorted(by_comp.items()):
        period = _develop(curve, ci)
        wholes = [m for m in ms if m.whole]
        if wholes:
            if len(ms) != 1:
                raise PerturbationError("a whole-component move must be alone on its component")
            m = wholes[0]
            d = period.frames[m.start.segment].linear(m.displacement)
            pts = [add(p, d) for p in period.points]
            k, frame = 0, period.frames[0]
        else:
            arcs = []
            for m in ms:
                s0, s1 = _param(m.start), _param(m.end)
                if s1 <= s0:
                    s1 += period.n
                arcs.append((s0, s1, period.frames[m.start.segment].linear(m.displacement)))
            pts, k, frame = _rebuild_component(period, arcs)
        back = frame.inverse()
        local = _dedupe_consecutive([back(p) for p in pts])
        rebuilt = curve_from_polyline(surf, period.squares[k], local, curve.label)
        comps[ci] = rebuilt.components[0]
    return ImmersedCurve(surf, tuple(comps), curve.label)


def apply_plan(curve: ImmersedCurve, plan: PerturbationPlan) -> ImmersedCurve:
    for m in plan.moves:
        curve = apply_moves(curve, [m])
    return curve


# ---------------------------------------------------------------------------
# support checks


def _arc_pieces(curve: ImmersedCurve, ci: int, s0: Fraction, s1: Fraction):
    """Per-square pieces ``(square, a, b)`` of the arc ``[s0, s1]`` in local charts."""
    n = curve.nseg(ci)
    out = []
    cur = s0
    while cur < s1:
        k = math.floor(cur)
        edge = min(Fraction(k + 1), s1)
        seg = curve.segment(ci, k % n)
        out.append((seg.square, seg.at(cur - k), seg.at(edge - k)))
        cur = edge
    return out


def _piece_near(surface: SquareTiledSurface, sq: int, a: Point, b: Point,
                zone_sq: int, zs: Point, ze: Point, reach: Fraction) -> bool:
    lo = (min(zs[0], ze[0]) - reach - 1, min(zs[1], ze[1]) - reach - 1)
    hi = (max(zs[0], ze[0]) + reach + 1, max(zs[1], ze[1]) + reach + 1)
    for off, t in translation_copies(surface, zone_sq, lo, hi):
        if t != sq:
            continue
        if segment_segment_dist2(add(a, off), add(b, off), zs, ze) < reach * reach:
            return True
    return False


def _arc_hits(curve: ImmersedCurve, ci: int, s0: Fraction, s1: Fraction, radius: Fraction,
              zones: Sequence[Zone]) -> bool:
    surf = curve.surface
    for sq, a, b in _arc_pieces(curve, ci, s0, s1):
        for z in zones:
            if _piece_near(surf, sq, a, b, z.square, z.start, z.end, z.radius + radius):
                return True
    return False


def _in_zone(surface: SquareTiledSurface, sq: int, p: Point, zones: Sequence[Zone]) -> bool:
    for z in zones:
        if distance2_to_segment(surface, sq, p, CriticalSegment(z.square, z.start, z.end),
                                z.radius) is not None:
            return True
    return False


# ---------------------------------------------------------------------------
# transversality


def _pairs(curves: Sequence[ImmersedCurve]):
    for i in range(len(curves)):
        for j in range(i, len(curves)):
            yield i, j, fiber_product(curves[i], curves[j])


def _first_tangency(curves: Sequence[ImmersedCurve]):
    for i, j, pts in _pairs(curves):
        for p in pts:
            if not p.transverse:
                return i, j, p
    return None


def _census(curves: Sequence[ImmersedCurve]):
    """(transverse count, tangential count, ambient keys of every point)."""
    tr = tg = 0
    keys = []
    for i, j, pts in _pairs(curves):
        for p in pts:
            if p.transverse:
                tr += 1
            else:
                tg += 1
            keys.append((i, j, p.square, p.point, p.transverse))
    return tr, tg, keys


def _unit(v: Point) -> Point:
    m = _linf(v)
    return (v[0] / m, v[1] / m)


def _overlap_run(a: ImmersedCurve, b: ImmersedCurve, lb: Locator) -> Optional[Tuple[int, int]]:
    """Maximal run of ``b``'s segments around ``lb`` lying on ``a`` (inclusive indices)."""
    ci = lb.component
    n = b.nseg(ci)

    same = a is b

    def on_a(k):
        s = b.segment(ci, k)
        for cj, segs in enumerate(a.components):
            for m, t in enumerate(segs):
                if same and (cj, m) == (ci, k):
                    continue
                if t.square == s.square and on_segment(s.start, t.start, t.end) \
                        and on_segment(s.end, t.start, t.end):
                    return True
        return False

    seeds = [k for k in (lb.segment, lb.segment - 1) if on_a(k % n)]
    if not seeds:
        return None
    lo = hi = seeds[0]
    while hi - lo + 1 < n and on_a((hi + 1) % n):
        hi += 1
    while hi - lo + 1 < n and on_a((lo - 1) % n):
        lo -= 1
    return lo, hi


def _direction(curves, i, j, ip: IntersectionPoint, run) -> Point:
    """Preferred push direction for the branch ``ip.b`` of curve ``j`` (its chart)."""
    a, b = curves[i], curves[j]
    sb, pb, rb = rays_at(b, ip.b)
    if run is not None:
        return rot90(_unit(rb[1]))
    sa, pa, ra = rays_at(a, ip.a)
    m = chart_change(b.surface, sa, pa, sb, pb)
    ra = [m.linear(r) for r in ra]
    v = (ZERO, ZERO)
    for r in ra:
        v = add(v, _unit(r))
    for r in rb:
        v = sub(v, _unit(r))
    if v == (ZERO, ZERO):
        return rot90(_unit(rb[1]))
    return _unit(v)


def _side_square(surface: SquareTiledSurface, sq: int, p: Point, v: Point) -> int:
    try:
        return surface.locate(sq, add(p, v))[0]
    except SurfaceError:
        return sq


def _candidates(curves, i, j, ip: IntersectionPoint):
    """Ordered (branch curve, branch locator, direction, run) candidates."""
    out = []
    for ci, other, loc, oloc in ((j, i, ip.b, ip.a), (i, j, ip.a, ip.b)):
        sub_ip = IntersectionPoint(oloc, loc, ip.square, ip.point, False)
        run = _overlap_run(curves[other], curves[ci], loc)
        v = _direction(curves, other, ci, sub_ip, run)
        sq, p = curves[ci].point(loc)
        tiny = scale(v, Fraction(1, 2 ** MAX_HALVINGS))
        plus, minus = _side_square(curves[ci].surface, sq, p, tiny), \
            _side_square(curves[ci].surface, sq, p, scale(tiny, -1))
        dirs = [v, scale(v, -1)] if plus <= minus else [scale(v, -1), v]
        for d in dirs:
            out.append((ci, loc, d, run))
        if i == j:
            break
    return out


def _try_move(curves, ci, loc: Locator, d: Point, run, k: int, zones):
    curve = curves[ci]
    period = _develop(curve, loc.component)
    n = period.n
    delta = Fraction(1, 2 ** k)
    radius = 2 * delta
    if run is not None and run[1] - run[0] + 1 >= n:
        s0, s1 = Fraction(0), Fraction(n)
        move = FingerMove(loc.component, Locator(loc.component, 0, ZERO),
                          Locator(loc.component, 0, ZERO), scale(d, delta), radius, True)
    else:
        if run is not None:
            lo, hi = Fraction(run[0]), Fraction(run[1] + 1)
        else:
            lo = hi = _param(loc)
        a = period.offset_param(lo, 2 * delta, -1)
        b = period.offset_param(hi, 2 * delta, +1)
        if a is None or b is None or b - a >= n:
            return None
        s0, s1 = a % n, a % n + (b - a)
        start = _locator(loc.component, n, s0)
        end = _locator(loc.component, n, s1)
        move = FingerMove(loc.component, start, end, scale(d, delta), radius)
        # move.displacement is taken in the chart of the start square
        frame = period.frames[start.segment]
        plane_d = period.frames[math.floor(_param(loc)) % n].linear(move.displacement)
        move = FingerMove(move.component, start, end, frame.inverse().linear(plane_d), radius)
    if zones and _arc_hits(curve, loc.component, s0, s1, radius, zones):
        return None
    try:
        new = apply_moves(curve, [move])
    except (CurveError, SurfaceError, PerturbationError):
        return None
    return move, new, s0, s1


def _complement_pieces(curve: ImmersedCurve, ci: int, excluded: Sequence[Tuple[Fraction, Fraction]]):
    """Per-square pieces of component ``ci`` outside the excluded parameter ranges."""
    n = curve.nseg(ci)
    cuts = []
    for a, b in excluded:
        if b - a >= n:
            return None
        a0 = a % n
        b0 = a0 + (b - a)
        cuts.append((a0, b0))
        if b0 > n:
            cuts.append((a0 - n, b0 - n))
    out = []
    for k in range(n):
        keep = [(Fraction(k), Fraction(k + 1))]
        for a, b in cuts:
            nxt = []
            for lo, hi in keep:
                if b <= lo or a >= hi:
                    nxt.append((lo, hi))
                    continue
                if lo < a:
                    nxt.append((lo, a))
                if b < hi:
                    nxt.append((b, hi))
            keep = nxt
        seg = curve.segment(ci, k)
        for lo, hi in keep:
            out.append((seg.square, seg.at(lo - k), seg.at(hi - k)))
    return out


def _clears(curves, ci: int, comp: int, s0: Fraction, s1: Fraction, radius: Fraction,
            partner: Tuple[int, Locator], half: Fraction) -> bool:
    """The support of the arc meets no curve except the touching branch near the tangency."""
    surf = curves[ci].surface
    moving = _arc_pieces(curves[ci], comp, s0, s1)
    mine = _develop(curves[ci], comp)
    e0 = mine.offset_param(s0, radius, -1)
    e1 = mine.offset_param(s1, radius, +1)
    for cj, curve in enumerate(curves):
        for k in range(len(curve.components)):
            excluded = []
            if (cj, k) == (ci, comp):
                if e0 is None or e1 is None:
                    return False
                excluded.append((e0, e1))
            if (cj, k) == (partner[0], partner[1].component):
                per = _develop(curve, k)
                sp = _param(partner[1])
                a = per.offset_param(sp, half, -1)
                b = per.offset_param(sp, half, +1)
                if a is None or b is None:
                    return False
                excluded.append((a, b))
            pieces = _complement_pieces(curve, k, excluded)
            if pieces is None:
                return False
            for sq, a, b in pieces:
                for msq, ma, mb in moving:
                    if _piece_near(surf, sq, a, b, msq, ma, mb, radius):
                        return False
    return True


def make_transverse(curves: Sequence[ImmersedCurve], fixed_zones: Sequence[Zone] = (),
                    max_rounds: int = 64) -> Tuple[List[ImmersedCurve], List[PerturbationPlan]]:
    """Resolve every tangential intersection by finger moves; one plan per curve.

    Tie-break: push toward the side whose square index is smaller; when both
    sides lie in one square, push the branch toward the other branch.  The
    displacement is ``1/2^k`` (sup norm) for the smallest ``k`` that works.
    """
    curves = list(curves)
    zones = tuple(fixed_zones)
    moves: List[List[FingerMove]] = [[] for _ in curves]
    for _ in range(max_rounds):
        bad = _first_tangency(curves)
        if bad is None:
            break
        i, j, ip = bad
        if zones and _in_zone(curves[i].surface, ip.square, ip.point, zones):
            raise Unresolvable(f"tangency {ip} lies inside a fixed zone")
        tangential = _census(curves)[1]
        done = False
        for ci, loc, d, run in _candidates(curves, i, j, ip):
            for k in range(MIN_HALVINGS, MAX_HALVINGS):
                got = _try_move(curves, ci, loc, d, run, k, zones)
                if got is None:
                    continue
                move, new, s0, s1 = got
                partner = (i, ip.a) if ci == j else (j, ip.b)
                if not move.whole and not _clears(curves, ci, loc.component, s0, s1, move.radius,
                                                  partner, 3 * move.radius):
                    continue
                trial = list(curves)
                trial[ci] = new
                if _census(trial)[1] >= tangential:
                    continue
                curves = trial
                moves[ci].append(move)
                done = True
                break
            if done:
                break
        if not done:
            raise Unresolvable(f"no finger move resolves {ip}")
    else:
        raise Unresolvable("tangencies keep reappearing")
    plans = [PerturbationPlan(c.label, tuple(ms), zones) for c, ms in zip(curves, moves)]
    return curves, plans


# ---------------------------------------------------------------------------
# lifting to the correspondence


@dataclass(frozen=True)
class LiftedMove:
    """Finger move on ``g2^-1(L2)`` that shifts only the ``g1`` image.

    The arc runs ``start -> end`` on ``component`` of the preimage curve; its
    ``g1`` image is displaced by ``displacement`` (a vector on F1) while the
    ``g2`` image of every point stays where it was.
    """

    component: int
    start: Locator
    end: Locator
    sheet: int
    displacement: Point
    radius: Fraction


@dataclass(frozen=True)
class LiftedPlan:
    correspondence: str
    preimage_label: str
    moves: Tuple[LiftedMove, ...] = ()

    @property
    def is_identity(self) -> bool:
        return not self.moves


def _preimage_locator(pre: ImmersedCurve, ci: int, piece: TracePiece, t) -> Locator:
    sheet, fpt, u = piece.at(t)
    hits = []
    for k, seg in enumerate(pre.components[ci]):
        if seg.square != sheet or not on_segment(fpt, seg.start, seg.end):
            continue
        tr = pre.provenance[ci][k] if pre.provenance else ()
        if tr and not any(p.component == piece.component and p.segment == piece.segment for p in tr):
            continue
        d = seg.direction
        num = fpt[0] - seg.start[0] if d[0] != 0 else fpt[1] - seg.start[1]
        den = d[0] if d[0] != 0 else d[1]
        hits.append(pre.normalize(ci, k, num / den))
    if len(hits) != 1:
        raise PerturbationError(f"cannot locate trace point {fpt} on the preimage ({len(hits)} hits)")
    return hits[0]


def lift_perturbation(F: Correspondence, L2: ImmersedCurve,
                      plan: PerturbationPlan) -> LiftedPlan:
    """Lift a one-round plan on ``compose(F, L2)`` to a plan on ``F``.

    Raises :class:`SupportHitsSingularity` if a move comes within its radius of
    a fold image of ``g1``.
    """
    composed = compose(F, L2)
    pre = preimage_curve(F.g2, L2)
    crit = zones_around(F.g1, ZERO)
    lifted = []
    for m in plan.moves:
        n = composed.nseg(m.component)
        if m.whole:
            s0, s1 = Fraction(0), Fraction(n)
        else:
            s0, s1 = _param(m.start), _param(m.end)
            if s1 <= s0:
                s1 += n
        if _arc_hits(composed, m.component, s0, s1, m.radius, crit):
            raise SupportHitsSingularity(
                f"move on component {m.component} reaches a fold image of {F.g1.name}")
        if m.whole:
            raise PerturbationError("whole-component moves are not lifted")
        ends = []
        for loc in (m.start, m.end):
            piece = trace_at(composed.provenance[loc.component][loc.segment], loc.t)
            ends.append((_preimage_locator(pre, loc.component, piece, loc.t), piece.sheet))
        period = _develop(composed, m.component)
        plane_d = period.frames[m.start.segment].linear(m.displacement)
        lifted.append(LiftedMove(m.component, ends[0][0], ends[1][0], ends[0][1], plane_d, m.radius))
    if len(plan.moves) > 1 and len({m.component for m in plan.moves}) < len(plan.moves):
        # moves on one component are chained; their locators drift after the first
        raise PerturbationError("lifting supports one move per component")
    return LiftedPlan(F.name, pre.label, tuple(lifted))


def compose_perturbed(F: Correspondence, L2: ImmersedCurve, lifted: LiftedPlan,
                      label: Optional[str] = None) -> ImmersedCurve:
    """``g1'(g2^-1(L2))`` where ``g1'`` is ``g1`` shifted along the lifted arcs."""
    pre = preimage_curve(F.g2, L2)
    g1 = F.g1
    comps = []
    for ci, segs in enumerate(pre.components):
        # images of a preimage component develop by summing affine images of steps
        pts = [g1.affine[segs[0].square](segs[0].start)]
        for s in segs:
            pts.append(add(pts[-1], g1.affine[s.square].linear(s.direction)))
        shift = sub(pts[-1], pts[0])
        period = _Period(pts, [IDENTITY] * len(segs), [g1.assignment[segs[0].square]] * len(segs),
                         Motion(0, shift[0], shift[1]))
        arcs = []
        for m in lifted.moves:
            if m.component != ci:
                continue
            s0, s1 = _param(m.start), _param(m.end)
            if s1 <= s0:
                s1 += period.n
            arcs.append((s0, s1, m.displacement))
        out, _, _ = _rebuild_component(period, arcs)
        c = curve_from_polyline(g1.target, period.squares[0], _dedupe_consecutive(out), "tmp")
        comps.append(c.components[0])
    return ImmersedCurve(g1.target, tuple(comps), label or f"{F.name}o{L2.label}")
