"""Reusable curves and correspondences: wiggled geodesics, coverings, folds."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence, Tuple

from .correspondence import (Affine, Correspondence, IDENTITY_AFFINE, SurfaceMap, compose,
                             compose_left, compose_maps, cylinder, dehn_shear, grid_map)
from .curves import CurveError, ImmersedCurve, curve_from_polyline
from .perturbation import PerturbationPlan, make_transverse
from .surface import SquareTiledSurface, SurfaceError, torus

F = Fraction


def polyline(surface: SquareTiledSurface, pts: Sequence[Tuple], label: str, square: int = 0) -> ImmersedCurve:
    return curve_from_polyline(surface, square, [(F(x), F(y)) for x, y in pts], label)


def geodesic(surface: SquareTiledSurface, direction: Tuple[int, int], base: Tuple, label: str,
             square: int = 0) -> ImmersedCurve:
    """Closed straight curve with period vector ``direction`` through ``base``."""
    bx, by = F(base[0]), F(base[1])
    return polyline(surface, [(bx, by), (bx + direction[0], by + direction[1])], label, square)


def wiggled(surface: SquareTiledSurface, direction: Tuple[int, int], base: Tuple,
            offsets: Sequence, label: str, square: int = 0) -> ImmersedCurve:
    """Geodesic whose ``len(offsets)`` interior subdivision points are pushed sideways.

    Offsets are measured along the left normal ``(-q, p)``; the lift stays a
    graph over the straight line, so it embeds in the plane.
    """
    p, q = direction
    bx, by = F(base[0]), F(base[1])
    m = len(offsets) + 1
    pts = [(bx, by)]
    for i, off in enumerate(offsets, start=1):
        t = F(i, m)
        off = F(off)
        pts.append((bx + p * t - q * off, by + q * t + p * off))
    pts.append((bx + p, by + q))
    return polyline(surface, pts, label, square)


def period_basis(surface: SquareTiledSurface) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """Periods of a flat torus in square 0's chart: along its row, then up to the row again."""
    row = cylinder(surface, ("row", 0))[1]
    sq, height = surface.up(0), 1
    while sq not in row:
        sq, height = surface.up(sq), height + 1
    return (len(row), 0), (-row.index(sq), height)


def random_wiggled(rng: random.Random, surface: SquareTiledSurface, label: str,
                   max_coord: int = 2, max_wiggles: int = 3, denom: int = 12,
                   amplitude: Fraction = F(1, 3)) -> ImmersedCurve:
    """Random wiggled geodesic on a flat torus, retrying off corners.

    The primitive class ``(p, q)`` is taken in the period basis of the torus.
    """
    e1, e2 = period_basis(surface)
    for _ in range(1000):
        a = rng.randint(-max_coord, max_coord)
        b = rng.randint(-max_coord, max_coord)
        if (a, b) == (0, 0) or gcd(abs(a), abs(b)) != 1:
            continue
        p, q = a * e1[0] + b * e2[0], a * e1[1] + b * e2[1]
        base = (F(rng.randint(1, 4 * denom - 1), 4 * denom), F(rng.randint(1, 4 * denom - 1), 4 * denom))
        k = rng.randint(0, max_wiggles)
        lim = int(amplitude * denom)
        offs = [F(rng.randint(-lim, lim), denom) for _ in range(k)]
        try:
            return wiggled(surface, (p, q), base, offs, label)
        except (CurveError, SurfaceError):
            continue
    raise RuntimeError("could not place a random curve off the corners")


# ---------------------------------------------------------------------------
# correspondences


def covering_correspondence(width: int = 2, height: int = 1, shift=(F(1, 2), 0),
                            linear=((1, 0), (0, 1)), name: str = "C") -> Correspondence:
    """Grid torus covering the unit torus twice over: ``g1 = p mod 1``, ``g2 = (M p + shift) mod 1``.

    ``linear`` must have determinant 1 so both legs pull back the same area form.
    """
    Fsurf = torus(width, height)
    T1, T2 = torus(1, 1, "F1"), torus(1, 1, "F2")
    g1 = grid_map(Fsurf, T1, width, name="g1")
    g2 = grid_map(Fsurf, T2, width, linear=linear, shift=shift, name="g2")
    return Correspondence(Fsurf, g1, g2, name)


def fold_map(total: SquareTiledSurface, target: SquareTiledSurface, name: str = "fold") -> SurfaceMap:
    """Fold the 1x2 torus onto the unit torus along its two horizontal circles."""
    return SurfaceMap(total, target, (0, 0),
                      (IDENTITY_AFFINE, Affine.of(((1, 0, 0), (0, -1, 1)))),
                      ("covering", "fold"), name)


def fold_correspondence(twist: int = 1, reading: str = "shear", name: str = "F") -> Correspondence:
    """Two folds of the 1x2 torus, the second precomposed with a twist of row 0.

    This is the shape of the worked example: both legs fold along the middle
    circles, and the right leg also twists.
    """
    total = torus(1, 2, "F")
    T1, T2 = torus(1, 1, "F1"), torus(1, 1, "F2")
    g1 = fold_map(total, T1, "g1")
    tw = dehn_shear(total, ("row", 0), twist, reading, "twist")
    g2 = compose_maps(fold_map(total, T2, "fold2"), tw, "g2")
    return Correspondence(total, g1, g2, name)


# ---------------------------------------------------------------------------
# worked example


@dataclass(frozen=True)
class WorkedExample:
    """Fold-and-twist configuration with a self-intersection cochain on ``L1 o F``."""

    correspondence: Correspondence
    left_curve: ImmersedCurve          # L1 on F1
    right_curve: ImmersedCurve         # L2 on F2
    composed_right: ImmersedCurve      # F o L2 on F1
    composed_left: ImmersedCurve       # L1 o F on F2, perturbed to be transverse
    plan: PerturbationPlan             # move taking the raw L1 o F to composed_left
    cochain_generator: int             # index of b in CF(L1 o F, L1 o F)


def worked_example(twist: int = 1, reading: str = "shear") -> WorkedExample:
    """Vertical ``L1`` through both folds, a shallow V-shaped ``L2``.

    Raw ``L1 o F`` touches itself tangentially on the critical line of ``g2``;
    the transverse perturbation splits the touch into two crossings, and the
    first of them (the lens corner) is the cochain generator.
    """
    C = fold_correspondence(twist, reading)
    L1 = polyline(C.left, [(F(3, 8), F(1, 2)), (F(3, 8), F(3, 2))], "L1")
    L2 = polyline(C.right, [(0, F(1, 3)), (F(1, 2), F(1, 4)), (1, F(1, 3))], "L2")
    right = compose(C, L2)
    (left,), plans = make_transverse([compose_left(L1, C)])
    return WorkedExample(C, L1, L2, right, left, plans[0], 0)
