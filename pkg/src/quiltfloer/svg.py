"""Plain SVG diagnostics: surfaces drawn square by square with curves and marked points."""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple

from .curves import ImmersedCurve, IntersectionPoint
from .exact import Point
from .surface import SquareTiledSurface

CELL = 160
PAD = 20
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _xy(origin: Tuple[float, float], sq: int, p: Point) -> Tuple[str, str]:
    x = origin[0] + sq * (CELL + PAD) + float(p[0]) * CELL
    y = origin[1] + CELL - float(p[1]) * CELL
    return f"{x:.2f}", f"{y:.2f}"


def panel(surface: SquareTiledSurface, curves: Sequence[ImmersedCurve],
          points: Iterable[IntersectionPoint], origin: Tuple[float, float], title: str) -> List[str]:
    out = [f'<text x="{origin[0]:.0f}" y="{origin[1] - 6:.0f}" font-size="12">{title}</text>']
    for sq in range(surface.n):
        x, y = _xy(origin, sq, (0, 1))
        out.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="none" '
                   f'stroke="#999"/>')
        out.append(f'<text x="{x}" y="{float(y) + CELL + 12:.2f}" font-size="10">sq{sq}</text>')
    for colour, c in zip(COLOURS * 4, curves):
        for comp in c.components:
            for seg in comp:
                x1, y1 = _xy(origin, seg.square, seg.start)
                x2, y2 = _xy(origin, seg.square, seg.end)
                out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}" '
                           f'stroke-width="2"/>')
    for i, p in enumerate(points):
        x, y = _xy(origin, p.square, p.point)
        out.append(f'<circle cx="{x}" cy="{y}" r="4" fill="black"/>')
        out.append(f'<text x="{float(x) + 5:.2f}" y="{float(y) - 5:.2f}" font-size="10">x{i}</text>')
    return out


def document(panels: Sequence[Tuple[SquareTiledSurface, Sequence[ImmersedCurve],
                                    Sequence[IntersectionPoint], str]]) -> str:
    """One SVG stacking the given panels vertically."""
    width = PAD * 2 + max(s.n for s, *_ in panels) * (CELL + PAD)
    height = PAD + len(panels) * (CELL + 3 * PAD)
    body = []
    for k, (surface, curves, points, title) in enumerate(panels):
        body += panel(surface, curves, points, (PAD, 2 * PAD + k * (CELL + 3 * PAD)), title)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head] + body + ["</svg>"]) + "\n"
