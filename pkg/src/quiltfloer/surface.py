"""Square-tiled closed oriented surfaces.

A surface is a finite set of unit squares whose 4*n directed sides are paired
by an involution.  Sides are numbered counterclockwise::

    side 0: bottom  (0,0)->(1,0)     side 2: top   (1,1)->(0,1)
    side 1: right   (1,0)->(1,1)     side 3: left  (0,1)->(0,0)

and a point on side ``s`` is addressed by its counterclockwise parameter
``t``.  An orientation-compatible gluing sends parameter ``t`` on one side to
``1 - t`` on the partner side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import HALF, ONE, ZERO, Point, rot90, sub

SIDE_NAMES = {"bottom": 0, "right": 1, "top": 2, "left": 3}
SIDE_DIRS = [(ONE, ZERO), (ZERO, ONE), (-ONE, ZERO), (ZERO, -ONE)]
CORNERS = [(ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE)]


class SurfaceError(ValueError):
    pass


class NonOrientable(SurfaceError):
    pass


class Disconnected(SurfaceError):
    pass


class MalformedGluing(SurfaceError):
    pass


class CornerHit(SurfaceError):
    """A straight walk passed exactly through a square corner."""


def side_point(s: int, t) -> Point:
    t = Fraction(t)
    if s == 0:
        return (t, ZERO)
    if s == 1:
        return (ONE, t)
    if s == 2:
        return (ONE - t, ONE)
    return (ZERO, ONE - t)


def side_param(s: int, p: Point) -> Fraction:
    if s == 0:
        return p[0]
    if s == 1:
        return p[1]
    if s == 2:
        return ONE - p[0]
    return ONE - p[1]


def sides_containing(p: Point) -> List[int]:
    out = []
    if p[1] == 0 and 0 <= p[0] <= 1:
        out.append(0)
    if p[0] == 1 and 0 <= p[1] <= 1:
        out.append(1)
    if p[1] == 1 and 0 <= p[0] <= 1:
        out.append(2)
    if p[0] == 0 and 0 <= p[1] <= 1:
        out.append(3)
    return out


def in_closed_square(p: Point) -> bool:
    return 0 <= p[0] <= 1 and 0 <= p[1] <= 1


def in_open_square(p: Point) -> bool:
    return 0 < p[0] < 1 and 0 < p[1] < 1


def is_corner(p: Point) -> bool:
    return p[0] in (0, 1) and p[1] in (0, 1)


@dataclass(frozen=True)
class Motion:
    """Orientation-preserving isometry ``p -> rot90^k(p) + (tx, ty)``."""

    k: int = 0
    tx: Fraction = ZERO
    ty: Fraction = ZERO

    def __call__(self, p: Point) -> Point:
        q = rot90(p, self.k)
        return (q[0] + self.tx, q[1] + self.ty)

    def linear(self, v: Point) -> Point:
        return rot90(v, self.k)

    def then(self, other: "Motion") -> "Motion":
        """``self`` after ``other`` (apply ``other`` first)."""
        t = rot90((other.tx, other.ty), self.k)
        return Motion((self.k + other.k) % 4, t[0] + self.tx, t[1] + self.ty)

    def inverse(self) -> "Motion":
        t = rot90((-self.tx, -self.ty), -self.k)
        return Motion((-self.k) % 4, t[0], t[1])

    @property
    def is_identity(self) -> bool:
        return self.k % 4 == 0 and self.tx == 0 and self.ty == 0


IDENTITY = Motion()


@dataclass(frozen=True)
class SquareTiledSurface:
    """Validated square-tiled surface; build with :func:`build_surface`."""

    n: int
    gluing: Tuple[Tuple[int, int], ...]  # index 4*sq + side -> (sq', side')
    name: str = ""
    _vertex_of: Tuple[int, ...] = field(default=(), repr=False, compare=False)
    _vertex_sizes: Tuple[int, ...] = field(default=(), repr=False, compare=False)

    def partner(self, sq: int, side: int) -> Tuple[int, int]:
        return self.gluing[4 * sq + side]

    def transition(self, sq: int, side: int) -> Motion:
        """Motion carrying the partner square's local coordinates into ``sq``'s frame."""
        j, s2 = self.partner(sq, side)
        k = (side - s2 - 2) % 4
        base = rot90(side_point(s2, ONE), k)
        p0 = side_point(side, ZERO)
        return Motion(k, p0[0] - base[0], p0[1] - base[1])

    def cross(self, sq: int, side: int, t) -> Tuple[int, int, Fraction]:
        j, s2 = self.partner(sq, side)
        return j, s2, ONE - Fraction(t)

    @property
    def num_vertices(self) -> int:
        return len(self._vertex_sizes)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - 2 * self.n + self.n

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    def vertex_id(self, sq: int, corner: int) -> int:
        return self._vertex_of[4 * sq + corner]

    def cone_angles(self) -> List[int]:
        """Cone angle at each vertex in units of pi/2."""
        return list(self._vertex_sizes)

    @property
    def is_translation(self) -> bool:
        return all(self.partner(i, s)[1] == (s + 2) % 4 for i in range(self.n) for s in range(4))

    @property
    def is_flat_torus(self) -> bool:
        """Genus one with no cone points: the developing map is a global isometry."""
        return self.genus == 1 and all(v == 4 for v in self._vertex_sizes)

    def right(self, sq: int) -> int:
        return self.partner(sq, 1)[0]

    def left(self, sq: int) -> int:
        return self.partner(sq, 3)[0]

    def up(self, sq: int) -> int:
        return self.partner(sq, 2)[0]

    def down(self, sq: int) -> int:
        return self.partner(sq, 0)[0]

    def offset(self, sq: int, dx: int, dy: int) -> int:
        """Square reached by ``dx`` steps right then ``dy`` steps up (translation surfaces)."""
        if not self.is_translation:
            raise SurfaceError("offset() needs a translation surface")
        for _ in range(abs(dx)):
            sq = self.right(sq) if dx > 0 else self.left(sq)
        for _ in range(abs(dy)):
            sq = self.up(sq) if dy > 0 else self.down(sq)
        return sq

    # -- point handling -------------------------------------------------

    def walk(self, sq: int, a: Point, b: Point, allow_corners: bool = False):
        """Follow the straight segment from ``a`` to ``b`` (both in ``sq``'s frame).

        ``a`` must lie in the closed square.  Returns ``(pieces, end)`` where
        ``pieces`` is a list of ``(square, p, q)`` in local coordinates and
        ``end = (square, local_point, frame)`` with ``frame`` the motion from
        the final square's coordinates into ``sq``'s frame.
        """
        pieces = []
        cur, p, target, frame = sq, a, b, IDENTITY
        for _ in range(100000):
            d = sub(target, p)
            if d == (ZERO, ZERO):
                return pieces, (cur, p, frame)
            lam = _exit_param(p, d)
            if lam >= 1:
                pieces.append((cur, p, target))
                return pieces, (cur, target, frame)
            q = (p[0] + lam * d[0], p[1] + lam * d[1])
            if lam > 0:
                pieces.append((cur, p, q))
            out = _exit_sides(q, d)
            if not out:
                raise SurfaceError("walk stalled on a square boundary")
            if len(out) > 1 or is_corner(q):
                if not allow_corners:
                    raise CornerHit(f"segment passes through a corner of square {cur}")
            s = out[0]
            t = side_param(s, q)
            j, s2, t2 = self.cross(cur, s, t)
            m = self.transition(cur, s)
            minv = m.inverse()
            p = side_point(s2, t2) if not is_corner(q) else minv(q)
            target = minv(target)
            frame = frame.then(m)
            cur = j
        raise SurfaceError("walk did not terminate")

    def locate(self, sq: int, p: Point) -> Tuple[int, Point]:
        """Square and local coordinates of a point given in ``sq``'s (extended) frame."""
        if in_closed_square(p):
            return sq, p
        if self.is_translation:
            dx, dy = math.floor(p[0]), math.floor(p[1])
            return self.offset(sq, dx, dy), (p[0] - dx, p[1] - dy)
        _, (j, q, _) = self.walk(sq, (HALF, HALF), p, allow_corners=True)
        return j, q

    def canonical(self, sq: int, p: Point):
        """Hashable key identifying an ambient point regardless of its chart."""
        if not in_closed_square(p):
            sq, p = self.locate(sq, p)
        if is_corner(p):
            c = CORNERS.index(p)
            return ("v", self.vertex_id(sq, c))
        reps = [(sq, p)]
        for s in sides_containing(p):
            j, s2, t2 = self.cross(sq, s, side_param(s, p))
            reps.append((j, side_point(s2, t2)))
        return ("p",) + min(reps)

    def chart_of(self, sq: int, p: Point) -> Tuple[int, Point]:
        key = self.canonical(sq, p)
        if key[0] == "v":
            return sq, p
        return key[1], key[2]

    def describe(self) -> str:
        return f"SquareTiledSurface({self.name or '?'}: {self.n} squares, genus {self.genus})"


def _exit_param(p: Point, d: Point) -> Fraction:
    lam = None
    for c in (0, 1):
        if d[c] > 0:
            v = (ONE - p[c]) / d[c]
        elif d[c] < 0:
            v = -p[c] / d[c]
        else:
            continue
        lam = v if lam is None else min(lam, v)
    return lam if lam is not None else Fraction(10 ** 9)


def _exit_sides(q: Point, d: Point) -> List[int]:
    out = []
    if q[1] == 0 and d[1] < 0:
        out.append(0)
    if q[0] == 1 and d[0] > 0:
        out.append(1)
    if q[1] == 1 and d[1] > 0:
        out.append(2)
    if q[0] == 0 and d[0] < 0:
        out.append(3)
    return out


def _parse_side(s) -> int:
    if isinstance(s, int):
        if s not in range(4):
            raise MalformedGluing(f"bad side {s}")
        return s
    try:
        return SIDE_NAMES[s]
    except KeyError:
        raise MalformedGluing(f"bad side {s!r}") from None


def build_surface(n: int, table: Iterable[Sequence], name: str = "") -> SquareTiledSurface:
    """Validate a gluing table and return the surface.

    Each entry is ``(sq, side, sq2, side2)`` or ``(sq, side, sq2, side2, flip)``;
    sides are ints or ``bottom/right/top/left``.  ``flip=True`` marks an
    orientation-reversing identification (parameter ``t`` to ``t``).  Tables
    whose flips can be undone by reflecting some squares are normalised;
    genuinely non-orientable ones raise :class:`NonOrientable`.
    """
    if n < 1:
        raise MalformedGluing("need at least one square")
    pairs: Dict[Tuple[int, int], Tuple[int, int, bool]] = {}
    for entry in table:
        if len(entry) not in (4, 5):
            raise MalformedGluing(f"bad gluing entry {entry!r}")
        i, s, j, s2 = int(entry[0]), _parse_side(entry[1]), int(entry[2]), _parse_side(entry[3])
        flip = bool(entry[4]) if len(entry) == 5 else False
        for q in (i, j):
            if not 0 <= q < n:
                raise MalformedGluing(f"square index {q} out of range")
        if (i, s) == (j, s2):
            raise MalformedGluing(f"side {(i, s)} glued to itself")
        for a, b in (((i, s), (j, s2)), ((j, s2), (i, s))):
            if a in pairs and pairs[a][:2] != b:
                raise MalformedGluing(f"side {a} glued twice")
            pairs[a] = (b[0], b[1], flip)
    missing = [(i, s) for i in range(n) for s in range(4) if (i, s) not in pairs]
    if missing:
        raise MalformedGluing(f"unglued sides: {missing}")

    # connectivity
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for s in range(4):
            j = pairs[(i, s)][0]
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != n:
        raise Disconnected(f"squares {sorted(set(range(n)) - seen)} unreachable from square 0")

    # orientation: colour squares so that plain gluings join equal colours
    colour = {0: 0}
    stack = [0]
    while stack:
        i = stack.pop()
        for s in range(4):
            j, _, flip = pairs[(i, s)]
            want = colour[i] ^ int(flip)
            if j in colour:
                if colour[j] != want:
                    raise NonOrientable("gluing table admits no consistent orientation")
            else:
                colour[j] = want
                stack.append(j)

    reflect = {0: 0, 1: 3, 2: 2, 3: 1}
    glue: List[Optional[Tuple[int, int]]] = [None] * (4 * n)
    for (i, s), (j, s2, _) in pairs.items():
        si = reflect[s] if colour[i] else s
        sj = reflect[s2] if colour[j] else s2
        glue[4 * i + si] = (j, sj)

    surf = SquareTiledSurface(n, tuple(glue), name)
    return _with_vertices(surf)


def _with_vertices(surf: SquareTiledSurface) -> SquareTiledSurface:
    parent = list(range(4 * surf.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for i in range(surf.n):
        for s in range(4):
            j, s2 = surf.partner(i, s)
            union(4 * i + s, 4 * j + (s2 + 1) % 4)
            union(4 * i + (s + 1) % 4, 4 * j + s2)
    roots = sorted({find(x) for x in range(4 * surf.n)})
    rid = {r: k for k, r in enumerate(roots)}
    vof = tuple(rid[find(x)] for x in range(4 * surf.n))
    sizes = [0] * len(roots)
    for v in vof:
        sizes[v] += 1
    object.__setattr__(surf, "_vertex_of", vof)
    object.__setattr__(surf, "_vertex_sizes", tuple(sizes))
    return surf


def from_permutations(right: Sequence[int], up: Sequence[int], name: str = "") -> SquareTiledSurface:
    """Translation surface from its right and up neighbour permutations."""
    n = len(right)
    if sorted(right) != list(range(n)) or sorted(up) != list(range(n)):
        raise MalformedGluing("right/up must be permutations")
    table = []
    for i in range(n):
        table.append((i, 1, right[i], 3))
        table.append((i, 2, up[i], 0))
    return build_surface(n, table, name)


def torus(width: int = 1, height: int = 1, name: str = "") -> SquareTiledSurface:
    """Rectangular ``width x height`` grid torus; square ``x + width*y`` sits at (x, y)."""
    right = [((i % width + 1) % width) + width * (i // width) for i in range(width * height)]
    up = [(i % width) + width * ((i // width + 1) % height) for i in range(width * height)]
    return from_permutations(right, up, name or f"T{width}x{height}")
