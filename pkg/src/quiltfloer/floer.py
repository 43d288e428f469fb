"""Mod-2 Floer complexes built from bigon and triangle counts.

Chains are Python ints used as bit sets over the generator list.  A
differential is stored column-wise: ``columns[j]`` is the chain
``mu1(generator j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .curves import ImmersedCurve, IntersectionPoint, fiber_product
from .discs import (DEFAULT_DEPTH, CombinatorialDisc, NonTransverseInput, count_bigons,
                    count_triangles)


class FloerError(ValueError):
    pass


class DifferentialNotSquareZero(FloerError):
    pass


class TwistedDifferentialNotSquareZero(FloerError):
    def __init__(self, msg, generator=None):
        super().__init__(msg)
        self.generator = generator


# ---------------------------------------------------------------------------
# GF(2) linear algebra on bit sets


def bits(chain: int) -> List[int]:
    out, i = [], 0
    while chain:
        if chain & 1:
            out.append(i)
        chain >>= 1
        i += 1
    return out


def apply(columns: Sequence[int], chain: int) -> int:
    out = 0
    for j in bits(chain):
        out ^= columns[j]
    return out


def compose_columns(outer: Sequence[int], inner: Sequence[int]) -> List[int]:
    return [apply(outer, c) for c in inner]


def rank(vectors: Sequence[int]) -> int:
    pivots: Dict[int, int] = {}
    r = 0
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                r += 1
                break
    return r


def transpose(columns: Sequence[int], nrows: int) -> List[int]:
    rows = [0] * nrows
    for j, c in enumerate(columns):
        for i in bits(c):
            rows[i] |= 1 << j
    return rows


# ---------------------------------------------------------------------------
# complexes


@dataclass
class FloerComplex:
    left: str
    right: str
    generators: Tuple[IntersectionPoint, ...]
    columns: List[int]
    provenance: Dict[Tuple[int, int], Tuple[CombinatorialDisc, ...]] = field(default_factory=dict)
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            self.names = tuple(f"x{i}" for i in range(len(self.generators)))

    @property
    def size(self) -> int:
        return len(self.generators)

    def entry(self, out: int, inp: int) -> int:
        return (self.columns[inp] >> out) & 1

    def rows(self) -> List[int]:
        return transpose(self.columns, self.size)

    def squared(self) -> List[int]:
        return compose_columns(self.columns, self.columns)

    def is_square_zero(self) -> bool:
        return not any(self.squared())

    def mu1(self, chain: int) -> int:
        return apply(self.columns, chain)

    def chain(self, names: Sequence[str]) -> int:
        c = 0
        for n in names:
            c ^= 1 << self.names.index(n)
        return c

    def format_chain(self, chain: int) -> str:
        return " + ".join(self.names[i] for i in bits(chain)) or "0"


def build_cf(a: ImmersedCurve, b: ImmersedCurve, depth: int = DEFAULT_DEPTH,
             allow_unverified: bool = False, prefix: str = "x") -> FloerComplex:
    """CF(a, b) with the bigon-count differential."""
    gens = tuple(fiber_product(a, b))
    for g in gens:
        if not g.transverse:
            raise NonTransverseInput(f"{a.label} x {b.label}: tangential intersection {g}")
    cols = [0] * len(gens)
    prov = {}
    for j, xp in enumerate(gens):
        for i, xm in enumerate(gens):
            if i == j:
                continue
            discs = count_bigons(a, b, xp, xm, depth, allow_unverified, check=False)
            if discs:
                prov[(i, j)] = tuple(discs)
            if len(discs) % 2:
                cols[j] |= 1 << i
    return FloerComplex(a.label, b.label, gens, cols, prov,
                        tuple(f"{prefix}{i}" for i in range(len(gens))))


@dataclass
class Mu2:
    """Triangle product CF(a,b) x CF(b,c) -> CF(a,c)."""

    first: FloerComplex
    second: FloerComplex
    target: FloerComplex
    table: Dict[Tuple[int, int], int]
    provenance: Dict[Tuple[int, int, int], Tuple[CombinatorialDisc, ...]]

    def __call__(self, x: int, y: int) -> int:
        out = 0
        for i in bits(x):
            for j in bits(y):
                out ^= self.table.get((i, j), 0)
        return out

    def is_zero(self) -> bool:
        return not any(self.table.values())


def mu2(a: ImmersedCurve, b: ImmersedCurve, c: ImmersedCurve, cf_ab: FloerComplex,
        cf_bc: FloerComplex, cf_ac: FloerComplex, depth: int = DEFAULT_DEPTH,
        allow_unverified: bool = False, first_only: Optional[int] = None,
        second_only: Optional[int] = None) -> Mu2:
    """Triangle counts; ``first_only``/``second_only`` restrict to chains' supports."""
    table: Dict[Tuple[int, int], int] = {}
    prov = {}
    checked = False
    for i, x in enumerate(cf_ab.generators):
        if first_only is not None and not (first_only >> i) & 1:
            continue
        for j, y in enumerate(cf_bc.generators):
            if second_only is not None and not (second_only >> j) & 1:
                continue
            for k, z in enumerate(cf_ac.generators):
                discs = count_triangles(a, b, c, x, y, z, depth, allow_unverified, check=not checked)
                checked = True
                if discs:
                    prov[(i, j, k)] = tuple(discs)
                if len(discs) % 2:
                    table[(i, j)] = table.get((i, j), 0) ^ (1 << k)
    return Mu2(cf_ab, cf_bc, cf_ac, table, prov)


# ---------------------------------------------------------------------------
# bounding cochains


@dataclass(frozen=True)
class BoundingCochain:
    """Mod-2 chain in CF(L, L); ``mu0`` is supplied by the caller, never derived."""

    chain: int
    mu0: int = 0
    higher_vanish: bool = True   # recorded assumption: mu_k(b, ..., b) = 0 for k >= 2


def maurer_cartan(b: BoundingCochain, complex_: FloerComplex) -> bool:
    return (b.mu0 ^ complex_.mu1(b.chain)) == 0


def twisted_differential(cf: FloerComplex, left: Optional[Tuple[int, Mu2]] = None,
                         right: Optional[Tuple[int, Mu2]] = None) -> FloerComplex:
    """``mu1^b(x) = mu1(x) + mu2(b_left, x) + mu2(x, b_right)``.

    ``left`` is ``(b, mu2)`` with mu2 : CF(L,L) x CF(L,K) -> CF(L,K);
    ``right`` is ``(b, mu2)`` with mu2 : CF(L,K) x CF(K,K) -> CF(L,K).
    """
    cols = list(cf.columns)
    for j in range(cf.size):
        x = 1 << j
        if left is not None:
            cols[j] ^= left[1](left[0], x)
        if right is not None:
            cols[j] ^= right[1](x, right[0])
    out = FloerComplex(cf.left, cf.right, cf.generators, cols, dict(cf.provenance), cf.names)
    sq = out.squared()
    for j, c in enumerate(sq):
        if c:
            raise TwistedDifferentialNotSquareZero(
                f"twisted differential squares to {out.format_chain(c)} on {cf.names[j]}", j)
    return out


def homology(cf: FloerComplex) -> int:
    sq = cf.squared()
    for j, c in enumerate(sq):
        if c:
            raise DifferentialNotSquareZero(
                f"mu1^2({cf.names[j]}) = {cf.format_chain(c)}")
    return cf.size - 2 * rank(cf.columns)
