"""Scenario files: a line-based text format describing surfaces, curves, maps and tasks.

Grammar (``#`` starts a comment, blank lines are ignored)::

    quiltfloer-scenario v1
    surface NAME torus W H
    surface NAME squares N            # block: glue SQ SIDE SQ2 SIDE2 [flip] ... end
    curve NAME on SURFACE [square K]  # block: point X Y ... end (closed developed polyline)
    map NAME from SRC to TGT          # block: square I target J rows A B C D E F kind KIND ... end
    map NAME shear SURFACE row|column INDEX amount K [reading shear|reglue]
    map NAME identity SURFACE
    map NAME compose OUTER INNER
    correspondence NAME maps G1 G2
    correspondence NAME diagonal SURFACE
    compose NAME = CORR o CURVE       # CORR o CURVE lives on the left surface
    compose NAME = CURVE o CORR       # CURVE o CORR lives on the right surface
    perturb NAME from CURVE           # block: finger ... / zone ... end
    task NAME complex CURVE_A CURVE_B
    task NAME quilt CURVE_1 CORR CURVE_2
    task NAME twisted COMPLEX_TASK cochain GEN... mu0 GEN...|0

Numbers are integers or ``p/q`` rationals; decimals are rejected.  Every name
must be defined before it is used, so declarations and tasks form a DAG.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .correspondence import (Affine, Correspondence, SurfaceMap,
                             compose, compose_left, compose_maps, dehn_shear, diagonal,
                             identity_map)
from .curves import ImmersedCurve, Locator, curve_from_polyline
from .exact import fmt, parse_frac
from .perturbation import FingerMove, PerturbationPlan, Zone, apply_plan
from .surface import SquareTiledSurface, build_surface, torus

HEADER = "quiltfloer-scenario v1"
READINGS = ("shear", "reglue")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None,
                 cause: Optional[Exception] = None):
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ParseError(ScenarioError):
    pass


class BuildError(ScenarioError):
    """A declaration parsed but could not be realised (illegal surface, bad map, ...)."""


@dataclass(frozen=True)
class Decl:
    kind: str             # surface | curve | map | correspondence | compose | perturb
    name: str
    line: int
    form: str             # sub-form, e.g. "torus", "shear", "left"
    args: tuple
    body: tuple = ()


@dataclass(frozen=True)
class Task:
    name: str
    line: int
    kind: str             # complex | quilt | twisted
    args: tuple
    options: Tuple[Tuple[str, tuple], ...] = ()

    def option(self, key: str) -> tuple:
        for k, v in self.options:
            if k == key:
                return v
        return ()


@dataclass(frozen=True)
class Scenario:
    decls: Tuple[Decl, ...]
    tasks: Tuple[Task, ...]
    kinds: Dict[str, str] = field(default_factory=dict)   # name -> kind, for reference checks


# ---------------------------------------------------------------------------
# parsing


def _tokens(raw: str) -> List[str]:
    return raw.split("#", 1)[0].split()


def _num(tok: str, line: int) -> Fraction:
    try:
        return parse_frac(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad number {tok!r}: {exc}", line) from None


def _int(tok: str, line: int) -> int:
    v = _num(tok, line)
    if v.denominator != 1:
        raise ParseError(f"expected an integer, got {tok!r}", line)
    return int(v)


def parse_locator(tok: str, line: int) -> Locator:
    try:
        comp, rest = tok.split(":")
        seg, t = rest.split("@")
        return Locator(int(comp), int(seg), parse_frac(t))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad locator {tok!r} (expected C:S@T)", line) from None


class _Parser:
    def __init__(self, text: str):
        self.lines = [(i + 1, _tokens(raw)) for i, raw in enumerate(text.splitlines())]
        self.lines = [(n, t) for n, t in self.lines if t]
        self.pos = 0
        self.kinds: Dict[str, str] = {}
        self.decls: List[Decl] = []
        self.tasks: List[Task] = []

    def block(self, line: int) -> List[Tuple[int, List[str]]]:
        body = []
        while self.pos < len(self.lines):
            n, toks = self.lines[self.pos]
            self.pos += 1
            if toks == ["end"]:
                return body
            body.append((n, toks))
        raise ParseError("block is not closed with 'end'", line)

    def ref(self, name: str, kinds: Sequence[str], line: int) -> str:
        if name not in self.kinds:
            raise ParseError(f"undefined name {name!r}", line)
        if self.kinds[name] not in kinds:
            raise ParseError(f"{name!r} is a {self.kinds[name]}, expected {' or '.join(kinds)}", line)
        return name

    def define(self, name: str, kind: str, line: int):
        if name in self.kinds:
            raise ParseError(f"name {name!r} defined twice", line)
        self.kinds[name] = kind

    def parse(self) -> Scenario:
        if not self.lines or self.lines[0][1] != HEADER.split():
            raise ParseError(f"missing header {HEADER!r}", self.lines[0][0] if self.lines else 1)
        self.pos = 1
        while self.pos < len(self.lines):
            line, toks = self.lines[self.pos]
            self.pos += 1
            handler = getattr(self, "_" + toks[0].replace("-", "_"), None)
            if handler is None:
                raise ParseError(f"unknown directive {toks[0]!r}", line)
            handler(line, toks)
        return Scenario(tuple(self.decls), tuple(self.tasks), dict(self.kinds))

    # -- declarations ----------------------------------------------------

    def _surface(self, line, toks):
        if len(toks) == 5 and toks[2] == "torus":
            self.define(toks[1], "surface", line)
            self.decls.append(Decl("surface", toks[1], line, "torus",
                                   (_int(toks[3], line), _int(toks[4], line))))
            return
        if len(toks) == 4 and toks[2] == "squares":
            n = _int(toks[3], line)
            glue = []
            for bl, bt in self.block(line):
                if bt[0] != "glue" or len(bt) not in (5, 6) or (len(bt) == 6 and bt[5] != "flip"):
                    raise ParseError("expected 'glue SQ SIDE SQ2 SIDE2 [flip]'", bl)
                side = [int(s) if s.isdigit() else s for s in (bt[2], bt[4])]
                glue.append((_int(bt[1], bl), side[0], _int(bt[3], bl), side[1], len(bt) == 6))
            self.define(toks[1], "surface", line)
            self.decls.append(Decl("surface", toks[1], line, "squares", (n,), tuple(glue)))
            return
        raise ParseError("expected 'surface NAME torus W H' or 'surface NAME squares N'", line)

    def _curve(self, line, toks):
        if len(toks) not in (4, 6) or toks[2] != "on" or (len(toks) == 6 and toks[4] != "square"):
            raise ParseError("expected 'curve NAME on SURFACE [square K]'", line)
        surf = self.ref(toks[3], ("surface",), line)
        square = _int(toks[5], line) if len(toks) == 6 else 0
        pts = []
        for bl, bt in self.block(line):
            if bt[0] != "point" or len(bt) != 3:
                raise ParseError("expected 'point X Y'", bl)
            pts.append((_num(bt[1], bl), _num(bt[2], bl)))
        if len(pts) < 2:
            raise ParseError("a curve needs at least two points", line)
        self.define(toks[1], "curve", line)
        self.decls.append(Decl("curve", toks[1], line, "polyline", (surf, square), tuple(pts)))

    def _map(self, line, toks):
        name = toks[1] if len(toks) > 1 else ""
        form = toks[2] if len(toks) > 2 else ""
        if form == "from" and len(toks) == 6 and toks[4] == "to":
            src = self.ref(toks[3], ("surface",), line)
            tgt = self.ref(toks[5], ("surface",), line)
            rows = []
            for bl, bt in self.block(line):
                if (len(bt) != 13 or bt[0] != "square" or bt[2] != "target" or bt[4] != "rows"
                        or bt[11] != "kind"):
                    raise ParseError("expected 'square I target J rows A B C D E F kind KIND'", bl)
                coeffs = tuple(_num(t, bl) for t in bt[5:11])
                rows.append((_int(bt[1], bl), _int(bt[3], bl), coeffs, bt[12]))
            self.define(name, "map", line)
            self.decls.append(Decl("map", name, line, "table", (src, tgt), tuple(rows)))
        elif form == "shear" and len(toks) in (8, 10) and toks[4] in ("row", "column") \
                and toks[6] == "amount" and (len(toks) == 8 or toks[8] == "reading"):
            surf = self.ref(toks[3], ("surface",), line)
            reading = toks[9] if len(toks) == 10 else None
            if reading is not None and reading not in READINGS:
                raise ParseError(f"unknown twist reading {reading!r}", line)
            self.define(name, "map", line)
            self.decls.append(Decl("map", name, line, "shear",
                                   (surf, toks[4], _int(toks[5], line), _int(toks[7], line), reading)))
        elif form == "identity" and len(toks) == 4:
            surf = self.ref(toks[3], ("surface",), line)
            self.define(name, "map", line)
            self.decls.append(Decl("map", name, line, "identity", (surf,)))
        elif form == "compose" and len(toks) == 5:
            outer = self.ref(toks[3], ("map",), line)
            inner = self.ref(toks[4], ("map",), line)
            self.define(name, "map", line)
            self.decls.append(Decl("map", name, line, "compose", (outer, inner)))
        else:
            raise ParseError("malformed map declaration", line)

    def _correspondence(self, line, toks):
        if len(toks) == 5 and toks[2] == "maps":
            g1 = self.ref(toks[3], ("map",), line)
            g2 = self.ref(toks[4], ("map",), line)
            self.define(toks[1], "correspondence", line)
            self.decls.append(Decl("correspondence", toks[1], line, "maps", (g1, g2)))
        elif len(toks) == 4 and toks[2] == "diagonal":
            surf = self.ref(toks[3], ("surface",), line)
            self.define(toks[1], "correspondence", line)
            self.decls.append(Decl("correspondence", toks[1], line, "diagonal", (surf,)))
        else:
            raise ParseError("expected 'correspondence NAME maps G1 G2' or '... diagonal SURFACE'",
                             line)

    def _compose(self, line, toks):
        if len(toks) != 6 or toks[2] != "=" or toks[4] != "o":
            raise ParseError("expected 'compose NAME = A o B'", line)
        a, b = toks[3], toks[5]
        if self.kinds.get(a) == "correspondence":
            corr, curve, form = a, self.ref(b, ("curve",), line), "right"
        else:
            curve, form = self.ref(a, ("curve",), line), "left"
            corr = self.ref(b, ("correspondence",), line)
        self.define(toks[1], "curve", line)
        self.decls.append(Decl("compose", toks[1], line, form, (corr, curve)))

    def _perturb(self, line, toks):
        if len(toks) != 4 or toks[2] != "from":
            raise ParseError("expected 'perturb NAME from CURVE'", line)
        src = self.ref(toks[3], ("curve",), line)
        moves, zones = [], []
        for bl, bt in self.block(line):
            if bt[0] == "finger" and len(bt) in (11, 12) and bt[2] == "from" and bt[4] == "to" \
                    and bt[6] == "by" and bt[9] == "radius" and (len(bt) == 11 or bt[11] == "whole"):
                moves.append(FingerMove(_int(bt[1], bl), parse_locator(bt[3], bl),
                                        parse_locator(bt[5], bl),
                                        (_num(bt[7], bl), _num(bt[8], bl)), _num(bt[10], bl),
                                        len(bt) == 12))
            elif bt[0] == "zone" and len(bt) == 8 and bt[6] == "radius":
                zones.append(Zone(_int(bt[1], bl), (_num(bt[2], bl), _num(bt[3], bl)),
                                  (_num(bt[4], bl), _num(bt[5], bl)), _num(bt[7], bl)))
            else:
                raise ParseError("expected a 'finger' or 'zone' line", bl)
        self.define(toks[1], "curve", line)
        self.decls.append(Decl("perturb", toks[1], line, "plan", (src,),
                               (tuple(moves), tuple(zones))))

    # -- tasks -----------------------------------------------------------

    def _task(self, line, toks):
        if len(toks) < 3:
            raise ParseError("expected 'task NAME KIND ...'", line)
        name, kind, rest = toks[1], toks[2], toks[3:]
        if kind == "complex" and len(rest) == 2:
            args = (self.ref(rest[0], ("curve",), line), self.ref(rest[1], ("curve",), line))
            options = ()
        elif kind == "quilt" and len(rest) == 3:
            args = (self.ref(rest[0], ("curve",), line),
                    self.ref(rest[1], ("correspondence",), line),
                    self.ref(rest[2], ("curve",), line))
            options = ()
        elif kind == "twisted" and rest and "cochain" in rest and "mu0" in rest:
            base = self.ref(rest[0], ("task:complex",), line)
            i, j = rest.index("cochain"), rest.index("mu0")
            if not (i == 1 and j > i + 1 and j < len(rest) - 1):
                raise ParseError("expected 'twisted TASK cochain GEN... mu0 GEN...|0'", line)
            args = (base,)
            options = (("cochain", tuple(rest[i + 1:j])),
                       ("mu0", tuple(g for g in rest[j + 1:] if g != "0")))
        else:
            raise ParseError(f"malformed task {kind!r}", line)
        self.define(name, "task:" + kind, line)
        self.tasks.append(Task(name, line, kind, args, options))


def parse_scenario(text: str) -> Scenario:
    return _Parser(text).parse()


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# serialisation of perturbation plans


def _loc(loc: Locator) -> str:
    return str(loc)


def format_perturb_block(name: str, source: str, plan: PerturbationPlan) -> str:
    lines = [f"perturb {name} from {source}"]
    for m in plan.moves:
        tail = " whole" if m.whole else ""
        lines.append(f"  finger {m.component} from {_loc(m.start)} to {_loc(m.end)} "
                     f"by {fmt(m.displacement[0])} {fmt(m.displacement[1])} "
                     f"radius {fmt(m.radius)}{tail}")
    for z in plan.fixed_zones:
        lines.append(f"  zone {z.square} {fmt(z.start[0])} {fmt(z.start[1])} "
                     f"{fmt(z.end[0])} {fmt(z.end[1])} radius {fmt(z.radius)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# building


@dataclass
class Workspace:
    """Realised objects of a scenario, keyed by name."""

    surfaces: Dict[str, SquareTiledSurface] = field(default_factory=dict)
    curves: Dict[str, ImmersedCurve] = field(default_factory=dict)
    maps: Dict[str, SurfaceMap] = field(default_factory=dict)
    correspondences: Dict[str, Correspondence] = field(default_factory=dict)
    plans: Dict[str, PerturbationPlan] = field(default_factory=dict)
    origins: Dict[str, Tuple[str, ...]] = field(default_factory=dict)   # derived curve -> inputs


def _surface(d: Decl) -> SquareTiledSurface:
    if d.form == "torus":
        return torus(d.args[0], d.args[1], d.name)
    table = [(i, s, j, s2, flip) for i, s, j, s2, flip in d.body]
    return build_surface(d.args[0], table, d.name)


def _table_map(d: Decl, ws: Workspace) -> SurfaceMap:
    src, tgt = ws.surfaces[d.args[0]], ws.surfaces[d.args[1]]
    rows = {i: (j, coeffs, kind) for i, j, coeffs, kind in d.body}
    if sorted(rows) != list(range(src.n)):
        raise BuildError(f"map {d.name} must list every square of {src.name} once", d.line)
    assign = tuple(rows[i][0] for i in range(src.n))
    affs = tuple(Affine.of((rows[i][1][:3], rows[i][1][3:])) for i in range(src.n))
    kinds = tuple(rows[i][2] for i in range(src.n))
    return SurfaceMap(src, tgt, assign, affs, kinds, d.name)


def _has(ws: Workspace, name: str) -> bool:
    return any(name in table for table in (ws.surfaces, ws.curves, ws.maps, ws.correspondences))


def build(sc: Scenario, twist_reading: Optional[str] = None,
          failures: Optional[List[Tuple[Decl, Optional[Exception]]]] = None) -> Workspace:
    """Realise every declaration in order; ``twist_reading`` overrides shear maps.

    With a ``failures`` list, errors are recorded there and dependent
    declarations are skipped (recorded with ``None``); otherwise the first
    error raises :class:`BuildError`.
    """
    ws = Workspace()
    for d in sc.decls:
        deps = [a for a in d.args if isinstance(a, str) and a in sc.kinds]
        if failures is not None and not all(_has(ws, a) for a in deps):
            failures.append((d, None))
            continue
        try:
            _build_one(d, ws, twist_reading)
        except (ValueError, KeyError) as exc:
            if failures is None:
                raise BuildError(f"{d.kind} {d.name}: {exc}", d.line, exc) from exc
            failures.append((d, exc))
    return ws


def _build_one(d: Decl, ws: Workspace, twist_reading: Optional[str]):
    if d.kind == "surface":
        ws.surfaces[d.name] = _surface(d)
    elif d.kind == "curve":
        surf, square = d.args
        ws.curves[d.name] = curve_from_polyline(ws.surfaces[surf], square, list(d.body), d.name)
    elif d.kind == "map":
        if d.form == "table":
            ws.maps[d.name] = _table_map(d, ws)
        elif d.form == "shear":
            surf, axis, index, amount, reading = d.args
            reading = twist_reading or reading or "shear"
            ws.maps[d.name] = dehn_shear(ws.surfaces[surf], (axis, index), amount, reading, d.name)
        elif d.form == "identity":
            ws.maps[d.name] = identity_map(ws.surfaces[d.args[0]], d.name)
        else:
            ws.maps[d.name] = compose_maps(ws.maps[d.args[0]], ws.maps[d.args[1]], d.name)
    elif d.kind == "correspondence":
        if d.form == "diagonal":
            ws.correspondences[d.name] = diagonal(ws.surfaces[d.args[0]])
        else:
            g1, g2 = ws.maps[d.args[0]], ws.maps[d.args[1]]
            ws.correspondences[d.name] = Correspondence(g1.source, g1, g2, d.name)
    elif d.kind == "compose":
        corr, curve = ws.correspondences[d.args[0]], ws.curves[d.args[1]]
        if d.form == "right":
            ws.curves[d.name] = compose(corr, curve, d.name)
        else:
            ws.curves[d.name] = compose_left(curve, corr, d.name)
        ws.origins[d.name] = d.args
    elif d.kind == "perturb":
        moves, zones = d.body
        plan = PerturbationPlan(d.args[0], moves, zones)
        ws.plans[d.name] = plan
        ws.curves[d.name] = apply_plan(ws.curves[d.args[0]], plan).with_label(d.name)
        ws.origins[d.name] = d.args
