"""Task execution and plain-text reports for scenarios.

Reports are built only from exact data in a fixed order, so identical inputs
give byte-identical files.  Each task section lists the discs behind its
numbers (``D<k>`` identifiers) before closing with its rank line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .correspondence import CorrespondenceError, NotComposable, compose, compose_left
from .curves import CurveError, ImmersedCurve, fiber_product, is_embedded_lift, self_intersections
from .discs import AdmissibilityUnverified, NonTransverseInput
from .exact import fmt_point
from .floer import (BoundingCochain, FloerComplex, FloerError, build_cf, homology,
                    maurer_cartan, mu2, twisted_differential)
from .perturbation import PerturbationError
from .quilt import QuiltError, identify_generators, lift_all, lift_collisions, quilted_columns
from .scenario import Decl, Scenario, Task, Workspace, build
from .surface import SurfaceError

OK, VALIDATION, COMPUTATION, PARSE = 0, 1, 2, 3

# errors that mean the input is unfit (validation) rather than the engine failing
VALIDATION_ERRORS = (NonTransverseInput, AdmissibilityUnverified, NotComposable,
                     CorrespondenceError, CurveError, SurfaceError, PerturbationError, QuiltError)


@dataclass
class Settings:
    depth: int = 4
    allow_unverified: bool = False
    twist_reading: Optional[str] = None


@dataclass
class TaskResult:
    task: Task
    lines: List[str] = field(default_factory=list)
    status: int = OK
    complex: Optional[FloerComplex] = None
    curves: Tuple[ImmersedCurve, ...] = ()
    extra: Dict[str, object] = field(default_factory=dict)


def classify(exc: Exception) -> int:
    cause = getattr(exc, "cause", None) or exc
    return VALIDATION if isinstance(cause, VALIDATION_ERRORS) else COMPUTATION


# ---------------------------------------------------------------------------
# formatting helpers


def _bitrow(row: int, n: int) -> str:
    return "".join("1" if (row >> j) & 1 else "0" for j in range(n)) or "-"


def complex_lines(cf: FloerComplex, disc_ids: Dict[int, str], prefix: str = "") -> List[str]:
    lines = [f"{prefix}generators: {cf.size}"]
    for name, g in zip(cf.names, cf.generators):
        lines.append(f"{prefix}  {name} {g}")
    lines.append(f"{prefix}differential rows (entry j of row i: coefficient of generator i "
                 f"in mu1 of generator j):")
    rows = cf.rows()
    for i in range(cf.size):
        lines.append(f"{prefix}  {cf.names[i]}: {_bitrow(rows[i], cf.size)}")
    for (i, j) in sorted(cf.provenance):
        discs = cf.provenance[(i, j)]
        ids = " ".join(disc_ids[id(d)] for d in discs)
        lines.append(f"{prefix}  entry {cf.names[i]} <- {cf.names[j]}: {len(discs)} disc(s) "
                     f"[{ids}] mod 2 = {len(discs) % 2}")
    return lines


def _register(discs, disc_ids: Dict[int, str], appendix: List[str]):
    for d in discs:
        if id(d) not in disc_ids:
            disc_ids[id(d)] = f"D{len(disc_ids) + 1}"
            appendix.append(f"  {disc_ids[id(d)]} {d.describe()}")


def _register_complex(cf: FloerComplex, disc_ids, appendix):
    for key in sorted(cf.provenance):
        _register(cf.provenance[key], disc_ids, appendix)


# ---------------------------------------------------------------------------
# tasks


def run_complex(task: Task, ws: Workspace, st: Settings) -> TaskResult:
    a, b = ws.curves[task.args[0]], ws.curves[task.args[1]]
    res = TaskResult(task, curves=(a, b))
    cf = build_cf(a, b, st.depth, st.allow_unverified)
    disc_ids, appendix = {}, []
    _register_complex(cf, disc_ids, appendix)
    res.complex = cf
    res.lines += complex_lines(cf, disc_ids)
    if appendix:
        res.lines += ["provenance:"] + appendix
    res.lines.append(f"HF rank = {homology(cf)}")
    return res


def run_quilt(task: Task, ws: Workspace, st: Settings) -> TaskResult:
    L1, F, L2 = ws.curves[task.args[0]], ws.correspondences[task.args[1]], ws.curves[task.args[2]]
    right = compose(F, L2)
    left = compose_left(L1, F)
    table = identify_generators(L1, F, L2, right, left)
    res = TaskResult(task, curves=(L1, L2))
    res.extra["table"] = table
    res.extra["right"] = right
    res.extra["correspondence"] = F
    res.lines.append(f"quilted generators: {len(table)} "
                     f"(left view {len(table.left_view)}, right view {len(table.right_view)})")
    for i, g in enumerate(table.generators):
        res.lines.append(f"  q{i} {g} left=x{table.to_left[i]} right=x{table.to_right[i]}")
    cf = build_cf(L1, right, st.depth, st.allow_unverified)
    statuses = lift_all(cf, F, L1, right, L2)
    res.extra["statuses"] = statuses
    disc_ids, appendix = {}, []
    _register_complex(cf, disc_ids, appendix)
    res.lines.append(f"bigons of CF({L1.label}, {right.label}): {len(statuses)}")
    for s in statuses:
        tag = "lifted" if s.quilt is not None else f"not liftable: {s.error}"
        res.lines.append(f"  {disc_ids[id(s.disc)]} {cf.names[s.inp]} -> {cf.names[s.out]}: {tag}")
    for first, second in lift_collisions(statuses):
        res.lines.append(f"  anomaly: {disc_ids[id(first.disc)]} and {disc_ids[id(second.disc)]} "
                         f"lift to the same quilt")
    quilted = quilted_columns(cf, statuses)
    all_lift = all(s.quilt is not None for s in statuses)
    agree = "yes" if quilted == list(cf.columns) else "no"
    scope = "every bigon lifts" if all_lift else "some bigons do not lift"
    res.lines.append(f"quilted differential equals mu1: {agree} ({scope})")
    if appendix:
        res.lines += ["provenance:"] + appendix
    res.lines.append(f"quilted generator count = {len(table)}")
    return res


def _chain(cf: FloerComplex, names, what: str) -> int:
    unknown = [n for n in names if n not in cf.names]
    if unknown:
        raise QuiltError(f"{what} names unknown generators {', '.join(unknown)}")
    return cf.chain(names)


def run_twisted(task: Task, ws: Workspace, st: Settings, results: Dict[str, TaskResult]) -> TaskResult:
    base = results[task.args[0]]
    if base.complex is None:
        raise FloerError(f"base task {task.args[0]} did not produce a complex")
    B, K = base.curves
    cf = base.complex
    res = TaskResult(task, curves=(B, K))
    cfbb = build_cf(B, B, st.depth, st.allow_unverified, prefix="y")
    m = mu2(B, B, K, cfbb, cf, cf, st.depth, st.allow_unverified)
    b = BoundingCochain(_chain(cfbb, task.option("cochain"), "cochain"),
                        _chain(cfbb, task.option("mu0"), "mu0"))
    disc_ids, appendix = {}, []
    _register_complex(cfbb, disc_ids, appendix)
    for key in sorted(m.provenance):
        _register(m.provenance[key], disc_ids, appendix)
    res.lines.append(f"CF({B.label}, {B.label}):")
    res.lines += complex_lines(cfbb, disc_ids, "  ")
    res.lines.append(f"mu2 : CF({B.label}, {B.label}) x CF({B.label}, {K.label}) -> "
                     f"CF({B.label}, {K.label}):")
    if not m.table:
        res.lines.append("  zero")
    for (i, j), out in sorted(m.table.items()):
        ids = " ".join(disc_ids[id(d)] for k in range(cf.size)
                       for d in m.provenance.get((i, j, k), ()))
        res.lines.append(f"  mu2({cfbb.names[i]}, {cf.names[j]}) = {cf.format_chain(out)} [{ids}]")
    res.lines.append(f"cochain b = {cfbb.format_chain(b.chain)}; mu0 = {cfbb.format_chain(b.mu0)}")
    res.lines.append("assumption: mu_k(b, ..., b) = 0 for k >= 2 (recorded, not verified)")
    mc = maurer_cartan(b, cfbb)
    residue = cfbb.format_chain(b.mu0 ^ cfbb.mu1(b.chain))
    res.lines.append(f"maurer-cartan: {'holds' if mc else 'fails'} (mu0 + mu1(b) = {residue})")
    if not mc:
        res.status = VALIDATION
    tw = twisted_differential(cf, left=(b.chain, m))
    res.complex = tw
    res.lines.append("twisted differential rows:")
    rows = tw.rows()
    for i in range(tw.size):
        res.lines.append(f"  {tw.names[i]}: {_bitrow(rows[i], tw.size)}")
    res.lines.append(f"mu1^b = 0: {'yes' if not any(tw.columns) else 'no'}")
    if appendix:
        res.lines += ["provenance:"] + appendix
    res.lines.append(f"HF^b rank = {homology(tw)}")
    return res


RUNNERS = {"complex": run_complex, "quilt": run_quilt}


def run_task(task: Task, ws: Workspace, st: Settings, results: Dict[str, TaskResult]) -> TaskResult:
    try:
        if task.kind == "twisted":
            return run_twisted(task, ws, st, results)
        return RUNNERS[task.kind](task, ws, st)
    except (ValueError, KeyError) as exc:
        return TaskResult(task, [f"error: {type(exc).__name__}: {exc}"], classify(exc))


# ---------------------------------------------------------------------------
# reports


def _header(kind: str, name: str, st: Settings) -> List[str]:
    return [f"quiltfloer {kind} v1",
            f"scenario: {name}",
            f"depth: {st.depth}",
            f"admissibility: {'unverified allowed' if st.allow_unverified else 'certified'}",
            f"twist reading: {st.twist_reading or 'as declared'}"]


def _object_lines(sc: Scenario, ws: Workspace, st: Settings) -> List[str]:
    lines = []
    for d in sc.decls:
        if d.kind == "surface":
            s = ws.surfaces[d.name]
            lines.append(f"surface {d.name}: {s.n} square(s), genus {s.genus}")
        elif d.kind in ("curve", "compose", "perturb"):
            c = ws.curves[d.name]
            segs = sum(len(comp) for comp in c.components)
            cert = "certified" if is_embedded_lift(c, st.depth) else "not certified"
            if d.kind == "compose":
                corr, curve = d.args
                src = f" = {corr} o {curve}" if d.form == "right" else f" = {curve} o {corr}"
            else:
                src = "" if d.kind == "curve" else f" = perturbed {d.args[0]}"
            lines.append(f"curve {d.name}{src}: {len(c.components)} component(s), {segs} segment(s), "
                         f"embedded lift {cert}")
            if d.kind == "perturb":
                lines.append(f"  plan: {len(ws.plans[d.name].moves)} move(s)")
        elif d.kind == "map":
            f = ws.maps[d.name]
            lines.append(f"map {d.name}: {f.source.name} -> {f.target.name}, kinds {'/'.join(f.kinds)}")
        elif d.kind == "correspondence":
            F = ws.correspondences[d.name]
            lines.append(f"correspondence {d.name}: {F.g1.name} x {F.g2.name} on {F.total.name}")
    return lines


def run_scenario(sc: Scenario, name: str,
                 st: Settings) -> Tuple[int, str, List[TaskResult], Optional[Workspace]]:
    """Build and run every task; returns (exit status, report text, results, workspace)."""
    lines = _header("report", name, st)
    try:
        ws = build(sc, st.twist_reading)
    except ValueError as exc:
        lines += ["", f"build failed: {exc}"]
        return classify(exc), "\n".join(lines) + "\n", [], None
    lines += ["", "== objects"] + _object_lines(sc, ws, st)
    status = OK
    results: Dict[str, TaskResult] = {}
    for task in sc.tasks:
        r = run_task(task, ws, st, results)
        results[task.name] = r
        status = max(status, r.status)
        lines += ["", f"== task {task.name}: {task.kind} {' '.join(task.args)}"] + r.lines
    return status, "\n".join(lines) + "\n", list(results.values()), ws


# ---------------------------------------------------------------------------
# check


def _task_pairs(task: Task, ws: Workspace) -> List[Tuple[str, ImmersedCurve, ImmersedCurve]]:
    if task.kind == "complex":
        return [("", ws.curves[task.args[0]], ws.curves[task.args[1]])]
    if task.kind == "quilt":
        L1, F, L2 = (ws.curves[task.args[0]], ws.correspondences[task.args[1]],
                     ws.curves[task.args[2]])
        try:
            return [("", L1, compose(F, L2)), ("", compose_left(L1, F), L2)]
        except NotComposable:
            return []
    return []


def check_scenario(sc: Scenario, name: str, st: Settings) -> Tuple[int, str]:
    """Validate without computing discs: surfaces, transversality, composability, certificates."""
    lines = _header("check", name, st)
    failures: List[Tuple[Decl, Optional[Exception]]] = []
    ws = build(sc, st.twist_reading, failures)
    failed = {d.name for d, _ in failures}
    problems = 0
    lines.append("")
    for d, exc in failures:
        problems += 1
        if exc is None:
            lines.append(f"SKIP {d.kind} {d.name} (line {d.line}): depends on a failed declaration")
        elif isinstance(exc, NotComposable):
            w = exc.witness
            where = f" at sq{w[0]}({fmt_point(w[1])})" if w else ""
            lines.append(f"FAIL composability: {d.name} (line {d.line}): {exc}{where}")
        else:
            lines.append(f"FAIL {d.kind} {d.name} (line {d.line}): {type(exc).__name__}: {exc}")
    for d in sc.decls:
        if d.name in failed:
            continue
        if d.kind == "surface":
            s = ws.surfaces[d.name]
            lines.append(f"surface {d.name}: legal, {s.n} square(s), genus {s.genus}")
        elif d.kind in ("curve", "compose", "perturb"):
            c = ws.curves[d.name]
            certified = is_embedded_lift(c, st.depth)
            cert = "embedded lift certified" if certified else "no embedded-lift certificate"
            lines.append(f"curve {d.name}: {cert}")
            if not certified and not st.allow_unverified:
                problems += 1
                lines.append(f"WARNING admissibility: {d.name} has no certificate within depth {st.depth}")
            if d.kind == "compose":
                lines.append("  composability: ok")
        elif d.kind == "correspondence":
            lines.append(f"correspondence {d.name}: legs agree on area forms")
    for task in sc.tasks:
        if any(a in failed for a in task.args):
            continue
        for _, a, b in _task_pairs(task, ws):
            bad = [p for p in fiber_product(a, b) if not p.transverse]
            for p in bad:
                problems += 1
                lines.append(f"WARNING transversality: {a.label} x {b.label} tangential at "
                             f"sq{p.square}({fmt_point(p.point)})")
            if not bad:
                lines.append(f"task {task.name}: {a.label} x {b.label} transverse")
        if task.kind == "twisted":
            B = ws.curves.get(sc.tasks[[t.name for t in sc.tasks].index(task.args[0])].args[0])
            bad = [p for p in self_intersections(B) if not p.transverse]
            for p in bad:
                problems += 1
                lines.append(f"WARNING transversality: {B.label} self-tangential at "
                             f"sq{p.square}({fmt_point(p.point)})")
            if not bad:
                lines.append(f"task {task.name}: {B.label} self-intersections transverse")
    lines.append("OK" if problems == 0 else f"FAILED ({problems} problem(s))")
    return (OK if problems == 0 else VALIDATION), "\n".join(lines) + "\n"
