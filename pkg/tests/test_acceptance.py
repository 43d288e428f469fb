"""Acceptance suite: one PASS/FAIL line per criterion, collected in the terminal summary.

Run with ``pytest tests/test_acceptance.py -v``; the lines also print with ``-s``.
"""

import random
import subprocess
import sys
import time
from fractions import Fraction as F

from oracles import rank_mod2
from quiltfloer.cli import bundled_names, read_scenario
from quiltfloer.correspondence import NotComposable, compose, compose_left
from quiltfloer.curves import Locator, fiber_product, same_curve
from quiltfloer.discs import (AdmissibilityUnverified, DiscError, count_bigons, count_triangles,
                              deck_words, oracle_enumerate)
from quiltfloer.floer import (BoundingCochain, build_cf, homology, maurer_cartan, mu2,
                              twisted_differential)
from quiltfloer.fixtures import (covering_correspondence, fold_correspondence, random_wiggled,
                                 worked_example)
from quiltfloer.perturbation import (FingerMove, PerturbationPlan, SupportHitsSingularity,
                                     apply_plan, compose_perturbed, lift_perturbation)
from quiltfloer.pipeline import Settings, run_scenario
from quiltfloer.quilt import (NotLiftable, from_left_view, from_right_view, identify_generators,
                              lift_bigon_to_quilt)
from quiltfloer.scenario import build, parse_scenario
from quiltfloer.surface import torus

MAX_INTERSECTIONS = 12
DEPTH = 4


def _line(report_line, number, ok, detail):
    text = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(text)
    report_line(text)
    return ok


def _oracle_rank(cf):
    return cf.size - 2 * rank_mod2(cf.columns)


# -- 1: worked example ------------------------------------------------------


def _worked_example_by_api():
    ex = worked_example()
    direct = build_cf(ex.left_curve, ex.composed_right)
    cf = build_cf(ex.composed_left, ex.right_curve, prefix="x")
    cfbb = build_cf(ex.composed_left, ex.composed_left, prefix="y")
    m = mu2(ex.composed_left, ex.composed_left, ex.right_curve, cfbb, cf, cf)
    b = 1 << ex.cochain_generator
    tw = twisted_differential(cf, left=(b, m))
    return {
        "maurer-cartan": maurer_cartan(BoundingCochain(b, b), cfbb),
        "mu1^b = 0": not any(tw.columns),
        "HF^b rank": (homology(tw), _oracle_rank(tw)),
        "direct HF rank": (homology(direct), _oracle_rank(direct)),
        "mu1(b)": cfbb.format_chain(cfbb.mu1(b)),
    }


def _worked_example_by_scenario():
    name, text = read_scenario("section5")
    _, _, results, _ = run_scenario(parse_scenario(text), name, Settings())
    by_task = {r.task.name: r for r in results}
    twisted, direct = by_task["deformed"], by_task["direct"]
    return {
        "maurer-cartan": "maurer-cartan: holds" in "\n".join(twisted.lines),
        "mu1^b = 0": not any(twisted.complex.columns),
        "HF^b rank": (homology(twisted.complex), _oracle_rank(twisted.complex)),
        "direct HF rank": (homology(direct.complex), _oracle_rank(direct.complex)),
    }


def test_criterion_1_worked_example(report_line):
    start = time.perf_counter()
    api = _worked_example_by_api()
    scen = _worked_example_by_scenario()
    elapsed = time.perf_counter() - start
    checks = {}
    for route, vals in (("api", api), ("scenario", scen)):
        checks[f"{route} maurer-cartan(b) with mu0 = b"] = vals["maurer-cartan"] is True
        checks[f"{route} mu1^b = 0"] = vals["mu1^b = 0"]
        checks[f"{route} HF^b rank = 2"] = vals["HF^b rank"] == (2, 2)
        checks[f"{route} direct HF rank = 2"] = vals["direct HF rank"] == (2, 2)
    checks["runtime < 10 s"] = elapsed < 10
    failed = [k for k, v in checks.items() if not v]
    detail = (f"HF^b={api['HF^b rank'][0]}, direct HF={api['direct HF rank'][0]}, "
              f"mu1(b)={api['mu1(b)']}, {elapsed:.1f}s"
              + (f"; failing clauses: {', '.join(failed)}" if failed else ""))
    assert _line(report_line, 1, not failed, detail), detail


# -- 2: differential squares to zero ----------------------------------------


def _random_admissible_pairs(count, seed):
    rng = random.Random(seed)
    surfaces = [torus(1, 1, "T"), torus(2, 1, "T21"), torus(2, 2, "T22")]
    while count:
        s = rng.choice(surfaces)
        a, b = random_wiggled(rng, s, "a"), random_wiggled(rng, s, "b")
        pts = fiber_product(a, b)
        if not 0 < len(pts) <= MAX_INTERSECTIONS or not all(p.transverse for p in pts):
            continue
        try:
            cf = build_cf(a, b, DEPTH)
        except AdmissibilityUnverified:
            continue
        count -= 1
        yield a, b, cf


def test_criterion_2_differential_squares_to_zero(report_line):
    start = time.perf_counter()
    n = violations = 0
    for _, _, cf in _random_admissible_pairs(100, 20240501):
        n += 1
        violations += not cf.is_square_zero()
    elapsed = time.perf_counter() - start
    ok = n >= 100 and violations == 0 and elapsed < 120
    assert _line(report_line, 2, ok, f"{n} fixtures, {violations} violations, {elapsed:.1f}s")


# -- 3: oracle equivalence on bundled fixtures ------------------------------


def _bundled_fixtures():
    """Curve pairs of complex tasks and curve triples of twisted tasks in every bundled scenario."""
    pairs, triples = [], []
    for name in bundled_names():
        sc = parse_scenario(read_scenario(name)[1])
        ws = build(sc)
        complexes = {}
        for t in sc.tasks:
            if t.kind == "complex":
                a, b = (ws.curves[x] for x in t.args[:2])
                pairs.append((f"{name}/{t.name}", a, b))
                complexes[t.name] = (a, b)
            elif t.kind == "quilt":
                L1, corr, L2 = t.args[:3]
                pairs.append((f"{name}/{t.name}", ws.curves[L1],
                              compose(ws.correspondences[corr], ws.curves[L2])))
            elif t.kind == "twisted":
                B, K = complexes[t.args[0]]
                pairs.append((f"{name}/{t.name}", B, B))
                triples.append((f"{name}/{t.name}", B, B, K))
    return pairs, triples


def test_criterion_3_oracle_equivalence(report_line):
    pairs, triples = _bundled_fixtures()
    checked = discrepancies = 0
    for _, a, b in pairs:
        pts = fiber_product(a, b)
        if len(pts) > MAX_INTERSECTIONS:
            continue
        for p in pts:
            for q in pts:
                if p is q:
                    continue
                checked += 1
                discrepancies += deck_words(count_bigons(a, b, p, q)) != \
                    deck_words(oracle_enumerate([a, b], [p, q]))
    for _, a, b, c in triples:
        ab, bc, ac = fiber_product(a, b), fiber_product(b, c), fiber_product(a, c)
        if max(len(ab), len(bc), len(ac)) > MAX_INTERSECTIONS:
            continue
        for x in ab:
            for y in bc:
                for z in ac:
                    checked += 1
                    discrepancies += deck_words(count_triangles(a, b, c, x, y, z)) != \
                        deck_words(oracle_enumerate([a, b, c], [x, y, z]))
    ok = checked > 0 and discrepancies == 0
    assert _line(report_line, 3, ok, f"{len(pairs)} pairs, {len(triples)} triples, "
                                     f"{checked} corner sets, {discrepancies} discrepancies")


# -- 4: three generator readings --------------------------------------------

COVERINGS = [
    dict(),
    dict(shift=(F(1, 3), F(1, 5))),
    dict(linear=((1, 1), (0, 1)), shift=(F(1, 2), F(1, 7))),
]


def _covering_fixtures(count, seed, need_left=True):
    rng = random.Random(seed)
    while count:
        C = covering_correspondence(**rng.choice(COVERINGS))
        L1, L2 = random_wiggled(rng, C.left, "L1"), random_wiggled(rng, C.right, "L2")
        try:
            right = compose(C, L2)
            left = compose_left(L1, C) if need_left else None
        except NotComposable:
            continue
        pts = fiber_product(L1, right) + (fiber_product(left, L2) if need_left else [])
        if not pts or not all(p.transverse for p in pts) or len(pts) > 2 * MAX_INTERSECTIONS:
            continue
        count -= 1
        yield C, L1, L2, right, left


def test_criterion_4_generator_identification(report_line):
    n = bad = 0
    for C, L1, L2, right, left in _covering_fixtures(20, 4711):
        n += 1
        table = identify_generators(L1, C, L2, right, left)
        counts_agree = len(table) == len(table.left_view) == len(table.right_view)
        round_trip = sorted(table.to_left) == sorted(table.to_right) == list(range(len(table)))
        for i, g in enumerate(table.generators):
            a = from_left_view(C, L2, right, table.left_view[table.to_left[i]])
            b = from_right_view(C, L1, left, table.right_view[table.to_right[i]])
            round_trip &= a.key() == g.key() == b.key()
        bad += not (counts_agree and round_trip)
    ok = n >= 20 and bad == 0
    assert _line(report_line, 4, ok, f"{n} covering fixtures, {bad} mismatches")


# -- 5: lifting bigons to quilts --------------------------------------------


def _reproduces(q, u, C):
    """g1 of the lifted boundary equals the bigon boundary, vertex for vertex.

    Patches on a fold sheet are traversed clockwise, so areas compare unsigned.
    """
    if len(q.lifted_polygon) != len(u.polygon):
        return False
    return all(C.g1.image_key(q.lift_chart, Q) == C.left.canonical(u.chart, P)
               for P, Q in zip(u.polygon, q.lifted_polygon)) and \
        sum(abs(p.area) for p in q.region) == u.area


def test_criterion_5_bigons_lift_to_quilts(report_line):
    lifted = failures = 0
    for C, L1, L2, right, _ in _covering_fixtures(20, 99, need_left=False):
        cf = build_cf(L1, right)
        for discs in cf.provenance.values():
            for u in discs:
                try:
                    q = lift_bigon_to_quilt(u, C, L1, right, L2)
                except NotLiftable:
                    failures += 1
                    continue
                lifted += 1
                failures += not _reproduces(q, u, C)
    fold = fold_correspondence()
    obstructed = nondeterministic = fold_lifted = 0
    for seed in range(12):
        rng = random.Random(seed)
        L1, L2 = random_wiggled(rng, fold.left, "L1"), random_wiggled(rng, fold.right, "L2")
        try:
            right = compose(fold, L2)
            cf = build_cf(L1, right)
        except (NotComposable, DiscError):
            continue
        for discs in cf.provenance.values():
            for u in discs:
                outcomes = []
                for _ in range(2):
                    try:
                        q = lift_bigon_to_quilt(u, fold, L1, right, L2)
                        outcomes.append(("ok", _reproduces(q, u, fold)))
                    except NotLiftable as exc:
                        outcomes.append(("obstructed", str(exc)))
                nondeterministic += outcomes[0] != outcomes[1]
                if outcomes[0][0] == "obstructed":
                    obstructed += 1
                else:
                    fold_lifted += 1
                    failures += not outcomes[0][1]
    ok = lifted > 0 and failures == 0 and obstructed > 0 and nondeterministic == 0
    assert _line(report_line, 5, ok,
                 f"{lifted} covering bigons lifted, {fold_lifted} fold bigons lifted, "
                 f"{obstructed} fold-obstructed, {failures} failures, "
                 f"{nondeterministic} nondeterministic")


# -- 6: perturbation round trip ---------------------------------------------


def test_criterion_6_perturbation_round_trip(report_line):
    rng = random.Random(6)
    n = mismatches = 0
    while n < 20:
        C = covering_correspondence()
        L2 = random_wiggled(rng, C.right, "L2")
        try:
            A = compose(C, L2)
        except NotComposable:
            continue
        k = rng.randrange(A.nseg(0))
        move = FingerMove(0, Locator(0, k, F(1, 3)), A.normalize(0, k + rng.randint(0, 2), F(2, 3)),
                          (F(1, 50), F(-1, 70)), F(1, 20))
        plan = PerturbationPlan(A.label, (move,))
        n += 1
        mismatches += not same_curve(apply_plan(A, plan),
                                     compose_perturbed(C, L2, lift_perturbation(C, L2, plan)))
    fold = fold_correspondence()
    rejected = 0
    for seed in range(5):
        L2 = random_wiggled(random.Random(seed), fold.right, "L2")
        try:
            A = compose(fold, L2)
        except NotComposable:
            continue
        # support radius one square: every arc comes within reach of a fold image
        move = FingerMove(0, Locator(0, 0, F(1, 3)), Locator(0, 0, F(2, 3)), (F(1, 16), F(0)), F(1))
        try:
            lift_perturbation(fold, L2, PerturbationPlan(A.label, (move,)))
        except SupportHitsSingularity:
            rejected += 1
        else:
            mismatches += 1
    ok = n >= 20 and mismatches == 0 and rejected > 0
    assert _line(report_line, 6, ok, f"{n} round trips, {rejected} fold plans rejected, "
                                     f"{mismatches} mismatches")


# -- 7: determinism ---------------------------------------------------------


def test_criterion_7_determinism(report_line, tmp_path):
    differing = []
    for name in bundled_names():
        outs = []
        for k in range(2):
            d = tmp_path / f"{name}-{k}"
            subprocess.run([sys.executable, "-m", "quiltfloer", "run", name, "--out", str(d), "--svg"],
                           capture_output=True)
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        if outs[0] != outs[1] or not outs[0]:
            differing.append(name)
    ok = not differing
    assert _line(report_line, 7, ok, f"{len(bundled_names())} bundled scenarios run twice, "
                                     f"{len(differing)} differ")
