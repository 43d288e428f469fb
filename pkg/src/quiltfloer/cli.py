"""Command-line front end: ``python -m quiltfloer run|check SCENARIO``.

``SCENARIO`` is a path or the name of a bundled scenario (``torus-basic``,
``section5``).  Exit codes: 0 success, 1 validation failure, 2 computation
failure, 3 parse failure.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional, Tuple

from . import svg
from .pipeline import PARSE, Settings, TaskResult, check_scenario, run_scenario
from .scenario import Scenario, ScenarioError, parse_scenario

SUFFIX = ".scenario"


def bundled_names() -> List[str]:
    root = resources.files("quiltfloer") / "scenarios"
    return sorted(p.name[:-len(SUFFIX)] for p in root.iterdir() if p.name.endswith(SUFFIX))


def read_scenario(ref: str) -> Tuple[str, str]:
    """(display name, text) for a path or a bundled scenario name."""
    path = Path(ref)
    if path.is_file():
        return path.stem, path.read_text(encoding="utf-8")
    bundled = resources.files("quiltfloer") / "scenarios" / (ref + SUFFIX)
    if bundled.is_file():
        return ref, bundled.read_text(encoding="utf-8")
    raise OSError(f"no scenario file or bundled scenario named {ref!r} "
                  f"(bundled: {', '.join(bundled_names())})")


def _load(ref: str) -> Tuple[str, Scenario]:
    name, text = read_scenario(ref)
    return name, parse_scenario(text)


def _settings(args) -> Settings:
    return Settings(args.depth, args.allow_unverified_admissibility, args.twist_reading)


def _diagrams(name: str, results: List[TaskResult]) -> List[Tuple[str, str]]:
    out = []
    for r in results:
        if r.task.kind == "quilt" and "table" in r.extra:
            F = r.extra["correspondence"]
            L1, L2 = r.curves
            right = r.extra["right"]
            table = r.extra["table"]
            doc = svg.document([
                (F.left, [L1, right], table.left_view, f"{F.left.name}: {L1.label}, {right.label}"),
                (F.right, [L2], table.right_view, f"{F.right.name}: {L2.label}"),
                (F.total, [], [], f"{F.total.name}"),
            ])
        elif r.complex is not None and len(r.curves) == 2:
            a, b = r.curves
            doc = svg.document([(a.surface, [a, b], r.complex.generators,
                                 f"{a.surface.name}: {a.label}, {b.label}")])
        else:
            continue
        out.append((f"{name}.{r.task.name}.svg", doc))
    return out


def cmd_run(args) -> int:
    try:
        name, sc = _load(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE
    status, report, results, _ = run_scenario(sc, name, _settings(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.report.txt").write_text(report, encoding="utf-8")
    if args.svg:
        for fname, doc in _diagrams(name, results):
            (out / fname).write_text(doc, encoding="utf-8")
    sys.stdout.write(report)
    return status


def cmd_check(args) -> int:
    try:
        name, sc = _load(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE
    status, report = check_scenario(sc, name, _settings(args))
    sys.stdout.write(report)
    return status


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quiltfloer",
                                description="Combinatorial Floer homology through correspondences.")
    sub = p.add_subparsers(dest="command", required=True)
    for cmd, fn, help_ in (("run", cmd_run, "run every task and write reports"),
                           ("check", cmd_check, "validate a scenario without computing")):
        s = sub.add_parser(cmd, help=help_)
        s.add_argument("scenario", help="scenario file or bundled scenario name")
        s.add_argument("--depth", type=int, default=4, help="disc search depth (default 4)")
        s.add_argument("--allow-unverified-admissibility", action="store_true",
                       help="count discs even without an embedded-lift certificate")
        s.add_argument("--twist-reading", choices=("shear", "reglue"), default=None,
                       help="override how declared twist maps are realised")
        if cmd == "run":
            s.add_argument("--out", default="quiltfloer-out", help="report directory")
            s.add_argument("--svg", action="store_true", help="also write SVG diagrams")
        s.set_defaults(func=fn)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = parser().parse_args(argv)
    return args.func(args)
