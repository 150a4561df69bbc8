# cli.py
# Command-line surface: enumerate, vines, eliminate, gpa-verify, codec.
# The job functions here are shared with the HTTP surface in main.py.
#
# Exit codes: 0 ok, 2 result differs from --expect, 1 usage or internal error.

from __future__ import annotations

import argparse
import cmath
import json
import logging
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

import rules_init
from bigraph import CodecError, canonicalize, pair_key, parse_pair, render_pair
from dimform import FormulaError, family_argument
from gpa import GraphContext, verify_generator_family
from journal import Journal, to_dot, write_dot
from odometer import ClassificationTree, OdometerAssertion, match_rule, run
from qarith import AlgebraicReal, BoundError, parse_bound
from schema import ClassificationNode, EliminationReport, ExclusionRule, RunConfig, SuiteReport, VineVerdict
from spectral import vine_status

log = logging.getLogger("odometer.cli")

LOG_LEVEL = os.getenv("ODOMETER_LOG_LEVEL", "INFO")
LOG_FORMAT = "[%(name)s] %(levelname)s: %(message)s"

RUN_WINDOW = ("3+sqrt5", "31/5")
SURVEY_WINDOW = ("3+sqrt5", "13/2")

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2

# restricted runs: (seeds, depth, restrictions)
FAMILY_RUNS: Dict[str, tuple[tuple[str, ...], int, tuple[str, ...]]] = {
    "D1": ((), 0, ()),
    "D2": (("D", "Dprime"), 5, ("d2", "two-edges-3-4")),
    "D3": (("D", "Dprime"), 6, ("d3",)),
    "K": (("K",), 5, ()),
    "Kprime": (("Kprime",), 6, ("two-edges-3-4",)),
}
CLASSIFIED = ("S", "Sprime")


class CliError(ValueError):
    """Bad command-line input."""


def configure_logging(level: str = LOG_LEVEL) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, stream=sys.stderr)


def _window(lo: str, hi: str) -> tuple[AlgebraicReal, AlgebraicReal]:
    return parse_bound(lo), parse_bound(hi)


def _rules(path: Optional[str]) -> List[ExclusionRule]:
    if path:
        return rules_init.read_rules(path)
    return rules_init.get_rules()


# -----------------------------
# enumerate
# -----------------------------
def cmd_enumerate(config: RunConfig) -> ClassificationTree:
    seed = parse_pair(rules_init.named_pair(config.seed), assume_identity_duals=True)
    tree = run(
        seed,
        config.max_depth,
        parse_bound(config.index_max),
        rules=_rules(config.rules_path),
        ignore=[rules_init.named_pair(s) for s in config.ignore],
        restrict=config.restrict,
        index_min=parse_bound(config.index_min),
    )
    if config.journal_path:
        Journal(config.journal_path).write(tree.nodes)
    if config.dot_path:
        write_dot(config.dot_path, tree.nodes)
    return tree


def tree_summary(tree: ClassificationTree) -> Dict[str, int]:
    out = tree.summary()
    for d in sorted({n.depth for n in tree.nodes}):
        out[f"depth{d}"] = len(tree.grown(d))
    return dict(sorted(out.items()))


def read_fixture(path: str) -> Dict[str, str]:
    """Tree fixture: one 'pair colour' per line; colour is cylinder, weed or node."""
    out = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            key = pair_key(parse_pair(parts[0], assume_identity_duals=True))
            out[key] = parts[1] if len(parts) > 1 else "node"
    return out


def _drawn(node: ClassificationNode) -> Optional[str]:
    if node.status == "excluded":
        return None
    if node.status == "cylinder":
        return "cylinder"
    if node.status in ("weed-active", "weed-ignored"):
        return "weed"
    return "node"


def compare_expectation(tree: ClassificationTree, expect: str) -> List[str]:
    """Differences against 'key=value,...' counts or a figure fixture file."""
    problems = []
    if "=" in expect and not os.path.exists(expect):
        have = tree_summary(tree)
        for item in expect.split(","):
            key, _, value = item.partition("=")
            key = key.strip()
            if have.get(key, 0) != int(value):
                problems.append(f"{key}: expected {value}, got {have.get(key, 0)}")
        return problems
    want = read_fixture(expect)
    drawn = {n.canonical: _drawn(n) for n in tree.nodes if _drawn(n) is not None}
    for key in sorted(set(want) - set(drawn)):
        problems.append(f"missing {key}")
    for key in sorted(set(drawn) - set(want)):
        problems.append(f"unexpected {key}")
    for key in sorted(set(want) & set(drawn)):
        if want[key] != "node" and want[key] != drawn[key]:
            problems.append(f"{key}: expected {want[key]}, got {drawn[key]}")
    return problems


# -----------------------------
# vines
# -----------------------------
def _disposition(rules: Sequence[ExclusionRule], pair) -> Optional[ExclusionRule]:
    rule = match_rule(rules, pair, kind="vine-disposition")
    if rule is None or parse_pair(rule.match).max_depth != pair.max_depth:
        return None
    return rule


def cmd_vines(
    nodes: Sequence[ClassificationNode],
    window: tuple[str, str] = SURVEY_WINDOW,
    rules: Optional[Sequence[ExclusionRule]] = None,
) -> List[VineVerdict]:
    rules = rules_init.get_rules() if rules is None else rules
    bounds = _window(*window)
    out = []
    for node in nodes:
        if node.status not in ("vine", "cylinder"):
            continue
        pair = parse_pair(node.canonical)
        verdict = vine_status(pair, bounds)
        vv = VineVerdict(
            pair=node.canonical,
            accepted=verdict.accepted,
            reason=verdict.reason,
            witness=verdict.witness,
            index=float(verdict.index) if verdict.index is not None else None,
            index_minpoly=verdict.index.minpoly_str() if verdict.index is not None else None,
        )
        if verdict.accepted:
            rule = _disposition(rules, pair)
            if rule is not None:
                vv.disposition, vv.citation = rule.reason, rule.citation
        out.append(vv)
    return out


# -----------------------------
# eliminate
# -----------------------------
def eliminate_family(
    family: str,
    rules: Optional[Sequence[ExclusionRule]] = None,
    runs: bool = True,
) -> EliminationReport:
    """Closed-form argument for the family plus its restricted odometer runs."""
    if family not in FAMILY_RUNS:
        raise CliError(f"unknown family {family!r}; expected one of {', '.join(FAMILY_RUNS)}")
    rules = rules_init.get_rules() if rules is None else rules
    lines, closes = family_argument(family, *RUN_WINDOW)
    seeds, depth, restrict = FAMILY_RUNS[family]
    survivors: List[str] = []
    if runs:
        for name in seeds:
            seed = parse_pair(rules_init.named_pair(name), assume_identity_duals=True)
            tree = run(seed, depth, parse_bound(RUN_WINDOW[1]), rules=rules, restrict=list(restrict))
            weeds = tree.with_status("weed-active")
            lines.append(f"{name} to depth {depth}: {len(weeds)} active weeds, "
                         f"{len(tree.with_status('vine', 'cylinder'))} vines and cylinders")
            if not closes:
                survivors += [n.canonical for n in weeds]
            for v in cmd_vines(tree.with_status("vine", "cylinder"), RUN_WINDOW, rules):
                if v.accepted and v.disposition is None:
                    survivors.append(v.pair)
    survivors = sorted(set(survivors))
    classified = {pair_key(parse_pair(rules_init.named_pair(n))) for n in CLASSIFIED}
    eliminated = closes and all(s in classified for s in survivors)
    if eliminated and survivors:
        lines.append("survivors " + ", ".join(n for n in CLASSIFIED if pair_key(parse_pair(rules_init.named_pair(n))) in survivors))
    lines.append(f"{family}: " + ("eliminated" if eliminated else "not eliminated"))
    return EliminationReport(family=family, lines=lines, survivors=survivors, eliminated=eliminated)


# -----------------------------
# gpa-verify
# -----------------------------
def phase_samples(count: int) -> List[complex]:
    """count phases on the unit circle, away from the real axis."""
    return [cmath.exp(1j * (2 * math.pi * k / count + 0.3)) for k in range(count)]


def cmd_gpa_verify(samples: int = 5, tolerance: float = 1e-9) -> Dict[str, SuiteReport]:
    ctx = GraphContext.gamma()
    lams = phase_samples(samples)
    return {
        "omega=+1": verify_generator_family(ctx, 1, lams, tolerance),
        "omega=-1": verify_generator_family(ctx, -1, lams, tolerance, calibrate=False),
    }


# -----------------------------
# codec
# -----------------------------
def codec_parse(text: str) -> Dict[str, object]:
    p = parse_pair(text)
    return {
        "pair": render_pair(p),
        "canonical": canonicalize(p),
        "plus": {"depths": [list(map(list, b)) for b in p.plus.depths], "duals": p.plus.duals},
        "minus": {"depths": [list(map(list, b)) for b in p.minus.depths], "duals": p.minus.duals},
    }


def codec_render(text: str) -> str:
    return canonicalize(parse_pair(text))


# -----------------------------
# argparse
# -----------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="odometer", description="Principal graph odometer and graph planar algebra checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="grow weeds depth by depth")
    e.add_argument("--seed", default="A2", help="pair string or a named pair (A2, D, Dprime, K, Kprime, S, Sprime)")
    e.add_argument("--depth", type=int, default=3)
    e.add_argument("--index-min", default=RUN_WINDOW[0])
    e.add_argument("--index-max", default=RUN_WINDOW[1])
    e.add_argument("--ignore", action="append", default=[])
    e.add_argument("--restrict", action="append", default=[],
                   choices=["d1", "d2", "d3", "two-edges-3-4", "drop-cylinders"])
    e.add_argument("--rules", default=None)
    e.add_argument("--journal", default=None)
    e.add_argument("--dot", default=None)
    e.add_argument("--format", choices=["json", "dot"], default="json")
    e.add_argument("--expect", default=None, help="'key=value,...' counts or a figure fixture file")

    v = sub.add_parser("vines", help="survey the vines and cylinders of a journal")
    v.add_argument("journal")
    v.add_argument("--index-min", default=SURVEY_WINDOW[0])
    v.add_argument("--index-max", default=SURVEY_WINDOW[1])
    v.add_argument("--rules", default=None)
    v.add_argument("--accepted-only", action="store_true")

    el = sub.add_parser("eliminate", help="closed-form elimination of one family")
    el.add_argument("family", choices=sorted(FAMILY_RUNS))
    el.add_argument("--rules", default=None)
    el.add_argument("--no-runs", action="store_true", help="skip the restricted odometer runs")

    g = sub.add_parser("gpa-verify", help="relation suite in the graph planar algebra")
    g.add_argument("--samples", type=int, default=5)
    g.add_argument("--tolerance", type=float, default=1e-9)

    c = sub.add_parser("codec", help="parse or render bigraph strings")
    c.add_argument("action", choices=["parse", "render"])
    c.add_argument("pair")
    return ap


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        if args.command == "enumerate":
            config = RunConfig(
                seed=rules_init.named_pair(args.seed),
                max_depth=args.depth,
                index_min=args.index_min,
                index_max=args.index_max,
                rules_path=args.rules,
                ignore=[rules_init.named_pair(s) for s in args.ignore],
                restrict=args.restrict,
                journal_path=args.journal,
                dot_path=args.dot,
            )
            tree = cmd_enumerate(config)
            if args.format == "dot":
                sys.stdout.write(to_dot(tree.nodes))
            else:
                _print_json(tree_summary(tree))
            if args.expect:
                problems = compare_expectation(tree, args.expect)
                for p in problems:
                    log.error("expectation: %s", p)
                return EXIT_MISMATCH if problems else EXIT_OK
            return EXIT_OK

        if args.command == "vines":
            nodes = Journal(args.journal).read()
            verdicts = cmd_vines(nodes, (args.index_min, args.index_max), _rules(args.rules))
            if args.accepted_only:
                verdicts = [v for v in verdicts if v.accepted]
            _print_json([v.model_dump(exclude_none=True) for v in verdicts])
            return EXIT_OK

        if args.command == "eliminate":
            report = eliminate_family(args.family, _rules(args.rules), runs=not args.no_runs)
            for line in report.lines:
                print(line)
            return EXIT_OK if report.eliminated else EXIT_MISMATCH

        if args.command == "gpa-verify":
            reports = cmd_gpa_verify(args.samples, args.tolerance)
            ok = True
            for family, report in reports.items():
                for check in report.checks:
                    if not check.passed:
                        log.warning("%s %s failed: deviation %.3g", family, check.name, check.max_deviation)
                    print(f"{'PASS' if check.passed else 'FAIL'} {family} {check.name} {check.max_deviation:.3g}")
                if report.octahedron:
                    print(f"octahedron {json.dumps(report.octahedron, sort_keys=True)} ratio {report.octahedron_ratio}")
                ok = ok and report.ok
            return EXIT_OK if ok else EXIT_ERROR

        if args.command == "codec":
            if args.action == "parse":
                _print_json(codec_parse(args.pair))
            else:
                print(codec_render(args.pair))
            return EXIT_OK
    except (ValidationError, CodecError, BoundError, FormulaError, CliError, FileNotFoundError) as e:
        sys.stderr.write(f"[odometer] error: {e}\n")
        return EXIT_ERROR
    except OdometerAssertion as e:
        sys.stderr.write(f"[odometer] assertion failed: {e}\n")
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
