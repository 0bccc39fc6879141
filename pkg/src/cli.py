"""
opkit command line: check | trees | free | env | diag-check | bar.

Exit codes: 0 pass, 1 check failure or rejected structure, 2 input error,
3 size cap exceeded or truncation too small.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

import pandas as pd

from src.pipeline import CommandPipeline
from src.reports import PASS, CommandReport
from src.utils import InputError, InvalidStructure, SizeCapExceeded, TruncationError

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--timing", action="store_true", help="include stage timings (reports stop being byte-stable)")
    common.add_argument("--progress", action="store_true", help="progress bars on stderr")

    parser = argparse.ArgumentParser(prog="opkit", description="Finite operads, their algebras and the constructions around them")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="validate a definition file")
    check.add_argument("path")
    check.add_argument("--arity-bound", type=int, default=None)

    trees = sub.add_parser("trees", parents=[common], help="count or list trees of a profile")
    which = trees.add_mutually_exclusive_group(required=True)
    which.add_argument("--profile", help="'n1,...,nk->n'")
    which.add_argument("--pairs-profile", help="'c1,...,ck->c' with colors naturals or a")
    mode = trees.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true", default=True)
    mode.add_argument("--list", action="store_true")

    for name, helptext in (("free", "graded free algebra"), ("env", "enveloping monoid of a free algebra")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--operad", required=True)
        p.add_argument("--generators", required=True, help="'x,y', or 'r:x,m:y' for colored operads")
        p.add_argument("--max-degree", type=int, required=True)

    diag = sub.add_parser("diag-check", parents=[common], help="diagonal coend isomorphism")
    diag.add_argument("--bisimplicial", required=True)
    diag.add_argument("--max-dim", type=int, required=True)

    bar = sub.add_parser("bar", parents=[common], help="bar resolution of a finite algebra")
    bar.add_argument("path")
    bar.add_argument("--depth", type=int, default=2)
    bar.add_argument("--max-degree", type=int, default=2)
    return parser


def run_command(args: argparse.Namespace) -> CommandReport:
    pipeline = CommandPipeline(timing=args.timing, progress=args.progress)
    if args.command == "check":
        return pipeline.check(args.path, args.arity_bound)
    if args.command == "trees":
        pairs = args.pairs_profile is not None
        return pipeline.trees(args.pairs_profile if pairs else args.profile, pairs=pairs, listing=args.list)
    if args.command == "free":
        return pipeline.free(args.operad, args.generators, args.max_degree)
    if args.command == "env":
        return pipeline.env(args.operad, args.generators, args.max_degree)
    if args.command == "diag-check":
        return pipeline.diag_check(args.bisimplicial, args.max_dim)
    return pipeline.bar(args.path, args.depth, args.max_degree)


def render_text(report: CommandReport) -> str:
    lines = [f"command: {report.command}", f"verdict: {report.verdict}"]
    for key in sorted(report.details):
        value = report.details[key]
        if isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(f"  {item}" for item in value)
        else:
            lines.append(f"{key}: {value}")
    for check in report.checks:
        lines.append(check.summary())
        for issue in check.issues:
            witness = ", ".join(f"{k}={v}" for k, v in sorted(issue.witness.items()))
            lines.append(f"  {issue.law}: {witness}")
    for name in sorted(report.tables):
        rows = report.tables[name]
        lines.append(f"[{name}]")
        lines.append(pd.DataFrame(rows).to_string(index=False) if rows else "(empty)")
    if report.timing:
        lines.append("timing: " + ", ".join(f"{k}={v:.4f}s" for k, v in report.timing.items()))
    return "\n".join(lines) + "\n"


def render_json(report: CommandReport) -> str:
    return json.dumps(report.model_dump(exclude_none=True), sort_keys=True, indent=2, default=str) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run_command(args)
    except InvalidStructure as e:
        print(f"opkit: rejected: {e}", file=sys.stderr)
        if e.report is not None:
            for issue in e.report.issues[:10]:
                print(f"  {issue.law}: {issue.witness}", file=sys.stderr)
        return EXIT_FAIL
    except InputError as e:
        print(f"opkit: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (SizeCapExceeded, TruncationError) as e:
        print(f"opkit: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    sys.stdout.write(render_json(report) if args.format == "json" else render_text(report))
    return EXIT_PASS if report.verdict == PASS else EXIT_FAIL
