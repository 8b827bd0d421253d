"""Command-line interface: run campaigns, render reports, evaluate benchmarks.

Exit codes: 0 on success, 1 for configuration problems, 2 when at least one
campaign cell failed at runtime.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .baselines import BASELINE_KINDS, REFERENCE_OPTIMIZERS
from .benchmarks import evaluate, list_benchmarks
from .campaign import load_plan, run_campaign
from .certainty import CERTAINTY_METRICS
from .core import ConfigurationError
from .hulls import HULL_KINDS
from .report import render_report
from .update import UPDATE_METHODS

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="upbo",
        description="Certainty-driven convex-hull optimizer, benchmark suite, and comparison harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a campaign plan file")
    run_p.add_argument("plan", type=Path, help="INI-style plan file")
    run_p.add_argument("--seed", type=int, default=None, help="override the plan's base seed")
    run_p.add_argument("--trials", type=int, default=None, help="override trials per cell")
    run_p.add_argument("--nfe", type=int, default=None, help="override the evaluation budget")
    run_p.add_argument("--dim", type=int, default=None, help="override the problem dimension")
    run_p.add_argument("--parallelism", type=int, default=None, help="worker processes")
    run_p.add_argument("--trace", action="store_true", default=None, help="persist best-cost traces")
    run_p.add_argument("--out", type=Path, default=None, help="output directory")

    report_p = sub.add_parser("report", help="render tables and figures from persisted results")
    report_p.add_argument("results_dir", type=Path)
    report_p.add_argument("--out", type=Path, default=None, help="report directory (default: <results>/report)")
    report_p.add_argument("--no-reference", action="store_true", help="omit published reference values")

    eval_p = sub.add_parser("eval", help="evaluate one benchmark function at a point")
    eval_p.add_argument("function", help="benchmark id, F1..F20")
    eval_p.add_argument("x", nargs="+", type=float, help="coordinates")

    sub.add_parser("list", help="show functions, metrics, update methods, and optimizers")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    plan = load_plan(
        args.plan,
        base_seed=args.seed,
        trials=args.trials,
        nfe=args.nfe,
        dimension=args.dim,
        parallelism=args.parallelism,
        keep_traces=args.trace,
        output_dir=args.out,
    )
    summary = run_campaign(plan)
    print(f"executed {summary.executed} trials ({summary.skipped} already done)")
    print(f"results: {summary.results_path}")
    print(f"report:  {summary.results_path.parent / 'report'}")
    if summary.failures:
        for key, message in summary.failures:
            print(f"FAILED {key}: {message}", file=sys.stderr)
        return 2
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    paths = render_report(args.results_dir, args.out, include_reference=not args.no_reference)
    for label, path in paths.items():
        print(f"{label}: {path}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    cost = evaluate(args.function, args.x)
    print(f"{cost:.17g}")
    return 0


def _cmd_list() -> int:
    print("benchmark functions:")
    for spec in list_benchmarks():
        dims = f"d={spec.fixed_dimension}" if spec.fixed_dimension else f"d>={spec.min_dimension}"
        print(f"  {spec.fid:<4} {spec.name:<26} {spec.group:<16} range [{spec.lower}, {spec.upper}] {dims}")
    print("hull kinds:")
    for kind in HULL_KINDS:
        print(f"  {kind}")
    print("certainty metrics:")
    for tag in CERTAINTY_METRICS:
        print(f"  {tag}")
    print("update methods:")
    for tag in UPDATE_METHODS:
        print(f"  {tag}")
    print("optimizers:")
    print("  UPBO")
    for kind in BASELINE_KINDS:
        print(f"  {kind}")
    for kind in REFERENCE_OPTIMIZERS:
        print(f"  {kind} (published values only)")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "eval":
            return _cmd_eval(args)
        return _cmd_list()
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
