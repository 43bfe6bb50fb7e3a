#!/usr/bin/env python3
"""Command-line front end. Reports go to stdout as JSON; logs and progress go to stderr."""

import argparse
import dataclasses
import json
import logging
import sys
import time
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.logging import RichHandler

from p2scat import cache
from p2scat.benchmark import bench
from p2scat.config import (
    RunConfig,
    build_config,
    parse_convention,
    parse_fraction,
    parse_probe,
    parse_region,
    read_config_file,
)
from p2scat.diagram import initial_for, scatter
from p2scat.invariants import betti_report
from p2scat.models import ChargeVector
from p2scat.svg import render_svg
from p2scat.utils import GOLDEN
from p2scat.verify import corrupt, golden_checks, property_checks, run_checks

logger = logging.getLogger(__name__)

DEFAULT_SCATTER_ORDER = Fraction(2)
SUITE_ALIASES = {"golden": "paper"}
# argparse reads a value starting with "-3/2" as an unknown flag
ATTACHED_VALUE_FLAGS = frozenset({"--region", "--probe", "--class", "--order"})


def _emit(payload: dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2))


def _fail(message: str, gamma: ChargeVector | None = None) -> None:
    payload: dict[str, Any] = {"error": message}
    if gamma is not None:
        payload["gamma"] = gamma.as_list()
    _emit(payload)
    sys.exit(1)


def _config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    return build_config(
        file_values,
        {
            "order_cap": args.order,
            "region": args.region,
            "probe": args.probe,
            "markers": args.markers,
            "retry_limit": args.retry_limit,
            "convention": args.convention,
            "json_path": args.json,
            "svg_path": args.svg,
            "seed": args.seed,
            "jobs": args.jobs,
        },
    )


def cmd_betti(args: argparse.Namespace, cfg: RunConfig) -> None:
    gamma: ChargeVector = args.gamma
    kind = "trees" if cfg.markers else "betti"
    try:
        report = cache.memoize(kind, gamma, cfg, lambda: betti_report(gamma, cfg))
    except ValueError as e:
        _fail(str(e), gamma)
        return
    _emit(report)


def cmd_trees(args: argparse.Namespace, cfg: RunConfig) -> None:
    cmd_betti(args, dataclasses.replace(cfg, markers=True))


def cmd_scatter(args: argparse.Namespace, cfg: RunConfig) -> None:
    if cfg.region is None:
        _fail("a region is required: --region xmin,xmax,smax")
        return
    order = cfg.order_cap if cfg.order_cap is not None else DEFAULT_SCATTER_ORDER
    tic = time.time()
    try:
        d = scatter(
            initial_for(
                cfg.region,
                order,
                convention=cfg.convention,
                degree_cap=int(order) if cfg.markers else None,
            )
        )
    except ValueError as e:
        _fail(str(e))
        return
    logger.info("scattered in %.2fs", time.time() - tic)

    summary: dict[str, Any] = {"rays": len(d.rays), "vertices": len(d.vertex_log)}
    try:
        if cfg.json_path is not None:
            cfg.json_path.write_text(json.dumps(d.to_json(), indent=2))
            summary["json"] = str(cfg.json_path)
        if cfg.svg_path is not None:
            cfg.svg_path.write_text(render_svg(d))
            summary["svg"] = str(cfg.svg_path)
    except OSError as e:
        _fail(f"cannot write output: {e}")
        return
    if cfg.json_path is None and cfg.svg_path is None:
        summary["diagram"] = d.to_json()
    summary["config"] = cfg.echo()
    _emit(summary)


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> None:
    console = Console(stderr=True)
    golden = [g for g in GOLDEN if not (args.fast and g["slow"])]
    if args.corrupt is not None:
        golden = corrupt(golden, args.corrupt)

    suite_name = SUITE_ALIASES.get(args.suite, args.suite)
    suites = ["paper", "properties"] if suite_name == "all" else [suite_name]
    failed: list[str] = []
    passed = 0
    for suite in suites:
        console.print(f"\n🔍 {suite}")
        checks = golden_checks(cfg, golden) if suite == "paper" else property_checks(cfg)
        results = run_checks(checks, cfg.jobs, console)
        passed += sum(r.ok for r in results)
        failed += [r.name for r in results if not r.ok]
    _emit({"suite": suite_name, "passed": passed, "failed": failed})
    if failed:
        sys.exit(1)


def cmd_bench(args: argparse.Namespace, cfg: RunConfig) -> None:
    timings = bench(cfg, include_slow=not args.fast)
    _emit(
        {
            "timings": [
                {
                    "gamma": t.gamma,
                    "seconds": round(t.seconds, 3),
                    "budget": t.budget,
                    "correct": t.correct,
                }
                for t in timings
            ]
        }
    )
    if not all(t.correct and t.within_budget for t in timings):
        sys.exit(1)


def cmd_clear_cache(args: argparse.Namespace, cfg: RunConfig) -> None:
    _emit({"removed": cache.clear()})


def _gamma(text: str) -> ChargeVector:
    return ChargeVector.parse(text)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Flat key=value file; flags win over it")
    parser.add_argument("--order", type=parse_fraction, help="Order cap, e.g. 4 or 7/2")
    parser.add_argument(
        "--region", type=parse_region, help="xmin,xmax,smax, e.g. --region -3/2,3/2,4"
    )
    parser.add_argument("--probe", type=parse_probe, help="Probe point x,y, e.g. --probe -1/2,5")
    parser.add_argument("--markers", action="store_true", default=None, help="Track leaves")
    parser.add_argument("--retry-limit", type=int, help="Stabilization rounds (default: 3)")
    parser.add_argument("--convention", type=parse_convention, help="minus (default) or plus")
    parser.add_argument("--json", type=Path, help="Write the diagram JSON here")
    parser.add_argument("--svg", type=Path, help="Write the diagram SVG here")
    parser.add_argument("--seed", type=int, help="Seed of the property suite (default: 0)")
    parser.add_argument("--jobs", type=int, help="Parallel workers for verify (default: 1)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p2scat",
        description="Scattering diagram of the projective plane and its DT invariants",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s betti --class 0,3,1                    # Poincare polynomial of M_(0,3,1)
  %(prog)s trees --class 0,3,3                    # Split by leaves of the scattering trees
  %(prog)s scatter --region -3/2,3/2,4 --order 2 --svg out.svg
  %(prog)s verify --suite paper --jobs 4
  %(prog)s bench --fast
        """,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("betti", "Poincare polynomial report"), ("trees", "Tree pieces")):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--class", dest="gamma", type=_gamma, required=True, help="r,d,chi")
        _add_config_flags(sub)

    sub = subparsers.add_parser("scatter", help="Complete a diagram and write JSON/SVG")
    _add_config_flags(sub)

    sub = subparsers.add_parser("verify", help="Run the verification suites")
    sub.add_argument(
        "--suite",
        choices=["paper", "golden", "properties", "all"],
        default="all",
        help="paper (alias: golden) checks the literature values",
    )
    sub.add_argument("--fast", action="store_true", help="Skip slow golden classes")
    sub.add_argument(
        "--corrupt", type=int, metavar="SEED", help="Perturb one golden value (self-test)"
    )
    _add_config_flags(sub)

    sub = subparsers.add_parser("bench", help="Time golden classes against their budgets")
    sub.add_argument("--fast", action="store_true", help="Skip slow golden classes")
    _add_config_flags(sub)

    sub = subparsers.add_parser("clear-cache", help="Delete cached results")
    _add_config_flags(sub)
    return parser


COMMANDS = {
    "betti": cmd_betti,
    "trees": cmd_trees,
    "scatter": cmd_scatter,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "clear-cache": cmd_clear_cache,
}


def _attach_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--region -3/2,3/2,4`` as ``--region=-3/2,3/2,4``."""
    out: list[str] = []
    tokens = iter(argv)
    for token in tokens:
        value = next(tokens, None) if token in ATTACHED_VALUE_FLAGS else None
        out.append(token if value is None else f"{token}={value}")
    return out


def main(argv: Sequence[str] | None = None) -> None:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_attach_values(argv))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )
    try:
        cfg = _config(args)
    except (OSError, ValueError) as e:
        _fail(f"invalid configuration: {e}")
        return
    COMMANDS[args.command](args, cfg)


if __name__ == "__main__":
    main()
