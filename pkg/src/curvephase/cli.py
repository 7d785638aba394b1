"""Command-line entry points.

``curvephase simulate --config <path>`` runs a scenario and writes the
trace CSV, metrics CSV and verdict JSON; exit code 0 means every verdict
passed. ``curvephase curve --config <path> [--delta <m>]`` writes the
curve report JSON and the boundary polylines CSV. ``curvephase verify
[--fast]`` runs the full verification checklist and prints one pass/fail
line per criterion.

Exit codes: 0 success, 1 verdict/check failure, 2 invalid config,
3 no feasible initialization, 4 barrier breach, 5 offset distance not
admissible. The output directory comes from the config (``output_dir``)
and can be overridden with the ``CURVEPHASE_OUTDIR`` environment
variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import io
from .acceptance import full_checklist
from .config import ConfigError, RunConfig
from .control import BarrierBreached, NoFeasibleBranch, bounds_report
from .curves import OffsetNotSimple
from .simulate import run, verify

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NO_BRANCH = 3
EXIT_BARRIER = 4
EXIT_OFFSET = 5


def _output_dir(config):
    override = os.environ.get("CURVEPHASE_OUTDIR")
    out = Path(override or config.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args):
    try:
        config = RunConfig.load(args.config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    stem = Path(args.config).stem
    out = _output_dir(config)
    try:
        curve, graph, cfg = config.build()
        trace = run(config)
    except NoFeasibleBranch as exc:
        print(f"infeasible initial conditions: {exc}", file=sys.stderr)
        return EXIT_NO_BRANCH
    except BarrierBreached as exc:
        print(f"barrier breached during integration: {exc}", file=sys.stderr)
        return EXIT_BARRIER

    # the report is auxiliary context for verification; a barrier distance
    # beyond the offset-admissibility threshold is still simulable
    check = curve.check_safe_distance(config.delta)
    report = curve.report(config.delta) if check.ok else None
    bounds = bounds_report(float(trace.V[0]), cfg, graph, curve)
    verdict = verify(trace, report, bounds)
    trace.verdicts = verdict

    io.write_trace_csv(trace, out / f"{stem}_trace.csv")
    io.write_metrics_csv(trace, out / f"{stem}_metrics.csv")
    io.write_verdict_json(verdict, bounds, config, out / f"{stem}_verdict.json")
    print(f"wrote {stem}_trace.csv, {stem}_metrics.csv, {stem}_verdict.json in {out}")
    for name, ok in verdict.to_dict().items():
        if name in ("details", "all_ok"):
            continue
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    return EXIT_OK if verdict.all_ok else EXIT_FAILED


def cmd_curve(args):
    try:
        config = RunConfig.load(args.config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    delta = args.delta if args.delta is not None else config.delta
    stem = Path(args.config).stem
    out = _output_dir(config)
    try:
        curve, _, _ = config.build()
        report = curve.report(delta)
        io.write_boundaries_csv(curve, delta, out / f"{stem}_boundaries.csv")
    except OffsetNotSimple as exc:
        print(f"offset distance not admissible: {exc}", file=sys.stderr)
        return EXIT_OFFSET
    io.write_report_json(report, config.curve, delta, out / f"{stem}_report.json")
    print(f"wrote {stem}_report.json, {stem}_boundaries.csv in {out}")
    return EXIT_OK


def cmd_verify(args):
    checks = full_checklist(fast=args.fast)
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="curvephase",
        description="Unicycle swarms on closed polar curves: simulate, report, verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured scenario")
    p_sim.add_argument("--config", required=True, help="path to a run-config JSON")

    p_curve = sub.add_parser("curve", help="emit the curve report and boundaries")
    p_curve.add_argument("--config", required=True, help="path to a run-config JSON")
    p_curve.add_argument("--delta", type=float, default=None,
                         help="override the offset distance (m)")

    p_verify = sub.add_parser("verify", help="run the verification checklist")
    p_verify.add_argument("--fast", action="store_true",
                          help="short horizon; skips steady-state criteria")

    args = parser.parse_args(argv)
    handler = {"simulate": cmd_simulate, "curve": cmd_curve, "verify": cmd_verify}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
