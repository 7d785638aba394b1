"""Command-line figure rendering.

Example:
    plotkit --kind trajectories --trace out/sync_trace.csv \\
            --boundaries out/sync_boundaries.csv --verdict out/sync_verdict.json \\
            --out sync_trajectories.png
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureError, FigureSpec, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render curvephase simulation artifacts into figures.")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--trace", help="trace CSV (per-agent series)")
    parser.add_argument("--metrics", help="metrics CSV (swarm series)")
    parser.add_argument("--boundaries", help="boundary polylines CSV")
    parser.add_argument("--verdict", help="verdict JSON carrying the config echo")
    args = parser.parse_args(argv)

    try:
        spec = FigureSpec(
            kind=args.kind,
            out=args.out,
            trace=args.trace,
            metrics=args.metrics,
            boundaries=args.boundaries,
            verdict=args.verdict,
        )
        render(spec)
    except FigureError as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
