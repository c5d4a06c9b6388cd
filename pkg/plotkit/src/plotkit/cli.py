"""Command-line entry point.

Usage:
    plotkit SNAP [SNAP ...] --fields rho,p --out FIG.png [--overlay]
"""
from __future__ import annotations

import argparse
import sys

from .io import SnapshotFormatError
from .plotting import FIELD_LABELS, PlotSpec, plot

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render profile figures from solver snapshot CSVs")
    parser.add_argument("snapshots", nargs="+", metavar="SNAP",
                        help="snapshot CSV files")
    parser.add_argument("--fields", required=True, metavar="F1,F2",
                        help="comma-separated fields "
                             f"({', '.join(FIELD_LABELS)})")
    parser.add_argument("--out", required=True, metavar="FIG",
                        help="output image path")
    parser.add_argument("--overlay", action="store_true",
                        help="overlay all snapshots on shared axes "
                             "(required for multiple inputs)")
    parser.add_argument("--title", default=None, help="figure title")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    fields = tuple(f for f in args.fields.split(",") if f)
    try:
        spec = PlotSpec(inputs=tuple(args.snapshots), fields=fields,
                        output=args.out, overlay=args.overlay,
                        title=args.title, dpi=args.dpi)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        plot(spec)
    except SnapshotFormatError as exc:
        print(f"malformed snapshot: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
