"""Command-line batch renderer.

Exit codes: 0 on success, 2 for a missing or malformed input.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, AxisOptions, PlotJob, render
from .schema import MissingColumn


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="membrana-plots",
        description="Render solver CSV artifacts into figures.")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--input", action="append", required=True, dest="inputs",
                        metavar="CSV", help="input CSV path (repeatable)")
    parser.add_argument("--output", required=True, help="image path (.png or .svg)")
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--logx", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--logy", action=argparse.BooleanOptionalAction, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    axes = AxisOptions(title=args.title, xlabel=args.xlabel, ylabel=args.ylabel,
                       logx=args.logx, logy=args.logy)
    try:
        job = PlotJob(kind=args.kind, inputs=tuple(args.inputs),
                      output=args.output, axes=axes)
        out = render(job)
    except (FileNotFoundError, MissingColumn, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
