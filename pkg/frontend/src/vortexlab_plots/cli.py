"""Command line driver: plots <kind> --in ... --out ..."""

from __future__ import annotations

import argparse
import sys

from .errors import PlotsError
from .figures import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render standard vortexlab figures from CSV outputs.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"{kind} figure")
        p.add_argument("--in", dest="inputs", required=True, nargs="+",
                       help="input CSV path(s)")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--title")
        p.add_argument("--xlabel")
        p.add_argument("--ylabel")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind,
                      output=args.out, title=args.title,
                      xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        notes = render(spec)
    except PlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for note in notes:
        print(note)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
