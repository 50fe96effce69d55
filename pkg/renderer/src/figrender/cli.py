"""Command-line front end: ``render --figure figN --in DIR --out FILE.png``."""

from __future__ import annotations

import argparse
import sys

from .csvio import InputError
from .figures import FIGURE_IDS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render simulator CSV artifacts into figure images."
    )
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS, help="figure layout to draw")
    parser.add_argument("--in", dest="indir", required=True, help="scenario output directory")
    parser.add_argument("--out", required=True, help="output image path (.png)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.figure, args.indir, args.out)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
