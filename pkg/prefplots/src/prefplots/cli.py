"""Command-line entry: `prefplots render-all <results_dir> [--format png|svg]`."""

from __future__ import annotations

import argparse
import sys

from . import PlotError, render_all


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="prefplots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render-all", help="render every fixed-name results CSV in a directory")
    p.add_argument("results_dir")
    p.add_argument("--format", choices=("png", "svg"), default="png")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        written = render_all(args.results_dir, image_format=args.format)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
