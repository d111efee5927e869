"""Command line: render benchmark CSVs into per-experiment panels.

    plots --in results.csv [more.csv ...] --out figures/ --y value|time [--log-time]
"""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render benchmark result figures")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="result CSV file(s)")
    parser.add_argument("--out", required=True, help="output directory for PNGs")
    parser.add_argument("--y", default="value", choices=("value", "time"),
                        help="plot solution value or parallel wall time")
    parser.add_argument("--log-time", action="store_true",
                        help="log-scale the time axis")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(inputs=args.inputs, y_axis=args.y, log_time=args.log_time)
    try:
        written = render(spec, args.out)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def cli_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_main()
