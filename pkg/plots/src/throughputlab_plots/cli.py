"""Command-line figure generation from throughputlab CSV files."""

from __future__ import annotations

import argparse
import json
import sys

from .render import PlotInputError, PlotSpec, X_FIELDS, dump_figures, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="throughputlab-plot",
        description="Render throughput CSVs: predictions red, benchmarks blue, simulations green.",
    )
    parser.add_argument("--csv", required=True, nargs="+", metavar="PATH", help="input CSV files (shared schema)")
    parser.add_argument("--x", required=True, choices=X_FIELDS, help="x-axis field")
    parser.add_argument("--out", default="figures", help="output directory (default: figures)")
    parser.add_argument("--format", default="png", choices=("png", "svg"), help="image format (default: png)")
    parser.add_argument(
        "--dump-json",
        action="store_true",
        help="print the plotted series as JSON instead of writing images",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            csv_paths=tuple(args.csv),
            x_field=args.x,
            out_dir=args.out,
            image_format=args.format,
        )
        if args.dump_json:
            print(json.dumps(dump_figures(spec), sort_keys=True))
            return 0
        for path in render(spec):
            print(path)
        return 0
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
