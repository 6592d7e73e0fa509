"""CLI: figure-scripts <fig4|fig5|fig6> --csv IN.csv --out OUT.svg"""

from __future__ import annotations

import argparse
import sys

from .render import SCHEMAS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figure-scripts", description=__doc__)
    parser.add_argument("figure_id", choices=sorted(SCHEMAS))
    parser.add_argument("--csv", required=True, help="input CSV from the sweep tool")
    parser.add_argument("--out", required=True, help="output image (.svg or .png)")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(csv_path=args.csv, figure_id=args.figure_id, output_path=args.out, dpi=args.dpi)
    try:
        render(spec)
    except SchemaError as exc:
        print(f"figure-scripts: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
