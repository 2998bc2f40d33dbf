"""fppviz command line: render figures from tfpp result CSVs."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, render
from .schema import SchemaError


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="fppviz",
                                 description="render figures from tfpp CSV files")
    sub = ap.add_subparsers(dest="cmd", required=True)
    sp = sub.add_parser("render", help="render one figure")
    sp.add_argument("csv", help="input CSV (schema v1)")
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--out", required=True, help="output .svg or .png path")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        render(args.csv, args.kind, args.out)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
