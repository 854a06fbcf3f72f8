"""Command line entry: plot <kind> --in <csv> --out <png/svg>."""

from __future__ import annotations

import argparse
import sys

from .figures import SchemaError, plot_sweep, plot_trace

KINDS = {"trace": plot_trace, "sweep": plot_sweep}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="render spinboson CSV artifacts as figures"
    )
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("--in", dest="in_path", required=True, help="input CSV")
    parser.add_argument("--out", dest="out_path", required=True, help="output image (png/svg)")
    args = parser.parse_args(argv)
    try:
        n_series = KINDS[args.kind](args.in_path, args.out_path)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out_path} ({n_series} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
