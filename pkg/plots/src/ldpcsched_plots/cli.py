"""Command-line figure renderer.

    ldpcsched-plot --csv fig1.csv --mode fer-vs-iter --fixed 1.75 --out fig1.png
"""

from __future__ import annotations

import argparse
import sys

from .render import MODES, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ldpcsched-plot",
        description="Render FER curves from an ldpcsched CSV file.")
    ap.add_argument("--csv", required=True, help="input CSV path")
    ap.add_argument("--mode", required=True, choices=MODES)
    ap.add_argument("--fixed", type=float, default=None,
                    help="fixed Eb/N0 (fer-vs-iter) or iteration cap "
                         "(fer-vs-snr); optional when the CSV has one value")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--schedules", default=None,
                    help="comma-separated schedule filter (default: all)")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    schedules = tuple(s.strip() for s in args.schedules.split(",")) \
        if args.schedules else ()
    spec = PlotSpec(csv_path=args.csv, mode=args.mode, out_path=args.out,
                    fixed=args.fixed, schedules=schedules)
    try:
        out = render(spec)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
