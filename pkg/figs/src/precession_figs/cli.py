"""Script entry points: render figures from simulator output files."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, render_figure
from .io import ParseError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="precession-figs",
        description="Render figures from rydberg-precession CSV/grid outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", help="eccentricity versus eta curve")
    p.add_argument("--input", required=True, help="fig1.csv path")
    p.add_argument("--out", default="fig1.png")

    p = sub.add_parser("fig2", help="|dephasing phase| versus eccentricity")
    p.add_argument("--input", required=True, help="fig2.csv path")
    p.add_argument("--out", default="fig2.png")

    p = sub.add_parser("fig3", help="precession snapshots: contours + overlays")
    p.add_argument("--grid", action="append", required=True,
                   help="grid file (repeatable)")
    p.add_argument("--overlay", action="append", default=[],
                   help="classical overlay CSV (repeatable)")
    p.add_argument("--contour-level", type=float, default=0.5,
                   help="contour height as a fraction of the peak (default 0.5)")
    p.add_argument("--surface", action="store_true",
                   help="render a 3D surface of the first grid instead of contours")
    p.add_argument("--out", default="fig3.png")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fig1":
            spec = FigureSpec(1, inputs=[args.input], output=args.out)
        elif args.command == "fig2":
            spec = FigureSpec(2, inputs=[args.input], output=args.out)
        else:
            spec = FigureSpec(3, inputs=list(args.grid) + list(args.overlay),
                              output=args.out, contour_level=args.contour_level,
                              surface=args.surface)
        render_figure(spec)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
