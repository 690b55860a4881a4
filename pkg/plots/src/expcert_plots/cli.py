"""CLI: expcert-plots render --kind K --in a.csv[,b.csv,...] --out fig.png"""

from __future__ import annotations

import argparse
import sys

from .data import MissingInput, SchemaMismatch
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="expcert-plots")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render a figure from sweep CSV files")
    r.add_argument("--kind", choices=KINDS, required=True)
    r.add_argument("--in", dest="inputs", required=True,
                   help="comma separated sweep CSV paths")
    r.add_argument("--bifurcation", default=None, help="background point cloud CSV")
    r.add_argument("--out", required=True)
    r.add_argument("--labels", default=None, help="comma separated series labels")
    r.add_argument("--xlim", default=None, help="LO:HI")
    r.add_argument("--ylim", default=None, help="LO:HI")
    r.add_argument("--dump-arrays", dest="dump_arrays", default=None)
    return p


def _parse_range(text):
    if text is None:
        return None
    lo, _, hi = text.partition(":")
    return (float(lo), float(hi))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(s for s in args.inputs.split(",") if s),
            output=args.out,
            bifurcation=args.bifurcation,
            labels=tuple(args.labels.split(",")) if args.labels else (),
            xlim=_parse_range(args.xlim),
            ylim=_parse_range(args.ylim),
            dump_arrays=args.dump_arrays,
        )
        render(spec)
    except (SchemaMismatch, MissingInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
