"""Command-line front end.

Exit codes: 0 success, 2 invalid arguments, 3 some rows failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ExpcertError
from .expansion import expansion_lower_bound, expansion_static, expansion_uniform_baseline
from .intervals import Interval
from .maps import make_family
from .partition import derivative_scaled_partition
from .sweep import (
    MODES,
    SweepSpec,
    bifurcation_data,
    run_sweep,
    write_bifurcation_csv,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="expcert",
        description="Certified lower bounds on uniform expansion exponents.",
    )
    p.add_argument("--family", default="quadratic")
    p.add_argument(
        "--omega",
        default="1.4:2",
        help="parameter LO[:HI]; a single value means a point parameter",
    )
    p.add_argument(
        "--delta",
        default="0.001",
        help="critical neighbourhood radius D[,D2,...] (list for delta-compare)",
    )
    p.add_argument("--K", type=int, default=1000, help="maximum partition size")
    p.add_argument("--mode", choices=MODES, default="single")
    p.add_argument("--grid", type=int, default=1024, help="grid mode: N+1 points")
    p.add_argument("--depth", type=int, default=10, help="subdiv mode: 2^D subintervals")
    p.add_argument(
        "--strategy",
        default="refined",
        help="refined | uniform:k | gamma:i (i in -1..5)",
    )
    p.add_argument("--baseline-k", type=int, default=10000, dest="baseline_k")
    p.add_argument("--with-C", action="store_true", dest="with_c")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dump-partition", default=None, dest="dump_partition")
    p.add_argument("--dump-graph", default=None, dest="dump_graph")
    p.add_argument(
        "--bifurcation",
        default=None,
        metavar="COLSxSAMPLES",
        help="emit a non-rigorous bifurcation point cloud instead of a sweep",
    )
    p.add_argument("--bif-transient", type=int, default=1000, dest="bif_transient")
    p.add_argument("--bif-x0", type=float, default=None, dest="bif_x0")
    return p


def _parse_omega(text: str) -> Interval:
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return Interval(v, v)
    if len(parts) == 2:
        return Interval(float(parts[0]), float(parts[1]))
    raise ValueError(f"bad omega {text!r}")


def _run_single(args, omega: Interval, deltas: list[float]) -> int:
    family = make_family(args.family, omega)
    delta = deltas[0]
    strategy = args.strategy
    if strategy == "refined":
        cert = expansion_lower_bound(family, delta, K=args.K, with_C=args.with_c)
    elif strategy.startswith("uniform:"):
        cert = expansion_uniform_baseline(
            family, delta, k=int(strategy.split(":")[1]), with_C=args.with_c
        )
    elif strategy.startswith("gamma:"):
        nbhd = family.make_critical_neighbourhood(delta)
        part = derivative_scaled_partition(
            family, family.domain, nbhd, args.K, int(strategy.split(":")[1])
        )
        cert = expansion_static(family, delta, part, with_C=args.with_c)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    payload = json.dumps(cert.to_json(), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    if args.dump_partition and cert.partition is not None:
        cert.partition.dump_csv(args.dump_partition)
    if args.dump_graph and cert.graph is not None:
        with open(args.dump_graph, "w") as fh:
            fh.write("\n".join(cert.graph.dump_lines()) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        omega = _parse_omega(args.omega)
        deltas = [float(d) for d in args.delta.split(",") if d]
        if not deltas:
            raise ValueError("no delta given")

        if args.bifurcation:
            cols_txt, _, samples_txt = args.bifurcation.partition("x")
            cols, samples = int(cols_txt), int(samples_txt)
            kwargs = {"transient": args.bif_transient, "samples": samples}
            if args.bif_x0 is not None:
                kwargs["x0"] = args.bif_x0
            data = bifurcation_data(omega, cols, **kwargs)
            if not args.out:
                raise ValueError("--bifurcation requires --out")
            write_bifurcation_csv(data, args.out)
            return 0

        if args.mode == "single":
            return _run_single(args, omega, deltas)

        spec = SweepSpec(
            mode=args.mode,
            family=args.family,
            omega_lo=omega.lo,
            omega_hi=omega.hi,
            grid=args.grid,
            depth=args.depth,
            deltas=tuple(deltas),
            K=args.K,
            strategy=args.strategy,
            with_C=args.with_c,
            workers=args.workers,
            baseline_k=args.baseline_k,
        )
    except (ValueError, KeyError, ExpcertError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    results = run_sweep(spec, out=args.out, fmt=args.format)
    failures = sum(
        1
        for rows in results.values()
        for r in rows
        if r["stop_reason"] and str(r["stop_reason"]).startswith("error:")
    )
    if not args.out:
        for label, rows in results.items():
            for r in rows:
                print(label, r["index"], r["a_lo"], r["a_hi"], r["lambda"])
    return 3 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
