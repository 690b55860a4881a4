"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python -m expcert.bench [--sizes 200,500,1000] [--repeats 3]

Both implementations share one semantics (see tests/test_backend_parity);
this reports throughput only.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _kernels as K
from .graph import build_representation, min_cycle_mean_full
from .maps import QuadraticFamily
from .partition import uniform_partition


def _sorted_edges(src, dst, w):
    order = np.lexsort((src, dst))
    return (
        np.ascontiguousarray(src[order]),
        np.ascontiguousarray(dst[order]),
        np.ascontiguousarray(w[order]),
    )


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m expcert.bench")
    ap.add_argument("--sizes", default="200,500,1000")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    fam = QuadraticFamily.at(1.88516)
    nb = fam.make_critical_neighbourhood(0.001)
    om, dom = fam.parameter_set, fam.domain
    if K.BACKEND == "numba":
        K.warmup()
        pairs = [
            ("build_edges", K.build_quadratic_edges, K._build_quadratic_edges_numpy),
            ("karp", K.karp_scc, K._karp_scc_numpy),
            ("floyd_warshall", K.floyd_warshall_min, K._floyd_warshall_numpy),
        ]
    else:
        print("active backend is numpy; timing the fallback only")
        pairs = [
            ("build_edges", None, K._build_quadratic_edges_numpy),
            ("karp", None, K._karp_scc_numpy),
            ("floyd_warshall", None, K._floyd_warshall_numpy),
        ]

    print(f"{'kernel':<16}{'n':>6}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>9}")
    for n in sizes:
        p = uniform_partition(dom, nb, n)
        g = build_representation(p, fam, nb)
        es, ed, ew = _sorted_edges(g.src, g.dst, g.w)
        lam, _ = min_cycle_mean_full(g, want_cycle=False)
        red = np.ascontiguousarray(K.v_sub_rd(ew, lam))

        cases = {
            "build_edges": (p.los, p.his, om.lo, om.hi, dom.lo, dom.hi),
            "karp": (g.n, es, ed, ew, True),
            "floyd_warshall": (g.n, es, ed, red),
        }
        for name, fast, slow in pairs:
            t_slow = time_call(slow, *cases[name], repeats=args.repeats)
            if fast is not None:
                t_fast = time_call(fast, *cases[name], repeats=args.repeats)
                print(f"{name:<16}{n:>6}{t_fast:>12.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}")
            else:
                print(f"{name:<16}{n:>6}{'-':>12}{t_slow:>12.4f}{'-':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
