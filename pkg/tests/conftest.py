"""Shared test helpers: independent oracles and graph generators."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from expcert.graph import WeightedDigraph


def fraction_to_float_rd(fr: Fraction) -> float:
    """Largest double <= fr (round-toward-minus-infinity conversion)."""
    f = float(fr)
    if Fraction(f) > fr:
        f = math.nextafter(f, -math.inf)
    return f


def simple_cycles(n: int, edges: dict[tuple[int, int], float]):
    """Enumerate all simple cycles as vertex tuples (DFS, smallest-first).

    Each cycle is reported once, rooted at its smallest vertex.
    """
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for (u, v) in edges:
        adj[u].append(v)
    for vs in adj.values():
        vs.sort()
    out = []

    def dfs(root: int, v: int, path: list[int], on_path: set[int]):
        for w in adj[v]:
            if w == root:
                out.append(tuple(path))
            elif w > root and w not in on_path:
                path.append(w)
                on_path.add(w)
                dfs(root, w, path, on_path)
                on_path.remove(w)
                path.pop()

    for root in range(n):
        dfs(root, root, [root], {root})
    return out


def brute_force_min_cycle_mean(g: WeightedDigraph) -> tuple[Fraction | None, int]:
    """Exact rational minimum cycle mean and the number of cycles."""
    edges = {
        (int(u), int(v)): float(w) for u, v, w in zip(g.src, g.dst, g.w)
    }
    best: Fraction | None = None
    cycles = simple_cycles(g.n, edges)
    for cyc in cycles:
        total = Fraction(0)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            total += Fraction(edges[(a, b)])
        mean = total / len(cyc)
        if best is None or mean < best:
            best = mean
    return best, len(cycles)


def brute_force_min_simple_path(g: WeightedDigraph, lam: float) -> Fraction | None:
    """Exact minimum over simple paths (>=1 edge) of reduced weight."""
    edges: dict[tuple[int, int], Fraction] = {}
    for u, v, w in zip(g.src, g.dst, g.w):
        if int(u) != int(v):
            edges[(int(u), int(v))] = Fraction(float(w)) - Fraction(lam)
    adj: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for (u, v) in edges:
        adj[u].append(v)
    best: list[Fraction | None] = [None]

    def dfs(v: int, seen: set[int], total: Fraction, length: int):
        if length >= 1 and (best[0] is None or total < best[0]):
            best[0] = total
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                dfs(w, seen, total + edges[(v, w)], length + 1)
                seen.remove(w)

    for s in range(g.n):
        dfs(s, {s}, Fraction(0), 0)
    return best[0]


def random_digraph(rng: np.random.Generator, n: int, p: float, lo=-10, hi=10,
                   integer=True, loops=False) -> WeightedDigraph:
    src, dst, w = [], [], []
    for u in range(n):
        for v in range(n):
            if u == v and not loops:
                continue
            if rng.random() < p:
                src.append(u)
                dst.append(v)
                if integer:
                    w.append(float(rng.integers(lo, hi + 1)))
                else:
                    w.append(float(rng.uniform(lo, hi)))
    return WeightedDigraph(n, np.array(src, dtype=np.int32),
                           np.array(dst, dtype=np.int32), np.array(w))


def is_strongly_connected(g: WeightedDigraph) -> bool:
    reach = np.zeros((g.n, g.n), dtype=bool)
    reach[g.src, g.dst] = True
    np.fill_diagonal(reach, True)
    for mid in range(g.n):
        reach |= np.outer(reach[:, mid], reach[mid, :])
    return bool(reach.all())


def random_strongly_connected(rng: np.random.Generator, max_n=8, p=0.35,
                              integer=True, loops=False) -> WeightedDigraph:
    while True:
        n = int(rng.integers(2, max_n + 1))
        g = random_digraph(rng, n, p, integer=integer, loops=loops)
        if g.num_edges and is_strongly_connected(g):
            return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
