"""Weighted digraph representation of a map and the cycle machinery.

Vertices are partition elements; an edge (i, j) exists whenever the
rigorous image of element i meets element j; its weight under-estimates
ln|Df| on the transition set L(e) = I_i intersected with the preimage
enclosure of I_j (falling back to I_i itself when the preimage bound is
looser).

lambda from `min_cycle_mean_full` is a certified lower bound on the
minimum cycle mean; the attached cycle is used to steer refinement and
need not be exactly minimal under rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels as K
from . import rounding as rnd
from .errors import (
    EmptyPartition,
    LoopPresent,
    NegativeReducedCycle,
    NotStronglyConnected,
)
from .intervals import Interval, intersects
from .maps import CriticalNeighbourhood, MapFamily, QuadraticFamily
from .partition import AdmissiblePartition

_INF = math.inf

# accumulated directed-rounding slack can push a zero-weight reduced cycle
# this far below zero without lambda being invalid
_NEG_CYCLE_TOL = -1e-9


@dataclass(frozen=True)
class WeightedDigraph:
    """Edge-list digraph; edges sorted by (src, dst), no parallel edges."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        src = np.ascontiguousarray(self.src, dtype=np.int32)
        dst = np.ascontiguousarray(self.dst, dtype=np.int32)
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if src.shape != dst.shape or src.shape != w.shape:
            raise ValueError("edge arrays must have equal length")
        if src.size:
            if src.min() < 0 or src.max() >= self.n or dst.min() < 0 or dst.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if not np.all(np.isfinite(w)):
                raise ValueError("non-finite edge weight")
            order = np.lexsort((dst, src))
            src, dst, w = src[order], dst[order], w[order]
            key = src.astype(np.int64) * self.n + dst
            if np.any(np.diff(key) == 0):
                raise ValueError("parallel edges forbidden")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "w", w)

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    def weight_of(self, u: int, v: int) -> float:
        key = self.src.astype(np.int64) * self.n + self.dst
        i = np.searchsorted(key, np.int64(u) * self.n + v)
        if i < key.size and key[i] == u * self.n + v:
            return float(self.w[i])
        raise KeyError(f"no edge {u}->{v}")

    def has_edge(self, u: int, v: int) -> bool:
        try:
            self.weight_of(u, v)
            return True
        except KeyError:
            return False

    def dump_lines(self) -> list[str]:
        """One line per edge: src,dst,weight with round-trip decimals."""
        return [
            f"{int(u)},{int(v)},{float(x)!r}"
            for u, v, x in zip(self.src, self.dst, self.w)
        ]


@dataclass(frozen=True)
class Cycle:
    """Cyclic vertex sequence; consecutive pairs (with wrap) are edges."""

    vertices: tuple[int, ...]
    weight: float
    mean: float

    @property
    def length(self) -> int:
        return len(self.vertices)

    @staticmethod
    def from_vertices(g: WeightedDigraph, vertices) -> "Cycle":
        vs = tuple(int(v) for v in vertices)
        total = 0.0
        for a, b in zip(vs, vs[1:] + vs[:1]):
            total += g.weight_of(a, b)
        return Cycle(vs, total, total / len(vs))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_representation(
    p: AdmissiblePartition, family: MapFamily, delta: CriticalNeighbourhood
) -> WeightedDigraph:
    """Graph representation of the family on the partition."""
    if len(p) == 0:
        raise EmptyPartition("partition has no elements")
    if isinstance(family, QuadraticFamily):
        om = family.parameter_set
        dom = family.domain
        src, dst, w = K.build_quadratic_edges(
            p.los, p.his, om.lo, om.hi, dom.lo, dom.hi
        )
        return WeightedDigraph(len(p), src, dst, w)
    return _build_generic(p, family)


def _build_generic(p: AdmissiblePartition, family: MapFamily) -> WeightedDigraph:
    # plug-in families go through the interval contract, element by element
    k = len(p)
    src: list[int] = []
    dst: list[int] = []
    wts: list[float] = []
    elements = [p[i] for i in range(k)]
    branches = [family.preimage_branches(e) for e in elements]
    for i, ei in enumerate(elements):
        img = family.image(ei)
        for j, ej in enumerate(elements):
            if not intersects(img, ej):
                continue
            pieces = []
            for br in branches[j]:
                lo = max(ei.lo, br.lo)
                hi = min(ei.hi, br.hi)
                if lo <= hi:
                    pieces.append(Interval(lo, hi))
            if pieces:
                le = pieces[0]
                for extra in pieces[1:]:
                    le = Interval(min(le.lo, extra.lo), max(le.hi, extra.hi))
            else:
                le = ei
            dj = family.derivative(le)
            lo_abs = dj.lo if dj.lo > 0.0 else (-dj.hi if dj.hi < 0.0 else 0.0)
            if lo_abs <= 0.0:
                raise ValueError(
                    f"derivative enclosure {dj} not separated from zero on {le}"
                )
            src.append(i)
            dst.append(j)
            wts.append(rnd.log_rd(lo_abs))
    return WeightedDigraph(
        k,
        np.asarray(src, dtype=np.int32),
        np.asarray(dst, dtype=np.int32),
        np.asarray(wts, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# decomposition and cycles
# ---------------------------------------------------------------------------

def scc_decompose(g: WeightedDigraph) -> list[list[int]]:
    """Strongly connected components, ordered by smallest member."""
    if g.n == 0:
        return []
    if g.num_edges == 0:
        return [[v] for v in range(g.n)]
    mat = csr_matrix(
        (np.ones(g.num_edges, dtype=np.int8), (g.src, g.dst)), shape=(g.n, g.n)
    )
    _, labels = connected_components(mat, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(v)
    comps = [sorted(vs) for vs in groups.values()]
    comps.sort(key=lambda vs: vs[0])
    return comps


def remove_loops(g: WeightedDigraph) -> WeightedDigraph:
    keep = g.src != g.dst
    return WeightedDigraph(g.n, g.src[keep], g.dst[keep], g.w[keep])


def min_loop(g: WeightedDigraph) -> tuple[float, Cycle | None]:
    """Minimum weight over length-1 cycles; +inf when there are none."""
    is_loop = g.src == g.dst
    if not is_loop.any():
        return _INF, None
    wl = g.w[is_loop]
    i = int(np.argmin(wl))
    v = int(g.src[is_loop][i])
    wv = float(wl[i])
    return wv, Cycle((v,), wv, wv)


def _karp_on_subgraph(
    g: WeightedDigraph, members: list[int], want_cycle: bool
) -> tuple[float, list[int] | None]:
    mem = np.asarray(members, dtype=np.int32)
    lookup = np.full(g.n, -1, dtype=np.int32)
    lookup[mem] = np.arange(len(mem), dtype=np.int32)
    sel = (lookup[g.src] >= 0) & (lookup[g.dst] >= 0)
    es = lookup[g.src[sel]]
    ed = lookup[g.dst[sel]]
    ew = g.w[sel]
    if es.size == 0:
        return _INF, None
    order = np.lexsort((es, ed))
    es, ed, ew = (
        np.ascontiguousarray(es[order]),
        np.ascontiguousarray(ed[order]),
        np.ascontiguousarray(ew[order]),
    )
    lam, cyc = K.karp_scc(len(mem), es, ed, ew, want_cycle)
    if not want_cycle:
        return float(lam), None
    return float(lam), [int(mem[v]) for v in cyc]


def karp_min_cycle_mean(g: WeightedDigraph) -> tuple[float, Cycle]:
    """Karp's minimum cycle mean with cycle extraction.

    Requires a strongly connected, loop-free graph with at least one
    edge; lambda_c is a certified lower bound on the minimum cycle mean.
    """
    if np.any(g.src == g.dst):
        raise LoopPresent("input graph has loops")
    if g.num_edges == 0:
        raise NotStronglyConnected("graph with no edges")
    comps = scc_decompose(g)
    if len(comps) != 1:
        raise NotStronglyConnected(f"{len(comps)} strongly connected components")
    lam, verts = _karp_on_subgraph(g, comps[0], want_cycle=True)
    return lam, Cycle.from_vertices(g, verts)


def min_cycle_mean_full(
    g: WeightedDigraph, want_cycle: bool = True
) -> tuple[float, Cycle | None]:
    """min(lambda_l, lambda_c) over loops and loop-free SCCs; +inf if acyclic."""
    lam_l, loop_cycle = min_loop(g)
    g2 = remove_loops(g)
    lam_c = _INF
    best_verts: list[int] | None = None
    for comp in scc_decompose(g2):
        if len(comp) < 2:
            continue
        lam, verts = _karp_on_subgraph(g2, comp, want_cycle)
        if lam < lam_c:
            lam_c = lam
            best_verts = verts
    if lam_c < lam_l:
        if want_cycle and best_verts is not None:
            return lam_c, Cycle.from_vertices(g, best_verts)
        return lam_c, None
    if loop_cycle is None and lam_l == _INF:
        return _INF, None
    return lam_l, loop_cycle


def karp_tables(g: WeightedDigraph) -> tuple[np.ndarray, np.ndarray]:
    """Full Karp tables (debug/tests): F is the round-up DP, P its trace.

    F has shape (n+1, n) with F[0] = [0 at the start vertex, inf elsewhere];
    P[k][v] is the predecessor of v on a minimising length-k path, -1 when
    F[k][v] is infinite.
    """
    n = g.n
    f = np.full((n + 1, n), _INF)
    pred = np.full((n + 1, n), -1, dtype=np.int32)
    f[0, 0] = 0.0
    order = np.lexsort((g.src, g.dst))
    es, ed, ew = g.src[order], g.dst[order], g.w[order]
    for k in range(1, n + 1):
        for u, v, wt in zip(es, ed, ew):
            if f[k - 1, u] < _INF:
                cand = rnd.add_ru(f[k - 1, u], float(wt))
                if cand < f[k, v]:
                    f[k, v] = cand
                    pred[k, v] = u
    return f, pred


# ---------------------------------------------------------------------------
# the constant C
# ---------------------------------------------------------------------------

def compute_C(g: WeightedDigraph, lam: float) -> float:
    """C <= exp(min over simple paths of (w(path) - |path|*lambda)).

    Requires lambda <= the minimum cycle mean, so reduced weights admit no
    negative cycle and shortest walks equal shortest simple paths.  Loops
    are excluded: a simple path cannot traverse one.  Returns a value in
    (0, 1], rounded toward 0.
    """
    keep = g.src != g.dst
    loop_red = K.v_sub_rd(g.w[~keep], lam)
    if loop_red.size and loop_red.min() < 0.0:
        raise NegativeReducedCycle("a loop has negative reduced weight")
    es = g.src[keep]
    ed = g.dst[keep]
    if es.size == 0:
        return 1.0
    red = np.ascontiguousarray(K.v_sub_rd(g.w[keep], lam))
    best, min_diag = K.floyd_warshall_min(g.n, es, ed, red)
    # rounding slack alone cannot push a valid reduced cycle this far down
    if min_diag < _NEG_CYCLE_TOL:
        raise NegativeReducedCycle(
            "relaxation found a negative reduced cycle: lambda too large"
        )
    if best == _INF or best >= 0.0:
        return 1.0
    c = min(1.0, rnd.exp_rd(best))
    if not c > 0.0:
        raise ValueError("expansion constant underflowed to zero")
    return c
