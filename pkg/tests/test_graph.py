"""Graph construction, SCCs, Karp, loops, and the constant C against oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import (
    brute_force_min_cycle_mean,
    brute_force_min_simple_path,
    fraction_to_float_rd,
    is_strongly_connected,
    random_digraph,
    random_strongly_connected,
)
from expcert import (
    Interval,
    LoopPresent,
    NegativeReducedCycle,
    NotStronglyConnected,
    QuadraticFamily,
    build_representation,
    compute_C,
    karp_min_cycle_mean,
    min_cycle_mean_full,
    min_loop,
    remove_loops,
    scc_decompose,
)
from expcert.graph import Cycle, WeightedDigraph, karp_tables
from expcert.maps import CriticalNeighbourhood
from expcert.partition import AdmissiblePartition, uniform_partition


def graph(n, triples):
    src, dst, w = zip(*triples)
    return WeightedDigraph(n, np.array(src, dtype=np.int32),
                           np.array(dst, dtype=np.int32), np.array(w, dtype=np.float64))


# ---------------------------------------------------------------------------
# representation
# ---------------------------------------------------------------------------

def test_representation_edges_two_cell():
    fam = QuadraticFamily.at(2.0)
    nb = CriticalNeighbourhood((Interval(-1.0, 1.0),))
    p = AdmissiblePartition(np.array([-2.0, 1.0]), np.array([-1.0, 2.0]))
    g = build_representation(p, fam, nb)
    # direct interval evaluation: image of either cell is [-2, 1]
    for i in (0, 1):
        img = fam.image(p[i])
        assert img.lo <= -2.0 and img.hi >= 1.0
    assert g.has_edge(0, 0) and g.has_edge(0, 1)
    assert g.has_edge(1, 0) and g.has_edge(1, 1)
    assert g.num_edges == 4


def test_representation_single_cell_loop():
    fam = QuadraticFamily.at(2.0)
    nb = CriticalNeighbourhood((Interval(-1.0, 1.0),))
    p = AdmissiblePartition(np.array([1.0]), np.array([2.0]))
    g = build_representation(p, fam, nb)
    # f([1,2]) = [-2, 1] touches [1, 2] at the single point 1
    assert g.has_edge(0, 0)


def test_representation_weight_contract():
    fam = QuadraticFamily.at(2.0)
    nb = CriticalNeighbourhood((Interval(-1.0, 1.0),))
    p = AdmissiblePartition(np.array([-2.0, 1.0]), np.array([-1.0, 2.0]))
    g = build_representation(p, fam, nb)
    for u, v, w in zip(g.src, g.dst, g.w):
        # w(e) <= min ln|Df| over the tightened transition set <= ln|Df| at
        # any true transition point
        assert w <= math.log(2 * 2.0) + 1e-12


def test_representation_sampled_soundness(rng):
    fam = QuadraticFamily.at(Interval(1.8, 1.85))
    nb = fam.make_critical_neighbourhood(0.01)
    p = uniform_partition(fam.domain, nb, 60)
    g = build_representation(p, fam, nb)
    los, his = p.los, p.his
    for _ in range(10000):
        a = rng.uniform(1.8, 1.85)
        x = rng.uniform(-2.0, 2.0)
        if abs(x) <= 0.01:
            continue
        fx = a - x * x
        i = np.searchsorted(his, x, side="left")
        if not (i < len(p) and los[i] <= x <= his[i]):
            continue
        j = np.searchsorted(his, fx, side="left")
        if not (j < len(p) and los[j] <= fx <= his[j]):
            continue
        assert g.has_edge(int(i), int(j))
        assert g.weight_of(int(i), int(j)) <= math.log(abs(-2 * x)) + 1e-12


# ---------------------------------------------------------------------------
# SCC
# ---------------------------------------------------------------------------

def test_scc_two_cycle():
    g = graph(2, [(0, 1, 1.0), (1, 0, 1.0)])
    assert scc_decompose(g) == [[0, 1]]


def test_scc_chain():
    g = graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert scc_decompose(g) == [[0], [1], [2]]


def test_scc_against_reachability_oracle(rng):
    for _ in range(60):
        g = random_digraph(rng, 8, 0.25, loops=True)
        comps = scc_decompose(g)
        reach = np.zeros((8, 8), dtype=bool)
        if g.num_edges:
            reach[g.src, g.dst] = True
        np.fill_diagonal(reach, True)
        for mid in range(8):
            reach |= np.outer(reach[:, mid], reach[mid, :])
        label = {}
        for ci, comp in enumerate(comps):
            for v in comp:
                label[v] = ci
        for u in range(8):
            for v in range(8):
                same = reach[u, v] and reach[v, u]
                assert same == (label[u] == label[v])


# ---------------------------------------------------------------------------
# Karp
# ---------------------------------------------------------------------------

def test_karp_single_cycle():
    g = graph(3, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)])
    lam, cyc = karp_min_cycle_mean(g)
    assert lam == 2.0
    assert sorted(cyc.vertices) == [0, 1, 2]
    assert cyc.mean == pytest.approx(2.0)


def test_karp_two_vs_three_cycle():
    # 2-cycle mean 1.5 vs 3-cycle mean 1.0
    g = graph(3, [(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0), (2, 0, 1.0), (0, 2, 9.0)])
    lam, cyc = karp_min_cycle_mean(g)
    best, _ = brute_force_min_cycle_mean(g)
    assert lam == fraction_to_float_rd(best) == 1.0
    assert cyc.length == 3


def test_karp_preconditions():
    with pytest.raises(LoopPresent):
        karp_min_cycle_mean(graph(2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0)]))
    with pytest.raises(NotStronglyConnected):
        karp_min_cycle_mean(graph(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)]))


def test_karp_structured_small_graphs():
    # all loop-free tournaments/cycles on <= 5 vertices over a weight grid
    weights = [-2.0, 0.0, 3.0]
    for n in (2, 3, 4):
        edges = [(u, v) for u in range(n) for v in range(n) if u != v]
        rng = np.random.default_rng(n)
        for _ in range(40):
            w = rng.choice(weights, size=len(edges))
            g = graph(n, [(u, v, float(x)) for (u, v), x in zip(edges, w)])
            lam, cyc = karp_min_cycle_mean(g)
            best, _ = brute_force_min_cycle_mean(g)
            assert lam == fraction_to_float_rd(best)
            assert Cycle.from_vertices(g, cyc.vertices).mean >= lam


def test_karp_random_integer_oracle(rng):
    for _ in range(150):
        g = random_strongly_connected(rng, max_n=8, p=0.35, integer=True)
        lam, cyc = karp_min_cycle_mean(g)
        best, ncyc = brute_force_min_cycle_mean(g)
        assert ncyc > 0
        assert lam == fraction_to_float_rd(best)
        # returned cycle is a genuine cycle with mean >= lambda
        again = Cycle.from_vertices(g, cyc.vertices)
        assert again.mean >= lam


def test_karp_float_weights_cycle_gap(rng):
    for _ in range(60):
        g = random_strongly_connected(rng, max_n=7, p=0.4, integer=False)
        lam, cyc = karp_min_cycle_mean(g)
        best, _ = brute_force_min_cycle_mean(g)
        assert Fraction(lam) <= best
        assert cyc.mean >= lam
        assert cyc.mean - lam <= 1e-9


def test_karp_tables_invariants():
    g = graph(3, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)])
    f, pred = karp_tables(g)
    assert f[0, 0] == 0.0 and np.all(np.isinf(f[0, 1:]))
    n = g.n
    for k in range(1, n + 1):
        for v in range(n):
            if np.isfinite(f[k, v]):
                u = pred[k, v]
                assert u >= 0 and g.has_edge(int(u), v)


# ---------------------------------------------------------------------------
# loops and the combined minimum
# ---------------------------------------------------------------------------

def test_min_loop():
    g = graph(3, [(0, 0, 0.5), (1, 1, -0.2), (0, 1, 1.0)])
    lam, cyc = min_loop(g)
    assert lam == -0.2 and cyc.vertices == (1,)
    lam, cyc = min_loop(graph(2, [(0, 1, 1.0)]))
    assert lam == math.inf and cyc is None
    lam, _ = min_loop(graph(1, [(0, 0, 0.125)]))
    assert lam == 0.125


def test_remove_loops():
    g = graph(2, [(0, 0, 1.0), (1, 1, 2.0)])
    assert remove_loops(g).num_edges == 0
    g = graph(2, [(0, 1, 1.0), (1, 0, 1.0)])
    assert remove_loops(g).num_edges == 2
    g = graph(2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0)])
    assert remove_loops(g).num_edges == 2


def test_min_cycle_mean_full_examples():
    lam, cyc = min_cycle_mean_full(graph(1, [(0, 0, 0.3)]))
    assert lam == 0.3 and cyc.length == 1

    g = graph(3, [(0, 0, 0.3), (1, 2, 0.05), (2, 1, 0.15), (0, 1, 1.0)])
    lam, cyc = min_cycle_mean_full(g)
    best, _ = brute_force_min_cycle_mean(
        WeightedDigraph(3, g.src[g.src != g.dst], g.dst[g.src != g.dst], g.w[g.src != g.dst])
    )
    assert lam == pytest.approx(0.1, abs=1e-12)
    assert cyc.length == 2

    lam, cyc = min_cycle_mean_full(graph(3, [(0, 1, 1.0), (1, 2, 1.0)]))
    assert lam == math.inf and cyc is None


def test_min_cycle_mean_full_matches_whole_graph_brute_force(rng):
    for _ in range(80):
        g = random_digraph(rng, 6, 0.3, loops=True)
        lam, cyc = min_cycle_mean_full(g)
        loops = g.src == g.dst
        best = None
        if loops.any():
            best = Fraction(float(g.w[loops].min()))
        core, ncyc = brute_force_min_cycle_mean(remove_loops(g))
        if core is not None and (best is None or core < best):
            best = core
        if best is None:
            assert lam == math.inf
        else:
            assert Fraction(lam) <= best
            assert float(best) - lam <= 1e-9
            assert cyc is not None and cyc.mean >= lam


def test_tie_prefers_loop():
    g = graph(2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0)])
    lam, cyc = min_cycle_mean_full(g)
    assert lam == 1.0 and cyc.length == 1


# ---------------------------------------------------------------------------
# the constant C
# ---------------------------------------------------------------------------

def test_compute_C_loop_only():
    assert compute_C(graph(1, [(0, 0, 0.7)]), 0.7) == 1.0


def test_compute_C_two_cycle():
    g = graph(2, [(0, 1, 0.0), (1, 0, 1.0)])
    c = compute_C(g, 0.5)
    assert c == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert c <= math.exp(-0.5)


def test_compute_C_all_above_lambda():
    g = graph(3, [(0, 1, 2.0), (1, 2, 3.0), (2, 0, 2.5)])
    assert compute_C(g, 2.0) == 1.0


def test_compute_C_detects_bad_lambda():
    g = graph(2, [(0, 1, 0.0), (1, 0, 1.0)])
    with pytest.raises(NegativeReducedCycle):
        compute_C(g, 1.5)
    with pytest.raises(NegativeReducedCycle):
        compute_C(graph(1, [(0, 0, 0.2)]), 0.5)


def test_compute_C_against_path_enumeration(rng):
    for _ in range(50):
        g = random_digraph(rng, 6, 0.35, integer=False, lo=-2, hi=2, loops=True)
        lam, _ = min_cycle_mean_full(g)
        if lam == math.inf:
            continue
        c = compute_C(g, lam)
        best = brute_force_min_simple_path(g, lam)
        if best is None or best >= 0:
            assert c == 1.0
        else:
            exact = float(best)
            assert c <= math.exp(exact) * (1 + 1e-12)
            assert c >= math.exp(exact) * (1 - 1e-9)
