"""Refinement loop behavior, certificates, and certified-bound soundness."""

import math

import numpy as np
import pytest

from expcert import (
    Interval,
    QuadraticFamily,
    RefinementConfig,
    expansion_lower_bound,
    expansion_uniform_baseline,
    iterate_enclosure,
    point,
    refine_partition,
    uniform_partition,
)
from expcert.expansion import STOP_NO_CYCLES, STOP_SIZE_CAP


@pytest.fixture
def cheb():
    return QuadraticFamily.at(2.0)


def test_size_cap_equals_initial(cheb):
    nb = cheb.make_critical_neighbourhood(0.001)
    p0 = uniform_partition(cheb.domain, nb, 12)
    p, res = refine_partition(p0, cheb, nb, RefinementConfig(K=12))
    assert len(p) <= 12
    assert res.iterations == 1
    assert res.stop_reason == STOP_SIZE_CAP


def test_refinement_trace_growth(cheb):
    nb = cheb.make_critical_neighbourhood(0.001)
    p0 = uniform_partition(cheb.domain, nb, 9)
    p, res = refine_partition(p0, cheb, nb, RefinementConfig(K=200))
    sizes = [k for k, _ in res.trace]
    assert sizes == sorted(sizes)
    assert len(p) <= 200
    lams = [l for _, l in res.trace]
    assert lams[-1] > lams[0]


def test_expansion_certificate_fields(cheb):
    cert = expansion_lower_bound(cheb, 0.001, K=150)
    assert cert.final_partition_size <= 150
    assert cert.iterations == len(cert.trace)
    assert cert.lam <= math.log(2.0) + 1e-12
    assert cert.stop_reason == STOP_SIZE_CAP
    blob = cert.to_json()
    assert blob["family"] == "quadratic"
    assert blob["K"] == 150
    assert blob["lambda"] == cert.lam
    assert blob["delta"] == 0.001


def test_lambda_le_lambda_max_when_orbit(cheb):
    cert = expansion_lower_bound(QuadraticFamily.at(1.99999), 0.001, K=400)
    if cert.lambda_max is not None:
        assert cert.lam <= cert.lambda_max


def test_determinism(cheb):
    a = expansion_lower_bound(cheb, 0.001, K=300)
    b = expansion_lower_bound(cheb, 0.001, K=300)
    assert a.lam == b.lam
    assert a.trace == b.trace
    assert a.final_partition_size == b.final_partition_size
    assert a.lambda_max == b.lambda_max


def test_uniform_baseline(cheb):
    cert = expansion_uniform_baseline(cheb, 0.001, k=500)
    assert cert.final_partition_size == 500
    assert cert.iterations == 1
    assert cert.lam <= math.log(2.0) + 1e-12


def test_no_cycles_flagged():
    # f_1.5 maps [1.2, 2] to [-2.5, 0.06], entirely outside the domain
    # piece, so every trajectory leaves and the graph is acyclic
    from expcert.maps import CriticalNeighbourhood

    fam = QuadraticFamily.at(1.5, domain=Interval(1.2, 2.0))
    nb = CriticalNeighbourhood(())
    p0 = uniform_partition(fam.domain, nb, 9)
    p, res = refine_partition(p0, fam, nb, RefinementConfig(K=20))
    assert res.stop_reason == STOP_NO_CYCLES
    cert = expansion_lower_bound(fam, nb, K=20)
    assert cert.lam == math.inf
    assert cert.stop_reason == STOP_NO_CYCLES


def test_interval_parameter_mode():
    fam = QuadraticFamily.at(Interval(1.99999, 2.0))
    cert = expansion_lower_bound(fam, 0.001, K=200)
    assert cert.lam > 0.4
    assert cert.lambda_max is None  # orbit proofs are per-parameter


def test_certified_bound_sound_on_sampled_orbits(rng, cheb):
    # lambda with C: rigorous |(f^n)'| lower bounds exceed C e^{lambda n}
    cert = expansion_lower_bound(cheb, 0.001, K=300, with_C=True)
    lam, c_const = cert.lam, cert.C
    assert c_const is not None and 0.0 < c_const <= 1.0
    nb = cheb.make_critical_neighbourhood(0.001)
    checked = 0
    for _ in range(400):
        x = rng.uniform(-2.0, 2.0)
        n = int(rng.integers(1, 31))
        encl = iterate_enclosure(cheb, point(x), n)
        if any(nb.intersects(e) for e in encl[:-1]):
            continue
        lo_prod = 1.0
        for step in encl[:-1]:
            lo_prod *= min(abs(2 * step.lo), abs(2 * step.hi))
        assert lo_prod > c_const * math.exp(lam * n)
        checked += 1
    assert checked > 40


def test_refining_a_fine_uniform_partition_improves_lambda():
    # refinement applied on top of an already fine uniform partition keeps
    # improving the bound within a few iterations
    fam = QuadraticFamily.at(1.88516)
    nb = fam.make_critical_neighbourhood(0.001)
    p0 = uniform_partition(fam.domain, nb, 2000)
    p, res = refine_partition(p0, fam, nb, RefinementConfig(K=2040))
    lams = [l for _, l in res.trace]
    assert len(lams) >= 3
    assert max(lams[1:]) > lams[0]
    assert len(p) <= 2040


def test_stall_stop():
    fam = QuadraticFamily.at(2.0)
    cfg = RefinementConfig(K=100000, stall_epsilon=1e-2, stall_runs=3)
    nb = fam.make_critical_neighbourhood(0.1)
    p0 = uniform_partition(fam.domain, nb, 9)
    p, res = refine_partition(p0, fam, nb, cfg)
    assert res.stop_reason == "stall"
    assert len(p) < 100000
