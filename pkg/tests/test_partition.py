"""Partition constructors, splitting, and admissibility validation."""

import numpy as np
import pytest

from expcert import (
    Interval,
    QuadraticFamily,
    TooFewIntervals,
    split_elements,
    uniform_partition,
    validate,
)
from expcert.maps import CriticalNeighbourhood
from expcert.partition import AdmissiblePartition, derivative_scaled_partition


@pytest.fixture
def cheb():
    return QuadraticFamily.at(2.0)


def nbhd(radius):
    return CriticalNeighbourhood((Interval(-radius, radius),))


def test_uniform_one_per_component(cheb):
    p = uniform_partition(cheb.domain, nbhd(1.0), 2)
    assert p.intervals == [Interval(-2, -1), Interval(1, 2)]


def test_uniform_equal_halves(cheb):
    p = uniform_partition(cheb.domain, nbhd(1.0), 4)
    assert p.intervals == [
        Interval(-2.0, -1.5),
        Interval(-1.5, -1.0),
        Interval(1.0, 1.5),
        Interval(1.5, 2.0),
    ]


def test_uniform_width_uniformity():
    fam = QuadraticFamily.at(2.0, domain=Interval(0.0, 1.0))
    nb = CriticalNeighbourhood(())
    p = uniform_partition(fam.domain, nb, 10)
    w = p.widths()
    assert len(p) == 10
    assert w.max() / w.min() <= 1 + 1e-12


def test_uniform_too_few(cheb):
    with pytest.raises(TooFewIntervals):
        uniform_partition(cheb.domain, nbhd(0.5), 1)


def test_constructors_validate(cheb):
    nb = nbhd(0.001)
    for k in (2, 9, 57, 302):
        p = uniform_partition(cheb.domain, nb, k)
        assert len(p) == k
        assert validate(p, cheb, nb)
    for gi in (-1, 0, 2, 5):
        p = derivative_scaled_partition(cheb, cheb.domain, nb, 200, gi)
        assert len(p) == 200
        assert validate(p, cheb, nb)


def test_gamma0_matches_uniform(cheb):
    nb = nbhd(0.001)
    pu = uniform_partition(cheb.domain, nb, 500)
    p0 = derivative_scaled_partition(cheb, cheb.domain, nb, 500, 0)
    assert np.array_equal(pu.los, p0.los) and np.array_equal(pu.his, p0.his)


def test_split_examples():
    p = AdmissiblePartition(np.array([0.0]), np.array([2.0]))
    p2, n = split_elements(p, {0})
    assert n == 1 and p2.intervals == [Interval(0, 1), Interval(1, 2)]

    tiny_hi = np.nextafter(1.0, 2.0)
    p = AdmissiblePartition(np.array([1.0]), np.array([tiny_hi]))
    p2, n = split_elements(p, {0})
    assert n == 0 and len(p2) == 1

    p = AdmissiblePartition(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    p2, n = split_elements(p, {0, 1})
    assert n == 2 and len(p2) == 4


def test_split_preserves_union_and_shrinks(cheb):
    nb = nbhd(0.001)
    p = uniform_partition(cheb.domain, nb, 20)
    p2, n = split_elements(p, {0, 5, 19})
    assert n == 3
    assert p2.los[0] == p.los[0] and p2.his[-1] == p.his[-1]
    assert validate(p2, cheb, nb)
    assert p2.widths().max() <= p.widths().max()


def test_validate_rejects_bad(cheb):
    nb = nbhd(0.001)
    # overlapping interiors
    p = AdmissiblePartition(np.array([-2.0, -1.5]), np.array([-1.0, -0.5]))
    assert not validate(p, cheb, nb)
    # gap in the cover
    good = uniform_partition(cheb.domain, nb, 10)
    holey = AdmissiblePartition(np.delete(good.los, 3), np.delete(good.his, 3))
    assert not validate(holey, cheb, nb)
    # touches the critical point
    p = AdmissiblePartition(np.array([-2.0, -0.5]), np.array([-0.5, 2.0]))
    assert not validate(p, cheb, nb)


def test_multi_component_apportionment(cheb):
    # three components; the critical point stays inside a removed piece
    nb = CriticalNeighbourhood((Interval(-0.05, 0.05), Interval(0.5, 0.6)))
    p = uniform_partition(cheb.domain, nb, 37)
    assert len(p) == 37
    assert validate(p, cheb, nb)
