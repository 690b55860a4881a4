"""Admissible partitions of the phase interval minus the critical neighbourhood.

Constructors: uniform, derivative-scaled (density heuristics), and the
midpoint splitting used by selective refinement.  All endpoints are
representable; the geometry of a partition need not be rigorous, only
the graph weights computed from it are.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooFewIntervals
from .intervals import Interval, point, split_at_representable_midpoint
from .maps import CriticalNeighbourhood, MapFamily

GAMMA_INDICES = (-1, 0, 1, 2, 3, 4, 5)


def gamma_density(index: int, x: float) -> float:
    """Density scale gamma_i(|f'|); interval sizes end up ~ 1/gamma."""
    if index == -1:
        return math.exp(-x)
    if index == 0:
        return 1.0
    if index == 1:
        return x
    if index == 2:
        return x * x
    if index == 3:
        return x * x * x
    if index == 4:
        return math.exp(x)
    if index == 5:
        return math.exp(math.exp(x))
    raise ValueError(f"gamma index {index} not in {GAMMA_INDICES}")


@dataclass(frozen=True)
class AdmissiblePartition:
    """Ordered closed intervals covering I minus Delta."""

    los: np.ndarray
    his: np.ndarray
    provenance: str = "uniform"

    def __post_init__(self):
        object.__setattr__(self, "los", np.ascontiguousarray(self.los, dtype=np.float64))
        object.__setattr__(self, "his", np.ascontiguousarray(self.his, dtype=np.float64))

    def __len__(self) -> int:
        return self.los.shape[0]

    def __getitem__(self, i: int) -> Interval:
        return Interval(float(self.los[i]), float(self.his[i]))

    @property
    def intervals(self) -> list[Interval]:
        return [self[i] for i in range(len(self))]

    def widths(self) -> np.ndarray:
        return self.his - self.los

    def dump_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("index,lo,hi\n")
            for i in range(len(self)):
                fh.write(f"{i},{self.los[i]!r},{self.his[i]!r}\n")


def _apportion(weights: list[float], k: int) -> list[int]:
    """Largest-remainder seats with one seat reserved per component.

    Ties in the remainders go to the leftmost component; deterministic.
    """
    m = len(weights)
    if k < m:
        raise TooFewIntervals(f"k={k} below component count {m}")
    total = math.fsum(weights)
    spare = k - m
    quotas = [spare * w / total for w in weights]
    counts = [1 + int(math.floor(q)) for q in quotas]
    leftover = k - sum(counts)
    remainders = sorted(
        range(m), key=lambda i: (-(quotas[i] - math.floor(quotas[i])), i)
    )
    for i in remainders[:leftover]:
        counts[i] += 1
    return counts


def _cuts_uniform(lo: float, hi: float, n: int) -> np.ndarray:
    pts = np.empty(n + 1, dtype=np.float64)
    pts[0] = lo
    pts[n] = hi
    width = hi - lo
    for j in range(1, n):
        pts[j] = lo + width * (j / n)
    return _force_increasing(pts)


def _force_increasing(pts: np.ndarray) -> np.ndarray:
    # guards against collapsed cuts at the accuracy limit
    for j in range(1, len(pts)):
        if pts[j] <= pts[j - 1]:
            pts[j] = math.nextafter(pts[j - 1], math.inf)
    if pts[-1] > pts[-2]:
        return pts
    raise TooFewIntervals("component too small for requested resolution")


def uniform_partition(
    domain: Interval, delta: CriticalNeighbourhood, k: int
) -> AdmissiblePartition:
    """k intervals of approximately equal length covering I minus Delta."""
    comps = delta.complement_components(domain)
    counts = _apportion([c.width for c in comps], k)
    los: list[float] = []
    his: list[float] = []
    for comp, n in zip(comps, counts):
        pts = _cuts_uniform(comp.lo, comp.hi, n)
        los.extend(pts[:-1])
        his.extend(pts[1:])
    return AdmissiblePartition(np.array(los), np.array(his), provenance="uniform")


def derivative_scaled_partition(
    family: MapFamily,
    domain: Interval,
    delta: CriticalNeighbourhood,
    k: int,
    gamma_index: int,
) -> AdmissiblePartition:
    """Widths approximately proportional to 1/gamma(|f'|).

    gamma_0 (constant density) is exactly the uniform partition.  The
    general construction splits greedily: starting from a coarse uniform
    mesh (7 cells per component), repeatedly halve the cell carrying the
    largest integral of gamma(|f'|) until k cells exist.  The integral is
    midpoint-evaluated on a fine mesh of 16k cells.  Cells stop splitting
    once their masses equalize, so widths track 1/density within a
    factor-two staircase; for super-exponential densities the mass is
    finite where a pointwise width rule would not be, which keeps the
    construction well behaved.  Non-rigorous by design: only the graph
    weights computed later are.
    """
    if gamma_index == 0:
        p = uniform_partition(domain, delta, k)
        return AdmissiblePartition(
            p.los, p.his, provenance="derivative_scaled(gamma_0)"
        )
    comps = delta.complement_components(domain)
    mesh_counts = _apportion([c.width for c in comps], 16 * k)

    tables: list[tuple[np.ndarray, np.ndarray]] = []
    for comp, m in zip(comps, mesh_counts):
        edges = np.linspace(comp.lo, comp.hi, m + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        dens = np.empty(m, dtype=np.float64)
        for i, x in enumerate(mids):
            dj = family.derivative(point(float(x)))
            dens[i] = gamma_density(gamma_index, abs(dj.midpoint()))
        cum = np.concatenate([[0.0], np.cumsum(dens * np.diff(edges))])
        tables.append((edges, cum))

    bounds = [(c.lo, c.hi) for c in comps]

    def mass(lo: float, hi: float) -> float:
        for (edges, cum), (clo, chi) in zip(tables, bounds):
            if clo <= lo and hi <= chi:
                return float(np.interp(hi, edges, cum) - np.interp(lo, edges, cum))
        raise AssertionError("cell outside every component")

    k0 = max(len(comps), min(7 * len(comps), k))
    base = uniform_partition(domain, delta, k0)
    heap = [
        (-mass(float(base.los[i]), float(base.his[i])), float(base.los[i]), float(base.his[i]))
        for i in range(len(base))
    ]
    heapq.heapify(heap)
    count = len(base)
    frozen: list[tuple[float, float]] = []
    while count < k and heap:
        _, lo, hi = heapq.heappop(heap)
        parts = split_at_representable_midpoint(Interval(lo, hi))
        if parts is None:
            frozen.append((lo, hi))
            continue
        left, right = parts
        heapq.heappush(heap, (-mass(left.lo, left.hi), left.lo, left.hi))
        heapq.heappush(heap, (-mass(right.lo, right.hi), right.lo, right.hi))
        count += 1
    cells = sorted(frozen + [(lo, hi) for _, lo, hi in heap])
    return AdmissiblePartition(
        np.array([lo for lo, _ in cells]),
        np.array([hi for _, hi in cells]),
        provenance=f"derivative_scaled(gamma_{gamma_index})",
    )


def split_elements(
    p: AdmissiblePartition, indices: set[int] | list[int]
) -> tuple[AdmissiblePartition, int]:
    """Split each indexed interval at its representable midpoint.

    Elements with no interior representable point stay unchanged;
    num_split counts the actual splits.
    """
    chosen = sorted(set(int(i) for i in indices))
    for i in chosen:
        if not 0 <= i < len(p):
            raise IndexError(f"index {i} out of range")
    los: list[float] = []
    his: list[float] = []
    num_split = 0
    sel = set(chosen)
    for i in range(len(p)):
        lo = float(p.los[i])
        hi = float(p.his[i])
        if i in sel:
            parts = split_at_representable_midpoint(Interval(lo, hi))
            if parts is not None:
                left, right = parts
                los.extend([left.lo, right.lo])
                his.extend([left.hi, right.hi])
                num_split += 1
                continue
        los.append(lo)
        his.append(hi)
    return (
        AdmissiblePartition(np.array(los), np.array(his), provenance="refined"),
        num_split,
    )


def validate(
    p: AdmissiblePartition, family: MapFamily, delta: CriticalNeighbourhood
) -> bool:
    """Check the three admissibility conditions."""
    n = len(p)
    if n == 0:
        return False
    los, his = p.los, p.his
    if np.any(los > his):
        return False
    # (a) pairwise disjoint interiors (sorted, touching allowed)
    if np.any(np.diff(los) < 0) or np.any(his[:-1] > los[1:]):
        return False
    # (b) no interval meets a critical point
    for c in family.critical_points():
        if np.any((los <= c) & (c <= his)):
            return False
    # (c) the union covers I minus Delta
    for comp in delta.complement_components(family.domain):
        covered = comp.lo
        for i in range(n):
            if los[i] <= covered and his[i] > covered:
                covered = his[i]
            if covered >= comp.hi:
                break
        if covered < comp.hi:
            return False
    return True
