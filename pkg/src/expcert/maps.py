"""Map families: rigorous image / derivative / preimage enclosures.

A family bundles the three enclosure methods over a parameter set omega
(a point interval encodes a single parameter).  New families plug in by
implementing the MapFamily interface and providing their critical points;
everything downstream (partitions, graphs, refinement, orbit proofs) is
generic over the contract, with a fast array path specialised for the
quadratic family in expcert._kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, InvalidDelta
from .intervals import Interval, intersect, point, sqrt_outer


@dataclass(frozen=True)
class CriticalNeighbourhood:
    """Finite union of open intervals around the critical points.

    Components are stored by their representable endpoints, ordered,
    with pairwise disjoint closures, all inside the phase interval.
    """

    components: tuple[Interval, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        for c, d in zip(comps, comps[1:]):
            if not c.hi < d.lo:
                raise InvalidDelta("component closures intersect or are unordered")
        object.__setattr__(self, "components", comps)

    def contains_point(self, x: float) -> bool:
        """Open-interval membership."""
        return any(c.lo < x < c.hi for c in self.components)

    def intersects(self, j: Interval) -> bool:
        """True iff the open neighbourhood meets the closed interval j."""
        return any(j.lo < c.hi and c.lo < j.hi for c in self.components)

    def complement_components(self, domain: Interval) -> list[Interval]:
        """Closed components of domain minus the neighbourhood, left to right."""
        out: list[Interval] = []
        left = domain.lo
        for c in self.components:
            if c.lo > left:
                out.append(Interval(left, c.lo))
            left = max(left, c.hi)
        if left < domain.hi:
            out.append(Interval(left, domain.hi))
        return out


class MapFamily:
    """Contract for a one-parameter family on a compact interval.

    Implementations supply outer enclosures:

      image(J)             contains f_a(x) for all a in omega, x in J
      derivative(J)        contains Df_a(x) for all a in omega, x in J
      preimage_branches(J) list of intervals whose union contains every
                           x in I (minus the critical neighbourhood) with
                           f_a(x) in J for some a in omega, one interval
                           per monotone branch
    """

    name: str = "abstract"
    domain: Interval
    parameter_set: Interval

    def critical_points(self) -> Sequence[float]:
        raise NotImplementedError

    def image(self, j: Interval) -> Interval:
        raise NotImplementedError

    def derivative(self, j: Interval) -> Interval:
        raise NotImplementedError

    def preimage_branches(self, j: Interval) -> list[Interval]:
        raise NotImplementedError

    def make_critical_neighbourhood(self, delta: float) -> CriticalNeighbourhood:
        """Open delta-neighbourhood of the critical points.

        delta must be small enough that the component closures are
        pairwise disjoint and contained in the domain.
        """
        if not delta > 0.0:
            raise InvalidDelta("delta must be positive")
        comps = []
        for c in sorted(self.critical_points()):
            lo = c - delta
            hi = c + delta
            if not (self.domain.lo < lo and hi < self.domain.hi):
                raise InvalidDelta(
                    f"component ({lo}, {hi}) not contained in {self.domain}"
                )
            comps.append(Interval(lo, hi))
        for a, b in zip(comps, comps[1:]):
            if not a.hi < b.lo:
                raise InvalidDelta("component closures overlap")
        return CriticalNeighbourhood(tuple(comps))

    def with_parameter(self, omega: Interval) -> "MapFamily":
        raise NotImplementedError

    def _require_in_domain(self, j: Interval) -> None:
        if not self.domain.contains_interval(j):
            raise DomainError(f"{j} not inside the phase interval {self.domain}")


OMEGA_LIMIT = Interval(1.4, 2.0)


@dataclass(frozen=True)
class QuadraticFamily(MapFamily):
    """f_a(x) = a - x^2 on I = [-2, 2], parameters inside [1.4, 2]."""

    parameter_set: Interval = OMEGA_LIMIT
    domain: Interval = Interval(-2.0, 2.0)

    name = "quadratic"

    def __post_init__(self):
        om = self.parameter_set
        if not OMEGA_LIMIT.contains_interval(om):
            raise DomainError(f"omega {om} not inside {OMEGA_LIMIT}")

    @staticmethod
    def at(a: float | Interval, domain: Interval = Interval(-2.0, 2.0)) -> "QuadraticFamily":
        om = a if isinstance(a, Interval) else point(a)
        return QuadraticFamily(parameter_set=om, domain=domain)

    def with_parameter(self, omega: Interval) -> "QuadraticFamily":
        return QuadraticFamily(parameter_set=omega, domain=self.domain)

    def critical_points(self) -> Sequence[float]:
        return (0.0,)

    def image(self, j: Interval) -> Interval:
        self._require_in_domain(j)
        return self.parameter_set - j.square()

    def derivative(self, j: Interval) -> Interval:
        self._require_in_domain(j)
        # Df = -2x, parameter independent; doubling is exact in binary
        return Interval(-2.0 * j.hi, -2.0 * j.lo)

    def preimage_branches(self, j: Interval) -> list[Interval]:
        # x = +-sqrt(a - y) over a in omega, y in J, clipped to the domain
        t = self.parameter_set - j
        if t.hi < 0.0:
            return []
        s = sqrt_outer(Interval(max(t.lo, 0.0), t.hi))
        out = []
        neg = intersect(Interval(-s.hi, -s.lo), Interval(self.domain.lo, 0.0))
        if neg is not None:
            out.append(neg)
        pos = intersect(s, Interval(0.0, self.domain.hi))
        if pos is not None:
            out.append(pos)
        return out


def make_family(name: str, omega: Interval, domain: Interval | None = None) -> MapFamily:
    if name == "quadratic":
        dom = domain if domain is not None else Interval(-2.0, 2.0)
        return QuadraticFamily(parameter_set=omega, domain=dom)
    raise ValueError(f"unknown family {name!r}")
