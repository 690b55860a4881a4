"""Interval-Newton existence proofs for periodic orbits.

Applies the one-dimensional interval Newton operator to g(x) = x - f^n(x)
over a seed interval.  On success there is exactly one period-n orbit
through the interior of the seed, entirely outside the critical
neighbourhood, and lambda_max bounds the expansion exponent along it
from above: |(f^n)'(x)| <= exp(lambda_max * n).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rounding as rnd
from .errors import DomainError, ExplodedEnclosure
from .intervals import Interval, abs_outer, ln_outer, point, subset_of_interior
from .maps import CriticalNeighbourhood, MapFamily

FAIL_NEWTON_DERIVATIVE = "newton_derivative_contains_zero"
FAIL_NO_CONTRACTION = "no_contraction"
FAIL_DERIVATIVE_ZERO = "derivative_contains_zero"
FAIL_HITS_DELTA = "hits_critical_neighbourhood"
FAIL_EXPLODED = "exploded_enclosure"


@dataclass(frozen=True)
class OrbitCertificate:
    """Certified unique period-n orbit through the seed interval."""

    seed: Interval
    period: int
    lambda_max: float
    orbit_enclosures: tuple[Interval, ...]

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "orbit_lo": repr(self.seed.lo),
            "orbit_hi": repr(self.seed.hi),
            "lambda_max": self.lambda_max,
        }


@dataclass(frozen=True)
class OrbitFailure:
    reason: str
    detail: str = ""


def iterate_enclosure(family: MapFamily, seed: Interval, n: int) -> list[Interval]:
    """Rigorous forward enclosures [seed, f(seed), ..., f^n(seed)].

    Raises ExplodedEnclosure as soon as an iterate leaves the phase
    interval, since the family contract is only defined inside it.
    """
    out = [seed]
    cur = seed
    for i in range(n):
        try:
            cur = family.image(cur)
        except DomainError as exc:
            raise ExplodedEnclosure(f"iterate {i} left the domain: {exc}") from exc
        if not family.domain.contains_interval(cur):
            raise ExplodedEnclosure(
                f"iterate {i + 1} {cur} escapes {family.domain}"
            )
        out.append(cur)
    return out


def _chain_derivative(family: MapFamily, enclosures: list[Interval]) -> Interval:
    """Enclosure of (f^n)' over the seed: product of per-step derivatives."""
    prod = point(1.0)
    for step in enclosures[:-1]:
        prod = prod * family.derivative(step)
    return prod


def prove_periodic_orbit(
    family: MapFamily,
    delta: CriticalNeighbourhood,
    seed: Interval,
    n: int,
) -> OrbitCertificate | OrbitFailure:
    """Attempt an interval-Newton proof of a period-n orbit through seed.

    The family must carry a point parameter (orbit proofs are
    per-parameter) and the seed must lie in the phase interval outside
    the critical neighbourhood.
    """
    if not family.parameter_set.is_point():
        raise DomainError("orbit proofs require a point parameter")
    if not family.domain.contains_interval(seed):
        raise DomainError(f"seed {seed} outside the phase interval")
    if delta.intersects(seed):
        raise DomainError(f"seed {seed} meets the critical neighbourhood")
    if n < 1:
        raise ValueError("period must be positive")

    x0 = seed.midpoint()
    try:
        seed_iterates = iterate_enclosure(family, seed, n)
        point_iterates = iterate_enclosure(family, point(x0), n)
    except ExplodedEnclosure as exc:
        return OrbitFailure(FAIL_EXPLODED, str(exc))

    fn_x0 = point_iterates[n]
    g_x0 = point(x0) - fn_x0
    fn_prime = _chain_derivative(family, seed_iterates)
    g_prime = point(1.0) - fn_prime

    if g_prime.contains(0.0):
        return OrbitFailure(
            FAIL_NEWTON_DERIVATIVE, "cannot compute the interval Newton operator"
        )
    newton = point(x0) - g_x0 / g_prime
    if not subset_of_interior(newton, seed):
        return OrbitFailure(FAIL_NO_CONTRACTION, "the inclusion assumption fails")
    if fn_prime.contains(0.0):
        return OrbitFailure(
            FAIL_DERIVATIVE_ZERO, "the expansion exponent cannot be determined"
        )
    for i in range(1, n + 1):
        if delta.intersects(seed_iterates[i]):
            return OrbitFailure(
                FAIL_HITS_DELTA, f"iterate {i} might intersect the critical neighbourhood"
            )

    # The orbit point lies in the Newton image; iterating the operator
    # contracts onto it, so the exponent can be evaluated on a near-point
    # enclosure instead of the full seed.
    tight = _contract(family, seed, newton, n)
    tight_iterates = iterate_enclosure(family, tight, n)
    tight_prime = _chain_derivative(family, tight_iterates)
    exponent = ln_outer(abs_outer(tight_prime))
    lambda_max = rnd.div_ru(exponent.hi, float(n))
    return OrbitCertificate(
        seed=seed,
        period=n,
        lambda_max=lambda_max,
        orbit_enclosures=tuple(tight_iterates[:n]),
    )


def _contract(
    family: MapFamily, seed: Interval, first: Interval, n: int, rounds: int = 60
) -> Interval:
    """Iterate the Newton operator to squeeze the enclosure onto the root."""
    cur = first
    for _ in range(rounds):
        x0 = cur.midpoint()
        try:
            fn_x0 = iterate_enclosure(family, point(x0), n)[n]
            prime = _chain_derivative(family, iterate_enclosure(family, cur, n))
        except ExplodedEnclosure:
            return cur
        g_prime = point(1.0) - prime
        if g_prime.contains(0.0):
            return cur
        candidate = point(x0) - (point(x0) - fn_x0) / g_prime
        lo = max(candidate.lo, cur.lo)
        hi = min(candidate.hi, cur.hi)
        if lo > hi:
            return cur
        nxt = Interval(lo, hi)
        if nxt.width >= cur.width:
            return nxt
        cur = nxt
    return cur
