"""Closed intervals with representable endpoints and outward-rounded arithmetic.

An Interval is the universal rigorous value carrier: every operation
returns an enclosure of the exact result set over its arguments.  Point
intervals [x, x] are the canonical embedding of scalars.

Endpoints are always finite doubles; an operation that would overflow to
infinity raises IntervalRangeError instead of storing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import rounding as rnd
from .errors import DivisionByZeroInterval, DomainError, IntervalRangeError


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo = float(self.lo)
        hi = float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise IntervalRangeError("NaN endpoint")
        if math.isinf(lo) or math.isinf(hi):
            raise IntervalRangeError("non-finite endpoint")
        if lo > hi:
            raise IntervalRangeError(f"inverted endpoints [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # -- basic queries ---------------------------------------------------

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def midpoint(self) -> float:
        """A representable point inside the interval, near the centre."""
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = self.lo + 0.5 * (self.hi - self.lo)
        if m < self.lo:
            m = self.lo
        if m > self.hi:
            m = self.hi
        return m

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- arithmetic (outward rounded) ------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        return _mk(rnd.add_rd(self.lo, other.lo), rnd.add_ru(self.hi, other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return _mk(rnd.sub_rd(self.lo, other.hi), rnd.sub_ru(self.hi, other.lo))

    def __mul__(self, other: "Interval") -> "Interval":
        a, b = self.lo, self.hi
        c, d = other.lo, other.hi
        lo = min(rnd.mul_rd(a, c), rnd.mul_rd(a, d), rnd.mul_rd(b, c), rnd.mul_rd(b, d))
        hi = max(rnd.mul_ru(a, c), rnd.mul_ru(a, d), rnd.mul_ru(b, c), rnd.mul_ru(b, d))
        return _mk(lo, hi)

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0.0 <= other.hi:
            raise DivisionByZeroInterval(f"0 in divisor [{other.lo}, {other.hi}]")
        a, b = self.lo, self.hi
        c, d = other.lo, other.hi
        lo = min(rnd.div_rd(a, c), rnd.div_rd(a, d), rnd.div_rd(b, c), rnd.div_rd(b, d))
        hi = max(rnd.div_ru(a, c), rnd.div_ru(a, d), rnd.div_ru(b, c), rnd.div_ru(b, d))
        return _mk(lo, hi)

    def square(self) -> "Interval":
        """Enclosure of {x^2 : x in self}; tight around 0."""
        lo, hi = rnd.square_bounds(self.lo, self.hi)
        return _mk(lo, hi)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        """Endpoints as shortest round-trip decimal strings."""
        return {"lo": repr(self.lo), "hi": repr(self.hi)}

    @staticmethod
    def from_json(obj: dict) -> "Interval":
        return Interval(float(obj["lo"]), float(obj["hi"]))


def _mk(lo: float, hi: float) -> Interval:
    if math.isinf(lo) or math.isinf(hi):
        raise IntervalRangeError("operation overflowed the double range")
    return Interval(lo, hi)


def point(x: float) -> Interval:
    return Interval(x, x)


# -- named operations ------------------------------------------------------

def arith(op: str, a: Interval, b: Interval) -> Interval:
    """Dispatch add/sub/mul/div by name."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def sqrt_outer(a: Interval) -> Interval:
    if a.lo < 0.0:
        raise DomainError(f"sqrt of interval with negative part [{a.lo}, {a.hi}]")
    return _mk(rnd.sqrt_rd(a.lo), rnd.sqrt_ru(a.hi))


def ln_outer(a: Interval) -> Interval:
    if a.lo <= 0.0:
        raise DomainError(f"log of interval touching (-inf, 0] [{a.lo}, {a.hi}]")
    return _mk(rnd.log_rd(a.lo), rnd.log_ru(a.hi))


def exp_outer(a: Interval) -> Interval:
    lo = max(0.0, rnd.exp_rd(a.lo))
    return _mk(lo, rnd.exp_ru(a.hi))


def abs_outer(a: Interval) -> Interval:
    if a.lo >= 0.0:
        return a
    if a.hi <= 0.0:
        return Interval(-a.hi, -a.lo)
    return Interval(0.0, max(-a.lo, a.hi))


def intersect(a: Interval, b: Interval) -> Interval | None:
    """Exact intersection; None when empty."""
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        return None
    return Interval(lo, hi)


def hull(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def intersects(a: Interval, b: Interval) -> bool:
    return a.lo <= b.hi and b.lo <= a.hi


def subset_of_interior(a: Interval, b: Interval) -> bool:
    """True iff a lies in the interior of b (strict at both ends)."""
    return b.lo < a.lo and a.hi < b.hi


def split_at_representable_midpoint(a: Interval) -> tuple[Interval, Interval] | None:
    """Split at the representable point nearest the centre.

    Returns None when no representable point lies strictly between the
    endpoints (adjacent doubles): the accuracy limit of the number system.
    """
    p = a.midpoint()
    if not (a.lo < p < a.hi):
        # centre collapsed onto an endpoint; try the neighbours
        up = math.nextafter(a.lo, math.inf)
        if up < a.hi:
            p = up
        else:
            return None
    return Interval(a.lo, p), Interval(p, a.hi)
