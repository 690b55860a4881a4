"""Scalar directed-rounding primitives.

Every function returns a double that brackets the exact real result from
the requested side:

    *_rd(x, ...) <= exact result <= *_ru(x, ...)

For +, -, *, / and sqrt the bracketing is *exact* directed rounding: the
round-to-nearest result is adjusted by one ulp only when it is provably on
the wrong side of the exact value (error-free transformations: Knuth's
TwoSum for sums, Dekker's TwoProduct for products).  This matters for the
graph algorithms, where integer-weight arithmetic must stay bit-exact.

log and exp are not correctly rounded by libm, so their bounds widen the
round-to-nearest value by two ulps per side.  Assumption, checked by the
test suite against 50-digit mpmath references: the platform log/exp are
faithful to within 2 ulp (glibc documents <= 2 ulp for both).

Dekker's splitting is only exact when no intermediate over/underflow
occurs; outside a generous magnitude window the product/quotient/sqrt
routines fall back to an unconditional one-ulp outward step, which is
always a valid (just not tight) bound.

Every function here is also compiled with numba in expcert._kernels; each
is deliberately self-contained (no helper calls) so the same source object
can be jitted as-is.
"""

import math

_INF = math.inf

# Dekker splitting is exact within this magnitude window.
_PROD_HUGE = 1e280
_PROD_TINY = 1e-280
_SPLITTER = 134217729.0  # 2**27 + 1


def add_rd(a, b):
    """Largest double <= a + b (a, b finite)."""
    s = a + b
    v = s - a
    err = (a - (s - v)) + (b - v)
    if err < 0.0:
        return math.nextafter(s, -_INF)
    return s


def add_ru(a, b):
    """Smallest double >= a + b (a, b finite)."""
    s = a + b
    v = s - a
    err = (a - (s - v)) + (b - v)
    if err > 0.0:
        return math.nextafter(s, _INF)
    return s


def sub_rd(a, b):
    """Largest double <= a - b."""
    nb = -b
    s = a + nb
    v = s - a
    err = (a - (s - v)) + (nb - v)
    if err < 0.0:
        return math.nextafter(s, -_INF)
    return s


def sub_ru(a, b):
    """Smallest double >= a - b."""
    nb = -b
    s = a + nb
    v = s - a
    err = (a - (s - v)) + (nb - v)
    if err > 0.0:
        return math.nextafter(s, _INF)
    return s


def mul_rd(a, b):
    """Largest double <= a * b."""
    p = a * b
    ap = abs(p)
    if ap > _PROD_HUGE or (ap < _PROD_TINY and a != 0.0 and b != 0.0):
        return math.nextafter(p, -_INF)
    c = _SPLITTER * a
    ahi = c - (c - a)
    alo = a - ahi
    c = _SPLITTER * b
    bhi = c - (c - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    if err < 0.0:
        return math.nextafter(p, -_INF)
    return p


def mul_ru(a, b):
    """Smallest double >= a * b."""
    p = a * b
    ap = abs(p)
    if ap > _PROD_HUGE or (ap < _PROD_TINY and a != 0.0 and b != 0.0):
        return math.nextafter(p, _INF)
    c = _SPLITTER * a
    ahi = c - (c - a)
    alo = a - ahi
    c = _SPLITTER * b
    bhi = c - (c - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    if err > 0.0:
        return math.nextafter(p, _INF)
    return p


def div_rd(num, den):
    """Largest double <= num / den (den != 0, both finite)."""
    q = num / den
    aq = abs(q)
    ad = abs(den)
    if (
        aq > _PROD_HUGE
        or (num != 0.0 and (aq < _PROD_TINY or abs(num) < _PROD_TINY))
        or ad > _PROD_HUGE
        or ad < _PROD_TINY
    ):
        return math.nextafter(q, -_INF)
    # sign of q*den - num decides which side of the exact quotient q is on
    p = q * den
    c = _SPLITTER * q
    qhi = c - (c - q)
    qlo = q - qhi
    c = _SPLITTER * den
    dhi = c - (c - den)
    dlo = den - dhi
    err = ((qhi * dhi - p) + qhi * dlo + qlo * dhi) + qlo * dlo
    resid = (p - num) + err  # p - num is exact: p within one rounding of num
    if den > 0.0:
        if resid > 0.0:
            return math.nextafter(q, -_INF)
    else:
        if resid < 0.0:
            return math.nextafter(q, -_INF)
    return q


def div_ru(num, den):
    """Smallest double >= num / den (den != 0, both finite)."""
    q = num / den
    aq = abs(q)
    ad = abs(den)
    if (
        aq > _PROD_HUGE
        or (num != 0.0 and (aq < _PROD_TINY or abs(num) < _PROD_TINY))
        or ad > _PROD_HUGE
        or ad < _PROD_TINY
    ):
        return math.nextafter(q, _INF)
    p = q * den
    c = _SPLITTER * q
    qhi = c - (c - q)
    qlo = q - qhi
    c = _SPLITTER * den
    dhi = c - (c - den)
    dlo = den - dhi
    err = ((qhi * dhi - p) + qhi * dlo + qlo * dhi) + qlo * dlo
    resid = (p - num) + err
    if den > 0.0:
        if resid < 0.0:
            return math.nextafter(q, _INF)
    else:
        if resid > 0.0:
            return math.nextafter(q, _INF)
    return q


def sqrt_rd(x):
    """Largest double <= sqrt(x) (x >= 0)."""
    if x == 0.0:
        return 0.0
    r = math.sqrt(x)
    if x < _PROD_TINY or x > _PROD_HUGE:
        return math.nextafter(r, -_INF)
    p = r * r
    c = _SPLITTER * r
    rhi = c - (c - r)
    rlo = r - rhi
    err = ((rhi * rhi - p) + 2.0 * (rhi * rlo)) + rlo * rlo
    resid = (p - x) + err  # sign of r*r - x
    if resid > 0.0:
        return math.nextafter(r, -_INF)
    return r


def sqrt_ru(x):
    """Smallest double >= sqrt(x) (x >= 0)."""
    if x == 0.0:
        return 0.0
    r = math.sqrt(x)
    if x < _PROD_TINY or x > _PROD_HUGE:
        return math.nextafter(r, _INF)
    p = r * r
    c = _SPLITTER * r
    rhi = c - (c - r)
    rlo = r - rhi
    err = ((rhi * rhi - p) + 2.0 * (rhi * rlo)) + rlo * rlo
    resid = (p - x) + err
    if resid < 0.0:
        return math.nextafter(r, _INF)
    return r


def log_rd(x):
    """Lower bound of ln(x) (x > 0); libm value widened by 2 ulp."""
    if x == 1.0:
        return 0.0
    m = math.log(x)
    return math.nextafter(math.nextafter(m, -_INF), -_INF)


def log_ru(x):
    """Upper bound of ln(x) (x > 0); libm value widened by 2 ulp."""
    if x == 1.0:
        return 0.0
    m = math.log(x)
    return math.nextafter(math.nextafter(m, _INF), _INF)


def exp_rd(x):
    """Lower bound of exp(x); libm value widened by 2 ulp (may be 0 or
    negative after widening near the underflow threshold)."""
    if x == 0.0:
        return 1.0
    m = math.exp(x)
    return math.nextafter(math.nextafter(m, -_INF), -_INF)


def exp_ru(x):
    """Upper bound of exp(x); libm value widened by 2 ulp."""
    if x == 0.0:
        return 1.0
    m = math.exp(x)
    return math.nextafter(math.nextafter(m, _INF), _INF)


def square_bounds(lo, hi):
    """Enclosure of {x*x : lo <= x <= hi} as (lo, hi).

    Dedicated squaring: when 0 is inside, the lower bound is exactly 0
    instead of the spurious negative part generic multiplication produces.
    """
    if lo >= 0.0:
        return mul_rd(lo, lo), mul_ru(hi, hi)
    if hi <= 0.0:
        return mul_rd(hi, hi), mul_ru(lo, lo)
    m = max(-lo, hi)
    return 0.0, mul_ru(m, m)


ALL_PRIMITIVES = (
    add_rd, add_ru, sub_rd, sub_ru, mul_rd, mul_ru,
    div_rd, div_ru, sqrt_rd, sqrt_ru, log_rd, log_ru,
    exp_rd, exp_ru, square_bounds,
)
