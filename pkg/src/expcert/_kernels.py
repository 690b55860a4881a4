"""Hot numeric kernels: graph construction, Karp's DP, Floyd-Warshall.

Two interchangeable implementations:

  * numba @njit kernels (default), scalar directed rounding inlined;
  * a pure-numpy vectorized fallback, selected with EXPCERT_BACKEND=numpy
    (or automatically when numba is unavailable).

Both implement identical semantics: identical edge ordering, identical
tie-breaking, identical directed rounding.  `python -m expcert.bench`
compares their throughput.

Karp rounding scheme: the DP is run twice, once with round-down additions
(row n of the table) and once with round-up additions (the subtracted
rows), and every quotient is rounded down, so the returned lambda_c can
only under-approximate the true minimum cycle mean.  The predecessor
trace follows the round-up table; the extracted cycle realizes a genuine
path, but its mean may exceed lambda_c by the accumulated rounding, per
the method's design.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import rounding as _r

_INF = math.inf

BACKEND = os.environ.get("EXPCERT_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"EXPCERT_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

if BACKEND == "numba":
    try:
        import numba
    except ImportError:  # pragma: no cover
        BACKEND = "numpy"


# ---------------------------------------------------------------------------
# vectorized directed rounding (numpy backend + bulk property tests)
# ---------------------------------------------------------------------------

def v_add_rd(a, b):
    with np.errstate(invalid="ignore"):
        s = a + b
        v = s - a
        err = (a - (s - v)) + (b - v)
        out = np.where(err < 0.0, np.nextafter(s, -_INF), s)
    return out


def v_add_ru(a, b):
    with np.errstate(invalid="ignore"):
        s = a + b
        v = s - a
        err = (a - (s - v)) + (b - v)
        out = np.where(err > 0.0, np.nextafter(s, _INF), s)
    return out


def v_sub_rd(a, b):
    return v_add_rd(a, -np.asarray(b))


def v_sub_ru(a, b):
    return v_add_ru(a, -np.asarray(b))


def _v_prod_err(a, b, p):
    split = 134217729.0
    c = split * a
    ahi = c - (c - a)
    alo = a - ahi
    c = split * b
    bhi = c - (c - b)
    blo = b - bhi
    return ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def v_mul_rd(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = a * b
    err = _v_prod_err(a, b, p)
    guard = (np.abs(p) > _r._PROD_HUGE) | (
        (np.abs(p) < _r._PROD_TINY) & (a != 0.0) & (b != 0.0)
    )
    return np.where(guard | (err < 0.0), np.nextafter(p, -_INF), p)


def v_mul_ru(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = a * b
    err = _v_prod_err(a, b, p)
    guard = (np.abs(p) > _r._PROD_HUGE) | (
        (np.abs(p) < _r._PROD_TINY) & (a != 0.0) & (b != 0.0)
    )
    return np.where(guard | (err > 0.0), np.nextafter(p, _INF), p)


def v_div_rd(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    q = num / den
    p = q * den
    err = _v_prod_err(q, den, p)
    resid = (p - num) + err
    bad = np.where(den > 0.0, resid > 0.0, resid < 0.0)
    guard = (
        (np.abs(q) > _r._PROD_HUGE)
        | ((num != 0.0) & ((np.abs(q) < _r._PROD_TINY) | (np.abs(num) < _r._PROD_TINY)))
        | (np.abs(den) > _r._PROD_HUGE)
        | (np.abs(den) < _r._PROD_TINY)
    )
    return np.where(guard | bad, np.nextafter(q, -_INF), q)


def v_sqrt_rd(x):
    x = np.asarray(x, dtype=np.float64)
    r = np.sqrt(x)
    p = r * r
    err = _v_prod_err(r, r, p)
    resid = (p - x) + err
    guard = (x < _r._PROD_TINY) | (x > _r._PROD_HUGE)
    out = np.where(guard | (resid > 0.0), np.nextafter(r, -_INF), r)
    return np.where(x == 0.0, 0.0, out)


def v_sqrt_ru(x):
    x = np.asarray(x, dtype=np.float64)
    r = np.sqrt(x)
    p = r * r
    err = _v_prod_err(r, r, p)
    resid = (p - x) + err
    guard = (x < _r._PROD_TINY) | (x > _r._PROD_HUGE)
    out = np.where(guard | (resid < 0.0), np.nextafter(r, _INF), r)
    return np.where(x == 0.0, 0.0, out)


def v_log_rd(x):
    m = np.log(x)
    out = np.nextafter(np.nextafter(m, -_INF), -_INF)
    return np.where(x == 1.0, 0.0, out)


def v_log_ru(x):
    m = np.log(x)
    out = np.nextafter(np.nextafter(m, _INF), _INF)
    return np.where(x == 1.0, 0.0, out)


def v_exp_rd(x):
    m = np.exp(x)
    out = np.nextafter(np.nextafter(m, -_INF), -_INF)
    return np.where(x == 0.0, 1.0, out)


def v_exp_ru(x):
    m = np.exp(x)
    out = np.nextafter(np.nextafter(m, _INF), _INF)
    return np.where(x == 0.0, 1.0, out)


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def _build_quadratic_edges_numpy(plo, phi, om_lo, om_hi, dom_lo, dom_hi):
    k = plo.shape[0]
    # preimage branches per target
    t_lo = np.maximum(v_sub_rd(om_lo, phi), 0.0)
    t_hi = v_sub_ru(om_hi, plo)
    has_t = t_hi >= 0.0
    s_lo = np.where(has_t, v_sqrt_rd(np.where(has_t, t_lo, 0.0)), 0.0)
    s_hi = np.where(has_t, v_sqrt_ru(np.where(has_t, t_hi, 0.0)), -1.0)
    pb_lo = s_lo
    pb_hi = np.minimum(s_hi, dom_hi)
    pb_ok = has_t & (pb_lo <= pb_hi)
    nb_lo = np.maximum(-s_hi, dom_lo)
    nb_hi = -s_lo
    nb_ok = has_t & (nb_lo <= nb_hi)

    # image of each source element
    pos_side = plo >= 0.0
    neg_side = phi <= 0.0
    sq_lo = np.where(pos_side, v_mul_rd(plo, plo), np.where(neg_side, v_mul_rd(phi, phi), 0.0))
    big = np.maximum(np.abs(plo), np.abs(phi))
    sq_hi = np.where(pos_side, v_mul_ru(phi, phi), np.where(neg_side, v_mul_ru(plo, plo), v_mul_ru(big, big)))
    im_lo = v_sub_rd(om_lo, sq_hi)
    im_hi = v_sub_ru(om_hi, sq_lo)

    ja = np.searchsorted(phi, im_lo, side="left")
    jb = np.searchsorted(plo, im_hi, side="right") - 1
    counts = np.maximum(jb - ja + 1, 0)
    total = int(counts.sum())
    src = np.repeat(np.arange(k, dtype=np.int32), counts)
    before = np.concatenate([[0], np.cumsum(counts)[:-1]])
    dst = (np.arange(total) - np.repeat(before, counts) + np.repeat(ja, counts)).astype(np.int32)

    e_pos = pos_side[src]
    b_ok = np.where(e_pos, pb_ok[dst], nb_ok[dst])
    b_lo = np.where(e_pos, pb_lo[dst], nb_lo[dst])
    b_hi = np.where(e_pos, pb_hi[dst], nb_hi[dst])
    l_lo = np.maximum(plo[src], b_lo)
    l_hi = np.minimum(phi[src], b_hi)
    good = b_ok & (l_lo <= l_hi)
    l_lo = np.where(good, l_lo, plo[src])
    l_hi = np.where(good, l_hi, phi[src])
    minabs = np.where(l_lo >= 0.0, l_lo, -l_hi)
    w = v_log_rd(2.0 * minabs)
    return src, dst, np.ascontiguousarray(w, dtype=np.float64)


def _karp_scc_numpy(n, esrc, edst, ew, want_cycle):
    """Edges must be sorted by (dst, src).  Returns (lam, cycle array)."""
    m = esrc.shape[0]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(edst)) + 1])
    group_dst = edst[starts]
    eidx = np.arange(m)

    def advance(prev, rd, pk=None):
        with np.errstate(invalid="ignore"):
            base = prev[esrc]
            cand = v_add_rd(base, ew) if rd else v_add_ru(base, ew)
            cand = np.where(np.isfinite(base), cand, _INF)
            gmin = np.minimum.reduceat(cand, starts)
        cur = np.full(n, _INF)
        cur[group_dst] = gmin
        if pk is not None:
            with np.errstate(invalid="ignore"):
                hit = np.where(cand == gmin[np.repeat(np.arange(len(starts)), np.diff(np.concatenate([starts, [m]])))], eidx, m)
            first = np.minimum.reduceat(hit, starts)
            ok = (first < m) & np.isfinite(gmin)
            pk[group_dst[ok]] = esrc[first[ok]]
        return cur

    prev = np.full(n, _INF)
    prev[0] = 0.0
    for _ in range(n):
        prev = advance(prev, rd=True)
    flo_n = prev

    prev = np.full(n, _INF)
    prev[0] = 0.0
    M = np.full(n, -_INF)
    P = np.full((n + 1, n), -1, dtype=np.int32) if want_cycle else None
    for k in range(n):
        usable = np.isfinite(prev) & np.isfinite(flo_n)
        if usable.any():
            num = v_sub_rd(flo_n[usable], prev[usable])
            q = v_div_rd(num, float(n - k))
            M[usable] = np.maximum(M[usable], q)
        pk = P[k + 1] if want_cycle else None
        prev = advance(prev, rd=False, pk=pk)

    sel = np.isfinite(flo_n) & (M > -_INF)
    if not sel.any():
        return _INF, np.empty(0, dtype=np.int32)
    lam = np.min(M[sel])
    v0 = int(np.flatnonzero(sel & (M == lam))[0])
    if not want_cycle:
        return float(lam), np.empty(0, dtype=np.int32)

    seq = np.empty(n + 1, dtype=np.int32)
    seq[n] = v0
    for k in range(n, 0, -1):
        seq[k - 1] = P[k, seq[k]]
    seen = np.full(n, -1, dtype=np.int32)
    cs = ce = -1
    for j in range(n, -1, -1):
        v = seq[j]
        if seen[v] >= 0:
            cs, ce = j, seen[v]
            break
        seen[v] = j
    return float(lam), seq[cs:ce].copy()


def _floyd_warshall_numpy(n, esrc, edst, wred):
    d = np.full((n, n), _INF)
    np.minimum.at(d, (esrc, edst), wred)
    for mid in range(n):
        col = d[:, mid : mid + 1]
        row = d[mid : mid + 1, :]
        with np.errstate(invalid="ignore"):
            cand = v_add_rd(col, row)
            cand = np.where(np.isfinite(col) & np.isfinite(row), cand, _INF)
        np.minimum(d, cand, out=d)
    min_diag = float(np.diag(d).min()) if n else _INF
    off = ~np.eye(n, dtype=bool)
    vals = d[off]
    vals = vals[np.isfinite(vals)]
    best = float(vals.min()) if vals.size else _INF
    return best, min_diag


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if BACKEND == "numba":
    _nj = numba.njit(cache=True)

    add_rd = _nj(_r.add_rd)
    add_ru = _nj(_r.add_ru)
    sub_rd = _nj(_r.sub_rd)
    sub_ru = _nj(_r.sub_ru)
    mul_rd = _nj(_r.mul_rd)
    mul_ru = _nj(_r.mul_ru)
    div_rd = _nj(_r.div_rd)
    sqrt_rd = _nj(_r.sqrt_rd)
    sqrt_ru = _nj(_r.sqrt_ru)
    log_rd = _nj(_r.log_rd)

    @numba.njit(cache=True)
    def _build_quadratic_edges_numba(plo, phi, om_lo, om_hi, dom_lo, dom_hi):
        k = plo.shape[0]
        pb_lo = np.empty(k)
        pb_hi = np.empty(k)
        pb_ok = np.zeros(k, dtype=np.bool_)
        nb_lo = np.empty(k)
        nb_hi = np.empty(k)
        nb_ok = np.zeros(k, dtype=np.bool_)
        for j in range(k):
            t_lo = sub_rd(om_lo, phi[j])
            t_hi = sub_ru(om_hi, plo[j])
            if t_hi >= 0.0:
                if t_lo < 0.0:
                    t_lo = 0.0
                s_lo = sqrt_rd(t_lo)
                s_hi = sqrt_ru(t_hi)
                b_hi = min(s_hi, dom_hi)
                if s_lo <= b_hi:
                    pb_ok[j] = True
                    pb_lo[j] = s_lo
                    pb_hi[j] = b_hi
                c_lo = max(-s_hi, dom_lo)
                c_hi = -s_lo
                if c_lo <= c_hi:
                    nb_ok[j] = True
                    nb_lo[j] = c_lo
                    nb_hi[j] = c_hi

        ja = np.empty(k, dtype=np.int64)
        jb = np.empty(k, dtype=np.int64)
        total = 0
        for i in range(k):
            if plo[i] >= 0.0:
                sq_lo = mul_rd(plo[i], plo[i])
                sq_hi = mul_ru(phi[i], phi[i])
            elif phi[i] <= 0.0:
                sq_lo = mul_rd(phi[i], phi[i])
                sq_hi = mul_ru(plo[i], plo[i])
            else:
                big = max(-plo[i], phi[i])
                sq_lo = 0.0
                sq_hi = mul_ru(big, big)
            im_lo = sub_rd(om_lo, sq_hi)
            im_hi = sub_ru(om_hi, sq_lo)
            a = np.searchsorted(phi, im_lo, side="left")
            b = np.searchsorted(plo, im_hi, side="right") - 1
            ja[i] = a
            jb[i] = b
            if b >= a:
                total += b - a + 1

        src = np.empty(total, dtype=np.int32)
        dst = np.empty(total, dtype=np.int32)
        w = np.empty(total, dtype=np.float64)
        pos = 0
        for i in range(k):
            on_pos = plo[i] >= 0.0
            for j in range(ja[i], jb[i] + 1):
                l_lo = plo[i]
                l_hi = phi[i]
                if on_pos:
                    if pb_ok[j]:
                        t1 = max(l_lo, pb_lo[j])
                        t2 = min(l_hi, pb_hi[j])
                        if t1 <= t2:
                            l_lo = t1
                            l_hi = t2
                else:
                    if nb_ok[j]:
                        t1 = max(l_lo, nb_lo[j])
                        t2 = min(l_hi, nb_hi[j])
                        if t1 <= t2:
                            l_lo = t1
                            l_hi = t2
                minabs = l_lo if l_lo >= 0.0 else -l_hi
                src[pos] = i
                dst[pos] = j
                w[pos] = log_rd(2.0 * minabs)
                pos += 1
        return src, dst, w

    @numba.njit(cache=True)
    def _karp_scc_numba(n, esrc, edst, ew, want_cycle):
        m = esrc.shape[0]
        flo_prev = np.full(n, _INF)
        flo_prev[0] = 0.0
        flo_cur = np.empty(n)
        for _k in range(n):
            for v in range(n):
                flo_cur[v] = _INF
            for e in range(m):
                u = esrc[e]
                if flo_prev[u] < _INF:
                    cand = add_rd(flo_prev[u], ew[e])
                    v = edst[e]
                    if cand < flo_cur[v]:
                        flo_cur[v] = cand
            tmp = flo_prev
            flo_prev = flo_cur
            flo_cur = tmp
        flo_n = flo_prev

        fhi_prev = np.full(n, _INF)
        fhi_prev[0] = 0.0
        fhi_cur = np.empty(n)
        M = np.full(n, -_INF)
        if want_cycle:
            P = np.full((n + 1, n), -1, dtype=np.int32)
        else:
            P = np.full((1, 1), -1, dtype=np.int32)
        for k in range(n):
            for v in range(n):
                if fhi_prev[v] < _INF and flo_n[v] < _INF:
                    num = sub_rd(flo_n[v], fhi_prev[v])
                    q = div_rd(num, float(n - k))
                    if q > M[v]:
                        M[v] = q
            for v in range(n):
                fhi_cur[v] = _INF
            for e in range(m):
                u = esrc[e]
                if fhi_prev[u] < _INF:
                    cand = add_ru(fhi_prev[u], ew[e])
                    v = edst[e]
                    if cand < fhi_cur[v]:
                        fhi_cur[v] = cand
                        if want_cycle:
                            P[k + 1, v] = u
            tmp = fhi_prev
            fhi_prev = fhi_cur
            fhi_cur = tmp

        v0 = -1
        lam = _INF
        for v in range(n):
            if flo_n[v] < _INF and M[v] > -_INF:
                if v0 == -1 or M[v] < lam:
                    v0 = v
                    lam = M[v]
        if v0 == -1 or not want_cycle:
            return lam, np.empty(0, dtype=np.int32)

        seq = np.empty(n + 1, dtype=np.int32)
        seq[n] = v0
        for k in range(n, 0, -1):
            seq[k - 1] = P[k, seq[k]]
        seen = np.full(n, -1, dtype=np.int32)
        cs = -1
        ce = -1
        for j in range(n, -1, -1):
            v = seq[j]
            if seen[v] >= 0:
                cs = j
                ce = seen[v]
                break
            seen[v] = j
        return lam, seq[cs:ce].copy()

    @numba.njit(cache=True)
    def _floyd_warshall_numba(n, esrc, edst, wred):
        d = np.full((n, n), _INF)
        m = esrc.shape[0]
        for e in range(m):
            if wred[e] < d[esrc[e], edst[e]]:
                d[esrc[e], edst[e]] = wred[e]
        col = np.empty(n)
        row = np.empty(n)
        for mid in range(n):
            # snapshot so each round relaxes against the pre-round values
            # (keeps results well defined even with negative cycles)
            for i in range(n):
                col[i] = d[i, mid]
                row[i] = d[mid, i]
            for i in range(n):
                dim = col[i]
                if dim < _INF:
                    for j in range(n):
                        dmj = row[j]
                        if dmj < _INF:
                            cand = add_rd(dim, dmj)
                            if cand < d[i, j]:
                                d[i, j] = cand
        min_diag = _INF
        for v in range(n):
            if d[v, v] < min_diag:
                min_diag = d[v, v]
        best = _INF
        for i in range(n):
            for j in range(n):
                if i != j and d[i, j] < best:
                    best = d[i, j]
        return best, min_diag

    build_quadratic_edges = _build_quadratic_edges_numba
    karp_scc = _karp_scc_numba
    floyd_warshall_min = _floyd_warshall_numba
else:
    build_quadratic_edges = _build_quadratic_edges_numpy
    karp_scc = _karp_scc_numpy
    floyd_warshall_min = _floyd_warshall_numpy


def warmup() -> None:
    """Force JIT compilation of all kernels (no-op on the numpy backend)."""
    plo = np.array([-2.0, 1.0])
    phi = np.array([-1.0, 2.0])
    s, d, w = build_quadratic_edges(plo, phi, 2.0, 2.0, -2.0, 2.0)
    order = np.lexsort((s, d))
    es = s[order].astype(np.int32)
    ed = d[order].astype(np.int32)
    ew = w[order]
    karp_scc(2, es, ed, ew, True)
    karp_scc(2, es, ed, ew, False)
    floyd_warshall_min(2, es, ed, ew)
