# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled half-sweep kernel. Same contract as ``_pykernels.half_sweep``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, fabs, fmax, fmin, INFINITY, isfinite, nextafter

from .errors import NumericalError

cnp.import_array()

# must match the codes in generators.py
cdef enum:
    KL = 0
    REVERSE_KL = 1
    JENSEN_SHANNON = 2
    HELLINGER_SQ = 3
    ALPHA = 4


cdef inline double _ipow(double x, int n) noexcept nogil:
    # x ** n for n >= 1 by repeated squaring
    cdef double r = 1.0
    while n:
        if n & 1:
            r *= x
        x *= x
        n >>= 1
    return r


cdef inline void _eval(int code, double a, int neg_pow, double beta, double y,
                       double* inv, double* deriv) noexcept nogil:
    # inverse of phi' and its derivative, sharing one transcendental per call;
    # neg_pow > 0 means 1 / (a - 1) == -neg_pow, so the alpha power is a reciprocal
    cdef double w, e, base
    if y >= beta:
        inv[0] = INFINITY
        deriv[0] = INFINITY
        return
    if code == KL:
        e = exp(y)
        inv[0] = e
        deriv[0] = e
    elif code == REVERSE_KL:
        w = 1.0 / (1.0 - y)
        inv[0] = w
        deriv[0] = w * w
    elif code == JENSEN_SHANNON:
        e = exp(y)
        w = 1.0 / (2.0 - e)
        inv[0] = e * w
        deriv[0] = 2.0 * e * w * w
    elif code == HELLINGER_SQ:
        w = 1.0 / (1.0 - y)
        inv[0] = w * w
        deriv[0] = 2.0 * w * w * w
    else:
        base = 1.0 + (a - 1.0) * y
        if neg_pow > 0:
            e = 1.0 / _ipow(base, neg_pow)
        else:
            e = exp(log1p((a - 1.0) * y) / (a - 1.0))
        inv[0] = e
        deriv[0] = e / base


cdef inline double _ulp(double x) noexcept nogil:
    return nextafter(x, INFINITY) - x


cdef int _solve_row(
    int code, double a, int neg_pow, double beta, double lam,
    const double[:] crow, const double[:] other, const double[:] marg,
    double start, bint has_start, double inner_tol, int max_inner, double margin,
    double* work, double* out, int* clamped,
) noexcept nogil:
    """Returns 0 on success, 1 on non-finite input, 2 on exhausted iterations."""
    cdef Py_ssize_t j, m = crow.shape[0]
    cdef double s, top = -INFINITY, bottom = INFINITY
    cdef double u, lo, hi, h, dh, step, total, cap, v, dv
    cdef double inv_lam = 1.0 / lam
    cdef int it

    for j in range(m):
        s = other[j] - crow[j]
        if not isfinite(s):
            return 1
        top = fmax(top, s)
        bottom = fmin(bottom, s)

    if code == KL:
        total = 0.0
        for j in range(m):
            total += marg[j] * exp((other[j] - crow[j] - top) / lam)
        out[0] = -top - lam * log(total)
        return 0

    if top == bottom:
        out[0] = -top
        return 0

    for j in range(m):
        work[j] = other[j] - crow[j] - top

    lo = 0.0
    hi = fmin(top - bottom, lam * beta)
    if has_start:
        u = fmin(fmax(start + top, lo), hi)
        if u >= hi:
            u = 0.5 * (lo + hi)
    else:
        u = 0.5 * hi

    for it in range(max_inner):
        h = 0.0
        dh = 0.0
        for j in range(m):
            _eval(code, a, neg_pow, beta, (u + work[j]) * inv_lam, &v, &dv)
            h += marg[j] * v
            dh += marg[j] * dv
        dh *= inv_lam
        if fabs(h - 1.0) <= inner_tol:
            break
        if h > 1.0:
            hi = u
        else:
            lo = u
        if hi - lo <= 4.0 * _ulp(fmax(fabs(lo), fabs(hi))):
            u = 0.5 * (lo + hi)
            break
        step = u - (h - 1.0) / dh
        if step > lo and step < hi:
            u = step
        else:
            u = 0.5 * (lo + hi)
    else:
        return 2

    if isfinite(beta):
        cap = lam * (beta - margin)
        if u > cap:
            u = cap
            clamped[0] += 1
    out[0] = u - top
    return 0


def half_sweep(gen, double lam, cost, other, marg, start,
               double inner_tol, int max_inner, double margin):
    cdef const double[:, :] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef const double[:] o = np.ascontiguousarray(other, dtype=np.float64)
    cdef const double[:] w = np.ascontiguousarray(marg, dtype=np.float64)
    cdef Py_ssize_t k, n = c.shape[0]
    cdef int code = gen.code
    cdef double a = gen.param if gen.param is not None else 0.0
    cdef double beta = gen.beta_phi
    cdef int neg_pow = 0
    cdef double r
    cdef bint has_start = start is not None
    cdef const double[:] st
    cdef cnp.ndarray[cnp.float64_t, ndim=1] result = np.empty(n, dtype=np.float64)
    cdef double[:] res = result
    cdef double[:] buf = np.empty(max(o.shape[0], 1), dtype=np.float64)
    cdef int clamped = 0, status = 0
    cdef Py_ssize_t failed = -1

    if code == ALPHA:
        r = 1.0 / (1.0 - a)
        if r == <int>r and r <= 64:
            neg_pow = <int>r

    if has_start:
        st = np.ascontiguousarray(start, dtype=np.float64)
    else:
        st = np.zeros(n, dtype=np.float64)

    with nogil:
        for k in range(n):
            status = _solve_row(code, a, neg_pow, beta, lam, c[k], o, w, st[k], has_start,
                                inner_tol, max_inner, margin, &buf[0], &res[k], &clamped)
            if status != 0:
                failed = k
                break

    if status == 1:
        raise NumericalError(f"non-finite potential or cost at coordinate {failed}")
    if status == 2:
        raise NumericalError(
            f"coordinate {failed}: root not bracketed to tolerance in {max_inner} steps"
        )
    return result, clamped
