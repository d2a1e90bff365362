# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; contract identical to ``_fallback``.

Each public function takes generators as packed arrays
``(breaks, a, b, sign, zero_limit)`` and releases the GIL for its inner loop.
"""

import numpy as np
from libc.math cimport sqrt, INFINITY, nextafter

cdef double BISECT_TOL = 1e-12
cdef int BISECT_MAXIT = 100


cdef struct Gen:
    const double* breaks
    const double* a
    const double* b
    const double* sign
    int n
    int wa
    int wb


cdef Gen _pack(const double[::1] breaks, const double[:, ::1] a,
               const double[:, ::1] b, const double[::1] sign):
    cdef Gen g
    g.breaks = &breaks[0]
    g.a = &a[0, 0]
    g.b = &b[0, 0]
    g.sign = &sign[0]
    g.n = breaks.shape[0] - 1
    g.wa = a.shape[1]
    g.wb = b.shape[1]
    return g


cdef inline int _piece(const Gen* g, double t, bint right) noexcept nogil:
    # left: largest i with breaks[i] < t; right: largest i with breaks[i] <= t
    cdef int lo = 0, hi = g.n, mid
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if (g.breaks[mid] <= t) if right else (g.breaks[mid] < t):
            lo = mid
        else:
            hi = mid
    return lo


cdef inline double _horner(const double* c, int w, double t) noexcept nogil:
    cdef double acc = 0.0
    cdef int k
    for k in range(w - 1, -1, -1):
        acc = acc * t + c[k]
    return acc


cdef inline double _horner_d(const double* c, int w, double t) noexcept nogil:
    cdef double acc = 0.0
    cdef int k
    for k in range(w - 1, 0, -1):
        acc = acc * t + k * c[k]
    return acc


cdef double _eval(const Gen* g, double t) noexcept nogil:
    cdef int i
    cdef double v, p
    if t <= 0.0:
        return 0.0
    i = _piece(g, t, False)
    v = _horner(g.a + i * g.wa, g.wa, t)
    if g.sign[i] != 0.0:
        p = _horner(g.b + i * g.wb, g.wb, t)
        if p < 0.0:
            p = 0.0
        v = v + g.sign[i] * sqrt(p)
    return v


cdef double _deriv1(const Gen* g, double t, bint right) noexcept nogil:
    cdef int i = _piece(g, t, right)
    cdef double d = _horner_d(g.a + i * g.wa, g.wa, t)
    cdef double p, dp, rad
    if g.sign[i] != 0.0:
        p = _horner(g.b + i * g.wb, g.wb, t)
        dp = _horner_d(g.b + i * g.wb, g.wb, t)
        if p > 0.0:
            rad = dp / (2.0 * sqrt(p))
        elif dp > 0.0:
            rad = INFINITY
        elif dp < 0.0:
            rad = -INFINITY
        else:
            rad = 0.0
        d = d + g.sign[i] * rad
    return d


cdef double _deriv(const Gen* g, double t, int side) noexcept nogil:
    if side > 0:
        return _deriv1(g, t, True)
    if side < 0:
        return _deriv1(g, t, False)
    return 0.5 * (_deriv1(g, t, True) + _deriv1(g, t, False))


cdef double _v0(const Gen* F, const Gen* G, double u) noexcept nogil:
    cdef double fu, lo = 0.0, hi = 1.0, mid
    cdef int it = 0
    if u <= 0.0:
        return 1.0
    fu = _eval(F, u)
    if fu <= 0.0:
        return 0.0
    while hi - lo > BISECT_TOL and it < BISECT_MAXIT:
        mid = 0.5 * (lo + hi)
        if fu * _eval(G, mid) >= u * mid:
            lo = mid
        else:
            hi = mid
        it += 1
    return lo


def eval_gen(const double[::1] breaks, const double[:, ::1] a, const double[:, ::1] b,
             const double[::1] sign, double zero_limit, t):
    cdef Gen g = _pack(breaks, a, b, sign)
    cdef double[::1] tt = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tt.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(tt.shape[0]):
            o[k] = _eval(&g, tt[k])
    return out.reshape(np.shape(t))


def deriv_gen(const double[::1] breaks, const double[:, ::1] a, const double[:, ::1] b,
              const double[::1] sign, double zero_limit, t, int side):
    cdef Gen g = _pack(breaks, a, b, sign)
    cdef double[::1] tt = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tt.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(tt.shape[0]):
            o[k] = _deriv(&g, tt[k], side)
    return out.reshape(np.shape(t))


def boundary_v0(F, G, u):
    cdef Gen f = _pack(F[0], F[1], F[2], F[3])
    cdef Gen g = _pack(G[0], G[1], G[2], G[3])
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64).ravel()
    out = np.empty(uu.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(uu.shape[0]):
            o[k] = _v0(&f, &g, uu[k])
    return out.reshape(np.shape(u))


def sample_conditional(F, G, u, w):
    cdef Gen f = _pack(F[0], F[1], F[2], F[3])
    cdef Gen g = _pack(G[0], G[1], G[2], G[3])
    uarr = np.array(u, dtype=np.float64, copy=True).ravel()
    cdef double[::1] uu = uarr
    cdef double[::1] ww = np.ascontiguousarray(w, dtype=np.float64).ravel()
    vout = np.empty(uu.shape[0], dtype=np.float64)
    sout = np.zeros(uu.shape[0], dtype=np.bool_)
    cdef double[::1] vo = vout
    cdef unsigned char[::1] so = sout.view(np.uint8)
    cdef Py_ssize_t k
    cdef int j, it
    cdef double x, v0, fp, jump, lo, hi, mid
    with nogil:
        for k in range(uu.shape[0]):
            x = uu[k]
            for j in range(1, f.n):
                if x == f.breaks[j]:
                    x = nextafter(x, 1.0)
                    uu[k] = x
                    break
            v0 = _v0(&f, &g, x)
            fp = _deriv(&f, x, 1)
            jump = v0 - fp * _eval(&g, v0)
            if jump > 0.0 and ww[k] <= jump:
                vo[k] = v0
                so[k] = 1
                continue
            lo = v0
            hi = 1.0
            it = 0
            while hi - lo > BISECT_TOL and it < BISECT_MAXIT:
                mid = 0.5 * (lo + hi)
                if mid - fp * _eval(&g, mid) >= ww[k]:
                    hi = mid
                else:
                    lo = mid
                it += 1
            vo[k] = hi
    return uarr, vout, sout
