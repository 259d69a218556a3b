# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels (see _pyfallback for contracts)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def evolve_csr(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
               cnp.float64_t[::1] prob, cnp.float64_t[::1] p):
    cdef Py_ssize_t n = p.shape[0]
    out_arr = np.zeros(n)
    cdef cnp.float64_t[::1] out = out_arr
    cdef Py_ssize_t x, k
    cdef double px
    for x in range(n):
        px = p[x]
        if px == 0.0:
            continue
        for k in range(indptr[x], indptr[x + 1]):
            out[indices[k]] += px * prob[k]
    return out_arr


cdef class StepSampler:
    cdef cnp.int64_t[::1] indptr
    cdef cnp.int64_t[::1] indices
    cdef cnp.float64_t[::1] cdf

    def __init__(self, indptr, indices, cdf):
        self.indptr = indptr
        self.indices = indices
        self.cdf = cdf

    def step(self, pos, unif):
        cdef cnp.int64_t[::1] pv = pos
        cdef cnp.float64_t[::1] uv = unif
        cdef Py_ssize_t m = pv.shape[0]
        out_arr = np.empty(m, dtype=np.int64)
        cdef cnp.int64_t[::1] out = out_arr
        cdef Py_ssize_t i, k, hi
        cdef double u
        for i in range(m):
            u = uv[i]
            k = self.indptr[pv[i]]
            hi = self.indptr[pv[i] + 1]
            while k < hi - 1 and self.cdf[k] <= u:
                k += 1
            out[i] = self.indices[k]
        return out_arr


def pair_tridiag_scan(cnp.float64_t[::1] lo0, cnp.float64_t[::1] di0, cnp.float64_t[::1] up0,
                      cnp.float64_t[::1] lo1, cnp.float64_t[::1] di1, cnp.float64_t[::1] up1,
                      cnp.float64_t[::1] p, cnp.float64_t[::1] q,
                      long long t0, long long nsteps,
                      double delta_tv, double delta_sup, long long stride,
                      cnp.float64_t[::1] tv_buf, cnp.float64_t[::1] sup_buf,
                      int stop_when_crossed):
    cdef Py_ssize_t n = p.shape[0]
    cdef cnp.float64_t[::1] tp = np.empty(n)
    cdef cnp.float64_t[::1] tq = np.empty(n)
    cdef long long cross_tv = -1, cross_sup = -1, n_rec = 0, done = 0, k, t
    cdef double tv, sup, inf = float("inf")
    cdef Py_ssize_t z
    cdef cnp.float64_t[::1] lo, di, up
    tv = _pair_tv(p, q)
    sup = _pair_relsup(p, q)
    for k in range(nsteps):
        if ((t0 + k) & 1) == 0:
            lo, di, up = lo0, di0, up0
        else:
            lo, di, up = lo1, di1, up1
        _tridiag_step(p, tp, lo, di, up)
        _tridiag_step(q, tq, lo, di, up)
        t = t0 + k + 1
        tv = _pair_tv(p, q)
        sup = _pair_relsup(p, q)
        if cross_tv < 0 and tv < delta_tv:
            cross_tv = t
        if cross_sup < 0 and sup < delta_sup:
            cross_sup = t
        if (k + 1) % stride == 0 and n_rec < tv_buf.shape[0]:
            tv_buf[n_rec] = tv
            sup_buf[n_rec] = sup
            n_rec += 1
        done = k + 1
        if stop_when_crossed and cross_tv >= 0 and cross_sup >= 0:
            break
    return done, n_rec, cross_tv, cross_sup, tv, sup


cdef void _tridiag_step(cnp.float64_t[::1] p, cnp.float64_t[::1] tmp,
                        cnp.float64_t[::1] lo, cnp.float64_t[::1] di,
                        cnp.float64_t[::1] up) nogil:
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t x
    for x in range(n):
        tmp[x] = p[x] * di[x]
    for x in range(n - 1):
        tmp[x + 1] += p[x] * up[x]
    for x in range(1, n):
        tmp[x - 1] += p[x] * lo[x]
    for x in range(n):
        p[x] = tmp[x]


cdef double _pair_tv(cnp.float64_t[::1] p, cnp.float64_t[::1] q) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t z
    for z in range(p.shape[0]):
        s += fabs(p[z] - q[z])
    return 0.5 * s


cdef double _pair_relsup(cnp.float64_t[::1] p, cnp.float64_t[::1] q) nogil:
    cdef double best = 0.0, r
    cdef Py_ssize_t z
    for z in range(p.shape[0]):
        if (p[z] > 0.0) != (q[z] > 0.0):
            return INFINITY
        if p[z] > 0.0:
            r = p[z] / q[z]
            if r < 1.0:
                r = 1.0 / r
            if r - 1.0 > best:
                best = r - 1.0
    return best


cdef extern from "math.h":
    double fabs(double) nogil
    double INFINITY


def gray_subset_min_ratio(cnp.int64_t[::1] deg, cnp.int64_t[::1] adj_indptr,
                          cnp.int64_t[::1] adj_indices, cnp.int64_t[::1] adj_mult,
                          long long half_vol):
    cdef Py_ssize_t n = deg.shape[0]
    out_arr = np.full(half_vol + 1, np.inf)
    cdef cnp.float64_t[::1] out = out_arr
    cdef cnp.int64_t[::1] conn = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] nl = np.zeros(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] in_set = np.zeros(n, dtype=np.uint8)
    cdef long long weight = 0, cut = 0, i, total
    cdef Py_ssize_t j, k
    cdef int sgn
    cdef double ratio
    for j in range(n):
        for k in range(adj_indptr[j], adj_indptr[j + 1]):
            nl[j] += adj_mult[k]
    total = (<long long>1) << n
    for i in range(1, total):
        j = 0
        while not (i >> j) & 1:
            j += 1
        if in_set[j]:
            in_set[j] = 0
            weight -= deg[j]
            cut -= nl[j] - 2 * conn[j]
            sgn = -1
        else:
            in_set[j] = 1
            weight += deg[j]
            cut += nl[j] - 2 * conn[j]
            sgn = 1
        for k in range(adj_indptr[j], adj_indptr[j + 1]):
            conn[adj_indices[k]] += sgn * adj_mult[k]
        if 0 < weight <= half_vol:
            ratio = <double>cut / <double>weight
            if ratio < out[weight]:
                out[weight] = ratio
    return out_arr
