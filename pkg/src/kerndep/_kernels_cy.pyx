# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the O(n^2) hot kernels.

Mirrors kerndep._kernels_np function for function. Loops are single
threaded on purpose: accumulation order is fixed, so repeated runs give
bitwise identical results.
"""

import numpy as np

from libc.math cimport exp, sqrt

name = "compiled"


def pairwise_sq_dists(double[:, ::1] x):
    # The inner-product matrix is one BLAS call here just like the numpy
    # backend (beating GEMM with a hand loop is not happening); the win is
    # fusing the |a|^2 + |b|^2 - 2ab assembly, clamping, and symmetry
    # repair into a single pass with no temporaries.
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double s
    prod_arr = np.dot(x, np.asarray(x).T)
    cdef double[:, ::1] prod = prod_arr
    sq_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] sq = sq_arr
    for i in range(n):
        s = 0.0
        for k in range(d):
            s += x[i, k] * x[i, k]
        sq[i] = s
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        out[i, i] = 0.0
        for j in range(i + 1, n):
            s = sq[i] + sq[j] - (prod[i, j] + prod[j, i])
            if s < 0.0:
                s = 0.0
            out[i, j] = s
            out[j, i] = s
    return out_arr


def rbf_from_sq_dists(double[:, ::1] d2, double sigma):
    cdef Py_ssize_t n = d2.shape[0]
    cdef Py_ssize_t m = d2.shape[1]
    cdef Py_ssize_t i, j
    cdef double scale = -1.0 / (2.0 * sigma * sigma)
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(m):
            out[i, j] = exp(d2[i, j] * scale)
    return out_arr


def rbf_from_sq_dists_inplace(d2_arr, double sigma):
    """rbf_from_sq_dists overwriting its input; for callers that own d2."""
    cdef double[:, ::1] d2 = d2_arr
    cdef Py_ssize_t n = d2.shape[0]
    cdef Py_ssize_t m = d2.shape[1]
    cdef Py_ssize_t i, j
    cdef double scale = -1.0 / (2.0 * sigma * sigma)
    for i in range(n):
        for j in range(m):
            d2[i, j] = exp(d2[i, j] * scale)
    return d2_arr


def center(double[:, ::1] g):
    # Same grouping as the numpy version: (g - (mu_i + mu_j)) + grand,
    # so symmetric input stays bitwise symmetric here too.
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t i, j
    cdef double grand = 0.0
    cdef double s
    mu_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] mu = mu_arr
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += g[i, j]
        mu[i] = s / n
        grand += mu[i]
    grand /= n
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(n):
            out[i, j] = (g[i, j] - (mu[i] + mu[j])) + grand
    return out_arr


def centered_stats(double[:, ::1] k, double[:, ::1] l):
    # One streaming pass: center both matrices entry by entry (same
    # grouping as center(), so the values match the materialized path)
    # and accumulate the three scalars without an n^2 temporary.
    cdef Py_ssize_t n = k.shape[0]
    cdef Py_ssize_t i, j
    cdef double gk = 0.0, gl = 0.0, s
    cdef double cross = 0.0, fro_k = 0.0, fro_l = 0.0, kc, lc
    muk_arr = np.empty(n, dtype=np.float64)
    mul_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] muk = muk_arr
    cdef double[::1] mul = mul_arr
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += k[i, j]
        muk[i] = s / n
        gk += muk[i]
        s = 0.0
        for j in range(n):
            s += l[i, j]
        mul[i] = s / n
        gl += mul[i]
    gk /= n
    gl /= n
    for i in range(n):
        for j in range(n):
            kc = (k[i, j] - (muk[i] + muk[j])) + gk
            lc = (l[i, j] - (mul[i] + mul[j])) + gl
            cross += kc * lc
            fro_k += kc * kc
            fro_l += lc * lc
    return cross, fro_k, fro_l


def max_abs(double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, v
    for i in range(n):
        for j in range(m):
            v = a[i, j]
            if v < 0.0:
                v = -v
            if v > best:
                best = v
    return best


def max_asym(double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, v
    for i in range(n):
        for j in range(i + 1, n):
            v = a[i, j] - a[j, i]
            if v < 0.0:
                v = -v
            if v > best:
                best = v
    return best


def sum_product(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(m):
            s += a[i, j] * b[i, j]
    return s


def fro_norm(double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(m):
            s += a[i, j] * a[i, j]
    return sqrt(s)


def permuted_sum_product(double[:, ::1] kc, double[:, ::1] lc, Py_ssize_t[::1] perm):
    cdef Py_ssize_t n = kc.shape[0]
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(n):
            s += kc[i, j] * lc[perm[i], perm[j]]
    return s
