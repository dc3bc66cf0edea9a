# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()


def min_chain(w):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sp_arr = np.array(w, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = sp_arr.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=2] nxt_arr = np.tile(np.arange(n, dtype=np.intp), (n, 1))
    cdef double[:, ::1] sp = sp_arr
    cdef Py_ssize_t[:, ::1] nxt = nxt_arr
    cdef Py_ssize_t i, j, k
    cdef double dik, cand
    for k in range(n):
        for i in range(n):
            dik = sp[i, k]
            for j in range(n):
                cand = dik + sp[k, j]
                if cand < sp[i, j]:
                    sp[i, j] = cand
                    nxt[i, j] = nxt[i, k]
    return sp_arr, nxt_arr


def triangle_ratio_max(d):
    cdef const double[:, ::1] dm = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = dm.shape[0]
    cdef Py_ssize_t x, y, z, bx = 0, by = 0, bz = 0
    cdef double best = -INFINITY, r
    if n < 2:
        return 1.0, 0, 0, 0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if x == z:
                    continue
                r = dm[x, z] / (dm[x, y] + dm[y, z])
                if r > best:
                    best = r
                    bx = x
                    by = y
                    bz = z
    return best, bx, by, bz


def bottleneck_phi(d, double eps, double tol):
    cdef const double[:, ::1] dm = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = dm.shape[0]
    cdef double cut = eps - tol * max(1.0, fabs(eps))
    out_arr = np.full(n, np.inf)
    arg_arr = np.full((n, 2), -1, dtype=np.intp)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t[:, ::1] arg = arg_arr
    cdef Py_ssize_t a, b, c
    cdef double m, dab
    for a in range(n):
        for b in range(n):
            dab = dm[a, b]
            for c in range(n):
                if dm[a, c] < cut:
                    continue
                m = dab if dab > dm[b, c] else dm[b, c]
                if m < out[a]:
                    out[a] = m
                    arg[a, 0] = b
                    arg[a, 1] = c
    return out_arr, arg_arr
