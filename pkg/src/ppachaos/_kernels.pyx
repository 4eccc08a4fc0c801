# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: tensor Hermite design matrices and KDE sums.

Same arithmetic as ``_kernels_py``; see that module for the contracts.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()


cdef void _fill_table(double x, int p, double* row) noexcept nogil:
    cdef int k
    row[0] = 1.0
    if p >= 1:
        row[1] = x
    for k in range(1, p):
        row[k + 1] = (x * row[k] - sqrt(<double>k) * row[k - 1]) / sqrt(<double>(k + 1))


def hermite_table(x, int p):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = flat.shape[0], i
    out = np.empty((n, p + 1))
    cdef double[:, ::1] ov = out
    with nogil:
        for i in range(n):
            _fill_table(flat[i], p, &ov[i, 0])
    return out.reshape(np.shape(x) + (p + 1,))


def design_matrix(points, indices, int p):
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const long long[:, ::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1], nterms = idx.shape[0]
    cdef Py_ssize_t i, j, m
    cdef double acc
    out = np.empty((n, nterms))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] table = np.empty((d, p + 1))
    with nogil:
        for i in range(n):
            for j in range(d):
                _fill_table(pts[i, j], p, &table[j, 0])
            for m in range(nterms):
                acc = 1.0
                for j in range(d):
                    acc = acc * table[j, idx[m, j]]
                ov[i, m] = acc
    return out


def gradient_matrix(points, indices, int p, int coord):
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const long long[:, ::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1], nterms = idx.shape[0]
    cdef Py_ssize_t i, j, m, k
    cdef double acc
    out = np.empty((n, nterms))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] table = np.empty((d, p + 1))
    cdef double[::1] dtable = np.empty(p + 1)
    with nogil:
        for i in range(n):
            for j in range(d):
                _fill_table(pts[i, j], p, &table[j, 0])
            dtable[0] = 0.0
            for k in range(1, p + 1):
                dtable[k] = sqrt(<double>k) * table[coord, k - 1]
            for m in range(nterms):
                acc = 1.0
                for j in range(d):
                    if j == coord:
                        acc = acc * dtable[idx[m, j]]
                    else:
                        acc = acc * table[j, idx[m, j]]
                ov[i, m] = acc
    return out


def kde_sum(samples, grid, double bandwidth):
    cdef const double[::1] s = np.ascontiguousarray(samples, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef Py_ssize_t ns = s.shape[0], ng = g.shape[0], a, b
    cdef double acc, u, inv_h = 1.0 / bandwidth
    out = np.empty(ng)
    cdef double[::1] ov = out
    with nogil:
        for a in range(ng):
            acc = 0.0
            for b in range(ns):
                u = (g[a] - s[b]) * inv_h
                acc += exp(-0.5 * u * u)
            ov[a] = acc
    return out
