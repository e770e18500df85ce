# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: l-infinity nearest search and pairwise kernels.

Every entry is computed independently with a fixed left-to-right summation
order, so results do not depend on how the loops are scheduled and
``f(a, b)[i, j] == f(b, a)[j, i]`` holds bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


def linf_argmin(const double[:, ::1] queries, const double[:, ::1] points):
    """Index of the l-infinity nearest row of ``points`` for every query.

    Ties go to the lowest index.  A partial maximum that already exceeds the
    best distance aborts the coordinate loop early.
    """
    cdef Py_ssize_t nq = queries.shape[0], npt = points.shape[0]
    cdef Py_ssize_t d = queries.shape[1]
    cdef Py_ssize_t i, j, k, best_j
    cdef double best, dist, diff
    out = np.empty(nq, dtype=np.intp)
    cdef cnp.intp_t[::1] res = out
    if npt == 0:
        raise ValueError("empty point set")
    with nogil:
        for i in range(nq):
            best = INFINITY
            best_j = 0
            for j in range(npt):
                dist = 0.0
                for k in range(d):
                    diff = fabs(queries[i, k] - points[j, k])
                    if diff > dist:
                        dist = diff
                        if dist >= best:
                            break
                if dist < best:
                    best = dist
                    best_j = j
            res[i] = best_j
    return out


def sqdist(const double[:, ::1] a, const double[:, ::1] b):
    """Squared Euclidean distances from coordinate differences."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], d = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double s, diff
    out = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] res = out
    with nogil:
        for i in range(na):
            for j in range(nb):
                s = 0.0
                for k in range(d):
                    diff = a[i, k] - b[j, k]
                    s = s + diff * diff
                res[i, j] = s
    return out


def inner(const double[:, ::1] a, const double[:, ::1] b):
    """Pairwise dot products, summed in coordinate order."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], d = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double s
    out = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] res = out
    with nogil:
        for i in range(na):
            for j in range(nb):
                s = 0.0
                for k in range(d):
                    s = s + a[i, k] * b[j, k]
                res[i, j] = s
    return out
