"""Pure-numpy versions of the kernels in ``_core.pyx``.

Same contracts, same tie-breaking.  Work is chunked over query rows so the
broadcast temporaries stay around ``_CHUNK_ELEMS`` doubles.
"""
import numpy as np

_CHUNK_ELEMS = 1 << 22


def _chunks(n_rows, per_row):
    step = max(1, _CHUNK_ELEMS // max(1, per_row))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def linf_argmin(queries, points):
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        raise ValueError("empty point set")
    out = np.empty(queries.shape[0], dtype=np.intp)
    for sl in _chunks(queries.shape[0], points.shape[0] * points.shape[1]):
        diff = np.abs(queries[sl, None, :] - points[None, :, :])
        # argmin returns the first occurrence, i.e. the lowest index on ties
        out[sl] = np.argmin(diff.max(axis=2, initial=0.0), axis=1)
    return out


def sqdist(a, b):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty((a.shape[0], b.shape[0]))
    for sl in _chunks(a.shape[0], b.shape[0] * a.shape[1]):
        diff = a[sl, None, :] - b[None, :, :]
        out[sl] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def inner(a, b):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty((a.shape[0], b.shape[0]))
    for sl in _chunks(a.shape[0], b.shape[0] * a.shape[1]):
        out[sl] = np.einsum("ik,jk->ij", a[sl], b)
    return out
