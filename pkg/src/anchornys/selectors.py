"""Baseline landmark selectors: uniform, k-means, farthest point, exact RLS."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .anchornet import LandmarkSet, SelectionError
from .dataio import Dataset, make_rng
from .kernels import KernelSpec, kernel_matrix

__all__ = ["SelectorConfig", "uniform", "kmeans", "kmeans_energy", "fps",
           "ridge_leverage_scores", "rls_exact", "RLS_MAX_N"]

RLS_MAX_N = 5000


@dataclass(frozen=True)
class SelectorConfig:
    method: str
    seed: int = 0
    kmeans_iters: int = 5
    rls_gamma: float = 1e-3

    def __post_init__(self):
        if self.kmeans_iters < 0:
            raise SelectionError("kmeans_iters must be >= 0")
        if self.method == "rls" and not self.rls_gamma > 0:
            raise SelectionError("rls_gamma must be positive")


def _check_m(ds, m):
    if not 1 <= m <= ds.n:
        raise SelectionError(f"m must be in [1, {ds.n}], got {m}")


def _from_indices(ds, idx, method, m, t0, **info):
    idx = np.asarray(idx, dtype=np.intp)
    return LandmarkSet(indices=idx, coords=ds.points[idx].copy(), method=method, m_requested=m,
                       select_time=time.perf_counter() - t0, info=info)


def uniform(ds: Dataset, m: int, seed=0) -> LandmarkSet:
    """``m`` distinct indices drawn uniformly without replacement."""
    _check_m(ds, m)
    t0 = time.perf_counter()
    idx = make_rng(seed).choice(ds.n, size=m, replace=False)
    return _from_indices(ds, idx, "uniform", m, t0, seed=seed)


def _sq_dists(x, c):
    # BLAS expansion; clipped because cancellation can make it slightly negative
    d2 = (x * x).sum(1)[:, None] - 2.0 * x @ c.T + (c * c).sum(1)[None, :]
    return np.maximum(d2, 0.0)


def kmeans_energy(x, centroids) -> float:
    return float(_sq_dists(x, centroids).min(axis=1).sum())


def kmeans(ds: Dataset, k: int, iters: int = 5, seed=0, init=None) -> LandmarkSet:
    """Lloyd's algorithm; the landmarks are the final centroids.

    Starts from ``k`` distinct points drawn uniformly (or the rows given by
    ``init``).  A cluster that goes empty is re-seeded with the data point
    farthest from all current centroids.  Centroid sums use ``bincount``, whose
    accumulation order is fixed.
    """
    _check_m(ds, k)
    t0 = time.perf_counter()
    x = ds.points
    if init is None:
        init = make_rng(seed).choice(ds.n, size=k, replace=False)
    cent = x[np.asarray(init, dtype=np.intp)].copy()
    energies = [kmeans_energy(x, cent)]
    for _ in range(iters):
        d2 = _sq_dists(x, cent)
        labels = np.argmin(d2, axis=1)
        counts = np.bincount(labels, minlength=k)
        new = np.empty_like(cent)
        for j in range(ds.d):
            new[:, j] = np.bincount(labels, weights=x[:, j], minlength=k)
        filled = counts > 0
        new[filled] /= counts[filled, None]
        for j in np.flatnonzero(~filled):
            # filled always has a member: every point has a nearest centroid
            far = int(np.argmax(_sq_dists(x, new[filled]).min(axis=1)))
            new[j] = x[far]
            filled[j] = True
        cent = new
        energies.append(kmeans_energy(x, cent))
    return LandmarkSet(indices=np.empty(0, dtype=np.intp), coords=cent, method="kmeans",
                       m_requested=k, select_time=time.perf_counter() - t0,
                       info={"seed": seed, "iters": iters, "energies": energies})


def fps(ds: Dataset, m: int, seed=0, start: int | None = None) -> LandmarkSet:
    """Farthest point sampling with a running minimum distance.

    The first point is drawn uniformly (or given by ``start``); each next point
    maximizes the Euclidean distance to the current selection, ties to the
    lowest index.  The running-minimum update costs O(n d) per step, O(m n d)
    overall, instead of re-scanning the selection.
    """
    _check_m(ds, m)
    t0 = time.perf_counter()
    x = ds.points
    first = int(make_rng(seed).integers(ds.n)) if start is None else int(start)
    idx = [first]
    mind = ((x - x[first]) ** 2).sum(axis=1)
    for _ in range(m - 1):
        nxt = int(np.argmax(mind))
        idx.append(nxt)
        np.minimum(mind, ((x - x[nxt]) ** 2).sum(axis=1), out=mind)
    return _from_indices(ds, idx, "fps", m, t0, seed=seed)


def ridge_leverage_scores(kmat: np.ndarray, gamma: float) -> np.ndarray:
    """diag(K (K + gamma I)^-1) from the eigendecomposition of ``K``."""
    lam, vec = scipy.linalg.eigh(kmat)
    lam = np.maximum(lam, 0.0)
    return (vec ** 2) @ (lam / (lam + gamma))


def rls_exact(ds: Dataset, spec: KernelSpec, gamma: float, m: int, seed=0) -> LandmarkSet:
    """Sample ``m`` indices without replacement, proportional to exact ridge leverage scores."""
    if not spec.is_spsd:
        raise SelectionError(f"ridge leverage scores need an SPSD kernel, got {spec.family}")
    if ds.n > RLS_MAX_N:
        raise SelectionError(f"rls_exact is dense; n = {ds.n} exceeds {RLS_MAX_N}")
    if not gamma > 0:
        raise SelectionError("gamma must be positive")
    _check_m(ds, m)
    t0 = time.perf_counter()
    scores = ridge_leverage_scores(kernel_matrix(spec, ds.points, ds.points), gamma)
    weights = np.maximum(scores, np.finfo(float).tiny)
    idx = make_rng(seed).choice(ds.n, size=m, replace=False, p=weights / weights.sum())
    return _from_indices(ds, idx, "rls-exact", m, t0, seed=seed, gamma=gamma)
