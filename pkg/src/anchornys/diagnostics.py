"""Kernelized marking errors, fill distance and the max-norm error bound.

For landmarks ``S`` (a subset of ``X``) and a symmetric kernel:

* bivariate marking error  ``E_r = max_{x,y in X} min_{u,v in S} |k(x,y) - k(u,v)|``
* univariate marking error ``Eh_r = max_{x in X} min_{u in S} ||K_xS - K_uS||_2``
* max-norm bound           ``|K - K_XS pinv(K_SS) K_SX|_max <= E_r + 2 Eh_r + ||pinv(K_SS)|| Eh_r^2``

With a Lipschitz kernel (constant ``L`` with respect to the Euclidean norm
of ``(x, y)`` in R^2d) and fill distance ``delta``, ``E_r <= sqrt(2) L delta``
and ``Eh_r <= sqrt(r) L delta``, which gives a geometric version of the bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .anchornet import LandmarkSet
from .dataio import Dataset, make_rng
from .kernels import KernelSpec, kernel_matrix
from .nystrom import factor, pinv_norm, reconstruct

__all__ = ["DiagnosticsError", "MarkingErrors", "GeometryErrors", "marking_errors",
           "fill_distance", "verify_bound", "estimate_lipschitz", "MARKING_MAX_N", "VERIFY_MAX_N"]

MARKING_MAX_N = 5000
VERIFY_MAX_N = 500
_CHUNK = 1 << 22


class DiagnosticsError(ValueError):
    pass


@dataclass(frozen=True)
class MarkingErrors:
    e_r: float
    e_hat_r: float
    pinv_norm: float

    @property
    def bound(self) -> float:
        return self.e_r + 2.0 * self.e_hat_r + self.pinv_norm * self.e_hat_r ** 2


@dataclass(frozen=True)
class GeometryErrors:
    """Fill distance ``delta`` of ``S`` in ``X`` and the landmark count ``r``."""

    delta: float
    r: int

    def lipschitz_bound(self, L: float, pinv_norm: float, r: int | None = None) -> float:
        r = self.r if r is None else r
        d = self.delta
        return math.sqrt(2.0) * L * d + 2.0 * math.sqrt(r) * L * d + pinv_norm * r * L * L * d * d


def _require_subset(lm):
    if not lm.from_data:
        raise DiagnosticsError("marking errors need landmarks that are dataset points")


def _rows_per_chunk(width):
    return max(1, _CHUNK // max(1, width))


def bivariate_marking_error(ds: Dataset, lm: LandmarkSet, spec: KernelSpec) -> float:
    """``E_r`` by nearest-value lookup in the sorted landmark kernel values."""
    coords = lm.coords
    vals = np.unique(kernel_matrix(spec, coords, coords))
    x = ds.points
    worst = 0.0
    step = _rows_per_chunk(ds.n)
    for i in range(0, ds.n, step):
        block = kernel_matrix(spec, x[i:i + step], x).ravel()
        pos = np.searchsorted(vals, block)
        lo = vals[np.clip(pos - 1, 0, vals.size - 1)]
        hi = vals[np.clip(pos, 0, vals.size - 1)]
        gap = np.minimum(np.abs(block - lo), np.abs(block - hi))
        worst = max(worst, float(gap.max()))
    return worst


def univariate_marking_error(ds: Dataset, lm: LandmarkSet, spec: KernelSpec) -> float:
    """``Eh_r`` from distances between the rows of ``K_XS`` and ``K_SS``."""
    k_ss = kernel_matrix(spec, lm.coords, lm.coords)
    worst = 0.0
    step = _rows_per_chunk(lm.m_actual * lm.m_actual)
    for i in range(0, ds.n, step):
        k_xs = kernel_matrix(spec, ds.points[i:i + step], lm.coords)
        d2 = _accel.sqdist(np.ascontiguousarray(k_xs), k_ss)
        worst = max(worst, float(np.sqrt(d2.min(axis=1).max())))
    return worst


def marking_errors(ds: Dataset, lm: LandmarkSet, spec: KernelSpec) -> MarkingErrors:
    """Both marking errors and ``||pinv(K_SS)||_2`` for landmarks drawn from ``ds``."""
    _require_subset(lm)
    if ds.n > MARKING_MAX_N:
        raise DiagnosticsError(f"marking errors are quadratic in n; n = {ds.n} exceeds {MARKING_MAX_N}")
    k_ss = kernel_matrix(spec, lm.coords, lm.coords)
    return MarkingErrors(e_r=bivariate_marking_error(ds, lm, spec),
                         e_hat_r=univariate_marking_error(ds, lm, spec),
                         pinv_norm=pinv_norm(k_ss))


def fill_distance(ds: Dataset, lm: LandmarkSet) -> GeometryErrors:
    """``delta = max_x min_s |x - s|`` (Euclidean)."""
    if lm.m_actual < 1:
        raise DiagnosticsError("empty landmark set")
    coords = np.ascontiguousarray(lm.coords)
    worst = 0.0
    step = _rows_per_chunk(lm.m_actual * ds.d)
    for i in range(0, ds.n, step):
        d2 = _accel.sqdist(np.ascontiguousarray(ds.points[i:i + step]), coords)
        worst = max(worst, float(d2.min(axis=1).max()))
    return GeometryErrors(delta=math.sqrt(worst), r=lm.m_actual)


def verify_bound(ds: Dataset, lm: LandmarkSet, spec: KernelSpec):
    """Both sides of the max-norm bound for the unstabilized approximation.

    Returns
    -------
    (error, bound, holds) with ``holds = error <= bound * (1 + 1e-8) + 1e-12``.
    """
    _require_subset(lm)
    if ds.n > VERIFY_MAX_N:
        raise DiagnosticsError(f"verify_bound is dense; n = {ds.n} exceeds {VERIFY_MAX_N}")
    f = factor(ds, lm, spec, "none")
    kmat = kernel_matrix(spec, ds.points, ds.points)
    err = float(np.abs(kmat - reconstruct(f)).max())
    me = marking_errors(ds, lm, spec)
    bound = me.e_r + 2.0 * me.e_hat_r + f.pinv_norm * me.e_hat_r ** 2
    return err, bound, bool(err <= bound * (1 + 1e-8) + 1e-12)


def estimate_lipschitz(spec: KernelSpec, points, samples: int = 4000, seed=0,
                       inflate: float = 2.0) -> float:
    """Sampled Lipschitz constant of ``k`` on ``points x points``, inflated.

    Difference quotients ``|k(x,y) - k(u,v)| / |(x,y) - (u,v)|`` are taken over
    random pairs of data pairs and over short random steps from data pairs
    (which probe the local slope).  The largest quotient times ``inflate`` is
    returned.  This is an estimate, not a certified bound.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, d = pts.shape
    rng = make_rng(seed)
    scale = float(np.ptp(pts, axis=0).max()) or 1.0
    i, j, k, l = (rng.integers(n, size=samples) for _ in range(4))
    a = np.hstack([pts[i], pts[j]])
    b = np.hstack([pts[k], pts[l]])
    step = rng.standard_normal((samples, 2 * d))
    step *= (1e-4 * scale) / np.linalg.norm(step, axis=1, keepdims=True)
    c = a + step

    def kv(z):
        return np.array([kernel_matrix(spec, row[:d], row[d:])[0, 0] for row in z])

    ka = kv(a)
    best = 0.0
    for other in (b, c):
        dist = np.linalg.norm(a - other, axis=1)
        ok = dist > 0
        if ok.any():
            best = max(best, float((np.abs(ka - kv(other))[ok] / dist[ok]).max()))
    return inflate * best
