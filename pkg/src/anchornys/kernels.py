"""Kernel functions and Gram-block assembly.

Four families are exposed to users:

* ``gaussian``      exp(-|x-y|^2 / sigma^2)             (SPSD)
* ``multiquadric``  sqrt(|x-y|^2 / sigma^2 + 1)         (indefinite)
* ``sigmoid``       tanh(x.y / sigma + 1)               (indefinite)
* ``thinplate``     t ln t with t = |x-y|^2 / sigma^2   (indefinite, 0 at t = 0)

Two auxiliary families, ``linear`` (x.y / sigma) and ``sqdist``
(|x-y|^2 / sigma^2), exist for exactness checks.

Entries are computed from coordinate differences (or plain dot products) one
pair at a time, so a Gram block equals :func:`evaluate` on every pair exactly
and square blocks are exactly symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .dataio import Dataset

__all__ = ["FAMILIES", "SPSD_FAMILIES", "KernelSpec", "GramBlock", "KernelError",
           "evaluate", "kernel_matrix", "kernel_diag", "gram", "regularize"]

FAMILIES = ("gaussian", "multiquadric", "sigmoid", "thinplate")
_AUX_FAMILIES = ("linear", "sqdist")
SPSD_FAMILIES = ("gaussian",)


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    family: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES + _AUX_FAMILIES:
            raise KernelError(f"unknown kernel family {self.family!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise KernelError(f"sigma must be a positive finite number, got {self.sigma}")
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def is_spsd(self) -> bool:
        return self.family in SPSD_FAMILIES

    def __call__(self, a, b):
        return kernel_matrix(self, a, b)


@dataclass(frozen=True)
class GramBlock:
    values: np.ndarray
    rows: np.ndarray
    cols: np.ndarray


def _apply_family(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s2 = spec.sigma * spec.sigma
    fam = spec.family
    if fam in ("sigmoid", "linear"):
        ip = _accel.inner(a, b)
        if fam == "linear":
            return ip / spec.sigma
        return np.tanh(ip / spec.sigma + 1.0)
    t = _accel.sqdist(a, b) / s2
    if fam == "gaussian":
        return np.exp(-t)
    if fam == "multiquadric":
        return np.sqrt(t + 1.0)
    if fam == "sqdist":
        return t
    # thin plate: continuous extension t log t -> 0 at t = 0
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = t[pos] * np.log(t[pos])
    return out


def _as_points(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    return np.ascontiguousarray(a)


def kernel_matrix(spec: KernelSpec, a, b) -> np.ndarray:
    """Dense kernel matrix between the rows of ``a`` and ``b``."""
    a = _as_points(a)
    b = _as_points(b)
    if a.shape[1] != b.shape[1]:
        raise KernelError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return _apply_family(spec, a, b)


def kernel_diag(spec: KernelSpec, a) -> np.ndarray:
    """kappa(x, x) for every row ``x`` of ``a``, without forming a matrix."""
    a = _as_points(a)
    if spec.family in ("sigmoid", "linear"):
        ip = np.einsum("ij,ij->i", a, a)
        return ip / spec.sigma if spec.family == "linear" else np.tanh(ip / spec.sigma + 1.0)
    # distance kernels are constant on the diagonal: kappa at r = 0
    zero = np.zeros((1, 1))
    return np.full(a.shape[0], _apply_family(spec, zero, zero)[0, 0])


def evaluate(spec: KernelSpec, x, y) -> float:
    """kappa(x, y) for two single points."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise KernelError(f"dimension mismatch: {x.size} vs {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise KernelError("non-finite input")
    return float(_apply_family(spec, x[None, :], y[None, :])[0, 0])


def gram(spec: KernelSpec, ds: Dataset, rows=None, cols=None) -> GramBlock:
    """Gram block K_IJ over dataset row indices (all rows when omitted)."""
    rows = np.arange(ds.n) if rows is None else np.asarray(rows, dtype=np.intp).ravel()
    cols = np.arange(ds.n) if cols is None else np.asarray(cols, dtype=np.intp).ravel()
    for idx in (rows, cols):
        if idx.size and (idx.min() < 0 or idx.max() >= ds.n):
            raise KernelError(f"index out of range for dataset of size {ds.n}")
    pts = ds.points
    values = _apply_family(spec, np.ascontiguousarray(pts[rows]), np.ascontiguousarray(pts[cols]))
    return GramBlock(values=values, rows=rows, cols=cols)


def regularize(block: GramBlock, beta: float) -> GramBlock:
    """Shift the diagonal of a square block by ``beta``."""
    v = block.values
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise KernelError(f"regularize needs a square block, got {v.shape}")
    if beta < 0:
        raise KernelError("beta must be nonnegative")
    out = v.copy()
    out[np.diag_indices_from(out)] += beta
    return GramBlock(values=out, rows=block.rows, cols=block.cols)
