"""Nyström factors, stabilized core inverses, pivoted Cholesky and error norms.

The approximation is stored as ``left @ diag(core) @ right``:

========== ======================== ============ ==================
mode       left                     core         right
========== ======================== ============ ==================
none       K_XS W |Lambda|^(-1/2)   sign(Lambda) left^T
pinv-eps   same, |lambda| >= eps    sign(Lambda) left^T
qr-eps     K_XS R_eps^+             (identity)   Q^T K_SX
cholesky   L                        (identity)   L^T
========== ======================== ============ ==================

Here ``K_SS = W Lambda W^T`` is the symmetric eigendecomposition, so the
singular values of ``K_SS`` are ``|lambda|`` and the first two rows are
exactly ``K_XS pinv(K_SS) K_SX`` with the respective truncation.  Splitting
the pseudoinverse symmetrically keeps the factors balanced: multiplying out
``K_XS @ pinv(K_SS) @ K_SX`` instead loses several digits once ``K_SS`` is
ill conditioned.  ``core is None`` stands for the identity.  The qr-eps
product is generally not symmetric.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .anchornet import LandmarkSet
from .dataio import Dataset, make_rng, subsample_indices
from .kernels import KernelSpec, kernel_diag, kernel_matrix

__all__ = ["MODES", "NORMS", "DENSE_MAX_N", "NystromError", "NystromFactors", "ErrorReport",
           "Target", "factor", "pinv_norm", "apply", "reconstruct", "approx_error", "matrix_norm",
           "pivoted_cholesky", "pivoted_cholesky_matrix"]

MODES = ("none", "pinv-eps", "qr-eps")
NORMS = ("two", "fro", "max")
DENSE_MAX_N = 5000
# below this size the 2-norm comes from a full SVD instead of Lanczos
_SMALL_N = 400


class NystromError(ValueError):
    pass


@dataclass
class NystromFactors:
    left: np.ndarray
    core: np.ndarray | None
    right: np.ndarray
    mode: str
    eps: float
    beta: float
    pinv_norm: float
    min_sv: float
    max_sv: float
    indices: np.ndarray | None = None
    factor_time: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.left.shape[0]

    @property
    def rank(self) -> int:
        return self.left.shape[1]

    @property
    def symmetric(self) -> bool:
        return self.mode != "qr-eps"


@dataclass(frozen=True)
class ErrorReport:
    norm: str
    value: float
    relative: float
    eval_size: int
    t_select: float = 0.0
    t_factor: float = 0.0
    t_eval: float = 0.0


def _truncated_pinv(mat, cutoff):
    """Pseudoinverse from the SVD, dropping singular values below ``cutoff``.

    Returns the inverse, the singular values (descending) and the number kept.
    """
    u, s, vt = scipy.linalg.svd(mat, lapack_driver="gesdd")
    k = int((s >= cutoff).sum())
    inv = (vt[:k].T / s[:k]) @ u[:, :k].T
    return inv, s, k


def pinv_norm(k_ss: np.ndarray) -> float:
    """||pinv(K_SS)||_2 with the cutoff used by ``factor(..., "none")``."""
    s = np.sort(np.abs(scipy.linalg.eigvalsh(k_ss)))[::-1]
    kept = s[s > k_ss.shape[0] * np.finfo(float).eps * s[0]]
    return float(1.0 / kept[-1]) if kept.size else 0.0


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NystromError("kernel produced non-finite values")


def factor(ds: Dataset, lm: LandmarkSet, spec: KernelSpec, stabilization: str = "none",
           eps: float = 0.0, beta: float = 0.0) -> NystromFactors:
    """Nyström factors of ``K`` (or ``K + beta I``) for the landmarks ``lm``.

    Parameters
    ----------
    stabilization
        ``"none"``: pseudoinverse with the usual cutoff ``r * eps_mach * s_max``.
        ``"pinv-eps"``: singular values below ``eps`` are dropped.
        ``"qr-eps"``: ``K_SS = QR``, singular values of ``R`` below ``eps``
        dropped, approximation ``(K_XS R_eps^+)(Q^T K_SX)``.
    beta
        Target ``K + beta I``.  When the landmarks are data points, the
        factors use the matching blocks of ``K + beta I``: ``K_SS + beta I``
        and ``K_XS`` plus ``beta`` at the landmark rows.  For centroid
        landmarks only the target changes.
    """
    if stabilization not in MODES:
        raise NystromError(f"unknown stabilization {stabilization!r}")
    if stabilization != "none" and not eps > 0:
        raise NystromError(f"{stabilization} needs eps > 0")
    if beta < 0:
        raise NystromError("beta must be nonnegative")
    if lm.m_actual < 1:
        raise NystromError("empty landmark set")
    if not np.all(np.isfinite(lm.coords)):
        raise NystromError("landmark coordinates must be finite")
    t0 = time.perf_counter()
    x = ds.points
    r = lm.m_actual
    k_xs = kernel_matrix(spec, x, lm.coords)
    k_ss = kernel_matrix(spec, lm.coords, lm.coords)
    _finite(k_xs, k_ss)
    if beta > 0 and lm.from_data:
        k_ss[np.diag_indices(r)] += beta
        k_xs[lm.indices, np.arange(r)] += beta

    if stabilization == "qr-eps":
        q, rr = scipy.linalg.qr(k_ss)
        rinv, s, k = _truncated_pinv(rr, eps)
        left, core, right = k_xs @ rinv, None, q.T @ k_xs.T
    else:
        lam, w = scipy.linalg.eigh(k_ss)
        order = np.argsort(-np.abs(lam), kind="stable")
        lam, w = lam[order], w[:, order]
        s = np.abs(lam)
        if stabilization == "none":
            keep = s > r * np.finfo(float).eps * s[0]
        else:
            keep = s >= eps
        k = int(keep.sum())
        left = k_xs @ (w[:, :k] / np.sqrt(s[:k]))
        core, right = np.sign(lam[:k]), left.T
    pnorm = float(1.0 / s[k - 1]) if k else 0.0
    return NystromFactors(left=left, core=core, right=right, mode=stabilization,
                          eps=float(eps), beta=float(beta), pinv_norm=pnorm,
                          min_sv=float(s[-1]), max_sv=float(s[0]),
                          indices=lm.indices if lm.from_data else None,
                          factor_time=time.perf_counter() - t0, info={"retained": k})


def apply(f: NystromFactors, v) -> np.ndarray:
    """Multiply the approximation by a vector (or the columns of a matrix)."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[0] != f.n:
        raise NystromError(f"dimension mismatch: expected {f.n}, got {v.shape[0]}")
    w = f.right @ v
    if f.core is not None:
        w = f.core.reshape((-1,) + (1,) * (w.ndim - 1)) * w
    return f.left @ w


def _rows_cols(f, rows=None, cols=None):
    left = f.left if rows is None else f.left[rows]
    right = f.right if cols is None else f.right[:, cols]
    if f.core is not None:
        left = left * f.core
    return left @ right


def reconstruct(f: NystromFactors, rows=None, cols=None) -> np.ndarray:
    """Dense approximation (optionally the block at ``rows`` x ``cols``)."""
    return _rows_cols(f, rows, cols)


@dataclass
class Target:
    """The dense matrix being approximated, with cached norms."""

    matrix: np.ndarray
    beta: float = 0.0
    _norms: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, ds: Dataset, spec: KernelSpec, beta: float = 0.0, rows=None):
        pts = ds.points if rows is None else ds.points[rows]
        mat = kernel_matrix(spec, pts, pts)
        _finite(mat)
        if beta:
            mat[np.diag_indices_from(mat)] += beta
        return cls(mat, beta)

    def norm(self, kind: str) -> float:
        if kind not in self._norms:
            self._norms[kind] = matrix_norm(self.matrix, kind, symmetric=True)
        return self._norms[kind]


def matrix_norm(a: np.ndarray, kind: str, symmetric: bool = False) -> float:
    """2-, Frobenius or max norm of a dense matrix.

    The 2-norm of a large matrix uses Lanczos (``eigsh`` for symmetric input,
    ``svds`` otherwise) from a fixed start vector, so it is deterministic.
    """
    if kind == "max":
        return float(np.abs(a).max()) if a.size else 0.0
    if kind == "fro":
        return float(np.sqrt(np.einsum("ij,ij->", a, a)))
    if kind != "two":
        raise NystromError(f"unknown norm {kind!r}")
    n = min(a.shape)
    if n <= _SMALL_N:
        return float(scipy.linalg.svdvals(a)[0]) if a.size else 0.0
    v0 = make_rng(0x5EED).standard_normal(a.shape[1] if symmetric else n)
    if symmetric:
        lam = spla.eigsh(a, k=1, which="LM", v0=v0, return_eigenvectors=False, tol=1e-12)
        return float(abs(lam[0]))
    s = spla.svds(a, k=1, v0=v0, return_singular_vectors=False, tol=1e-12)
    return float(s[0])


def approx_error(ds: Dataset, f: NystromFactors, spec: KernelSpec, norm: str = "two",
                 eval_subset=None, beta: float | None = None, target: Target | None = None,
                 t_select: float = 0.0) -> ErrorReport:
    """Error of the approximation against ``K + beta I`` in the requested norm.

    Parameters
    ----------
    eval_subset
        ``(size, seed)``: evaluate only on the principal submatrix indexed by a
        seeded sample of ``size`` points.  Required for the 2-norm when
        ``n > DENSE_MAX_N``.
    beta
        Defaults to the ``beta`` the factors were built with.
    target
        Precomputed :class:`Target` over the same rows, reused across calls.
        Without one, the Frobenius and max norms are accumulated over row
        blocks and never hold the full matrix.
    """
    if norm not in NORMS:
        raise NystromError(f"unknown norm {norm!r}")
    beta = f.beta if beta is None else beta
    t0 = time.perf_counter()
    rows = None
    if eval_subset is not None:
        size, seed = eval_subset
        rows = np.sort(subsample_indices(ds.n, min(int(size), ds.n), seed))
    elif norm == "two" and ds.n > DENSE_MAX_N:
        raise NystromError(f"dense 2-norm needs n <= {DENSE_MAX_N} (n = {ds.n}); pass eval_subset")
    size = ds.n if rows is None else rows.size
    if target is None and norm != "two":
        value, ref = _blockwise_error(ds, f, spec, norm, beta, rows)
    else:
        if target is None:
            target = Target.build(ds, spec, beta, rows)
        if target.matrix.shape != (size, size):
            raise NystromError("target does not match the evaluation set")
        err = target.matrix - _rows_cols(f, rows, rows)
        value = matrix_norm(err, norm, symmetric=f.symmetric)
        ref = target.norm(norm)
    rel = value / ref if ref > 0 else value
    return ErrorReport(norm=norm, value=value, relative=rel, eval_size=size, t_select=t_select,
                       t_factor=f.factor_time, t_eval=time.perf_counter() - t0)


def _blockwise_error(ds, f, spec, norm, beta, rows, block=1024):
    """(||T - A||, ||T||) in the fro or max norm, one row block at a time."""
    idx = np.arange(ds.n) if rows is None else rows
    pts = ds.points[idx]
    right = f.right[:, idx]
    err_acc = ref_acc = 0.0
    for i in range(0, idx.size, block):
        blk = slice(i, i + block)
        kblk = kernel_matrix(spec, pts[blk], pts)
        _finite(kblk)
        if beta:
            j = np.arange(i, min(i + block, idx.size))
            kblk[j - i, j] += beta
        left = f.left[idx[blk]]
        if f.core is not None:
            left = left * f.core
        diff = kblk - left @ right
        if norm == "fro":
            err_acc += float(np.einsum("ij,ij->", diff, diff))
            ref_acc += float(np.einsum("ij,ij->", kblk, kblk))
        else:
            err_acc = max(err_acc, float(np.abs(diff).max()))
            ref_acc = max(ref_acc, float(np.abs(kblk).max()))
    if norm == "fro":
        return float(np.sqrt(err_acc)), float(np.sqrt(ref_acc))
    return err_acc, ref_acc


def pivoted_cholesky_matrix(kmat: np.ndarray, rank: int, diag=None):
    """Greedy diagonally pivoted partial Cholesky of an SPSD matrix.

    ``kmat`` may be an array or a callable ``col(i) -> column i``; ``diag`` is
    then required.  Stops early if the largest residual diagonal entry is not
    positive.

    Returns
    -------
    L : (n, k) array with ``K ~ L L^T``, ``k <= rank``
    pivots : (k,) chosen indices, in order
    residual : (n,) residual diagonal ``diag(K - L L^T)``
    """
    if callable(kmat):
        col = kmat
        if diag is None:
            raise NystromError("diag is required with a column callback")
        d = np.array(diag, dtype=np.float64)
    else:
        kmat = np.asarray(kmat, dtype=np.float64)
        col = lambda i: kmat[:, i]  # noqa: E731
        d = kmat.diagonal().copy() if diag is None else np.array(diag, dtype=np.float64)
    n = d.size
    if not 1 <= rank <= n:
        raise NystromError(f"rank must be in [1, {n}], got {rank}")
    L = np.zeros((n, rank))
    pivots = []
    for k in range(rank):
        i = int(np.argmax(d))
        if not d[i] > 0:
            break
        c = np.array(col(i), dtype=np.float64) - L[:, :k] @ L[i, :k]
        L[:, k] = c / np.sqrt(d[i])
        d -= L[:, k] ** 2
        d[i] = 0.0
        pivots.append(i)
    k = len(pivots)
    return L[:, :k], np.array(pivots, dtype=np.intp), d


def pivoted_cholesky(ds: Dataset, spec: KernelSpec, rank: int, beta: float = 0.0) -> NystromFactors:
    """Rank-``rank`` pivoted Cholesky factor of ``K + beta I`` (SPSD kernels only).

    Kernel columns are generated on demand, so only ``n x rank`` storage is
    used.  The condition fields describe ``K_SS`` on the pivot set.
    """
    if not spec.is_spsd:
        raise NystromError(f"pivoted Cholesky needs an SPSD kernel, got {spec.family}")
    if beta < 0:
        raise NystromError("beta must be nonnegative")
    t0 = time.perf_counter()
    x = ds.points
    diag = kernel_diag(spec, x) + beta

    def column(i):
        c = kernel_matrix(spec, x, x[i])[:, 0]
        _finite(c)
        if beta:
            c = c.copy()
            c[i] += beta
        return c

    L, piv, resid = pivoted_cholesky_matrix(column, rank, diag=diag)
    s = scipy.linalg.svdvals(L[piv]) ** 2 if piv.size else np.zeros(1)
    return NystromFactors(left=L, core=None, right=L.T, mode="cholesky", eps=0.0, beta=float(beta),
                          pinv_norm=float(1.0 / s[-1]) if s[-1] > 0 else 0.0,
                          min_sv=float(s[-1]), max_sv=float(s[0]), indices=piv,
                          factor_time=time.perf_counter() - t0,
                          info={"residual_trace": float(resid.sum()), "residual_min": float(resid.min())})

