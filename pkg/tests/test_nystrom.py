import numpy as np
import pytest

import oracles
from anchornys import nystrom, selectors
from anchornys.anchornet import LandmarkSet, select_landmarks
from anchornys.dataio import Dataset, nonuniform_2d, subsample_indices
from anchornys.kernels import KernelSpec, kernel_matrix
from anchornys.nystrom import NystromError
from conftest import random_dataset


def landmarks(ds, idx):
    idx = np.asarray(idx)
    return LandmarkSet(idx, ds.points[idx].copy(), "manual", idx.size)


@pytest.fixture
def ds():
    return random_dataset(21, n=120, d=2)


def test_full_landmark_set_is_exact(ds):
    spec = KernelSpec("gaussian", 0.2)
    f = nystrom.factor(ds, landmarks(ds, np.arange(ds.n)), spec)
    assert f.min_sv > 1e3 * np.finfo(float).eps * f.max_sv
    rep = nystrom.approx_error(ds, f, spec, "two")
    assert rep.relative <= 1e-10


def test_rank_one_linear_kernel_is_exact():
    ds = Dataset(np.linspace(-1.0, 2.0, 20))
    spec = KernelSpec("linear", 1.0)
    for j in (0, 7, 19):
        f = nystrom.factor(ds, landmarks(ds, [j]), spec)
        assert nystrom.approx_error(ds, f, spec, "max").value <= 1e-12


@pytest.mark.parametrize("family", ["gaussian", "multiquadric", "sigmoid", "thinplate"])
def test_matches_dense_pinv_oracle(ds, family):
    spec = KernelSpec(family, 0.8)
    idx = [3, 17, 40, 41, 90, 111]
    k = kernel_matrix(spec, ds.points, ds.points)
    f = nystrom.factor(ds, landmarks(ds, idx), spec)
    np.testing.assert_allclose(nystrom.reconstruct(f), oracles.nystrom_dense(k, idx),
                               atol=1e-9 * np.abs(k).max())


def test_pinv_eps_below_spectrum_is_identical(ds):
    spec = KernelSpec("gaussian", 0.5)
    lm = landmarks(ds, np.arange(0, 120, 12))
    a = nystrom.factor(ds, lm, spec)
    b = nystrom.factor(ds, lm, spec, "pinv-eps", eps=0.5 * a.min_sv)
    assert np.array_equal(a.left, b.left) and np.array_equal(a.core, b.core)
    assert a.pinv_norm == b.pinv_norm


def test_pinv_eps_truncates(ds):
    spec = KernelSpec("gaussian", 1.5)
    lm = landmarks(ds, np.arange(0, 120, 4))
    f = nystrom.factor(ds, lm, spec, "pinv-eps", eps=1e-6)
    assert f.info["retained"] < lm.m_actual
    assert f.pinv_norm <= 1e6 and f.pinv_norm >= 1 / f.max_sv


def test_qr_eps_matches_formula(ds):
    spec = KernelSpec("sigmoid", 1.0)
    idx = np.arange(0, 120, 10)
    f = nystrom.factor(ds, landmarks(ds, idx), spec, "qr-eps", eps=1e-10)
    k = kernel_matrix(spec, ds.points, ds.points)
    q, r = np.linalg.qr(k[np.ix_(idx, idx)])
    u, s, vt = np.linalg.svd(r)
    keep = s >= 1e-10
    r_pinv = vt[keep].T @ np.diag(1 / s[keep]) @ u[:, keep].T
    want = (k[:, idx] @ r_pinv) @ (q.T @ k[idx, :])
    np.testing.assert_allclose(nystrom.reconstruct(f), want, atol=1e-8 * np.abs(want).max())
    assert not f.symmetric


@pytest.mark.parametrize("mode,eps", [("none", 0.0), ("pinv-eps", 1e-12)])
def test_reconstruction_symmetric(ds, mode, eps):
    spec = KernelSpec("multiquadric", 0.7)
    f = nystrom.factor(ds, landmarks(ds, np.arange(5, 120, 9)), spec, mode, eps=eps)
    a = nystrom.reconstruct(f)
    assert np.abs(a - a.T).max() <= 1e-10 * np.abs(a).max()


def test_galerkin_rows_at_landmarks(ds):
    spec = KernelSpec("thinplate", 1.0)
    idx = np.array([2, 30, 55, 80, 101])
    f = nystrom.factor(ds, landmarks(ds, idx), spec)
    assert f.min_sv > 1e3 * np.finfo(float).eps * f.max_sv
    k = kernel_matrix(spec, ds.points, ds.points)
    rows = nystrom.reconstruct(f, rows=idx)
    assert np.abs(rows - k[idx]).max() <= 1e-8 * np.abs(k).max()


def test_apply_properties(ds):
    spec = KernelSpec("gaussian", 0.4)
    f = nystrom.factor(ds, landmarks(ds, np.arange(0, 120, 7)), spec)
    full = nystrom.reconstruct(f)
    assert np.all(nystrom.apply(f, np.zeros(ds.n)) == 0)
    e = np.zeros(ds.n)
    e[13] = 1
    np.testing.assert_allclose(nystrom.apply(f, e), full[:, 13], atol=1e-13)
    rng = np.random.default_rng(0)
    v, w = rng.standard_normal(ds.n), rng.standard_normal(ds.n)
    np.testing.assert_allclose(nystrom.apply(f, 2 * v - 3 * w),
                               2 * nystrom.apply(f, v) - 3 * nystrom.apply(f, w), atol=1e-10)
    with pytest.raises(NystromError):
        nystrom.apply(f, np.zeros(ds.n + 1))


def test_error_norms_and_subset_oracle(ds):
    spec = KernelSpec("sigmoid", 2.0)
    f = nystrom.factor(ds, landmarks(ds, np.arange(0, 120, 15)), spec)
    vals = {n: nystrom.approx_error(ds, f, spec, n).value for n in nystrom.NORMS}
    assert vals["max"] <= vals["fro"] and vals["two"] <= vals["fro"] * (1 + 1e-12)
    rep = nystrom.approx_error(ds, f, spec, "fro", eval_subset=(50, 9))
    rows = np.sort(subsample_indices(ds.n, 50, 9))
    k = kernel_matrix(spec, ds.points, ds.points)
    dense = k - nystrom.reconstruct(f)
    want = np.linalg.norm(dense[np.ix_(rows, rows)])
    assert rep.value == pytest.approx(want, rel=1e-10)
    assert rep.eval_size == 50


def test_blockwise_and_target_paths_agree(ds):
    spec = KernelSpec("gaussian", 0.3)
    f = nystrom.factor(ds, landmarks(ds, np.arange(0, 120, 6)), spec, beta=0.1)
    tgt = nystrom.Target.build(ds, spec, 0.1)
    for norm in ("fro", "max"):
        a = nystrom.approx_error(ds, f, spec, norm)
        b = nystrom.approx_error(ds, f, spec, norm, target=tgt)
        assert a.value == pytest.approx(b.value, rel=1e-12)
        assert a.relative == pytest.approx(b.relative, rel=1e-12)


def test_lanczos_two_norm_matches_dense():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((600, 600))
    sym = a + a.T
    assert nystrom.matrix_norm(sym, "two", symmetric=True) == pytest.approx(np.linalg.norm(sym, 2), rel=1e-10)
    assert nystrom.matrix_norm(a, "two") == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)


def test_two_norm_guard():
    big = Dataset(np.linspace(0, 1, nystrom.DENSE_MAX_N + 1))
    spec = KernelSpec("gaussian", 0.5)
    f = nystrom.factor(big, landmarks(big, [0, 2500, 5000]), spec)
    with pytest.raises(NystromError):
        nystrom.approx_error(big, f, spec, "two")
    rep = nystrom.approx_error(big, f, spec, "two", eval_subset=(300, 1))
    assert rep.eval_size == 300


def test_beta_uses_shifted_blocks(ds):
    spec = KernelSpec("gaussian", 0.3)
    f = nystrom.factor(ds, landmarks(ds, np.arange(ds.n)), spec, beta=0.5)
    want = kernel_matrix(spec, ds.points, ds.points) + 0.5 * np.eye(ds.n)
    np.testing.assert_allclose(nystrom.reconstruct(f), want, atol=1e-10)
    assert nystrom.approx_error(ds, f, spec, "two").relative <= 1e-10


def test_beta_with_centroids_changes_target_only(ds):
    spec = KernelSpec("gaussian", 0.3)
    lm = selectors.kmeans(ds, 10, seed=1)
    plain = nystrom.factor(ds, lm, spec)
    shifted = nystrom.factor(ds, lm, spec, beta=0.5)
    assert np.array_equal(nystrom.reconstruct(plain), nystrom.reconstruct(shifted))
    e0 = nystrom.approx_error(ds, plain, spec, "fro", beta=0.0).value
    e1 = nystrom.approx_error(ds, shifted, spec, "fro").value
    assert e1 != e0


def test_factor_validation(ds):
    spec = KernelSpec("gaussian", 1.0)
    lm = landmarks(ds, [0, 1])
    with pytest.raises(NystromError):
        nystrom.factor(ds, lm, spec, "pinv-eps", eps=0.0)
    with pytest.raises(NystromError):
        nystrom.factor(ds, lm, spec, "lu")
    with pytest.raises(NystromError):
        nystrom.factor(ds, lm, spec, beta=-1.0)
    bad = LandmarkSet(np.empty(0, dtype=int), np.array([[np.nan, 0.0]]), "x", 1)
    with pytest.raises(NystromError):
        nystrom.factor(ds, bad, spec)


def test_non_finite_kernel_values_rejected():
    ds = Dataset([[1e200], [2e200]])
    spec = KernelSpec("multiquadric", 1e-200)
    with np.errstate(all="ignore"), pytest.raises(NystromError):
        nystrom.factor(ds, landmarks(ds, [0]), spec)


def test_pivoted_cholesky_hand_example():
    L, piv, resid = nystrom.pivoted_cholesky_matrix(np.diag([3.0, 2.0, 1.0]), 1)
    assert piv.tolist() == [0]
    np.testing.assert_allclose(resid, [0.0, 2.0, 1.0])


def test_pivoted_cholesky_full_rank_and_traces(ds):
    spec = KernelSpec("gaussian", 0.15)
    small = Dataset(ds.points[:60])
    k = kernel_matrix(spec, small.points, small.points)
    f = nystrom.pivoted_cholesky(small, spec, 60)
    assert f.rank == 60
    assert np.linalg.norm(k - f.left @ f.right) <= 1e-8 * np.linalg.norm(k)
    traces = [nystrom.pivoted_cholesky(small, spec, r).info["residual_trace"] for r in range(1, 30)]
    assert all(b <= a + 1e-12 for a, b in zip(traces, traces[1:]))
    assert nystrom.pivoted_cholesky(small, spec, 10).info["residual_min"] >= -1e-10


def test_pivoted_cholesky_equals_nystrom_on_pivots(ds):
    spec = KernelSpec("gaussian", 0.5)
    f = nystrom.pivoted_cholesky(ds, spec, 8)
    k = kernel_matrix(spec, ds.points, ds.points)
    np.testing.assert_allclose(f.left @ f.right, oracles.nystrom_dense(k, f.indices.tolist()), atol=1e-9)


def test_pivoted_cholesky_rejects_indefinite(ds):
    with pytest.raises(NystromError):
        nystrom.pivoted_cholesky(ds, KernelSpec("sigmoid"), 3)


def test_pinv_eps_ordering_on_nonuniform_sigmoid():
    # small eps keeps more of the spectrum; on this instance it is never worse
    ds = nonuniform_2d(3000, seed=0)
    spec = KernelSpec("sigmoid", 1.0)
    lm = select_landmarks(ds, 100)
    tgt = nystrom.Target.build(ds, spec)
    err = {eps: nystrom.approx_error(ds, nystrom.factor(ds, lm, spec, "pinv-eps", eps), spec,
                                     "two", target=tgt).value for eps in (1e-14, 1e-8)}
    assert err[1e-14] <= err[1e-8]
