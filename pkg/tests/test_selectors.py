import numpy as np
import pytest

import oracles
from anchornys import selectors
from anchornys.anchornet import SelectionError
from anchornys.dataio import Dataset
from anchornys.kernels import KernelSpec, kernel_matrix
from conftest import random_dataset


def test_uniform_all_and_seeded():
    ds = random_dataset(0, n=20)
    assert sorted(selectors.uniform(ds, 20, seed=1).indices.tolist()) == list(range(20))
    a, b = selectors.uniform(ds, 7, seed=3), selectors.uniform(ds, 7, seed=3)
    assert np.array_equal(a.indices, b.indices) and a.m_actual == 7
    with pytest.raises(SelectionError):
        selectors.uniform(ds, 21, seed=0)


def test_uniform_frequency_two_points():
    ds = Dataset([[0.0], [1.0]])
    hits = sum(int(selectors.uniform(ds, 1, seed=s).indices[0]) for s in range(1000))
    assert 0.45 <= hits / 1000 <= 0.55


def test_kmeans_hand_example():
    ds = Dataset([0.0, 1.0, 10.0, 11.0])
    lm = selectors.kmeans(ds, 2, iters=1, init=[0, 2])
    assert lm.coords.ravel().tolist() == [0.5, 10.5]
    assert selectors.kmeans(ds, 2, iters=5, init=[0, 2]).coords.ravel().tolist() == [0.5, 10.5]
    assert lm.indices.size == 0 and lm.m_actual == 2


def test_kmeans_matches_textbook_lloyd():
    ds = random_dataset(5, n=120, d=2)
    init = [3, 40, 77, 100]
    got = selectors.kmeans(ds, 4, iters=5, init=init).coords
    want = oracles.lloyd(ds.points.tolist(), init, 5)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_kmeans_energy_monotone_and_iters_zero():
    ds = random_dataset(6, n=400, d=3)
    lm = selectors.kmeans(ds, 12, iters=5, seed=2)
    e = lm.info["energies"]
    assert all(b <= a + 1e-9 for a, b in zip(e, e[1:]))
    init = selectors.kmeans(ds, 12, iters=0, seed=2).coords
    idx = selectors.uniform(ds, 12, seed=2).indices  # same seeded draw
    assert np.array_equal(init, ds.points[idx])


def test_kmeans_identical_points():
    ds = Dataset(np.full((10, 2), 3.0))
    lm = selectors.kmeans(ds, 3, iters=5, seed=0)
    assert np.all(lm.coords == 3.0)


def test_kmeans_empty_cluster_reseeded_to_farthest():
    dup = Dataset([0.0, 0.0, 5.0])
    lm = selectors.kmeans(dup, 2, iters=1, init=[0, 1])
    # every point ties to centroid 0 (mean 5/3); centroid 1 is empty and moves
    # to the point farthest from 5/3, which is 5.0
    assert lm.coords.ravel().tolist() == [pytest.approx(5 / 3), 5.0]


def test_fps_hand_example_and_oracle():
    ds = Dataset([0.0, 1.0, 10.0])
    assert selectors.fps(ds, 3, start=0).indices.tolist() == [0, 2, 1]
    assert selectors.fps(ds, 1, start=1).indices.tolist() == [1]
    rd = random_dataset(8, n=70, d=3)
    assert selectors.fps(rd, 12, start=5).indices.tolist() == \
        oracles.farthest_point_order(rd.points.tolist(), 5, 12)


def test_fps_min_pairwise_distance_non_increasing():
    ds = random_dataset(9, n=200, d=2)
    idx = selectors.fps(ds, 30, seed=1).indices
    mins = []
    for m in range(2, 31):
        p = ds.points[idx[:m]]
        d = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1))
        mins.append(d[np.triu_indices(m, 1)].min())
    assert all(b <= a + 1e-15 for a, b in zip(mins, mins[1:]))


def test_rls_scores_and_trace_oracle():
    ds = random_dataset(10, n=150, d=2)
    spec = KernelSpec("gaussian", 0.3)
    k = kernel_matrix(spec, ds.points, ds.points)
    s = selectors.ridge_leverage_scores(k, 0.1)
    assert np.all((s > 0) & (s < 1))
    assert s.sum() == pytest.approx(oracles.ridge_leverage_trace(k, 0.1), abs=1e-8)


def test_rls_identity_kernel_is_half():
    ds = Dataset(np.arange(5.0) * 100)
    k = kernel_matrix(KernelSpec("gaussian", 1.0), ds.points, ds.points)
    np.testing.assert_allclose(selectors.ridge_leverage_scores(k, 1.0), 0.5)


def test_rls_exact_sampling():
    ds = random_dataset(11, n=100, d=2)
    spec = KernelSpec("gaussian", 0.4)
    a = selectors.rls_exact(ds, spec, 1e-3, 20, seed=4)
    b = selectors.rls_exact(ds, spec, 1e-3, 20, seed=4)
    assert np.array_equal(a.indices, b.indices) and len(set(a.indices.tolist())) == 20
    assert a.method == "rls-exact"
    one = Dataset([[0.5, 0.5]])
    assert selectors.rls_exact(one, spec, 1.0, 1, seed=0).indices.tolist() == [0]


def test_rls_guards():
    ds = random_dataset(0, n=10)
    with pytest.raises(SelectionError):
        selectors.rls_exact(ds, KernelSpec("sigmoid"), 1.0, 3)
    with pytest.raises(SelectionError):
        selectors.rls_exact(ds, KernelSpec("gaussian"), 0.0, 3)
    big = Dataset(np.zeros((selectors.RLS_MAX_N + 1, 1)))
    with pytest.raises(SelectionError):
        selectors.rls_exact(big, KernelSpec("gaussian"), 1.0, 3)


def test_selector_config_validation():
    with pytest.raises(SelectionError):
        selectors.SelectorConfig("kmeans", kmeans_iters=-1)
    with pytest.raises(SelectionError):
        selectors.SelectorConfig("rls", rls_gamma=0.0)


@pytest.mark.parametrize("method", ["uniform", "fps"])
def test_m_actual_equals_m(method):
    ds = random_dataset(2, n=50)
    lm = getattr(selectors, method)(ds, 17, seed=3)
    assert lm.m_actual == 17 and lm.m_requested == 17
