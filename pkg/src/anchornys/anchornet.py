"""Anchor-net construction and anchor-net landmark selection.

An anchor net is a two-level low-discrepancy set adapted to a dataset:

1. a tessellation set ``T`` (``s`` points) fills the bounding box of ``X``;
   every data point joins the group of its l-infinity nearest point of ``T``;
2. each nonempty group gets its tight bounding box ``B_i`` and a
   low-discrepancy set of size ``ceil(m * vol(B_i) / sum_j vol(B_j))``.

Landmarks are the l-infinity nearest data points to the anchors.  Every
``argmin`` breaks ties towards the lowest index, so the whole procedure is
deterministic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import _accel
from .dataio import Dataset
from .lowdisc import Box, PointSet, grid_for_budget, halton

__all__ = ["AnchorConfig", "AnchorNet", "LandmarkSet", "SelectionError",
           "allocate_sizes", "build", "nearest_points", "select_landmarks"]


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class LandmarkSet:
    """Selected landmarks.

    ``indices`` is empty for selectors whose landmarks are not data points
    (k-means centroids); otherwise ``coords == X[indices]`` bit for bit.
    """

    indices: np.ndarray
    coords: np.ndarray
    method: str
    m_requested: int
    select_time: float = 0.0
    info: dict = field(default_factory=dict, compare=False)

    @property
    def m_actual(self) -> int:
        return self.coords.shape[0]

    @property
    def from_data(self) -> bool:
        return self.indices.size > 0


@dataclass(frozen=True)
class AnchorConfig:
    """Tuning knobs.

    ``tess_multiplier`` sets ``s = round(tess_multiplier * m)``; values in
    [2, 20] are accepted, larger ones suiting higher dimensions.
    Generators are ``"halton"`` or ``"grid"`` (adaptive tensor grid).
    """

    tess_multiplier: float = 4.0
    tess_generator: str = "halton"
    cell_generator: str = "grid"

    def __post_init__(self):
        if not 2.0 <= self.tess_multiplier <= 20.0:
            raise SelectionError(f"tess_multiplier must lie in [2, 20], got {self.tess_multiplier}")
        for gen in (self.tess_generator, self.cell_generator):
            if gen not in ("halton", "grid"):
                raise SelectionError(f"unknown generator {gen!r}")


@dataclass
class AnchorNet:
    anchors: PointSet
    anchor_group: np.ndarray
    groups: list
    boxes: list
    volumes: np.ndarray
    sizes: np.ndarray
    tessellation: PointSet
    requested_m: int

    @property
    def Q(self) -> int:
        return len(self.groups)

    @property
    def size(self) -> int:
        return len(self.anchors)


def allocate_sizes(volumes, m: int, weights=None) -> np.ndarray:
    """Per-group anchor counts ``ceil(m * v_i / sum v)``, at least 1 each.

    When every volume is zero the allocation uses ``weights`` instead (the
    caller passes group cardinalities; uniform weights by default).
    """
    v = np.asarray(volumes, dtype=np.float64).ravel()
    if v.size == 0:
        raise SelectionError("no groups to allocate")
    if m < 1:
        raise SelectionError("m must be >= 1")
    total = v.sum()
    if not total > 0:
        v = np.ones_like(v) if weights is None else np.asarray(weights, dtype=np.float64).ravel()
        total = v.sum()
    sizes = np.ceil(m * v / total).astype(np.int64)
    return np.maximum(sizes, 1)


def _point_set(gen: str, box: Box, count: int) -> np.ndarray:
    if gen == "grid":
        return grid_for_budget(box, count).points
    return box.scale(halton(count, box.d).points)


def build(ds: Dataset, m: int, config: AnchorConfig | None = None,
          budget: int | None = None, tess_size: int | None = None) -> AnchorNet:
    """Construct the anchor net of ``ds`` with net size ``m``.

    ``budget`` overrides the total passed to :func:`allocate_sizes` and
    ``tess_size`` overrides ``s = round(tess_multiplier * m)``.
    """
    config = config or AnchorConfig()
    if m < 1:
        raise SelectionError("m must be >= 1")
    budget = m if budget is None else budget
    s = max(1, int(round(config.tess_multiplier * m))) if tess_size is None else int(tess_size)
    return _net_from_partition(_partition(ds, config, s), m, config, budget)


def _partition(ds, config, s):
    """Group the points by l-infinity nearest tessellation point.

    Independent of the allocation budget, so calibration reuses it.
    """
    x = ds.points
    tess = PointSet(_point_set(config.tess_generator, Box.bounding(x), s), config.tess_generator, {"s": s})
    owner = _accel.linf_argmin(x, np.ascontiguousarray(tess.points))
    order = np.argsort(owner, kind="stable")
    _, starts = np.unique(owner[order], return_index=True)
    groups = np.split(order, starts[1:])
    sorted_x = x[order]
    lo = np.minimum.reduceat(sorted_x, starts, axis=0)
    hi = np.maximum.reduceat(sorted_x, starts, axis=0)
    boxes = [Box(lo[i], hi[i]) for i in range(len(groups))]
    return tess, groups, boxes, np.prod(hi - lo, axis=1)


def _net_from_partition(part, m, config, budget):
    tess, groups, boxes, volumes = part
    counts = np.array([g.size for g in groups])
    sizes = allocate_sizes(volumes, budget, weights=counts)
    all_zero = not volumes.sum() > 0
    chunks, owners = [], []
    for i, box in enumerate(boxes):
        if volumes[i] > 0 or all_zero:
            pts = _point_set(config.cell_generator, box, int(sizes[i]))
        else:
            pts = box.center[None, :]
        chunks.append(pts)
        owners.append(np.full(pts.shape[0], i))
    anchors = PointSet(np.vstack(chunks), "anchor-net",
                       {"cell_generator": config.cell_generator, "budget": budget})
    return AnchorNet(anchors=anchors, anchor_group=np.concatenate(owners), groups=groups,
                     boxes=boxes, volumes=volumes, sizes=sizes, tessellation=tess,
                     requested_m=m)


def nearest_points(x: np.ndarray, queries: np.ndarray, tree: cKDTree | None = None) -> np.ndarray:
    """Distinct indices of the l-infinity nearest rows of ``x``, in query order.

    Ties go to the lowest index.  Without ``tree`` this is a brute-force scan;
    with a ``cKDTree`` over ``x`` each query costs O(log n), and ties are
    resolved by collecting every point at the nearest distance.
    """
    queries = np.ascontiguousarray(queries)
    if tree is None:
        idx = _accel.linf_argmin(queries, np.ascontiguousarray(x))
    else:
        dist, idx = tree.query(queries, k=1, p=np.inf)
        idx = np.asarray(idx, dtype=np.intp)
        for j, cand in enumerate(tree.query_ball_point(queries, dist, p=np.inf)):
            if len(cand) > 1:
                idx[j] = min(cand)
    _, first = np.unique(idx, return_index=True)
    return idx[np.sort(first)]


def _landmarks_for(ds, m, config, budget, tess_size, cache):
    if tess_size not in cache:
        cache[tess_size] = _partition(ds, config, tess_size)
    if "tree" not in cache:
        cache["tree"] = cKDTree(ds.points)
    net = _net_from_partition(cache[tess_size], m, config, budget)
    return net, nearest_points(ds.points, net.anchors.points, cache["tree"])


def select_landmarks(ds: Dataset, m: int, config: AnchorConfig | None = None,
                     calibrate: bool = True) -> LandmarkSet:
    """Anchor-net landmarks: nearest data points to the anchors, deduplicated.

    With ``calibrate`` (default) the allocation budget is tuned so the number
    of distinct landmarks is as close to ``m`` as possible without exceeding
    it: the raw net with budget ``m`` usually yields fewer distinct landmarks
    (empty tessellation cells, undershooting grids, collisions), or more when
    the tessellation has more nonempty cells than ``m``.  In the latter case
    the tessellation is coarsened first.  Without ``calibrate`` the net is
    built once with budget ``m`` and the result is returned as is.
    """
    config = config or AnchorConfig()
    if not 1 <= m <= ds.n:
        raise SelectionError(f"m must be in [1, {ds.n}], got {m}")
    t0 = time.perf_counter()
    s = max(1, int(round(config.tess_multiplier * m)))
    if not calibrate:
        net, idx = _landmarks_for(ds, m, config, m, s, {})
        return _landmark_set(ds, idx, m, net, t0)

    parts = {}
    net, idx = _landmarks_for(ds, m, config, 1, s, parts)
    while idx.size > m and s > 1:
        # shrink past the proportional guess: cell counts fall slower than s,
        # and each retry is a full O(n s) partition
        s = max(1, min(s - 1, int(0.9 * s * m / idx.size)))
        net, idx = _landmarks_for(ds, m, config, 1, s, parts)
    best = (idx.size, 1, net, idx)
    if idx.size > m:
        # s == 1 and still too many: only possible for a single huge group
        raise SelectionError("cannot place the anchor net within the requested size")

    def probe(b):
        nonlocal best
        net_b, idx_b = _landmarks_for(ds, m, config, b, s, parts)
        if idx_b.size <= m and (idx_b.size, -b) > (best[0], -best[1]):
            best = (idx_b.size, b, net_b, idx_b)
        return idx_b.size

    good, bad = 1, None
    b, stalled, last = m, 0, best[0]
    while best[0] < m:
        cnt = probe(b)
        if cnt > m:
            bad = b
            break
        good = b
        stalled = stalled + 1 if cnt <= last else 0
        last = cnt
        if stalled >= 2 or b > 64 * m:
            break
        b *= 2
    if bad is not None:
        while bad - good > 1 and best[0] < m:
            mid = (good + bad) // 2
            if probe(mid) > m:
                bad = mid
            else:
                good = mid
    _, budget, net, idx = best
    ls = _landmark_set(ds, idx, m, net, t0)
    ls.info.update(budget=budget, tess_size=s)
    return ls


def _landmark_set(ds, idx, m, net, t0):
    return LandmarkSet(indices=idx, coords=ds.points[idx].copy(), method="anchornet",
                       m_requested=m, select_time=time.perf_counter() - t0,
                       info={"net_size": net.size, "Q": net.Q, "budget": net.anchors.params["budget"],
                             "tess_size": net.tessellation.params["s"]})
