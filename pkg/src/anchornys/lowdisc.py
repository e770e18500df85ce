"""Low-discrepancy point sets and star-discrepancy measurement.

Generators
    :func:`halton` (radical inverse in the first ``d`` primes) and the
    adaptive tensor grid (:func:`adaptive_grid`, :func:`grid_for_budget`),
    whose per-dimension node counts add up to ``p + d``.

Discrepancy
    :func:`star_discrepancy` measures the star discrepancy in the unit cube,
    or the generalized version relative to a union of boxes, where anchored
    boxes start at the lower corner of the union's bounding box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataio import make_rng

__all__ = [
    "Box", "PointSet", "DiscrepancyEstimate", "LowDiscError", "PRIMES",
    "halton", "compose_budget", "grid_size", "adaptive_grid", "grid_for_budget",
    "star_discrepancy", "union_volume",
]


class LowDiscError(ValueError):
    pass


def _first_primes(count):
    primes = []
    cand = 2
    while len(primes) < count:
        if all(cand % p for p in primes if p * p <= cand):
            primes.append(cand)
        cand += 1
    return tuple(primes)


PRIMES = _first_primes(100)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``[lo, hi]``; zero-extent sides allowed."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=np.float64)).copy()
        hi = np.atleast_1d(np.asarray(self.hi, dtype=np.float64)).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise LowDiscError("lo and hi must be vectors of equal length")
        if np.any(hi < lo):
            raise LowDiscError("box has hi < lo")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def bounding(cls, points) -> "Box":
        pts = np.asarray(points, dtype=np.float64)
        return cls(pts.min(axis=0), pts.max(axis=0))

    @classmethod
    def unit(cls, d) -> "Box":
        return cls(np.zeros(d), np.ones(d))

    @property
    def d(self) -> int:
        return self.lo.size

    @property
    def sides(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def scale(self, unit_points) -> np.ndarray:
        """Map points of the unit cube into the box."""
        return self.lo + np.asarray(unit_points) * self.sides


@dataclass
class PointSet:
    points: np.ndarray
    generator: str
    params: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]


def halton(count: int, dim: int, start_index: int = 1) -> PointSet:
    """Unscrambled Halton points with indices ``start_index .. start_index+count-1``.

    >>> halton(3, 1).points.ravel().tolist()
    [0.5, 0.25, 0.75]
    """
    if not 1 <= dim <= len(PRIMES):
        raise LowDiscError(f"halton supports 1 <= dim <= {len(PRIMES)}, got {dim}")
    if start_index < 1:
        raise LowDiscError("start_index must be >= 1")
    idx0 = np.arange(start_index, start_index + count, dtype=np.int64)
    pts = np.zeros((count, dim))
    for k, base in enumerate(PRIMES[:dim]):
        idx = idx0.copy()
        frac = 1.0 / base
        while np.any(idx > 0):
            idx, digit = np.divmod(idx, base)
            pts[:, k] += digit * frac
            frac /= base
    return PointSet(pts, "halton", {"bases": PRIMES[:dim], "start_index": start_index})


def compose_budget(box: Box, p: int) -> tuple:
    """Node counts ``(i_1, ..., i_d)`` with ``sum = p + d`` and every ``i_k >= 1``.

    The ``p`` surplus nodes go to the dimensions in proportion to the side
    lengths (largest-remainder rounding, ties to the lower dimension index).
    Zero-extent dimensions keep a single node; if every side has zero extent
    no surplus can be placed and the composition is all ones.
    """
    if p < 0:
        raise LowDiscError("p must be nonnegative")
    sides = box.sides
    counts = np.ones(box.d, dtype=np.int64)
    active = sides > 0
    if p == 0 or not np.any(active):
        return tuple(int(c) for c in counts)
    quota = np.zeros(box.d)
    quota[active] = p * sides[active] / sides[active].sum()
    base = np.floor(quota).astype(np.int64)
    rem = p - int(base.sum())
    frac = np.where(active, quota - base, -1.0)
    order = sorted(range(box.d), key=lambda k: (-frac[k], k))
    for k in order[:rem]:
        base[k] += 1
    return tuple(int(c) for c in counts + base)


def grid_size(box: Box, p: int) -> int:
    return math.prod(compose_budget(box, p))


def adaptive_grid(box: Box, p: int) -> PointSet:
    """Tensor grid of cell midpoints with :func:`compose_budget` node counts."""
    comp = compose_budget(box, p)
    axes = []
    for k, i_k in enumerate(comp):
        j = np.arange(1, i_k + 1)
        axes.append(box.lo[k] + (2 * j - 1) / (2 * i_k) * (box.hi[k] - box.lo[k]))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return PointSet(pts, "adaptive-grid", {"p": p, "composition": comp})


def grid_for_budget(box: Box, target: int) -> PointSet:
    """Adaptive grid with the largest ``p`` whose size does not exceed ``target``.

    A composition of ``p + d`` with parts ``>= 1`` has product at least
    ``p + 1``, so only ``p < target`` needs scanning.  The size is not
    monotone in ``p`` under largest-remainder rounding, hence the full scan.
    """
    if target < 1:
        raise LowDiscError("target count must be >= 1")
    best = 0
    if np.any(box.sides > 0):
        for p in range(1, target):
            if grid_size(box, p) <= target:
                best = p
    grid = adaptive_grid(box, best)
    grid.params["requested"] = target
    return grid


# ---------------------------------------------------------------------------
# discrepancy


@dataclass(frozen=True)
class DiscrepancyEstimate:
    value: float
    is_lower_bound: bool
    method: str
    volume_method: str = "exact"


def _inclusion_exclusion_terms(boxes):
    """Signed nonempty intersections of all box subsets (pruned DFS)."""
    los = [b.lo for b in boxes]
    his = [b.hi for b in boxes]
    terms_lo, terms_hi, signs = [], [], []

    def visit(i, lo, hi, sign):
        terms_lo.append(lo)
        terms_hi.append(hi)
        signs.append(sign)
        for j in range(i + 1, len(boxes)):
            nlo = np.maximum(lo, los[j])
            nhi = np.minimum(hi, his[j])
            if np.all(nhi > nlo):
                visit(j, nlo, nhi, -sign)

    for i in range(len(boxes)):
        if np.all(his[i] > los[i]):
            visit(i, los[i], his[i], 1.0)
    if not signs:
        d = boxes[0].d
        return np.zeros((0, d)), np.zeros((0, d)), np.zeros(0)
    return np.array(terms_lo), np.array(terms_hi), np.array(signs)


class _Region:
    """lambda(Omega cap [origin, a)) for a unit cube or a union of boxes."""

    def __init__(self, boxes, d, mc_samples, seed, max_exact_boxes=20):
        self.d = d
        if boxes is None:
            self.boxes = None
            self.origin = np.zeros(d)
            self.top = np.ones(d)
            self.method = "exact"
            self.total = 1.0
            return
        self.boxes = list(boxes)
        self.origin = np.min([b.lo for b in self.boxes], axis=0)
        self.top = np.max([b.hi for b in self.boxes], axis=0)
        if len(self.boxes) <= max_exact_boxes:
            self.method = "exact"
            self._lo, self._hi, self._sign = _inclusion_exclusion_terms(self.boxes)
        else:
            self.method = "monte_carlo"
            rng = make_rng(seed)
            u = self.origin + rng.random((mc_samples, d)) * (self.top - self.origin)
            inside = np.zeros(mc_samples, dtype=bool)
            for b in self.boxes:
                inside |= b.contains(u)
            self._samples = u[inside]
            self._scale = float(np.prod(self.top - self.origin)) / mc_samples
        self.total = float(self.volume(self.top[None, :])[0])
        if self.total <= 0:
            raise LowDiscError("region has zero volume")

    def volume(self, corners):
        corners = np.atleast_2d(corners)
        if self.boxes is None:
            return np.prod(np.clip(corners, 0.0, 1.0), axis=1)
        out = np.empty(corners.shape[0])
        if self.method == "exact":
            step = max(1, (1 << 21) // max(1, self._sign.size * self.d))
            for s in range(0, corners.shape[0], step):
                c = corners[s:s + step, None, :]
                ext = np.clip(np.minimum(self._hi[None], c) - self._lo[None], 0.0, None)
                out[s:s + step] = np.prod(ext, axis=2) @ self._sign
        else:
            out[:] = _count_below(self._samples, corners, strict=True) * self._scale
        return out

    def volume_grid_2d(self, ax, ay):
        """Volumes for all corners ``(ax[i], ay[j])`` as a matrix."""
        if self.boxes is None:
            return np.outer(np.clip(ax, 0, 1), np.clip(ay, 0, 1))
        if self.method == "exact":
            fx = np.clip(np.minimum(self._hi[None, :, 0], ax[:, None]) - self._lo[None, :, 0], 0, None)
            fy = np.clip(np.minimum(self._hi[None, :, 1], ay[:, None]) - self._lo[None, :, 1], 0, None)
            return (fx * self._sign) @ fy.T
        return _dominance_2d(self._samples, ax, ay, strict=True) * self._scale


def union_volume(boxes, mc_samples=200_000, seed=0) -> float:
    """Lebesgue measure of a union of boxes (exact up to 20 boxes)."""
    boxes = list(boxes)
    return _Region(boxes, boxes[0].d, mc_samples, seed).total


def _count_below(points, corners, strict):
    """For each corner, number of points componentwise below it."""
    out = np.empty(corners.shape[0], dtype=np.int64)
    step = max(1, (1 << 22) // max(1, points.shape[0] * points.shape[1]))
    for s in range(0, corners.shape[0], step):
        c = corners[s:s + step, None, :]
        below = points[None] < c if strict else points[None] <= c
        out[s:s + step] = np.all(below, axis=2).sum(axis=1)
    return out


def _dominance_2d(points, ax, ay, strict):
    """counts[i, j] = #{p : p_x < ax[i], p_y < ay[j]} (``<=`` if not strict).

    ``ax`` and ``ay`` must be sorted ascending.
    """
    side = "right" if strict else "left"
    ix = np.searchsorted(ax, points[:, 0], side=side)
    iy = np.searchsorted(ay, points[:, 1], side=side)
    hist = np.zeros((ax.size + 1, ay.size + 1), dtype=np.int64)
    np.add.at(hist, (ix, iy), 1)
    return hist.cumsum(axis=0).cumsum(axis=1)[:ax.size, :ay.size]


def _exact_1d(x, region):
    xs = np.sort(x)
    cand = [xs, [region.origin[0], region.top[0]]]
    if region.boxes is not None:
        cand += [[b.lo[0] for b in region.boxes], [b.hi[0] for b in region.boxes]]
    a = np.unique(np.concatenate([np.asarray(c, dtype=np.float64) for c in cand]))
    a = a[(a >= region.origin[0]) & (a <= region.top[0])]
    n = xs.size
    lam = region.volume(a[:, None]) / region.total
    open_c = np.searchsorted(xs, a, side="left") / n
    closed_c = np.searchsorted(xs, a, side="right") / n
    return float(max(np.max(closed_c - lam), np.max(lam - open_c), 0.0))


def _exact_2d(pts, region):
    axes = []
    for k in range(2):
        cand = [pts[:, k], [region.origin[k], region.top[k]]]
        if region.boxes is not None:
            cand += [[b.lo[k] for b in region.boxes], [b.hi[k] for b in region.boxes]]
        a = np.unique(np.concatenate([np.asarray(c, dtype=np.float64) for c in cand]))
        axes.append(a[(a >= region.origin[k]) & (a <= region.top[k])])
    ax, ay = axes
    n = pts.shape[0]
    lam = region.volume_grid_2d(ax, ay) / region.total
    open_c = _dominance_2d(pts, ax, ay, strict=True) / n
    closed_c = _dominance_2d(pts, ax, ay, strict=False) / n
    return float(max(np.max(closed_c - lam), np.max(lam - open_c), 0.0))


def star_discrepancy(points, region=None, method="exact2d", samples=10_000, seed=0,
                     volume_samples=200_000) -> DiscrepancyEstimate:
    """Star discrepancy of ``points``.

    Parameters
    ----------
    points
        ``N x d`` array or :class:`PointSet`.
    region
        ``None`` for the unit cube ``[0, 1]^d``; otherwise a list of
        :class:`Box` whose union is the reference region.  The union's measure
        restricted to an anchored box uses inclusion-exclusion for up to 20
        boxes and seeded Monte-Carlo volume estimation beyond that.
    method
        ``"exact1d"``/``"exact2d"``: supremum over all anchored boxes via the
        critical corners at point and box-edge coordinates (d must match).
        ``"monte_carlo"``: maximum over ``samples`` random corners, which is a
        lower bound of the supremum when the region volume is exact.
    """
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
    pts = np.atleast_2d(pts)
    if pts.shape[0] == 0:
        raise LowDiscError("empty point set")
    d = pts.shape[1]
    reg = _Region(region, d, volume_samples, seed)
    if method in ("exact1d", "exact2d"):
        need = 1 if method == "exact1d" else 2
        if d != need:
            raise LowDiscError(f"{method} needs d = {need}, got d = {d}; use monte_carlo")
        value = _exact_1d(pts[:, 0], reg) if d == 1 else _exact_2d(pts, reg)
        return DiscrepancyEstimate(value, False, method, reg.method)
    if method != "monte_carlo":
        raise LowDiscError(f"unknown discrepancy method {method!r}")
    rng = make_rng(seed)
    corners = reg.origin + rng.random((samples, d)) * (reg.top - reg.origin)
    lam = reg.volume(corners) / reg.total
    cnt = _count_below(pts, corners, strict=True) / pts.shape[0]
    value = float(np.max(np.abs(cnt - lam)))
    return DiscrepancyEstimate(value, reg.method == "exact", method, reg.method)

