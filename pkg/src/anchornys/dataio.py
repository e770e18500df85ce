"""Point datasets: loading, standardization, subsampling and synthesis.

All randomness in the package goes through :func:`make_rng`, a PCG64
generator seeded by a 64-bit integer, so results are machine independent.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "Dataset", "DataStats", "DataError", "make_rng", "derive_seed",
    "load_csv", "standardize", "stats", "subsample", "subsample_indices",
    "synth_clusters", "nonuniform_2d", "abalone",
]


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


def make_rng(seed):
    """PCG64 generator for a 64-bit integer seed."""
    return np.random.Generator(np.random.PCG64(int(seed) % 2**64))


def derive_seed(master, *keys):
    """Deterministic 64-bit child seed from a master seed and integer keys."""
    ss = np.random.SeedSequence([int(master) % 2**64, *(int(k) for k in keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Dataset:
    """``n`` points in ``d`` dimensions plus provenance."""

    points: np.ndarray
    standardized: bool = False
    source: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError(f"points must be a non-empty n x d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DataError("points contain non-finite values")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DataStats:
    center: np.ndarray
    radius: float
    half_radius: float


def load_csv(path, columns: Sequence[int] | None = None, skip_header: bool = False) -> Dataset:
    """Read a numeric CSV file into a :class:`Dataset`.

    Parameters
    ----------
    path
        File with comma-separated finite decimals (LF or CRLF line ends).
    columns
        Zero-based column indices to keep; all columns when omitted.  Use this
        to drop label columns.
    skip_header
        Skip the first line.

    Raises
    ------
    DataError
        Empty file, ragged rows, or a cell that is not a finite number.  The
        message names the 1-based line and column.
    """
    path = Path(path)
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, fields in enumerate(reader, start=1):
            if lineno == 1 and skip_header:
                continue
            if not fields or all(not f.strip() for f in fields):
                continue
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise DataError(f"{path}:{lineno}: expected {width} columns, found {len(fields)}")
            picked = range(width) if columns is None else columns
            row = []
            for col in picked:
                if not 0 <= col < width:
                    raise DataError(f"{path}:{lineno}: column {col} out of range (width {width})")
                text = fields[col].strip()
                try:
                    value = float(text)
                except ValueError:
                    raise DataError(f"{path}:{lineno}:{col + 1}: cannot parse {text!r}") from None
                if not math.isfinite(value):
                    raise DataError(f"{path}:{lineno}:{col + 1}: non-finite value {text!r}")
                row.append(value)
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows), standardized=False, source=str(path))


def standardize(ds: Dataset) -> Dataset:
    """Zero mean and unit population standard deviation per coordinate.

    Constant coordinates are centred and left unscaled.
    """
    x = ds.points
    mean = x.mean(axis=0)
    centered = x - mean
    std = np.sqrt((centered ** 2).mean(axis=0))
    scale = np.where(std > 0, std, 1.0)
    return Dataset(centered / scale, standardized=True, source=ds.source)


def stats(ds: Dataset) -> DataStats:
    center = ds.points.mean(axis=0)
    radius = float(np.sqrt(((ds.points - center) ** 2).sum(axis=1)).max())
    return DataStats(center=center, radius=radius, half_radius=radius / 2)


def subsample_indices(n: int, k: int, seed) -> np.ndarray:
    if not 1 <= k <= n:
        raise DataError(f"subsample size must be in [1, {n}], got {k}")
    return make_rng(seed).choice(n, size=k, replace=False)


def subsample(ds: Dataset, k: int, seed) -> Dataset:
    """``k`` distinct rows drawn without replacement."""
    idx = subsample_indices(ds.n, k, seed)
    return Dataset(ds.points[idx], standardized=ds.standardized, source=f"{ds.source}[sub{k}]")


def synth_clusters(spec, seed) -> Dataset:
    """Union of uniform boxes.

    ``spec`` is a list of ``(center, spread, count)``; each cluster draws
    ``count`` points uniformly from the box ``center +/- spread``.
    """
    spec = list(spec)
    if not spec:
        raise DataError("empty cluster specification")
    rng = make_rng(seed)
    parts = []
    dim = None
    for center, spread, count in spec:
        center = np.atleast_1d(np.asarray(center, dtype=np.float64))
        if dim is None:
            dim = center.size
        elif center.size != dim:
            raise DataError("cluster centers have different dimensions")
        if count < 1 or spread < 0:
            raise DataError(f"invalid cluster (spread={spread}, count={count})")
        u = rng.uniform(-1.0, 1.0, size=(int(count), dim))
        parts.append(center + spread * u)
    return Dataset(np.vstack(parts), source="synth")


# Dense blobs of very different sizes inside a sparse background in [0, 1]^2.
_NONUNIFORM_2D = [
    ((0.40, 0.30), 0.030, 0.22),
    ((0.50, 0.70), 0.040, 0.20),
    ((0.20, 0.80), 0.080, 0.10),
    ((0.80, 0.25), 0.060, 0.10),
    ((0.75, 0.75), 0.015, 0.08),
    ((0.15, 0.20), 0.100, 0.10),
    ((0.50, 0.50), 0.500, 0.20),
]


def nonuniform_2d(n: int = 3000, seed=0) -> Dataset:
    """Highly non-uniform 2D point cloud in the unit square."""
    counts = [max(1, int(round(w * n))) for _, _, w in _NONUNIFORM_2D]
    counts[-1] += n - sum(counts)
    spec = [(c, s, k) for (c, s, _), k in zip(_NONUNIFORM_2D, counts)]
    ds = synth_clusters(spec, seed)
    return Dataset(ds.points, source=f"nonuniform2d:{n}")


def abalone() -> Dataset:
    """The bundled Abalone table (4174 x 8, sex coded M=1, F=2, I=3)."""
    ref = resources.files("anchornys").joinpath("data", "abalone.csv")
    with resources.as_file(ref) as path:
        ds = load_csv(path, skip_header=True)
    return Dataset(ds.points, source="abalone")
