"""Anchor-net Nyström approximation of symmetric kernel matrices.

Modules
-------
dataio       datasets, standardization, seeded generators
kernels      kernel families and Gram blocks
lowdisc      Halton sets, adaptive grids, star discrepancy
anchornet    anchor-net construction and landmark selection
selectors    uniform, k-means, farthest point and ridge-leverage baselines
nystrom      factors, stabilized inverses, pivoted Cholesky, error norms
diagnostics  marking errors, fill distance, error bounds
benchcli     benchmark command line
"""
from ._accel import BACKEND
from .anchornet import AnchorConfig, LandmarkSet, select_landmarks
from .dataio import Dataset, abalone, load_csv, nonuniform_2d, standardize
from .kernels import KernelSpec
from .nystrom import approx_error, factor, pivoted_cholesky, reconstruct

__version__ = "0.1.0"

__all__ = ["BACKEND", "AnchorConfig", "LandmarkSet", "select_landmarks", "Dataset", "abalone",
           "load_csv", "nonuniform_2d", "standardize", "KernelSpec", "approx_error", "factor",
           "pivoted_cholesky", "reconstruct", "__version__"]
