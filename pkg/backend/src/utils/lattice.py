"""
Integer lattice helpers for torus spectra.
"""
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma as gamma_fn


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in ``R^dim`` (2 for ``dim == 1``)."""
    return float(2.0 * np.pi ** (dim / 2.0) / gamma_fn(dim / 2.0))


@lru_cache(maxsize=32)
def _shell_counts(dim: int, max_norm_sq: int) -> np.ndarray:
    one = np.zeros(max_norm_sq + 1)
    n = np.arange(0, int(np.floor(np.sqrt(max_norm_sq))) + 1)
    one[n * n] = 2.0
    one[0] = 1.0
    counts = one
    for _ in range(dim - 1):
        counts = fftconvolve(counts, one)[: max_norm_sq + 1]
    counts = np.rint(counts).astype(np.int64)
    counts.setflags(write=False)
    return counts


def shell_counts(dim: int, max_norm_sq: int) -> np.ndarray:
    """``r_dim(k)``: number of points of ``Z^dim`` with ``|n|^2 == k`` for ``k <= max_norm_sq``."""
    if dim < 1 or max_norm_sq < 0:
        raise ValueError("dimension must be positive and the shell bound non-negative")
    return _shell_counts(int(dim), int(max_norm_sq))


def ball_points(dim: int, max_norm_sq: int) -> np.ndarray:
    """All lattice points with ``|n|^2 <= max_norm_sq``, shape ``(count, dim)``, unsorted."""
    radius = int(np.floor(np.sqrt(max_norm_sq)))
    axis = np.arange(-radius, radius + 1)
    points = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return points[np.sum(points * points, axis=1) <= max_norm_sq]
