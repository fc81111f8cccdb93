"""
Quadrature rules: cached Gauss-Legendre nodes and scrambled Sobol conjugators.
"""
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.stats import qmc

from .quaternion import shoemake


@lru_cache(maxsize=64)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights of the given order mapped onto ``[a, b]``."""
    if order < 1:
        raise ValueError("quadrature order must be at least 1")
    nodes, weights = _reference_rule(order)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def tensor_gauss_legendre(order: int, dim: int, a: float = 0.0, b: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor-product rule on ``[a, b]^dim``; nodes have shape ``(order**dim, dim)``."""
    nodes, weights = gauss_legendre(order, a, b)
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    wgrids = np.meshgrid(*([weights] * dim), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    tensor_weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=-1), axis=-1)
    return points, tensor_weights


def sobol_quaternions(log2_count: int, seed: int) -> np.ndarray:
    """``2**log2_count`` unit quaternions from a scrambled Sobol sequence with a fixed seed."""
    sampler = qmc.Sobol(d=3, scramble=True, seed=seed)
    return shoemake(sampler.random_base2(m=log2_count))
