"""
Deterministic summation and tail integrals for spectral series.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import gammainc, gammaincc, gammaln, logsumexp


def pairwise_reduce(partials: Sequence):
    """Sum ``partials`` by recursive halving; the order depends only on ``len(partials)``."""
    items: List = list(partials)
    if not items:
        return 0.0
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def block_sum(values: np.ndarray, block_size: int = 4096, workers: int = 1):
    """
    Sum ``values`` block by block and combine the block totals pairwise.

    Blocks are fixed by ``block_size`` alone, so the result is bit-identical for any
    number of ``workers``.
    """
    values = np.asarray(values)
    if values.size == 0:
        return values.dtype.type(0)
    starts = range(0, values.size, block_size)

    def _block(start: int):
        return values[start:start + block_size].sum()

    if workers > 1 and values.size > block_size:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_block, starts))
    else:
        partials = [_block(start) for start in starts]
    return pairwise_reduce(partials)


def block_sum_rows(matrix: np.ndarray, block_size: int = 4096) -> np.ndarray:
    """Row sums of a 2-D array with the column blocking of :func:`block_sum`."""
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.shape[1] == 0:
        return np.zeros(matrix.shape[0], dtype=matrix.dtype)
    partials = [matrix[:, start:start + block_size].sum(axis=1) for start in range(0, matrix.shape[1], block_size)]
    return pairwise_reduce(partials)


def log_upper_gamma(a: float, x: float) -> float:
    """``log Γ(a, x)``, the unregularised upper incomplete gamma function."""
    if x <= 0.0:
        return float(gammaln(a))
    q = float(gammaincc(a, x))
    if q > 0.0:
        return float(gammaln(a)) + float(np.log(q))
    # gammaincc underflowed: x is far beyond the mode
    if a <= 1.0:
        return (a - 1.0) * np.log(x) - x
    if x > a - 1.0:
        return (a - 1.0) * np.log(x) - x - np.log1p(-(a - 1.0) / x)
    return float(gammaln(a)) + float(np.log(max(1.0 - float(gammainc(a, x)), np.finfo(float).tiny)))


def log_stretched_tail(poly: Polynomial, b: float, gamma: float, s0: float) -> float:
    """
    Logarithm of ``∫_{s0}^∞ poly(s) exp(-b s^gamma) ds`` for a polynomial with
    non-negative coefficients, ``b > 0`` and ``s0 >= 0``.
    """
    if s0 < 0.0:
        raise ValueError("tail integral needs s0 >= 0")
    logs = []
    x = b * s0 ** gamma
    for j, coef in enumerate(poly.coef):
        if coef <= 0.0:
            continue
        a = (j + 1.0) / gamma
        logs.append(np.log(coef) - np.log(gamma) - a * np.log(b) + log_upper_gamma(a, x))
    if not logs:
        return -np.inf
    return float(logsumexp(logs))
