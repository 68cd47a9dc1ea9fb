"""Pure numpy fallback for the simplex tableau kernels.

Loop order and zero-skipping mirror the compiled kernels exactly so both
backends produce bit-identical tableaus.
"""
from __future__ import annotations

import numpy as np


def eliminate(tab: np.ndarray, rhs: np.ndarray, r: int, j: int) -> None:
    """Gaussian pivot at (r, j) applied to the tableau and the rhs column."""
    piv = tab[r, j]
    tab[r, :] /= piv
    rhs[r] /= piv
    prow = tab[r]
    pr = rhs[r]
    for i in range(tab.shape[0]):
        if i == r:
            continue
        f = tab[i, j]
        if f != 0.0:
            tab[i, :] -= f * prow
            rhs[i] -= f * pr


def accumulate_rowsum(out: np.ndarray, weights: np.ndarray, tab: np.ndarray) -> None:
    """out -= sum_i weights[i] * tab[i], skipping exact-zero weights."""
    for i in range(tab.shape[0]):
        w = weights[i]
        if w != 0.0:
            out -= w * tab[i]


def subtract_scaled_columns(beta: np.ndarray, tab: np.ndarray,
                            cols: np.ndarray, vals: np.ndarray) -> None:
    """beta -= sum_k vals[k] * tab[:, cols[k]] in column order."""
    for k in range(len(cols)):
        beta -= vals[k] * tab[:, cols[k]]
