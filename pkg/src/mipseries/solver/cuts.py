"""Gomory cut separation from the optimal simplex tableau.

Cuts are derived in mixed-integer form (continuous terms handled separately
from integer terms, nonbasic-at-upper columns complemented) so they remain
valid when continuous variables or fractional data are present.  Slacks are
substituted out, yielding cut rows over the structural variables only.
"""
from __future__ import annotations

import math

import numpy as np

from ..lp import AT_LOWER, BASIC, FIXED, FREE, LpResult, SimplexSnapshot
from ..model import LinearRow, Sense
from .config import SEP_GOMORY, SolverConfig

MIN_FRACTIONALITY = 1e-4
ZERO_COEF = 1e-11
MAX_DYNAMISM = 1e8


def slack_integrality(row_matrix: np.ndarray, row_rhs: np.ndarray,
                      senses, is_int: np.ndarray) -> np.ndarray:
    """Per row: True when the slack takes integer values at every
    integer-feasible point (all-integer support, integral data)."""
    m = row_matrix.shape[0]
    out = np.zeros(m, dtype=bool)
    for i in range(m):
        support = np.nonzero(row_matrix[i])[0]
        if len(support) == 0:
            continue
        if not np.all(is_int[support]):
            continue
        coefs = row_matrix[i, support]
        if np.any(np.abs(coefs - np.round(coefs)) > 1e-9):
            continue
        if abs(row_rhs[i] - round(row_rhs[i])) > 1e-9:
            continue
        out[i] = True
    return out


def _gmi_from_row(snap: SimplexSnapshot, r: int, is_int: np.ndarray,
                  row_matrix: np.ndarray, row_rhs: np.ndarray,
                  slack_int: np.ndarray) -> tuple[np.ndarray, float] | None:
    """Derive one cut (w, rhs) meaning w . x >= rhs, or None."""
    n = snap.n_struct
    b0 = snap.beta[r]
    f0 = b0 - math.floor(b0)
    if f0 < MIN_FRACTIONALITY or f0 > 1.0 - MIN_FRACTIONALITY:
        return None

    w = np.zeros(n)
    const = 0.0
    for j in range(snap.tab.shape[1]):
        st = snap.stat[j]
        if st == BASIC or st == FIXED:
            continue
        a = snap.tab[r, j]
        if abs(a) <= ZERO_COEF:
            continue
        if st == FREE:
            return None
        if st == AT_LOWER:
            shift = snap.lo[j]
            coef = a
        else:  # AT_UPPER
            shift = snap.hi[j]
            coef = -a
        if not math.isfinite(shift):
            return None

        if j < n:
            integral = bool(is_int[j]) and abs(shift - round(shift)) <= 1e-9
        else:
            integral = bool(slack_int[j - n])

        if integral:
            fj = coef - math.floor(coef)
            gamma = fj / f0 if fj <= f0 else (1.0 - fj) / (1.0 - f0)
        else:
            gamma = coef / f0 if coef > 0 else -coef / (1.0 - f0)
        if gamma == 0.0:
            continue

        # translate gamma * z_j back to structural space
        if j < n:
            if st == AT_LOWER:
                w[j] += gamma
                const -= gamma * shift
            else:
                w[j] -= gamma
                const += gamma * shift
        else:
            k = j - n
            if st == AT_LOWER:     # z = s_k = b_k - A_k x
                w -= gamma * row_matrix[k]
                const += gamma * row_rhs[k]
            else:                  # z = -s_k = A_k x - b_k
                w += gamma * row_matrix[k]
                const -= gamma * row_rhs[k]

    rhs = 1.0 - const
    w[np.abs(w) <= ZERO_COEF] = 0.0
    nz = np.abs(w[w != 0.0])
    if len(nz) == 0:
        return None
    if nz.max() / nz.min() > MAX_DYNAMISM:
        return None
    return w, rhs


def generate_cuts(result: LpResult, at_root: bool, cfg: SolverConfig,
                  is_int: np.ndarray, row_matrix: np.ndarray,
                  row_rhs: np.ndarray, slack_int: np.ndarray,
                  var_names, name_prefix: str,
                  min_violation: float = 1e-6) -> list[LinearRow]:
    """Cuts from tableau rows of fractional basic integer variables.

    Returns [] when the root/tree toggle for this location is off.  Every
    returned cut is violated by the LP point by more than `min_violation`.
    """
    if at_root and not cfg.use_cuts_root:
        return []
    if not at_root and not cfg.use_cuts_tree:
        return []
    if SEP_GOMORY not in cfg.enabled_separators:
        return []
    snap = result.snapshot
    if snap is None:
        return []

    x = result.primal
    cuts = []
    for r in range(snap.tab.shape[0]):
        if len(cuts) >= cfg.max_cuts_per_round:
            break
        j0 = int(snap.basis[r])
        if j0 >= snap.n_struct or not is_int[j0]:
            continue
        frac = snap.beta[r] - math.floor(snap.beta[r])
        if frac <= cfg.int_tol or frac >= 1.0 - cfg.int_tol:
            continue
        derived = _gmi_from_row(snap, r, is_int, row_matrix, row_rhs, slack_int)
        if derived is None:
            continue
        w, rhs = derived
        if float(w @ x) >= rhs - min_violation:
            continue
        coefs = tuple((int(j), float(w[j])) for j in np.nonzero(w)[0])
        cuts.append(LinearRow(f"{name_prefix}_r{r}", coefs, Sense.GE, float(rhs)))
    return cuts
