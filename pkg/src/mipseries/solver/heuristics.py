"""Stand-alone primal heuristics."""
from __future__ import annotations

import math

import numpy as np

from ..model import MipInstance, Solution, SolutionStatus, check_feasibility, objective_value


def round_to_feasible(inst: MipInstance, point: np.ndarray,
                      lower: np.ndarray, upper: np.ndarray,
                      feas_tol: float = 1e-6, int_tol: float = 1e-6) -> np.ndarray | None:
    """Round fractional integers to the nearest in-bounds integer; returns the
    point only when it passes the feasibility check, else None."""
    x = np.array(point, dtype=float)
    for j in sorted(inst.integer_mask):
        v = math.floor(x[j] + 0.5)
        v = min(max(v, lower[j]), upper[j])
        x[j] = v
    res = check_feasibility(inst, x, feas_tol, int_tol)
    return x if res.feasible else None


def rounding_heuristic(inst: MipInstance, lp_point: np.ndarray,
                       lower: np.ndarray | None = None,
                       upper: np.ndarray | None = None,
                       feas_tol: float = 1e-6, int_tol: float = 1e-6) -> Solution | None:
    """Public wrapper returning a Solution or None."""
    lower = inst.lower if lower is None else lower
    upper = inst.upper if upper is None else upper
    x = round_to_feasible(inst, lp_point, lower, upper, feas_tol, int_tol)
    if x is None:
        return None
    return Solution(x, objective_value(inst, x), SolutionStatus.FEASIBLE)
