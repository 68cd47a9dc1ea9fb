"""Bounded-variable primal simplex over a dense tableau.

Rows are converted to equalities with one slack each (LE: s >= 0, GE: s <= 0,
EQ: s fixed at 0).  Phase 1 minimizes the total bound violation of basic
variables, which works from a cold slack basis and from any warm-start basis
alike; phase 2 runs the usual bounded-variable pivoting.  Bland's rule is
engaged after a degenerate-pivot streak to guarantee termination.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .kernels import Kernels, get_kernels
from .model import INF, LinearRow, MipInstance, Sense

PIVOT_TOL = 1e-9
DCOST_TOL = 1e-9
FEAS_TOL = 1e-7
DEGEN_TOL = 1e-11
DEFAULT_BLAND_AFTER = 50
DEFAULT_ITER_LIMIT = 20000

# column statuses
AT_LOWER, AT_UPPER, BASIC, FREE, FIXED = 0, 1, 2, 3, 4


class LpStatus(Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    ITER_LIMIT = "ITER_LIMIT"


class SimplexTrouble(RuntimeError):
    """Internal: phase-1 ray without a breakpoint (numerical breakdown)."""


@dataclass
class SimplexBasis:
    """Opaque warm-start token: basic column per row plus all column statuses."""

    basis: np.ndarray
    stat: np.ndarray

    @property
    def ncols(self) -> int:
        return len(self.stat)


@dataclass
class SimplexSnapshot:
    """Final tableau state, consumed by cut generation."""

    tab: np.ndarray
    rhs: np.ndarray
    basis: np.ndarray
    stat: np.ndarray
    beta: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    n_struct: int


@dataclass
class LpResult:
    status: LpStatus
    primal: np.ndarray
    objective: float
    basis: SimplexBasis | None
    iterations: int
    snapshot: SimplexSnapshot | None = None


@dataclass
class LpProblem:
    """Instance rows plus appended cut rows and node-local bound overrides."""

    inst: MipInstance
    extra_rows: tuple[LinearRow, ...] = ()
    local_lower: np.ndarray | None = None
    local_upper: np.ndarray | None = None
    rhs_override: np.ndarray | None = None

    def build_arrays(self):
        n = self.inst.num_vars
        base = self.inst.dense_matrix()
        if self.extra_rows:
            extra = np.zeros((len(self.extra_rows), n))
            for i, row in enumerate(self.extra_rows):
                for j, c in row.coefs:
                    extra[i, j] = c
            mat = np.vstack([base, extra])
        else:
            mat = np.array(base)
        rhs = np.array(self.rhs_override) if self.rhs_override is not None \
            else np.array(self.inst.rhs_array())
        if self.extra_rows:
            rhs = np.concatenate([rhs, [row.rhs for row in self.extra_rows]])
        senses = list(self.inst.senses()) + [row.sense for row in self.extra_rows]
        lo = np.array(self.local_lower) if self.local_lower is not None \
            else np.array(self.inst.lower)
        hi = np.array(self.local_upper) if self.local_upper is not None \
            else np.array(self.inst.upper)
        return mat, senses, rhs, lo, hi, np.array(self.inst.objective)


def _slack_bounds(senses) -> tuple[np.ndarray, np.ndarray]:
    m = len(senses)
    lo = np.zeros(m)
    hi = np.zeros(m)
    for i, s in enumerate(senses):
        if s is Sense.LE:
            lo[i], hi[i] = 0.0, INF
        elif s is Sense.GE:
            lo[i], hi[i] = -INF, 0.0
        else:
            lo[i], hi[i] = 0.0, 0.0
    return lo, hi


def _nonbasic_status(lo: float, hi: float) -> int:
    if lo == hi:
        return FIXED
    if lo > -INF:
        return AT_LOWER
    if hi < INF:
        return AT_UPPER
    return FREE


class _Simplex:
    def __init__(self, mat, senses, rhs, lo, hi, cost, kernels: Kernels,
                 bland_after: int):
        self.m, self.n = mat.shape
        slo, shi = _slack_bounds(senses)
        self.lo = np.concatenate([lo, slo])
        self.hi = np.concatenate([hi, shi])
        self.cost = np.concatenate([cost, np.zeros(self.m)])
        self.ncols = self.n + self.m
        self.all_cols = np.hstack([mat, np.eye(self.m)])
        self.b = np.asarray(rhs, dtype=float)
        self.k = kernels
        self.bland_after = bland_after
        self.iterations = 0

    # -- basis management ---------------------------------------------------

    def cold_start(self):
        self.tab = np.ascontiguousarray(self.all_cols)
        self.rhs = self.b.copy()
        self.basis = np.arange(self.n, self.ncols, dtype=np.int64)
        self.stat = np.empty(self.ncols, dtype=np.int8)
        for j in range(self.ncols):
            self.stat[j] = _nonbasic_status(self.lo[j], self.hi[j])
        self.stat[self.basis] = BASIC

    def warm_start(self, token: SimplexBasis) -> bool:
        basis = np.array(token.basis, dtype=np.int64)
        stat = np.array(token.stat, dtype=np.int8)
        if token.ncols > self.ncols or len(basis) > self.m:
            return False
        if token.ncols < self.ncols:
            # Rows were appended since the token was taken: their slacks
            # start basic, everything else keeps its status.
            extra = self.ncols - token.ncols
            if extra != self.m - len(basis):
                return False
            new_slacks = np.arange(token.ncols, self.ncols, dtype=np.int64)
            basis = np.concatenate([basis, new_slacks])
            stat = np.concatenate([stat, np.full(extra, BASIC, dtype=np.int8)])
        if len(np.unique(basis)) != self.m or basis.min() < 0 or basis.max() >= self.ncols:
            return False
        stat[basis] = BASIC
        in_basis = set(basis.tolist())
        for j in range(self.ncols):
            if stat[j] == BASIC and j not in in_basis:
                stat[j] = _nonbasic_status(self.lo[j], self.hi[j])
        # Re-derive nonbasic sides that became invalid under the new bounds.
        for j in range(self.ncols):
            s = stat[j]
            if s == BASIC:
                continue
            if self.lo[j] == self.hi[j]:
                stat[j] = FIXED
            elif s == FIXED:
                stat[j] = _nonbasic_status(self.lo[j], self.hi[j])
            elif s == AT_LOWER and self.lo[j] == -INF:
                stat[j] = AT_UPPER if self.hi[j] < INF else FREE
            elif s == AT_UPPER and self.hi[j] == INF:
                stat[j] = AT_LOWER if self.lo[j] > -INF else FREE
        try:
            B = self.all_cols[:, basis]
            self.tab = np.ascontiguousarray(np.linalg.solve(B, self.all_cols))
            self.rhs = np.linalg.solve(B, self.b)
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(self.tab)):
            return False
        self.basis = basis
        self.stat = stat
        return True

    # -- iteration pieces ---------------------------------------------------

    def nonbasic_values(self) -> np.ndarray:
        vals = np.zeros(self.ncols)
        at_lo = (self.stat == AT_LOWER) | (self.stat == FIXED)
        vals[at_lo] = self.lo[at_lo]
        at_up = self.stat == AT_UPPER
        vals[at_up] = self.hi[at_up]
        return vals

    def compute_beta(self, vals: np.ndarray) -> np.ndarray:
        beta = self.rhs.copy()
        nz = np.nonzero((self.stat != BASIC) & (vals != 0.0))[0].astype(np.int64)
        if len(nz):
            self.k.subtract_scaled_columns(beta, self.tab, nz, vals[nz])
        return beta

    def primal_point(self, beta: np.ndarray, vals: np.ndarray) -> np.ndarray:
        x = vals.copy()
        x[self.basis] = beta
        return x

    def run(self, iter_limit: int):
        """Returns (status, beta) with beta valid for OPTIMAL/ITER_LIMIT."""
        bland = self.bland_after <= 0
        degen_streak = 0
        while True:
            vals = self.nonbasic_values()
            beta = self.compute_beta(vals)
            lB = self.lo[self.basis]
            uB = self.hi[self.basis]
            below = beta < lB - FEAS_TOL
            above = beta > uB + FEAS_TOL
            phase1 = bool(below.any() or above.any())

            if phase1:
                w = np.zeros(self.m)
                w[above] = 1.0
                w[below] = -1.0
                d = np.zeros(self.ncols)
                self.k.accumulate_rowsum(d, w, self.tab)
            else:
                d = self.cost.copy()
                w = self.cost[self.basis].copy()
                self.k.accumulate_rowsum(d, w, self.tab)

            can_incr = (self.stat == AT_LOWER) | (self.stat == FREE)
            can_decr = (self.stat == AT_UPPER) | (self.stat == FREE)
            elig_incr = can_incr & (d < -DCOST_TOL)
            elig_decr = can_decr & (d > DCOST_TOL)
            elig = elig_incr | elig_decr

            if not elig.any():
                if phase1:
                    return LpStatus.INFEASIBLE, beta
                return LpStatus.OPTIMAL, beta
            if self.iterations >= iter_limit:
                return LpStatus.ITER_LIMIT, beta

            if bland:
                j = int(np.nonzero(elig)[0][0])
            else:
                score = np.where(elig, np.abs(d), -1.0)
                j = int(np.argmax(score))
            delta = 1.0 if elig_incr[j] else -1.0

            # Ratio test: first breakpoint along the entering direction.
            g = -delta * self.tab[:, j]
            t = np.full(self.m, INF)
            feas = ~(below | above)
            with np.errstate(divide="ignore", invalid="ignore"):
                mask = below & (g > PIVOT_TOL)
                t[mask] = (lB[mask] - beta[mask]) / g[mask]
                mask = above & (g < -PIVOT_TOL)
                t[mask] = (uB[mask] - beta[mask]) / g[mask]
                mask = feas & (g > PIVOT_TOL) & (uB < INF)
                t[mask] = (uB[mask] - beta[mask]) / g[mask]
                mask = feas & (g < -PIVOT_TOL) & (lB > -INF)
                t[mask] = (lB[mask] - beta[mask]) / g[mask]
            np.maximum(t, 0.0, out=t)

            t_rows = float(t.min()) if self.m else INF
            t_flip = self.hi[j] - self.lo[j] \
                if (self.lo[j] > -INF and self.hi[j] < INF) else INF

            if t_rows == INF and t_flip == INF:
                if phase1:
                    raise SimplexTrouble("phase-1 ray without breakpoint")
                return LpStatus.UNBOUNDED, beta

            if t_flip <= t_rows:
                self.stat[j] = AT_UPPER if self.stat[j] == AT_LOWER else AT_LOWER
                step = t_flip
            else:
                cand = np.nonzero(t == t_rows)[0]
                r = int(cand[np.argmin(self.basis[cand])])
                leaving = int(self.basis[r])
                if self.lo[leaving] == self.hi[leaving]:
                    leave_stat = FIXED
                elif below[r]:
                    leave_stat = AT_LOWER
                elif above[r]:
                    leave_stat = AT_UPPER
                else:
                    leave_stat = AT_UPPER if g[r] > 0 else AT_LOWER
                self.k.eliminate(self.tab, self.rhs, r, j)
                self.basis[r] = j
                self.stat[j] = BASIC
                self.stat[leaving] = leave_stat
                step = t_rows

            self.iterations += 1
            if step <= DEGEN_TOL:
                degen_streak += 1
                if degen_streak >= self.bland_after:
                    bland = True
            else:
                degen_streak = 0
                bland = self.bland_after <= 0


def solve_arrays(mat, senses, rhs, lo, hi, cost, warm, iter_limit,
                  want_snapshot, kernels, bland_after) -> LpResult:
    sx = _Simplex(mat, senses, rhs, lo, hi, cost, kernels, bland_after)
    if warm is None or not sx.warm_start(warm):
        sx.cold_start()
    try:
        status, beta = sx.run(iter_limit)
    except SimplexTrouble:
        # Refactorize from scratch with Bland from the first pivot; if the
        # breakdown persists, report the pivot budget as exhausted.
        sx = _Simplex(mat, senses, rhs, lo, hi, cost, kernels, bland_after=0)
        sx.cold_start()
        try:
            status, beta = sx.run(iter_limit)
        except SimplexTrouble:
            status, beta = LpStatus.ITER_LIMIT, sx.compute_beta(sx.nonbasic_values())

    vals = sx.nonbasic_values()
    x = sx.primal_point(beta, vals)
    n = sx.n
    primal = x[:n]
    if status is LpStatus.OPTIMAL:
        objective = float(np.dot(cost, primal))
    elif status is LpStatus.INFEASIBLE:
        objective = INF
    elif status is LpStatus.UNBOUNDED:
        objective = -INF
    else:
        objective = float(np.dot(cost, primal))
    token = SimplexBasis(sx.basis.copy(), sx.stat.copy())
    snapshot = None
    if want_snapshot and status is LpStatus.OPTIMAL:
        snapshot = SimplexSnapshot(
            tab=sx.tab.copy(), rhs=sx.rhs.copy(), basis=sx.basis.copy(),
            stat=sx.stat.copy(), beta=beta.copy(), lo=sx.lo.copy(),
            hi=sx.hi.copy(), n_struct=n)
    return LpResult(status, primal, objective, token, sx.iterations, snapshot)


def solve_lp(problem: LpProblem, warm: SimplexBasis | None = None,
             iter_limit: int = DEFAULT_ITER_LIMIT, want_snapshot: bool = False,
             kernels: Kernels | str | None = None,
             bland_after: int = DEFAULT_BLAND_AFTER) -> LpResult:
    """Solve the LP relaxation; deterministic for fixed inputs.

    ITER_LIMIT is returned (never raised) when the pivot budget runs out.
    """
    if not isinstance(kernels, Kernels):
        kernels = get_kernels(kernels)
    mat, senses, rhs, lo, hi, cost = problem.build_arrays()
    return solve_arrays(mat, senses, rhs, lo, hi, cost, warm, iter_limit,
                         want_snapshot, kernels, bland_after)
