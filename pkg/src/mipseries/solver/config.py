"""Solver configuration, per-component statistics and the solve outcome."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..model import Solution
from .history import GlobalHistory, VariableHistory


class BranchingRule(Enum):
    RELIABILITY = "RELIABILITY"
    PSEUDOCOST = "PSEUDOCOST"
    FULLSTRONG = "FULLSTRONG"


class SolveStatus(Enum):
    OPTIMAL = "OPTIMAL"
    TIME_LIMIT = "TIME_LIMIT"
    NODE_LIMIT = "NODE_LIMIT"
    INFEASIBLE = "INFEASIBLE"


# component roster names (shared with the turn-off ledger)
HEUR_ROUNDING = "rounding"
HEUR_COMPLETESOL = "completesol"
SEP_GOMORY = "gomory"
PRE_BOUND_TIGHTEN = "bound_tighten"
PRE_COEF_TIGHTEN = "coef_tighten"

ALL_HEURISTICS = frozenset({HEUR_ROUNDING, HEUR_COMPLETESOL})
ALL_PRESOLVERS = frozenset({PRE_BOUND_TIGHTEN, PRE_COEF_TIGHTEN})
ALL_SEPARATORS = frozenset({SEP_GOMORY})


@dataclass
class SolverConfig:
    branching_rule: BranchingRule = BranchingRule.RELIABILITY
    reliability_threshold: int = 5
    use_cuts_root: bool = True
    use_cuts_tree: bool = True
    enabled_heuristics: frozenset = ALL_HEURISTICS
    enabled_presolvers: frozenset = ALL_PRESOLVERS
    enabled_separators: frozenset = ALL_SEPARATORS
    completesol_node_limit: int = 500
    completesol_max_improving: int | None = 5
    strong_branch_candidate_limit: int | None = None
    strong_branch_iter_limit: int = 500
    node_limit: int | None = None
    seed: int = 0
    feas_tol: float = 1e-6
    int_tol: float = 1e-6
    gap_tol: float = 1e-6
    cut_rounds_root: int = 3
    cut_rounds_tree: int = 1
    max_cuts_per_round: int = 20
    lp_iter_limit: int = 20000
    bland_after: int = 50
    plunge_limit: int = 3
    det_work_per_second: float | None = None   # None -> wall clock
    kernels: str | None = None

    def __post_init__(self):
        if self.reliability_threshold < 1:
            raise ValueError("reliability_threshold must be >= 1")
        if self.completesol_node_limit < 0:
            raise ValueError("completesol_node_limit must be >= 0")
        if self.node_limit is not None and self.node_limit < 0:
            raise ValueError("node_limit must be >= 0")


@dataclass
class HeuristicStats:
    calls: int = 0
    solutions_found: int = 0
    best_solutions_found: int = 0
    time: float = 0.0


@dataclass
class SeparatorStats:
    cuts_generated: int = 0
    time: float = 0.0


@dataclass
class PresolverStats:
    changes: int = 0
    time: float = 0.0


@dataclass
class SolverStats:
    nodes: int = 0
    sb_lp_solves: int = 0
    lp_iterations: int = 0
    separators: dict = field(default_factory=dict)
    heuristics: dict = field(default_factory=dict)
    presolvers: dict = field(default_factory=dict)
    time_to_first_incumbent: float | None = None
    hint_converted: bool = False


def fresh_stats() -> SolverStats:
    stats = SolverStats()
    for name in sorted(ALL_SEPARATORS):
        stats.separators[name] = SeparatorStats()
    for name in sorted(ALL_HEURISTICS):
        stats.heuristics[name] = HeuristicStats()
    for name in sorted(ALL_PRESOLVERS):
        stats.presolvers[name] = PresolverStats()
    return stats


@dataclass
class SolveOutcome:
    status: SolveStatus
    primal_bound: float
    dual_bound: float
    best_solution: Solution | None
    stats: SolverStats
    histories: dict[str, VariableHistory]
    global_history: GlobalHistory
    solve_time: float
