"""mipseries: a compact MIP solver plus an orchestrator for solving ordered
series of similar instances with primal-solution reuse, branching-history
transfer, online parameter tuning and component turn-off."""

from . import harness, lp, model, reopt, solver, tuner, turnoff
from .harness import RunConfig, run_series
from .model import (Component, MipInstance, Sense, SeriesManifest, Solution,
                    SolutionStatus, check_feasibility, load_instance,
                    load_series, objective_value, perturb_series)
from .solver import BranchingRule, SolveOutcome, SolverConfig, SolveStatus, solve

__version__ = "0.1.0"

__all__ = [
    "BranchingRule", "Component", "MipInstance", "RunConfig", "Sense",
    "SeriesManifest", "Solution", "SolutionStatus", "SolveOutcome",
    "SolveStatus", "SolverConfig", "check_feasibility", "harness",
    "load_instance", "load_series", "lp", "model", "objective_value",
    "perturb_series", "reopt", "run_series", "solve", "solver", "tuner",
    "turnoff",
]
