"""Collision-tolerant minimum-time trajectory planning on a built-in MILP solver."""

from .errors import (ConfigError, CtplanError, HorizonExhausted, ModelError,
                     NodeLimitReached, NumericalError, ParseError,
                     PlannerError, ProblemError, UnboundedProblemError)
from .model import (BigM, PlanningConfig, PlanningMode, VariableLayout,
                    big_m_bound, build_collision_free, build_collision_tolerant,
                    with_effort_objective)
from .oracle import BruteForceResult, ReplayResult, brute_force_plan, replay
from .planner import (ComparisonEntry, ComparisonReport, SweepPoint,
                      SweepResult, TrajectoryPlan, analytic_min_time,
                      compare_report, damage_constrained_search,
                      default_tau_upper, goal_sweep, min_time_search)
from .solver import (EQ, GE, LE, LinearConstraint, LpProblem, LpSolution,
                     LpStatus, MilpProblem, MilpSolution, MilpStatus,
                     SolverOptions, find_integer_feasible, solve_lp,
                     solve_milp)

__version__ = "0.1.0"

__all__ = [
    "BigM", "BruteForceResult", "ComparisonEntry", "ComparisonReport",
    "ConfigError", "CtplanError", "EQ", "GE", "HorizonExhausted", "LE",
    "LinearConstraint", "LpProblem", "LpSolution", "LpStatus", "MilpProblem",
    "MilpSolution", "MilpStatus", "ModelError", "NodeLimitReached",
    "NumericalError", "ParseError", "PlannerError", "PlanningConfig",
    "PlanningMode", "ProblemError", "ReplayResult", "SolverOptions",
    "SweepPoint", "SweepResult", "TrajectoryPlan", "UnboundedProblemError",
    "VariableLayout", "analytic_min_time", "big_m_bound", "brute_force_plan",
    "build_collision_free", "build_collision_tolerant", "compare_report",
    "damage_constrained_search", "default_tau_upper", "find_integer_feasible",
    "goal_sweep", "min_time_search", "replay", "solve_lp", "solve_milp",
    "with_effort_objective",
]
