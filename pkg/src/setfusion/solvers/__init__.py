"""Exact solvers for every complexity measure, with budgets and witnesses."""

from __future__ import annotations

from .bounds import BoundsReport, bounds_report, counting_bound
from .budget import ComplexityResult, SearchBudget
from .canonical import separating_bipartitions, solve_rho_can_neq
from .discrete import solve_discrete
from .experiments import ExperimentReport, random_graph_experiment
from .finiteness import FinitenessWitness, finiteness_test
from .rho import solve_rho
from .sidecount import solve_side_count

__all__ = [
    "BoundsReport", "ComplexityResult", "ExperimentReport", "FinitenessWitness", "SearchBudget",
    "bounds_report", "counting_bound", "finiteness_test", "random_graph_experiment",
    "separating_bipartitions", "solve_discrete", "solve_rho", "solve_rho_can_neq", "solve_side_count",
]
