"""Search budgets and the result record every solver returns."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

EXACT = "exact"
LOWER_BOUND_ONLY = "lower_bound_only"
INFINITE = "infinite"
BUDGET_EXHAUSTED = "budget_exhausted"
STATUSES = (EXACT, LOWER_BOUND_ONLY, INFINITE, BUDGET_EXHAUSTED)

MEASURES = ("D", "D_cap", "D_cup", "D_multi", "rho", "rho_ultra", "rho_can_neq", "D_circ_cap")


@dataclass(frozen=True)
class SearchBudget:
    """Depth cap, explored-state cap and wall-clock cap (seconds)."""

    max_depth: int = 3
    max_states: int = 10**8
    max_seconds: float = 300.0

    def __post_init__(self):
        if self.max_depth < 1 or self.max_states < 1 or self.max_seconds <= 0:
            raise ValueError("budget limits must be positive")

    def as_dict(self) -> dict:
        return {"max_depth": self.max_depth, "max_states": self.max_states, "max_seconds": self.max_seconds}


class BudgetExhausted(Exception):
    pass


class Meter:
    """Counts explored states against a budget."""

    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.states = 0
        self.start = time.monotonic()

    def tick(self, n: int = 1) -> None:
        self.states += n
        if self.states > self.budget.max_states:
            raise BudgetExhausted("state budget exhausted")
        if self.elapsed() > self.budget.max_seconds:
            raise BudgetExhausted("time budget exhausted")

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def spent(self) -> dict:
        return {"states": self.states, "seconds": round(self.elapsed(), 3)}


@dataclass
class ComplexityResult:
    """Outcome of a solver run.

    ``value`` is the exact value when ``status == "exact"`` and otherwise the
    best lower bound proven before giving up (``None`` when infinite).
    """

    measure: str
    status: str
    value: int | None
    witness: Any = None
    spent: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def exact(self) -> bool:
        return self.status == EXACT
