"""Random-graph experiment: exact rho and D_cap for small uniform graphs."""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..core import Subset
from ..spaces import graph_stars
from .budget import SearchBudget
from .rho import solve_rho
from .sidecount import solve_side_count, union_closure

SCOPE_NOTE = (
    "The claim that rho(G) grows linearly in N for random graphs is asymptotic and is not "
    "checked here; only exact values at small N are reported."
)


@dataclass
class ExperimentReport:
    sizes: tuple[int, ...]
    samples: int
    seed: int
    rows: list[dict] = field(default_factory=list)
    rejected: dict = field(default_factory=dict)
    note: str = SCOPE_NOTE

    def distribution(self, n: int) -> Counter:
        return Counter((r["rho"], r["d_cap"]) for r in self.rows if r["N"] == n)

    def violations(self) -> list[dict]:
        """Rows breaking 1 <= rho <= D_cap <= rho^2 or D_cap <= N (or not solved exactly)."""
        bad = []
        for r in self.rows:
            ok = r["exact"] and 1 <= r["rho"] <= r["d_cap"] <= r["rho"] ** 2 and r["d_cap"] <= r["N"]
            if not ok:
                bad.append(r)
        return bad


def _draw(n: int, rng: random.Random, stars_closure: set[int]) -> tuple[int, int, int]:
    """Uniform graph over [n] x [n], redrawn while trivial or a plain union of stars."""
    full = (1 << (n * n)) - 1
    trivial = unions = 0
    while True:
        bits = rng.getrandbits(n * n)
        if bits in (0, full):
            trivial += 1
        elif bits in stars_closure:
            unions += 1
        else:
            return bits, trivial, unions


def _solve_one(job: tuple[int, int, SearchBudget]) -> dict:
    n, bits, budget = job
    space = graph_stars(n, n)
    a = Subset(space.ground, bits)
    rho = solve_rho(a, space, "auto", budget)
    dcap = solve_side_count(a, space, "intersections", budget)
    return {
        "N": n, "graph": a.to_string(), "rho": rho.value, "d_cap": dcap.value,
        "exact": rho.exact and dcap.exact, "rho_method": rho.detail.get("method"),
    }


def random_graph_experiment(sizes=(2, 3), samples: int = 20, seed: int = 0,
                            budget: SearchBudget | None = None, jobs: int = 1) -> ExperimentReport:
    """Sample graphs, solve both measures exactly, and collect the results.

    Draws that are trivial or already a union of stars (where both measures
    are 0) are redrawn and counted in ``rejected``.  Results do not depend
    on ``jobs``: graphs are drawn up front from one seeded generator.
    """
    budget = budget or SearchBudget(max_depth=8)
    rng = random.Random(seed)
    report = ExperimentReport(tuple(sizes), samples, seed)
    work = []
    for n in sizes:
        closure = set(union_closure(list(graph_stars(n, n).masks)))
        trivial = unions = 0
        for _ in range(samples):
            bits, t, u = _draw(n, rng, closure)
            trivial += t
            unions += u
            work.append((n, bits, budget))
        report.rejected[n] = {"trivial": trivial, "union_of_stars": unions}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            report.rows = list(pool.map(_solve_one, work))
    else:
        report.rows = [_solve_one(w) for w in work]
    return report
