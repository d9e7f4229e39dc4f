"""Discrete complexity D: shortest union/intersection sequences, single or multi-target."""

from __future__ import annotations

from typing import Sequence

from ..constructions import INTER, UNION, Construction, Ref, Step, g, s
from ..core import DiscreteSpace, Subset
from .budget import (
    BUDGET_EXHAUSTED, EXACT, INFINITE, LOWER_BOUND_ONLY, BudgetExhausted, ComplexityResult, Meter,
    SearchBudget,
)
from .finiteness import finiteness_test


def solve_discrete(targets: Sequence[Subset] | Subset, space: DiscreteSpace,
                   budget: SearchBudget | None = None) -> ComplexityResult:
    """Minimum number of steps generating every target (D, or D_multi for several).

    Iterative deepening; a search state is the set of distinct values produced
    so far, which determines everything that can still be built.  A target
    that is itself a generator still costs one step (a self-union).
    """
    budget = budget or SearchBudget()
    if isinstance(targets, Subset):
        targets = [targets]
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target")
    measure = "D" if len(targets) == 1 else "D_multi"
    for t in targets:
        if t.ground != space.ground:
            raise ValueError("target and space live over different ground sets")
        fin = finiteness_test(t, space)
        if not fin:
            return ComplexityResult(measure, INFINITE, None, detail={"finiteness_witness": fin.pair},
                                    budget=budget.as_dict())

    want = []
    for t in targets:
        if t.bits not in want:
            want.append(t.bits)
    gen_vals: list[int] = []
    gen_refs: list[Ref] = []
    for i, m in enumerate(space.masks):
        if m not in gen_vals:
            gen_vals.append(m)
            gen_refs.append(g(i))
    gen_set = set(gen_vals)
    meter = Meter(budget)
    start = len(want)
    depth = start
    found = None
    try:
        while depth <= budget.max_depth:
            found = _search(depth, want, gen_vals, gen_refs, gen_set, meter)
            if found is not None:
                break
            depth += 1
    except BudgetExhausted:
        return ComplexityResult(measure, BUDGET_EXHAUSTED, depth, spent=meter.spent(), budget=budget.as_dict())
    if found is None:
        return ComplexityResult(measure, LOWER_BOUND_ONLY, depth, spent=meter.spent(), budget=budget.as_dict())

    steps, values = found
    outputs = tuple(values.index(t.bits) for t in targets)
    c = Construction(space, tuple(steps), outputs if len(targets) > 1 else (outputs[0],))
    vals = c.step_values()
    assert all(vals[o] == t.bits for o, t in zip(c.outputs, targets))
    assert len(c.steps) == depth
    return ComplexityResult(measure, EXACT, depth, witness=c, spent=meter.spent(), budget=budget.as_dict())


def _search(depth, want, gen_vals, gen_refs, gen_set, meter):
    steps: list[Step] = []
    values: list[int] = []
    failed: dict[frozenset, int] = {}
    want_set = set(want)

    def dfs(remaining: int) -> bool:
        produced = set(values)
        missing = want_set - produced
        if not missing:
            return True
        if len(missing) > remaining:
            return False
        key = frozenset(produced)
        if failed.get(key, -1) >= remaining:
            return False
        meter.tick()
        avail = list(zip(gen_vals, gen_refs)) + [(v, s(i)) for i, v in enumerate(values)]
        must_hit = len(missing) == remaining
        for i, (x, rx) in enumerate(avail):
            for j in range(i, len(avail)):
                y, ry = avail[j]
                for op in (UNION, INTER):
                    if i == j and op == INTER:
                        continue
                    v = x | y if op == UNION else x & y
                    if v in produced:
                        continue
                    if v in gen_set and v not in missing:
                        continue
                    if must_hit and v not in missing:
                        continue
                    if i == j and v not in missing:
                        continue
                    steps.append(Step(op, rx, ry))
                    values.append(v)
                    if dfs(remaining - 1):
                        return True
                    steps.pop()
                    values.pop()
        failed[key] = max(failed.get(key, -1), remaining)
        return False

    return (list(steps), list(values)) if dfs(depth) else None
