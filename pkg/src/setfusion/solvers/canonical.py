"""Canonical cover of NEQ(N) as a minimum separating family of bipartitions."""

from __future__ import annotations

from itertools import product

from ..fusion import Lambda, canonical_filters, covers
from ..spaces import neq
from .budget import BUDGET_EXHAUSTED, EXACT, BudgetExhausted, ComplexityResult, Meter, SearchBudget

NEQ_CAP = 20


def _splits(sizes: tuple[int, ...]):
    """Ways to cut each class in two; the orientation of each cut is irrelevant."""
    return product(*(range(s // 2 + 1) for s in sizes))


def separating_bipartitions(n: int, meter: Meter | None = None) -> list[frozenset]:
    """Fewest bipartitions of [n] splitting every pair of distinct elements.

    The search state is the partition induced by the cuts chosen so far.
    What remains to be done depends only on the multiset of class sizes, so
    states are memoized on that; a class of size s needs at least
    ceil(log2 s) further cuts.
    """
    meter = meter or Meter(SearchBudget(max_depth=NEQ_CAP))
    failed: set[tuple[tuple[int, ...], int]] = set()

    def rec(classes: list[list[int]], remaining: int, cuts: list[frozenset]):
        sizes = tuple(sorted((len(c) for c in classes), reverse=True))
        if sizes[0] <= 1:
            return list(cuts)
        if sizes[0] > 1 << remaining or (sizes, remaining) in failed:
            return None
        meter.tick()
        live = [c for c in classes if len(c) > 1]
        seen = set()
        for split in _splits(tuple(len(c) for c in live)):
            parts = []
            side = set()
            for c, t in zip(live, split):
                side.update(c[:t])
                parts.extend(p for p in (c[:t], c[t:]) if p)
            shape = tuple(sorted((len(p) for p in parts), reverse=True))
            if shape in seen:
                continue
            seen.add(shape)
            got = rec(parts, remaining - 1, cuts + [frozenset(side)])
            if got is not None:
                return got
        failed.add((sizes, remaining))
        return None

    k = 0
    while True:
        got = rec([list(range(1, n + 1))], k, [])
        if got is not None:
            return got
        k += 1


def neq_lambda(n: int, cuts: list[frozenset]) -> Lambda:
    """Pairs (E, complement of E within the diagonal), one per bipartition."""
    g = neq(n)
    universe = g.ground.full ^ g.bits
    diag = lambda u: 1 << ((u - 1) * n + (u - 1))  # noqa: E731
    pairs = []
    for side in cuts:
        e = sum(diag(u) for u in side)
        pairs.append((e, universe ^ e))
    return Lambda(universe, pairs)


def solve_rho_can_neq(n: int, budget: SearchBudget | None = None) -> ComplexityResult:
    """Canonical cover complexity of NEQ(N); witness is the pair family."""
    budget = budget or SearchBudget(max_depth=NEQ_CAP)
    if not 2 <= n <= NEQ_CAP:
        raise ValueError(f"N must lie in [2, {NEQ_CAP}]")
    meter = Meter(budget)
    try:
        cuts = separating_bipartitions(n, meter)
    except BudgetExhausted:
        return ComplexityResult("rho_can_neq", BUDGET_EXHAUSTED, 0, spent=meter.spent(), budget=budget.as_dict())
    lam = neq_lambda(n, cuts)
    for _, f in canonical_filters(neq(n)):
        assert any(covers(f, p) for p in lam.pairs)
    return ComplexityResult("rho_can_neq", EXACT, len(lam), witness=lam, spent=meter.spent(),
                            budget=budget.as_dict(), detail={"bipartitions": [sorted(c) for c in cuts]})
