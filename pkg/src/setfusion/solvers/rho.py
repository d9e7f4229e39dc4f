"""Cover complexity rho and its semi-ultra-filter variant.

Three exact methods:

* ``lambda_search`` tries pair families of growing size and checks each by
  the closure procedure;
* ``set_cover`` materializes the cover graph and solves minimum set cover;
* ``hitting_set`` grows a list of semi-filters that must be covered, solving
  a minimum hitting set over it and adding the closure state of any element
  the current answer fails on.  It handles complements too large to
  enumerate semi-filters over.

Candidate pairs for the search methods are normalized to ``E | H == U``:
replacing E by E | (U - H) keeps E n H and only enlarges E, so every
semi-filter covered before is still covered.
"""

from __future__ import annotations

from itertools import combinations

from ..core import DiscreteSpace, Subset, iter_bits, popcount
from ..fusion import (
    Lambda, SemiFilter, build_cover_graph, candidate_pairs, covers, enumerate_semifilters, is_above,
    minimize, verify_lambda,
)
from .budget import (
    BUDGET_EXHAUSTED, EXACT, INFINITE, LOWER_BOUND_ONLY, BudgetExhausted, ComplexityResult, Meter,
    SearchBudget,
)
from .finiteness import finiteness_test

METHODS = ("lambda_search", "set_cover", "hitting_set", "auto")
LAMBDA_SEARCH_CAP = 6
HITTING_SET_CAP = 9


class ClosureChecker:
    """Closure procedure specialised to one target, for repeated checks.

    Only elements of A are examined: for w outside A the semi-filter of
    sets containing w is above w and preserves every pair, so the empty set
    is never derived there.
    """

    def __init__(self, a: Subset, space: DiscreteSpace):
        self.universe = a.ground.full ^ a.bits
        self.bases: list[tuple[int, list[int] | None]] = []
        for w in iter_bits(a.bits):
            base = [m & self.universe for m in space.masks if m >> w & 1]
            if any(b == 0 for b in base):
                self.bases.append((w, None))
            else:
                self.bases.append((w, list(minimize(base)) or [self.universe]))

    def state(self, w_base: list[int] | None, pairs) -> list[int] | None:
        if w_base is None:
            return None
        members = list(w_base)
        changed = True
        while changed:
            changed = False
            for e, h in pairs:
                c = e & h
                if (any(m & ~e == 0 for m in members) and any(m & ~h == 0 for m in members)
                        and not any(m & ~c == 0 for m in members)):
                    if c == 0:
                        return None
                    members = [m for m in members if c & ~m != 0] + [c]
                    changed = True
        return members

    def failures(self, pairs, first_only: bool = True) -> list[tuple[int, SemiFilter]]:
        out = []
        for w, base in self.bases:
            st = self.state(base, pairs)
            if st is not None:
                out.append((w, SemiFilter(self.universe, tuple(st))))
                if first_only:
                    break
        return out

    def valid(self, pairs) -> bool:
        return not self.failures(pairs)


def min_cover(sets: list[int], target: int, meter: Meter, start: int = 0, limit: int | None = None):
    """Fewest indices into ``sets`` whose union contains ``target``.

    Iterative deepening with branching on the item covered by the fewest
    sets; duplicate and strictly dominated sets are dropped first.  Returns
    the chosen indices (ascending) or ``None`` when ``limit`` is reached.
    """
    best_of: dict[int, int] = {}
    for i, row in enumerate(sets):
        row &= target
        if row and row not in best_of:
            best_of[row] = i
    rows = sorted(best_of)
    if len(rows) <= 3000:
        rows = [r for r in rows if not any(r != o and r & ~o == 0 for o in rows)]
    keep = sorted((best_of[r], r) for r in rows)
    if limit is None:
        limit = len(keep)
    failed: dict[int, int] = {}

    def rec(uncovered: int, k: int, chosen: list[int]):
        if uncovered == 0:
            return list(chosen)
        if k == 0 or failed.get(uncovered, -1) >= k:
            return None
        meter.tick()
        best_item, best_opts = None, None
        widest = 0
        for item in iter_bits(uncovered):
            bit = 1 << item
            opts = [(i, r) for i, r in keep if r & bit]
            if best_opts is None or len(opts) < len(best_opts):
                best_item, best_opts = item, opts
            if not opts:
                break
        if not best_opts:
            failed[uncovered] = k
            return None
        widest = max(popcount(r & uncovered) for _, r in keep)
        if widest * k < popcount(uncovered):
            failed[uncovered] = k
            return None
        for i, r in best_opts:
            chosen.append(i)
            got = rec(uncovered & ~r, k - 1, chosen)
            chosen.pop()
            if got is not None:
                return got
        failed[uncovered] = k
        return None

    for k in range(start, limit + 1):
        got = rec(target, k, [])
        if got is not None:
            return sorted(got)
    return None


def solve_rho(a: Subset, space: DiscreteSpace, method: str = "auto", budget: SearchBudget | None = None,
              ultra: bool = False) -> ComplexityResult:
    """Exact cover complexity (or rho_ultra) with a verified witness family."""
    budget = budget or SearchBudget()
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if a.ground != space.ground:
        raise ValueError("target and space live over different ground sets")
    if a.is_trivial():
        raise ValueError("cover complexity needs a non-trivial target")
    measure = "rho_ultra" if ultra else "rho"
    fin = finiteness_test(a, space)
    if not fin:
        return ComplexityResult(measure, INFINITE, None, detail={"finiteness_witness": fin.pair},
                                budget=budget.as_dict())
    size_u = popcount(a.ground.full ^ a.bits)
    if method == "auto":
        if size_u <= 4:
            method = "set_cover"
        elif ultra:
            method = "lambda_search"
        else:
            method = "hitting_set"
    meter = Meter(budget)
    run = {"lambda_search": _lambda_search, "set_cover": _set_cover, "hitting_set": _hitting_set}[method]
    depth = 0
    try:
        lam, depth = run(a, space, budget, meter, ultra)
    except BudgetExhausted as exc:
        depth = getattr(exc, "depth", 0)
        return ComplexityResult(measure, BUDGET_EXHAUSTED, depth, spent=meter.spent(),
                                budget=budget.as_dict(), detail={"method": method})
    if lam is None:
        return ComplexityResult(measure, LOWER_BOUND_ONLY, depth, spent=meter.spent(),
                                budget=budget.as_dict(), detail={"method": method})
    ok, witness = verify_lambda(a, space, lam, mode="enumerate" if ultra else "closure", ultra=ultra)
    assert ok, f"solver produced an invalid pair family (witness {witness})"
    return ComplexityResult(measure, EXACT, len(lam), witness=lam, spent=meter.spent(),
                            budget=budget.as_dict(), detail={"method": method})


def _exhausted(depth: int) -> BudgetExhausted:
    exc = BudgetExhausted("budget exhausted")
    exc.depth = depth
    return exc


def _ultra_coverage(a: Subset, space: DiscreteSpace, pairs):
    universe = a.ground.full ^ a.bits
    filters = [f for f in enumerate_semifilters(universe, ultra_only=True)
               if any(is_above(f, w, space, universe) for w in iter_bits(a.bits))]
    rows = []
    for p in pairs:
        row = 0
        for j, f in enumerate(filters):
            if covers(f, p):
                row |= 1 << j
        rows.append(row)
    return rows, (1 << len(filters)) - 1


def _lambda_search(a, space, budget, meter, ultra):
    universe = a.ground.full ^ a.bits
    if popcount(universe) > LAMBDA_SEARCH_CAP:
        raise ValueError(f"lambda_search is limited to |U| <= {LAMBDA_SEARCH_CAP}")
    cands = candidate_pairs(universe, normalized=True)
    if ultra:
        rows, everything = _ultra_coverage(a, space, cands)

        def good(combo):
            got = 0
            for i in combo:
                got |= rows[i]
            return got == everything
    else:
        checker = ClosureChecker(a, space)

        def good(combo):
            return checker.valid([cands[i] for i in combo])

    for k in range(0, budget.max_depth + 1):
        try:
            for combo in combinations(range(len(cands)), k):
                meter.tick()
                if good(combo):
                    return Lambda(universe, [cands[i] for i in combo]), k
        except BudgetExhausted:
            raise _exhausted(k)
    return None, budget.max_depth + 1


def _set_cover(a, space, budget, meter, ultra):
    graph = build_cover_graph(a, space, ultra=ultra)
    universe = a.ground.full ^ a.bits
    everything = (1 << len(graph.filters)) - 1
    try:
        chosen = min_cover(graph.incidence, everything, meter, 0, budget.max_depth)
    except BudgetExhausted:
        raise _exhausted(0)
    if chosen is None:
        return None, budget.max_depth + 1
    return Lambda(universe, [graph.pairs[i] for i in chosen]), len(chosen)


def _hitting_set(a, space, budget, meter, ultra):
    if ultra:
        raise ValueError("hitting_set handles plain semi-filters only")
    universe = a.ground.full ^ a.bits
    if popcount(universe) > HITTING_SET_CAP:
        raise ValueError(f"hitting_set is limited to |U| <= {HITTING_SET_CAP}")
    cands = candidate_pairs(universe, normalized=True)
    checker = ClosureChecker(a, space)
    constraints: list[SemiFilter] = []
    rows = [0] * len(cands)
    lower = 0
    chosen: list[int] = []
    while True:
        fails = checker.failures([cands[i] for i in chosen], first_only=False)
        if not fails:
            return Lambda(universe, [cands[i] for i in chosen]), len(chosen)
        for _, f in fails:
            if f in constraints:
                continue
            j = len(constraints)
            constraints.append(f)
            for i, p in enumerate(cands):
                if covers(f, p):
                    rows[i] |= 1 << j
        try:
            got = min_cover(rows, (1 << len(constraints)) - 1, meter, lower, budget.max_depth)
        except BudgetExhausted:
            raise _exhausted(lower)
        if got is None:
            return None, budget.max_depth + 1
        chosen = got
        lower = len(chosen)
