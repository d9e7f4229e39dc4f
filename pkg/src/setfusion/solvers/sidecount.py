"""Intersection complexity D_cap and union complexity D_cup.

Only the counted operation costs anything.  For D_cap the search keeps the
family F = generators + intersections made so far; every intersection takes
its operands from the distinct unions of F, and a target is reached when it
equals the union of the members of F it contains.  D_cup is the same search
on complements with the two operations swapped.
"""

from __future__ import annotations

from ..constructions import INTER, UNION, Builder, Construction, Ref, Step, g
from ..core import DiscreteSpace, GroundSet, Subset, iter_bits
from .budget import (
    BUDGET_EXHAUSTED, EXACT, INFINITE, LOWER_BOUND_ONLY, BudgetExhausted, ComplexityResult, Meter,
    SearchBudget,
)
from ..spaces import graph_stars
from .finiteness import finiteness_test

SIDES = ("intersections", "unions")


def union_closure(family: list[int]) -> dict[int, int]:
    """Every distinct non-empty union of members of ``family``.

    Maps each value to the bit mask (over family indices) of one subfamily
    producing it; the first subfamily found in index order is kept.
    """
    closure: dict[int, int] = {}
    for i, f in enumerate(family):
        bit = 1 << i
        fresh = {f: bit} if f not in closure else {}
        for v, members in closure.items():
            w = v | f
            if w not in closure and w not in fresh:
                fresh[w] = members | bit
        closure.update(fresh)
    return closure


def _free_part(a: int, family: list[int]) -> int:
    out = 0
    for f in family:
        if f & ~a == 0:
            out |= f
    return out


def _last_step(a: int, outside: int, family: list[int], closure: dict[int, int]):
    """One more intersection X n Y completing ``a``, or ``None``.

    X must cover what is still missing; the best partner for X is the
    union of every member avoiding X's outside part.
    """
    missing = a & ~_free_part(a, family)
    for x in sorted(closure):
        if x & missing != missing:
            continue
        xo = x & outside
        y = 0
        for f in family:
            if f & xo == 0:
                y |= f
        if y & missing == missing:
            return x, y
    return None


def _members_of(y: int, family: list[int]) -> int:
    bits = 0
    for i, f in enumerate(family):
        if f & ~y == 0:
            bits |= 1 << i
    return bits


def _star_hint(a: Subset, space: DiscreteSpace) -> int | None:
    """Upper bound for graph targets over stars: one intersection per
    distinct row pattern (or column pattern), whichever is fewer."""
    ground = space.ground
    if ground.kind != "grid" or len(ground.dims) != 2:
        return None
    n_rows, n_cols = ground.dims
    if space.masks != graph_stars(n_rows, n_cols).masks:
        return None
    rows = {a.bits >> (i * n_cols) & ((1 << n_cols) - 1) for i in range(n_rows)}
    cols = set()
    for j in range(n_cols):
        cols.add(sum(1 << i for i in range(n_rows) if a.bits >> (i * n_cols + j) & 1))
    full_r, full_c = (1 << n_cols) - 1, (1 << n_rows) - 1
    return min(len(rows - {0, full_r}), len(cols - {0, full_c}))


def solve_side_count(a: Subset, space: DiscreteSpace, side: str = "intersections",
                     budget: SearchBudget | None = None, hint: bool = True) -> ComplexityResult:
    """Exact D_cap (``side="intersections"``) or D_cup (``side="unions"``)."""
    budget = budget or SearchBudget()
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    if a.ground != space.ground:
        raise ValueError("target and space live over different ground sets")
    measure = "D_cap" if side == "intersections" else "D_cup"
    fin = finiteness_test(a, space)
    if not fin:
        return ComplexityResult(measure, INFINITE, None, detail={"finiteness_witness": fin.pair},
                                budget=budget.as_dict())
    if side == "unions":
        full = space.ground.full
        dual = DiscreteSpace(space.ground, space.names, [full ^ m for m in space.masks],
                             descriptor=space.descriptor + "|dual", allow_uncovered=True)
        res = solve_side_count(~a, dual, "intersections", budget, hint=False)
        res.measure = measure
        if res.witness is not None:
            steps = tuple(Step(INTER if op == UNION else UNION, l, r) for op, l, r in res.witness.steps)
            res.witness = Construction(space, steps, res.witness.outputs)
            assert res.witness.value.bits == a.bits
        return res
    if a.bits == 0:
        raise ValueError("intersection complexity needs a non-empty target")

    upper = _star_hint(a, space) if hint else None
    family0 = list(space.masks)
    outside = space.ground.full ^ a.bits
    meter = Meter(budget)
    depth = 0
    try:
        while depth <= budget.max_depth:
            if upper is not None and depth >= upper:
                witness = _star_witness(a, space)
                break
            plan = _search(a.bits, outside, family0, depth, meter)
            if plan is not None:
                witness = _build(space, family0, plan, a.bits)
                break
            depth += 1
        else:
            return ComplexityResult(measure, LOWER_BOUND_ONLY, depth, spent=meter.spent(), budget=budget.as_dict())
    except BudgetExhausted:
        return ComplexityResult(measure, BUDGET_EXHAUSTED, depth, spent=meter.spent(), budget=budget.as_dict())
    assert witness.value.bits == a.bits
    assert witness.cost[1] == depth
    return ComplexityResult(measure, EXACT, depth, witness=witness, spent=meter.spent(), budget=budget.as_dict())


def _search(a: int, outside: int, family0: list[int], depth: int, meter: Meter):
    """Intersections (x, y) in order, or ``None`` if ``depth`` do not suffice."""
    seen: set[frozenset] = set()

    def dfs(family: list[int], remaining: int):
        meter.tick()
        if _free_part(a, family) == a:
            return []
        if remaining == 0:
            return None
        closure = union_closure(family)
        if remaining == 1:
            last = _last_step(a, outside, family, closure)
            return None if last is None else [last]
        values = sorted(closure)
        tried: set[int] = set()
        for i, x in enumerate(values):
            for y in values[i + 1:]:
                z = x & y
                if z == x or z == y or z == 0 or z in closure or z in tried:
                    continue
                tried.add(z)
                key = frozenset(family[len(family0):] + [z])
                if key in seen:
                    continue
                seen.add(key)
                rest = dfs(family + [z], remaining - 1)
                if rest is not None:
                    return [(x, y)] + rest
        return None

    return dfs(list(family0), depth)


def _build(space: DiscreteSpace, family0: list[int], plan, a: int) -> Construction:
    b = Builder(space)
    b.known.clear()
    family = list(family0)
    refs: list[Ref] = [g(i) for i in range(len(family0))]

    def union_of(value: int) -> Ref:
        members = _members_of(value, family)
        chosen = [refs[i] for i in iter_bits(members)]
        ref = b.union(chosen)
        assert b.value_of(ref) == value
        return ref

    for x, y in plan:
        z = b.inter(union_of(x), union_of(y))
        family.append(x & y)
        refs.append(z)
    out = b.union(refs[i] for i, f in enumerate(family) if f & ~a == 0)
    return b.finish(out)


def _star_witness(a: Subset, space: DiscreteSpace) -> Construction:
    """Group rows (or columns) by pattern and intersect each group with its columns."""
    n_rows, n_cols = space.ground.dims
    rows_first = []
    for i in range(n_rows):
        rows_first.append(a.bits >> (i * n_cols) & ((1 << n_cols) - 1))
    cols_first = []
    for j in range(n_cols):
        cols_first.append(sum(1 << i for i in range(n_rows) if a.bits >> (i * n_cols + j) & 1))
    candidates = []
    for patterns, own, other, full in (
        (rows_first, lambda i: g(i), lambda j: g(n_rows + j), (1 << n_cols) - 1),
        (cols_first, lambda j: g(n_rows + j), lambda i: g(i), (1 << n_rows) - 1),
    ):
        b = Builder(space)
        b.known.clear()
        pieces = []
        groups: dict[int, list[int]] = {}
        for k, p in enumerate(patterns):
            groups.setdefault(p, []).append(k)
        for p, members in sorted(groups.items()):
            if p == 0:
                continue
            left = b.union(own(k) for k in members)
            if p == full:
                pieces.append(left)
            else:
                pieces.append(b.inter(left, b.union(other(t) for t in iter_bits(p))))
        candidates.append(b.finish(b.union(pieces)))
    return min(candidates, key=lambda c: (c.cost[1], c.cost[0]))
