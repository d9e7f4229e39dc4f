"""Semi-filters, pair families and the fusion machinery.

All sets here are integer bit masks over the ground set of the space in
play; subsets of ``U`` are simply masks contained in ``U``.  A semi-filter
is kept as its antichain of minimal members, so membership of ``S`` means
"some minimal member is contained in ``S``".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .constructions import (
    INTER, UNION, Builder, Construction, CyclicSequence, Ref, Step, converged_values, g, s,
)
from .core import DiscreteSpace, GroundSet, Subset, iter_bits, popcount

ENUM_CAP = 5
COVER_GRAPH_CAP = 4
ULTRA_CAP = 20


def minimize(sets: Iterable[int]) -> tuple[int, ...]:
    """Minimal members of a family of masks, sorted."""
    uniq = sorted(set(sets), key=lambda m: (popcount(m), m))
    keep: list[int] = []
    for m in uniq:
        if not any(k & ~m == 0 for k in keep):
            keep.append(m)
    return tuple(sorted(keep))


@dataclass(frozen=True)
class SemiFilter:
    """Upward-closed family over ``universe`` given by its minimal members."""

    universe: int
    minimal: tuple[int, ...]

    def __post_init__(self):
        if not self.minimal:
            raise ValueError("a semi-filter is non-empty")
        if any(m == 0 for m in self.minimal):
            raise ValueError("a semi-filter cannot contain the empty set")
        if any(m & ~self.universe for m in self.minimal):
            raise ValueError("members must lie inside the universe")
        if minimize(self.minimal) != tuple(sorted(self.minimal)):
            raise ValueError("minimal members must form an antichain")
        object.__setattr__(self, "minimal", tuple(sorted(self.minimal)))

    @classmethod
    def generated_by(cls, universe: int, sets: Iterable[int]) -> SemiFilter:
        return cls(universe, minimize(sets))

    def __contains__(self, x: int) -> bool:
        return any(m & ~x == 0 for m in self.minimal)

    def is_subfamily_of(self, other: SemiFilter) -> bool:
        return all(m in other for m in self.minimal)

    def is_ultra(self) -> bool:
        return _is_ultra(self.universe, self.minimal)


def _is_ultra(universe: int, minimal: Sequence[int]) -> bool:
    """True unless some S has neither S nor U - S in the family.

    Such an S is a 2-colouring of U with no monochromatic minimal member;
    found by backtracking over the elements of U.
    """
    elems = list(iter_bits(universe))
    if len(elems) > ULTRA_CAP:
        raise ValueError(f"ultra test limited to |U| <= {ULTRA_CAP}")
    sets = list(minimal)

    def bad(side: int, other: int) -> bool:
        # some member already lies entirely in ``side`` -> that side is in F
        return any(m & ~side == 0 for m in sets)

    def search(i: int, inside: int, outside: int) -> bool:
        if bad(inside, outside) or bad(outside, inside):
            return False
        if i == len(elems):
            return True
        bit = 1 << elems[i]
        return search(i + 1, inside | bit, outside) or search(i + 1, inside, outside | bit)

    return not search(0, 0, 0)


def classify_family(sets: Iterable[int], universe: int) -> str:
    """``not_semifilter``, ``semifilter`` or ``semi_ultra_filter``."""
    sets = list(sets)
    if any(m & ~universe for m in sets):
        raise ValueError("member not contained in the universe")
    if not sets or any(m == 0 for m in sets):
        return "not_semifilter"
    if minimize(sets) != tuple(sorted(set(sets))):
        return "not_semifilter"
    return "semi_ultra_filter" if _is_ultra(universe, sets) else "semifilter"


@dataclass(frozen=True)
class Lambda:
    """A set of unordered pairs of subsets of ``universe``."""

    universe: int
    pairs: frozenset = field(default_factory=frozenset)

    def __init__(self, universe: int, pairs: Iterable[tuple[int, int]] = ()):
        clean = set()
        for e, h in pairs:
            if (e | h) & ~universe:
                raise ValueError("pair member not contained in the universe")
            clean.add((min(e, h), max(e, h)))
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "pairs", frozenset(clean))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.ordered())

    def ordered(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)


def is_inert(e: int, h: int) -> bool:
    """Pairs that no semi-filter can fail to preserve."""
    return e == 0 or h == 0 or e & ~h == 0 or h & ~e == 0


def is_above(f: SemiFilter, w: int, space: DiscreteSpace, universe: int) -> bool:
    """Every generator through element ``w``, cut down to ``U``, lies in ``f``."""
    if f.universe != universe:
        raise ValueError("semi-filter universe does not match U")
    return all((m & universe) in f for m in space.masks if m >> w & 1)


def preserves(f: SemiFilter, lam: Lambda) -> bool:
    if f.universe != lam.universe:
        raise ValueError("semi-filter and pair family have different universes")
    for e, h in lam.pairs:
        if e in f and h in f and (e & h) not in f:
            return False
    return True


# -- enumeration -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _monotone_tables(k: int) -> tuple[int, ...]:
    """Truth tables (2**k bits) of all monotone Boolean functions on k variables."""
    if k == 0:
        return (0, 1)
    half = 1 << (k - 1)
    sub = _monotone_tables(k - 1)
    out = []
    for f0 in sub:
        for f1 in sub:
            if f0 & ~f1 == 0:
                out.append(f0 | f1 << half)
    return tuple(out)


def _local_to_global(elems: Sequence[int], local: int) -> int:
    out = 0
    for i in iter_bits(local):
        out |= 1 << elems[i]
    return out


def enumerate_semifilters(universe: int, ultra_only: bool = False) -> list[SemiFilter]:
    """Every semi-filter over ``universe`` (|U| <= 5)."""
    elems = list(iter_bits(universe))
    k = len(elems)
    if k > ENUM_CAP:
        raise ValueError(f"semi-filter enumeration limited to |U| <= {ENUM_CAP}")
    out = []
    for table in _monotone_tables(k):
        if table == 0 or table & 1:
            continue
        minimal = []
        for local in iter_bits(table):
            if not any(table >> (local & ~(1 << i)) & 1 for i in iter_bits(local)):
                minimal.append(_local_to_global(elems, local))
        f = SemiFilter(universe, tuple(minimal))
        if ultra_only and not f.is_ultra():
            continue
        out.append(f)
    return out


# -- closure G_w and verification -----------------------------------------------------

def closure_gw(w: int, space: DiscreteSpace, universe: int, lam: Lambda):
    """Minimal family forced into every semi-filter above ``w`` preserving ``lam``.

    Returns ``(state, empty_reached)``.  ``state`` is a :class:`SemiFilter`
    when the empty set was not derived, otherwise ``None``.
    """
    if lam.universe != universe:
        raise ValueError("pair family universe does not match U")
    base = [m & universe for m in space.masks if m >> w & 1]
    if any(b == 0 for b in base):
        return None, True
    members = list(minimize(base)) or [universe]

    def has(x: int) -> bool:
        return any(m & ~x == 0 for m in members)

    pairs = lam.ordered()
    changed = True
    while changed:
        changed = False
        for e, h in pairs:
            c = e & h
            if has(e) and has(h) and not has(c):
                if c == 0:
                    return None, True
                members = [m for m in members if c & ~m != 0] + [c]
                changed = True
    return SemiFilter(universe, tuple(members)), False


def verify_lambda(a: Subset, space: DiscreteSpace, lam: Lambda, mode: str = "closure", ultra: bool = False):
    """Does ``lam`` cover every semi-filter above an element of ``a``?

    Returns ``(valid, witness)``.  Closure mode checks, for every element
    ``w``, that the empty set is derived exactly when ``w`` is in ``a``; the
    witness is the first offending position.  Enumerate mode scans all
    semi-filters over ``U`` (optionally only the ultra ones); the witness is
    ``(filter, a)``.
    """
    if a.is_trivial():
        raise ValueError("target set must be non-trivial")
    universe = a.ground.full ^ a.bits
    if lam.universe != universe:
        raise ValueError("pair family must live over the complement of the target")
    if mode == "closure":
        if ultra:
            raise ValueError("closure mode checks plain semi-filters only")
        for w in range(a.ground.size):
            _, reached = closure_gw(w, space, universe, lam)
            if reached != bool(a.bits >> w & 1):
                return False, w
        return True, None
    if mode == "enumerate":
        for f in enumerate_semifilters(universe, ultra_only=ultra):
            if not preserves(f, lam):
                continue
            for w in iter_bits(a.bits):
                if is_above(f, w, space, universe):
                    return False, (f, w)
        return True, None
    raise ValueError(f"unknown verification mode {mode!r}")


# -- extraction and induction ------------------------------------------------------------

def extract_lambda(source, a: Subset) -> Lambda:
    """Pairs of relativized operands of every intersection in ``source``.

    Cyclic sources use the converged gate values.
    """
    if a.is_trivial():
        raise ValueError("target set must be non-trivial")
    universe = a.ground.full ^ a.bits
    gens = source.space.masks
    if isinstance(source, Construction):
        vals = source.step_values()
        if vals[source.outputs[-1]] != a.bits:
            raise ValueError("construction does not evaluate to the target")
        steps = source.steps
    elif isinstance(source, CyclicSequence):
        vals = converged_values(source)
        if vals[source.output] != a.bits:
            raise ValueError("cyclic sequence does not evaluate to the target")
        steps = source.gates
    else:
        raise TypeError(f"cannot extract pairs from {type(source).__name__}")

    def val(ref: Ref) -> int:
        return gens[ref.index] if ref.kind == "g" else vals[ref.index]

    pairs = [(val(st.left) & universe, val(st.right) & universe) for st in steps if st.op == INTER]
    return Lambda(universe, pairs)


def induce_lambda(lam_fn: Lambda, n: int, index_map: Sequence[int] | None = None) -> Lambda:
    """Pull a pair family over f_G^-1(0) back to the complement of G.

    ``index_map[i]`` is the hypercube position of grid position ``i``; the
    default is the bijection phi, under which positions coincide.
    """
    size = 1 << (2 * n)
    if index_map is None:
        from .spaces import phi_index_map

        index_map = phi_index_map(n)
    if lam_fn.universe >> size:
        raise ValueError("pair family does not live over {0,1}^2n")

    def pull(mask: int) -> int:
        out = 0
        for i, x in enumerate(index_map):
            if mask >> x & 1:
                out |= 1 << i
        return out

    return Lambda(pull(lam_fn.universe), [(pull(e), pull(h)) for e, h in lam_fn.pairs])


# -- compilers ------------------------------------------------------------------------

@dataclass
class CompileTrace:
    omega: list[tuple[str, int]] = field(default_factory=list)  # (tag, value)
    stages_s: list[dict[int, int]] = field(default_factory=list)  # value of C -> S^j_C
    stages_t: list[list[int]] = field(default_factory=list)  # per Omega entry -> T^j_C


def _omega(space: DiscreteSpace, universe: int, pairs) -> list[tuple[str, int]]:
    omega = [(f"B{i + 1}", m & universe) for i, m in enumerate(space.masks)]
    for k, (e, h) in enumerate(pairs):
        omega.append((f"E{k + 1}", e))
        omega.append((f"H{k + 1}", h))
    for v in sorted({e & h for e, h in pairs}):
        omega.append(("EH", v))
    omega.append(("empty", 0))
    return omega


def compile_lambda(a: Subset, space: DiscreteSpace, lam: Lambda, target: str = "cyclic",
                   check: bool = True):
    """Build a construction of ``a`` from a valid pair family.

    ``target="cyclic"`` gives a cyclic sequence with exactly ``len(lam)``
    intersection gates.  ``target="acyclic"`` follows the staged recurrence
    and uses at most ``len(lam)**2`` intersections.  Returns
    ``(result, trace)``; ``trace`` is ``None`` for the cyclic target.
    """
    if check:
        ok, witness = verify_lambda(a, space, lam)
        if not ok:
            raise ValueError(f"pair family is not a valid cover (fails at position {witness})")
    universe = a.ground.full ^ a.bits
    pairs = lam.ordered()
    if target == "cyclic":
        seq = _compile_cyclic(space, universe, pairs)
        assert converged_values(seq)[seq.output] == a.bits
        return seq, None
    if target == "acyclic":
        c, trace = _compile_acyclic(space, universe, pairs)
        assert c.value.bits == a.bits
        assert c.cost[1] <= len(pairs) ** 2
        return c, trace
    raise ValueError(f"unknown compile target {target!r}")


def _compile_acyclic(space: DiscreteSpace, universe: int, pairs):
    t = len(pairs)
    omega = _omega(space, universe, pairs)
    trace = CompileTrace(omega=omega)
    b = Builder(space)
    b.known.clear()
    values = sorted({v for _, v in omega})
    below = {v: [i for i, (_, c) in enumerate(omega) if c & ~v == 0] for v in values}
    by_meet: dict[int, list[int]] = {}
    for k, (e, h) in enumerate(pairs):
        by_meet.setdefault(e & h, []).append(k)

    # stage 1
    t_ref: list[Ref | None] = [g(i) if i < len(space) else None for i in range(len(omega))]
    s_ref = {v: b.union(t_ref[i] for i in below[v]) for v in values}
    _record(trace, b, omega, t_ref, s_ref)
    for _ in range(2, t + 2):
        prev = s_ref
        t_ref = []
        for tag, v in omega:
            refs = [prev[v]]
            if tag == "EH":
                refs += [b.inter(prev[pairs[k][0]], prev[pairs[k][1]]) for k in by_meet[v]]
            t_ref.append(b.union(refs))
        s_ref = {v: b.union(t_ref[i] for i in below[v]) for v in values}
        _record(trace, b, omega, t_ref, s_ref)
    c = b.finish(s_ref[0])
    return prune_dead_steps(c), trace


def _record(trace: CompileTrace, b: Builder, omega, t_ref, s_ref):
    val = lambda r: 0 if r is None else b.value_of(r)  # noqa: E731
    trace.stages_t.append([val(r) for r in t_ref])
    trace.stages_s.append({v: val(r) for v, r in s_ref.items()})


def prune_dead_steps(c: Construction) -> Construction:
    """Drop steps that no output depends on, renumbering the rest."""
    live = set(c.outputs)
    for i in range(len(c.steps) - 1, -1, -1):
        if i in live:
            for r in (c.steps[i].left, c.steps[i].right):
                if r.kind == "s":
                    live.add(r.index)
    order = sorted(live)
    new_index = {old: new for new, old in enumerate(order)}
    steps = []
    for old in order:
        op, left, right = c.steps[old]
        steps.append(Step(op, *(r if r.kind == "g" else s(new_index[r.index]) for r in (left, right))))
    return Construction(c.space, tuple(steps), tuple(new_index[o] for o in c.outputs))


def _compile_cyclic(space: DiscreteSpace, universe: int, pairs) -> CyclicSequence:
    t = len(pairs)
    omega = _omega(space, universe, pairs)
    values = sorted({v for _, v in omega})
    gates: list[Step | None] = [None] * t  # gate k: intersection for pair k
    empty_gate: Ref | None = None

    def new_gate(step: Step) -> Ref:
        gates.append(step)
        return s(len(gates) - 1)

    s_ref: dict[int, Ref] = {}
    for v in values:
        contrib = [g(i) for i, m in enumerate(space.masks) if m & universe & ~v == 0]
        contrib += [s(k) for k, (e, h) in enumerate(pairs) if (e & h) & ~v == 0]
        if not contrib:
            if empty_gate is None:
                idx = len(gates)
                empty_gate = new_gate(Step(UNION, s(idx), s(idx)))  # stays empty forever
            s_ref[v] = empty_gate
            continue
        acc = contrib[0]
        for r in contrib[1:]:
            acc = new_gate(Step(UNION, acc, r))
        s_ref[v] = acc
    for k, (e, h) in enumerate(pairs):
        gates[k] = Step(INTER, s_ref[e], s_ref[h])
    out = s_ref[0]
    if out.kind == "g":
        out = new_gate(Step(UNION, out, out))
    return CyclicSequence(space, tuple(gates), out.index)


# -- cover graph ----------------------------------------------------------------------

def candidate_pairs(universe: int, normalized: bool = False) -> list[tuple[int, int]]:
    """Non-inert unordered pairs of subsets of ``universe``, in canonical order.

    With ``normalized``, only pairs whose union is the whole universe are
    kept; enlarging ``E`` by ``U - H`` never loses a covered semi-filter.
    """
    subsets = []
    sub = universe
    while True:
        subsets.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & universe
    subsets.sort()
    out = []
    for i, e in enumerate(subsets):
        for h in subsets[i + 1:]:
            if is_inert(e, h):
                continue
            if normalized and e | h != universe:
                continue
            out.append((e, h))
    return out


@dataclass
class CoverGraph:
    pairs: list[tuple[int, int]]
    filters: list[SemiFilter]
    incidence: list[int]  # per pair: bit f set iff the pair covers filters[f]

    def covers(self, p: int, f: int) -> bool:
        return bool(self.incidence[p] >> f & 1)


def covers(f: SemiFilter, pair: tuple[int, int]) -> bool:
    e, h = pair
    return e in f and h in f and (e & h) not in f


def build_cover_graph(a: Subset, space: DiscreteSpace, cap: int = COVER_GRAPH_CAP, ultra: bool = False) -> CoverGraph:
    if a.is_trivial():
        raise ValueError("target set must be non-trivial")
    universe = a.ground.full ^ a.bits
    if popcount(universe) > cap:
        raise ValueError(f"cover graph limited to |U| <= {cap}")
    filters = [
        f for f in enumerate_semifilters(universe, ultra_only=ultra)
        if any(is_above(f, w, space, universe) for w in iter_bits(a.bits))
    ]
    pairs = candidate_pairs(universe)
    incidence = []
    for p in pairs:
        row = 0
        for j, f in enumerate(filters):
            if covers(f, p):
                row |= 1 << j
        incidence.append(row)
    return CoverGraph(pairs, filters, incidence)


# -- canonical semi-filters for graphs ------------------------------------------------

def _grid_check(g_set: Subset) -> tuple[int, int]:
    ground = g_set.ground
    if ground.kind != "grid" or len(ground.dims) != 2:
        raise ValueError("canonical filters need a graph over a two-dimensional grid")
    if g_set.is_trivial():
        raise ValueError("graph must be non-trivial")
    return ground.dims


def canonical_filters(g_set: Subset) -> list[tuple[tuple[int, int], SemiFilter]]:
    """F_e for every edge e = (u, v) whose row and column both meet the complement."""
    n_rows, n_cols = _grid_check(g_set)
    ground = g_set.ground
    comp = ground.full ^ g_set.bits
    out = []
    for u, v in g_set:
        row = sum(1 << ground.index((u, j)) for j in range(1, n_cols + 1)) & comp
        col = sum(1 << ground.index((i, v)) for i in range(1, n_rows + 1)) & comp
        if row and col:
            out.append(((u, v), SemiFilter.generated_by(comp, (row, col))))
    return out


def covers_canonical(g_set: Subset, pair: tuple[int, int], edge: tuple[int, int]) -> bool:
    for e, f in canonical_filters(g_set):
        if e == edge:
            return covers(f, pair)
    raise ValueError(f"{edge} has no canonical semi-filter")


def neq_separates(n: int, pair: tuple[int, int], edge: tuple[int, int]) -> bool:
    """Separation criterion for NEQ(N): each diagonal cell of the edge lies in
    exactly one side of the pair, and the two cells lie on different sides."""
    u, v = edge
    du = 1 << ((u - 1) * n + (u - 1))
    dv = 1 << ((v - 1) * n + (v - 1))
    e, h = pair
    in_e = (bool(e & du), bool(e & dv))
    in_h = (bool(h & du), bool(h & dv))
    return (in_e == (True, False) and in_h == (False, True)) or (in_e == (False, True) and in_h == (True, False))


# -- certificates -------------------------------------------------------------------------

def format_lambda(lam: Lambda, space: DiscreteSpace, a: Subset) -> str:
    elems = list(iter_bits(lam.universe))

    def restrict(mask: int) -> str:
        return "".join("1" if mask >> i & 1 else "0" for i in elems)

    lines = [f"lambda {space.descriptor}", f"target {a.to_string()}", f"pairs {len(lam)}"]
    for e, h in lam.ordered():
        lines.append(restrict(e))
        lines.append(restrict(h))
    return "\n".join(lines) + "\n"


def parse_lambda(text: str, ground: GroundSet | None = None):
    """Read a pair-family certificate; returns ``(descriptor, target, lam)``."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) < 3:
        raise ValueError("lambda certificate too short")
    head, tgt, cnt = (ln.split() for ln in lines[:3])
    if len(head) != 2 or head[0] != "lambda":
        raise ValueError(f"bad lambda header {lines[0]!r}")
    if len(tgt) != 2 or tgt[0] != "target":
        raise ValueError(f"bad target line {lines[1]!r}")
    if len(cnt) != 2 or cnt[0] != "pairs" or not cnt[1].isdigit():
        raise ValueError(f"bad pair-count line {lines[2]!r}")
    if ground is None:
        from .spaces import make_generators

        ground = make_generators(head[1]).ground
    target = ground.parse(tgt[1])
    universe = ground.full ^ target.bits
    elems = list(iter_bits(universe))
    n = int(cnt[1])
    body = lines[3:]
    if len(body) != 2 * n:
        raise ValueError("lambda certificate body does not match its pair count")

    def expand(text_bits: str) -> int:
        if len(text_bits) != len(elems) or set(text_bits) - {"0", "1"}:
            raise ValueError(f"expected {len(elems)} bits over U, got {text_bits!r}")
        return sum(1 << elems[i] for i, ch in enumerate(text_bits) if ch == "1")

    pairs = [(expand(body[2 * i]), expand(body[2 * i + 1])) for i in range(n)]
    return head[1], target, Lambda(universe, pairs)
