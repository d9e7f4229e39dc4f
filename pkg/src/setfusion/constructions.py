"""Straight-line and cyclic constructions over a discrete space.

A construction is a list of steps ``(op, left, right)`` where ``op`` is
``"U"`` (union) or ``"I"`` (intersection) and each operand is a
:class:`Ref` to a generator (``g``) or to a step (``s``).  Indices are
0-based in Python and 1-based in the text certificate format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .core import DiscreteSpace, GroundMismatch, Subset
from .spaces import graph_stars, monotone_basis

UNION = "U"
INTER = "I"


class Ref(NamedTuple):
    kind: str  # "g" generator, "s" step / gate
    index: int

    def __str__(self) -> str:
        return f"{self.kind}{self.index + 1}"

    @classmethod
    def parse(cls, text: str) -> Ref:
        if len(text) < 2 or text[0] not in "gs" or not text[1:].isdigit() or int(text[1:]) < 1:
            raise ValueError(f"malformed reference {text!r}")
        return cls(text[0], int(text[1:]) - 1)


def g(i: int) -> Ref:
    return Ref("g", i)


def s(i: int) -> Ref:
    return Ref("s", i)


class Step(NamedTuple):
    op: str
    left: Ref
    right: Ref


def _apply(op: str, x: int, y: int) -> int:
    return x | y if op == UNION else x & y


def _check_op(op: str):
    if op not in (UNION, INTER):
        raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class Construction:
    """An acyclic sequence of unions and intersections.

    ``outputs`` marks the steps holding the targets; by default the last step.
    """

    space: DiscreteSpace
    steps: tuple[Step, ...]
    outputs: tuple[int, ...] = ()

    def __post_init__(self):
        steps = tuple(Step(*st) for st in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise ValueError("a construction needs at least one step")
        m = len(self.space)
        for i, st in enumerate(steps):
            _check_op(st.op)
            for ref in (st.left, st.right):
                if ref.kind == "g":
                    if not 0 <= ref.index < m:
                        raise ValueError(f"step {i + 1}: dangling generator reference {ref}")
                elif ref.kind == "s":
                    if not 0 <= ref.index < len(steps):
                        raise ValueError(f"step {i + 1}: dangling step reference {ref}")
                    if ref.index >= i:
                        raise ValueError(f"step {i + 1}: forward reference {ref} (use CyclicSequence)")
                else:
                    raise ValueError(f"bad reference kind {ref.kind!r}")
        outputs = tuple(self.outputs) or (len(steps) - 1,)
        for o in outputs:
            if not 0 <= o < len(steps):
                raise ValueError(f"output marker s{o + 1} out of range")
        object.__setattr__(self, "outputs", outputs)

    def step_values(self) -> list[int]:
        gens = self.space.masks
        vals: list[int] = []
        for op, left, right in self.steps:
            x = gens[left.index] if left.kind == "g" else vals[left.index]
            y = gens[right.index] if right.kind == "g" else vals[right.index]
            vals.append(_apply(op, x, y))
        return vals

    @property
    def cost(self) -> tuple[int, int, int]:
        """(total, intersections, unions)."""
        n_int = sum(1 for st in self.steps if st.op == INTER)
        return len(self.steps), n_int, len(self.steps) - n_int

    @property
    def value(self) -> Subset:
        return Subset(self.space.ground, self.step_values()[self.outputs[-1]])

    def output_values(self) -> list[Subset]:
        vals = self.step_values()
        return [Subset(self.space.ground, vals[o]) for o in self.outputs]


def evaluate(c: Construction, targets: Sequence[int] | None = None):
    """Value of the construction and its cost triple.

    With ``targets`` (step indices), returns the list of values at those steps
    instead of a single value.
    """
    vals = c.step_values()
    if targets is None:
        return Subset(c.space.ground, vals[c.outputs[-1]]), c.cost
    return [Subset(c.space.ground, vals[t]) for t in targets], c.cost


def relativize_construction(c: Construction, u: Subset) -> Construction:
    """Same steps over the relativized family; evaluates to ``value & u``."""
    if u.ground != c.space.ground:
        raise GroundMismatch("relativizing set lives over a different ground set")
    return Construction(c.space.relativize(u), c.steps, c.outputs)


def concatenate(first: Construction, second: Construction, extra: int) -> Construction:
    """Chain rule: ``second`` runs over ``first.space`` plus one extra generator.

    ``second.space`` must equal ``first.space`` with generator index ``extra``
    standing for the value produced by ``first``; references to it are routed
    to ``first``'s output.
    """
    offset = len(first.steps)
    out = first.outputs[-1]
    steps = list(first.steps)

    def remap(ref: Ref) -> Ref:
        if ref.kind == "s":
            return s(ref.index + offset)
        if ref.index == extra:
            return s(out)
        return g(ref.index - (ref.index > extra))

    for op, left, right in second.steps:
        steps.append(Step(op, remap(left), remap(right)))
    return Construction(first.space, tuple(steps), tuple(o + offset for o in second.outputs))


class Builder:
    """Accumulates steps, reusing refs for values already produced.

    ``None`` stands for the empty set where no generator provides it; unions
    and intersections with ``None`` are folded away without emitting a step.
    """

    def __init__(self, space: DiscreteSpace):
        self.space = space
        self.steps: list[Step] = []
        self.values: list[int] = []
        self.known: dict[int, Ref] = {}
        for i, m in enumerate(space.masks):
            self.known.setdefault(m, g(i))

    def value_of(self, ref: Ref) -> int:
        return self.space.masks[ref.index] if ref.kind == "g" else self.values[ref.index]

    def emit(self, op: str, left: Ref, right: Ref) -> Ref:
        val = _apply(op, self.value_of(left), self.value_of(right))
        self.steps.append(Step(op, left, right))
        self.values.append(val)
        ref = s(len(self.steps) - 1)
        self.known.setdefault(val, ref)
        return ref

    def union(self, refs) -> Ref | None:
        acc = None
        seen = set()
        for r in refs:
            if r is None or r in seen:
                continue
            seen.add(r)
            acc = r if acc is None else self.emit(UNION, acc, r)
        return acc

    def inter(self, left: Ref | None, right: Ref | None) -> Ref | None:
        if left is None or right is None:
            return None
        return self.emit(INTER, left, right)

    def finish(self, out: Ref | None, outputs: Sequence[Ref] = ()) -> Construction:
        if out is None:
            raise ValueError("construction output is the empty set with no generator for it")
        if out.kind == "g" or out.index != len(self.steps) - 1:
            out = self.emit(UNION, out, out)
        marks = []
        for r in outputs:
            if r.kind == "g":
                r = self.emit(UNION, r, r)
            marks.append(r.index)
        return Construction(self.space, tuple(self.steps), tuple(marks) or (out.index,))


def transform_by_injection(c: Construction, inj: Sequence[int], space1: DiscreteSpace,
                           preimages=None) -> Construction:
    """Pull a construction over space 2 back along an injection Gamma_1 -> Gamma_2.

    ``inj[i]`` is the position in Gamma_2 of element ``i`` of Gamma_1.
    ``preimages`` supplies, per generator of space 2, either a construction
    over ``space1`` of its preimage, a generator index of ``space1``, or
    ``None`` to look the preimage up among ``space1``'s generators.  A single
    multi-output construction (one output per generator) is also accepted.
    """
    space2 = c.space
    inj = list(inj)
    if len(inj) != space1.ground.size or len(set(inj)) != len(inj):
        raise ValueError("inj must be an injective map from Gamma_1")
    if any(not 0 <= x < space2.ground.size for x in inj):
        raise ValueError("inj maps outside Gamma_2")

    def pull(mask: int) -> int:
        out = 0
        for i, x in enumerate(inj):
            if mask >> x & 1:
                out |= 1 << i
        return out

    m2 = len(space2)
    used = sorted({r.index for st in c.steps for r in (st.left, st.right) if r.kind == "g"})
    steps: list[Step] = []
    gen_ref: dict[int, Ref] = {}

    if isinstance(preimages, Construction):
        if len(preimages.outputs) != m2 or preimages.space != space1:
            raise ValueError("multi-output preimage construction must have one output per generator")
        vals = preimages.step_values()
        for k in used:
            if vals[preimages.outputs[k]] != pull(space2.masks[k]):
                raise ValueError(f"preimage output for generator {k + 1} is wrong")
        steps.extend(preimages.steps)
        for k in used:
            gen_ref[k] = s(preimages.outputs[k])
    else:
        preimages = list(preimages) if preimages is not None else [None] * m2
        if len(preimages) != m2:
            raise ValueError("need one preimage entry per generator of the source space")
        for k in used:
            want = pull(space2.masks[k])
            entry = preimages[k]
            if entry is None:
                try:
                    entry = space1.masks.index(want)
                except ValueError:
                    raise ValueError(f"preimage construction missing for generator {space2.names[k]}") from None
            if isinstance(entry, int):
                if space1.masks[entry] != want:
                    raise ValueError(f"generator {entry + 1} is not the preimage of {space2.names[k]}")
                gen_ref[k] = g(entry)
                continue
            if entry.space != space1:
                raise ValueError("preimage construction over the wrong space")
            if entry.value.bits != want:
                raise ValueError(f"preimage construction for {space2.names[k]} evaluates wrongly")
            offset = len(steps)
            for op, left, right in entry.steps:
                steps.append(Step(op, *(r if r.kind == "g" else s(r.index + offset) for r in (left, right))))
            gen_ref[k] = s(entry.outputs[-1] + offset)

    offset = len(steps)
    for op, left, right in c.steps:
        steps.append(Step(op, *(gen_ref[r.index] if r.kind == "g" else s(r.index + offset) for r in (left, right))))
    return Construction(space1, tuple(steps), tuple(o + offset for o in c.outputs))


def graph_preimages(n: int) -> list:
    """Star constructions of phi^-1(B) for every literal B of bool:2n, union steps only."""
    stars = graph_stars(1 << n, 1 << n)
    out = []
    from .spaces import star_unions_for_literal

    for lit in range(4 * n):
        members = star_unions_for_literal(stars, n, lit)
        if len(members) == 1:
            out.append(members[0])
            continue
        b = Builder(stars)
        b.known.clear()
        ref = b.union(g(i) for i in members)
        out.append(b.finish(ref))
    return out


def chessboard_figure1_construction(literal: bool = False) -> Construction:
    """Two-intersection construction of ``chessboard(5, 5)`` over 5x5 stars.

    The default is ((R1 u R3 u R5) n (C1 u C3 u C5)) u ((C2 u C4) n (R2 u R4)),
    which yields the cells with i + j even.  ``literal=True`` gives the
    formula as printed with the figure, ((R2 u R4) n (C1 u C3 u C5)) u
    ((C2 u C4) n (R1 u R3 u R5)), whose value is the complementary board.
    Both have cost (9, 2, 7).
    """
    R = lambda i: g(i - 1)  # noqa: E731
    C = lambda j: g(5 + j - 1)  # noqa: E731
    if literal:
        steps = [
            Step(UNION, R(2), R(4)),        # s1
            Step(UNION, C(1), C(3)),        # s2
            Step(UNION, s(1), C(5)),        # s3
            Step(INTER, s(0), s(2)),        # s4
            Step(UNION, C(2), C(4)),        # s5
            Step(UNION, R(1), R(3)),        # s6
            Step(UNION, s(5), R(5)),        # s7
            Step(INTER, s(4), s(6)),        # s8
            Step(UNION, s(3), s(7)),        # s9
        ]
    else:
        steps = [
            Step(UNION, R(1), R(3)),        # s1
            Step(UNION, s(0), R(5)),        # s2
            Step(UNION, C(1), C(3)),        # s3
            Step(UNION, s(2), C(5)),        # s4
            Step(INTER, s(1), s(3)),        # s5
            Step(UNION, C(2), C(4)),        # s6
            Step(UNION, R(2), R(4)),        # s7
            Step(INTER, s(5), s(6)),        # s8
            Step(UNION, s(4), s(7)),        # s9
        ]
    return Construction(graph_stars(5, 5), tuple(steps))


# -- cyclic sequences ----------------------------------------------------------

@dataclass(frozen=True)
class CyclicSequence:
    """Gates may reference any gate, including themselves or later ones."""

    space: DiscreteSpace
    gates: tuple[Step, ...]
    output: int = -1

    def __post_init__(self):
        gates = tuple(Step(*st) for st in self.gates)
        object.__setattr__(self, "gates", gates)
        if not gates:
            raise ValueError("a cyclic sequence needs at least one gate")
        m = len(self.space)
        for i, st in enumerate(gates):
            _check_op(st.op)
            for ref in (st.left, st.right):
                limit = m if ref.kind == "g" else len(gates)
                if ref.kind not in "gs" or not 0 <= ref.index < limit:
                    raise ValueError(f"gate {i + 1}: dangling reference {ref}")
        out = self.output if self.output >= 0 else len(gates) - 1
        if not 0 <= out < len(gates):
            raise ValueError("output gate out of range")
        object.__setattr__(self, "output", out)

    @property
    def n_intersections(self) -> int:
        return sum(1 for st in self.gates if st.op == INTER)

    @classmethod
    def from_construction(cls, c: Construction) -> CyclicSequence:
        return cls(c.space, c.steps, c.outputs[-1])

    def is_acyclic(self) -> bool:
        return _topo_order(self) is not None


@dataclass
class EvalTrace:
    rounds: list[tuple[int, ...]] = field(default_factory=list)
    converged: int = 0

    def is_monotone(self) -> bool:
        for prev, cur in zip(self.rounds, self.rounds[1:]):
            if any(p & ~c for p, c in zip(prev, cur)):
                return False
        return True


def evaluate_cyclic(seq: CyclicSequence) -> tuple[Subset, EvalTrace]:
    """Synchronous evaluation from the all-empty state to the least fixed point.

    ``trace.rounds[j]`` holds the gate values after round ``j`` (round 0 is all
    empty); ``trace.converged`` is the first ``j`` with round ``j+1`` equal to
    round ``j``.
    """
    gens = seq.space.masks
    cur = tuple(0 for _ in seq.gates)
    trace = EvalTrace([cur])
    while True:
        nxt = []
        for i, (op, left, right) in enumerate(seq.gates):
            x = gens[left.index] if left.kind == "g" else cur[left.index]
            y = gens[right.index] if right.kind == "g" else cur[right.index]
            nxt.append(cur[i] | _apply(op, x, y))
        nxt = tuple(nxt)
        if nxt == cur:
            break
        cur = nxt
        trace.rounds.append(cur)
    trace.converged = len(trace.rounds) - 1
    assert trace.converged <= len(seq.gates), "evaluation exceeded the gate-count bound"
    return Subset(seq.space.ground, cur[seq.output]), trace


def converged_values(seq: CyclicSequence) -> tuple[int, ...]:
    _, trace = evaluate_cyclic(seq)
    return trace.rounds[-1]


def _topo_order(seq: CyclicSequence) -> list[int] | None:
    n = len(seq.gates)
    deps = [{r.index for r in (st.left, st.right) if r.kind == "s"} for st in seq.gates]
    order, state = [], [0] * n

    for root in range(n):
        if state[root]:
            continue
        stack = [(root, iter(sorted(deps[root])))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                state[node] = 2
                order.append(node)
            elif state[nxt] == 1:
                return None
            elif state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(sorted(deps[nxt]))))
    return order


def unfold_cyclic(seq: CyclicSequence) -> Construction:
    """Acyclic construction with the same value as the cyclic evaluation.

    An acyclic wiring is emitted in topological order at its own cost.
    Otherwise the synchronous rounds are replayed; each round costs at most
    one intersection per intersection gate, plus unions gluing a gate's
    previous value to its new contribution.
    """
    b = Builder(seq.space)
    b.known.clear()
    order = _topo_order(seq)
    if order is not None:
        ref: list[Ref | None] = [None] * len(seq.gates)
        for i in order:
            op, left, right = seq.gates[i]
            x = left if left.kind == "g" else ref[left.index]
            y = right if right.kind == "g" else ref[right.index]
            if op == UNION:
                ref[i] = b.union([x, y])
            else:
                ref[i] = b.inter(x, y)
        return b.finish(ref[seq.output])

    _, trace = evaluate_cyclic(seq)
    rounds = trace.converged
    cur: list[Ref | None] = [None] * len(seq.gates)
    last_inputs: list[tuple | None] = [None] * len(seq.gates)
    for _ in range(rounds):
        nxt = list(cur)
        for i, (op, left, right) in enumerate(seq.gates):
            x = left if left.kind == "g" else cur[left.index]
            y = right if right.kind == "g" else cur[right.index]
            if (x, y) == last_inputs[i]:
                continue
            last_inputs[i] = (x, y)
            if op == UNION:
                fresh = x if x == y else b.union([x, y])
            else:
                fresh = b.inter(x, y)
            if fresh is None or fresh == cur[i]:
                continue
            nxt[i] = fresh if cur[i] is None else b.emit(UNION, cur[i], fresh)
        cur = nxt
    return b.finish(cur[seq.output])


# -- the generation problem -------------------------------------------------------

@dataclass(frozen=True)
class RuleSet:
    m: int
    rules: tuple[tuple[int, int, int], ...]

    def __init__(self, m: int, rules):
        if m < 1:
            raise ValueError("m must be positive")
        clean = []
        for rule in rules:
            a, b, c = (int(x) for x in rule)
            if not all(1 <= x <= m for x in (a, b, c)):
                raise ValueError(f"rule {rule} has an index outside [1, {m}]")
            if (a, b, c) not in clean:
                clean.append((a, b, c))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "rules", tuple(clean))


def simulate_generation(r: RuleSet, y) -> bool:
    """Close ``y`` under the rules and report whether ``m`` is reached."""
    have = set(y)
    if any(not 1 <= x <= r.m for x in have):
        raise ValueError("initial set must lie in [m]")
    changed = True
    while changed:
        changed = False
        for a, b, c in r.rules:
            if a in have and b in have and c not in have:
                have.add(c)
                changed = True
    return r.m in have


def build_generation_circuit(r: RuleSet) -> CyclicSequence:
    """Cyclic monotone circuit over ``mono:m`` with one AND gate per rule.

    Layout: f_i = y_i OR h_i, g_abc = f_a AND f_b, and h_i a chain of
    fan-in-two ORs over the g gates of rules producing i.  The output is f_m.
    """
    space = monotone_basis(r.m)
    m = r.m
    f_idx = list(range(m))                       # gates 0..m-1 are the f_i
    g_idx = [m + k for k in range(len(r.rules))]  # then one AND per rule
    gates: list[Step | None] = [None] * (m + len(r.rules))
    for k, (a, b, _) in enumerate(r.rules):
        gates[g_idx[k]] = Step(INTER, s(f_idx[a - 1]), s(f_idx[b - 1]))
    for i in range(1, m + 1):
        producers = [s(g_idx[k]) for k, rule in enumerate(r.rules) if rule[2] == i]
        if not producers:
            gates[f_idx[i - 1]] = Step(UNION, g(i - 1), g(i - 1))
            continue
        acc = producers[0]
        for p in producers[1:]:
            gates.append(Step(UNION, acc, p))
            acc = s(len(gates) - 1)
        gates[f_idx[i - 1]] = Step(UNION, g(i - 1), acc)
    return CyclicSequence(space, tuple(gates), f_idx[m - 1])


def generation_input(r: RuleSet, y) -> str:
    """Bit string of ``{0,1}^m`` encoding the instance set ``y``."""
    y = set(y)
    return "".join("1" if i in y else "0" for i in range(1, r.m + 1))


# -- certificates ---------------------------------------------------------------

def format_construction(c: Construction) -> str:
    lines = [f"construction {c.space.descriptor}", f"steps {len(c.steps)}"]
    for i, (op, left, right) in enumerate(c.steps):
        lines.append(f"{i + 1} {op} {left} {right}")
    if c.outputs != (len(c.steps) - 1,):
        lines.extend(f"output s{o + 1}" for o in c.outputs)
    return "\n".join(lines) + "\n"


def format_cyclic(seq: CyclicSequence) -> str:
    lines = [f"cyclic {seq.space.descriptor}", f"steps {len(seq.gates)}"]
    for i, (op, left, right) in enumerate(seq.gates):
        lines.append(f"{i + 1} {op} {left} {right}")
    lines.append(f"output s{seq.output + 1}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str, space: DiscreteSpace | None = None):
    """Read a construction or cyclic certificate.

    The space is rebuilt from the header descriptor unless one is supplied.
    """
    from .spaces import make_generators

    lines = [ln.rstrip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ValueError("certificate too short")
    head = lines[0].split()
    if len(head) != 2 or head[0] not in ("construction", "cyclic"):
        raise ValueError(f"bad certificate header {lines[0]!r}")
    kind, desc = head
    if space is None:
        space = make_generators(desc)
    count = lines[1].split()
    if len(count) != 2 or count[0] != "steps" or not count[1].isdigit():
        raise ValueError(f"bad step-count line {lines[1]!r}")
    n = int(count[1])
    body = lines[2:2 + n]
    if len(body) != n:
        raise ValueError("certificate has fewer steps than announced")
    steps = []
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 4 or parts[0] != str(i + 1) or parts[1] not in (UNION, INTER):
            raise ValueError(f"bad step line {line!r}")
        steps.append(Step(parts[1], Ref.parse(parts[2]), Ref.parse(parts[3])))
    outputs = []
    for line in lines[2 + n:]:
        parts = line.split()
        if len(parts) != 2 or parts[0] != "output":
            raise ValueError(f"unexpected line {line!r}")
        ref = Ref.parse(parts[1])
        if ref.kind != "s":
            raise ValueError("output must name a step")
        outputs.append(ref.index)
    if kind == "cyclic":
        if len(outputs) != 1:
            raise ValueError("cyclic certificate needs exactly one output line")
        return CyclicSequence(space, tuple(steps), outputs[0])
    return Construction(space, tuple(steps), tuple(outputs))


__all__ = [
    "Builder", "Construction", "CyclicSequence", "EvalTrace", "INTER", "Ref", "RuleSet", "Step", "UNION",
    "build_generation_circuit", "chessboard_figure1_construction", "concatenate", "converged_values",
    "evaluate", "evaluate_cyclic", "format_construction", "format_cyclic", "g", "generation_input",
    "graph_preimages", "parse_certificate", "relativize_construction", "s",
    "simulate_generation", "transform_by_injection", "unfold_cyclic",
]
