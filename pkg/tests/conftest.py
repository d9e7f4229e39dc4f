from __future__ import annotations

import random

from setfusion.constructions import INTER, UNION, Construction, CyclicSequence, Step, g, s
from setfusion.core import DiscreteSpace, GroundSet, Subset

ACCEPTANCE_LINES: dict[int, str] = {}


def random_space(rng: random.Random, size: int, m: int, covering: bool = True) -> DiscreteSpace:
    ground = GroundSet.plain(size)
    masks = [rng.getrandbits(size) for _ in range(m)]
    if covering:
        cover = 0
        for x in masks:
            cover |= x
        missing = ground.full & ~cover
        masks[0] |= missing
    return DiscreteSpace(ground, [f"B{i + 1}" for i in range(m)], masks, allow_uncovered=not covering)


def random_construction(rng: random.Random, space: DiscreteSpace, n_steps: int) -> Construction:
    steps = []
    for i in range(n_steps):
        pool = [g(k) for k in range(len(space))] + [s(k) for k in range(i)]
        steps.append(Step(rng.choice((UNION, INTER)), rng.choice(pool), rng.choice(pool)))
    return Construction(space, tuple(steps))


def random_cyclic(rng: random.Random, space: DiscreteSpace, n_gates: int) -> CyclicSequence:
    pool = [g(k) for k in range(len(space))] + [s(k) for k in range(n_gates)]
    gates = [Step(rng.choice((UNION, INTER)), rng.choice(pool), rng.choice(pool)) for _ in range(n_gates)]
    return CyclicSequence(space, tuple(gates), rng.randrange(n_gates))


def nontrivial(a: Subset) -> bool:
    return not a.is_trivial()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
