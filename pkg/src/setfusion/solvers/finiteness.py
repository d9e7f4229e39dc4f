"""Finiteness test: can the target be built from the generators at all?"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import DiscreteSpace, Subset, iter_bits


@dataclass(frozen=True)
class FinitenessWitness:
    """``finite`` or a pair ``(a, b)`` with a in A, b outside A and vec(a) <= vec(b).

    ``b`` is ``None`` only when ``a`` lies in no generator and A is the whole
    ground set, so no outside element exists to pair it with.
    """

    finite: bool
    pair: tuple[int, int | None] | None = None

    def __bool__(self) -> bool:
        return self.finite


def finiteness_test(a: Subset, space: DiscreteSpace) -> FinitenessWitness:
    """Every generator containing some a in A also contains some b outside A?

    For each a the generators through it are intersected; any outside
    element left in that intersection dominates a coordinate-wise.
    """
    if a.ground != space.ground:
        raise ValueError("target and space live over different ground sets")
    outside = space.ground.full ^ a.bits
    for x in iter_bits(a.bits):
        common = space.ground.full
        for m in space.masks:
            if m >> x & 1:
                common &= m
        hit = common & outside
        if hit:
            return FinitenessWitness(False, (x, (hit & -hit).bit_length() - 1))
        if common == space.ground.full and not any(m >> x & 1 for m in space.masks):
            return FinitenessWitness(False, (x, None))
    return FinitenessWitness(True)


def dominates(space: DiscreteSpace, a: int, b: int) -> bool:
    """vec(a) <= vec(b) coordinate-wise."""
    va, vb = space.vec(a), space.vec(b)
    return va & ~vb == 0
