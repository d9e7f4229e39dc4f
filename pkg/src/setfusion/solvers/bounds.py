"""Bound calculators: the counting lower bound and the realized cubic upper bound."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2

from ..core import DiscreteSpace, Subset
from ..fusion import Lambda, compile_lambda


@dataclass
class BoundsReport:
    kind: str
    params: dict
    value: int
    detail: dict = field(default_factory=dict)


def counting_holds(s: int, k: int, m: int) -> bool:
    """3 s ceil(log2(m + s)) < k."""
    return 3 * s * ceil(log2(m + s)) < k


def counting_bound(k: int, m: int) -> int:
    """Largest s with 3 s ceil(log2(m + s)) < k; some subset of a k-element
    ground set then needs at least s operations over m generators."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    s = 0
    while counting_holds(s + 1, k, m):
        s += 1
    return s


def cubic_bound(a: Subset, space: DiscreteSpace, lam: Lambda) -> BoundsReport:
    """Operation count of the staged construction compiled from ``lam``."""
    c, _ = compile_lambda(a, space, lam, target="acyclic")
    total, n_int, n_uni = c.cost
    return BoundsReport("cubic", {"t": len(lam), "m": len(space)}, total,
                        {"intersections": n_int, "unions": n_uni, "construction": c})


def bounds_report(kind: str, **params) -> BoundsReport:
    """``counting`` takes k and m; ``cubic`` takes a, space and lam."""
    if kind == "counting":
        k, m = params["k"], params["m"]
        s = counting_bound(k, m)
        return BoundsReport("counting", {"k": k, "m": m}, s,
                            {"lhs_at_s_plus_1": 3 * (s + 1) * ceil(log2(m + s + 1))})
    if kind == "cubic":
        return cubic_bound(params["a"], params["space"], params["lam"])
    raise ValueError(f"unknown bound kind {kind!r}")
