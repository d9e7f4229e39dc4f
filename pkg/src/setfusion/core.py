"""Ground sets, bit-vector subsets and generator families.

Subsets are stored as Python integers: element ``i`` of the ground set
(0-based, canonical order) is bit ``i``.  Python integers are unbounded, so
the same representation serves single-word and multi-word ground sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

MAX_GROUND = 1 << 16

KINDS = ("index", "grid", "hypercube")


class GroundMismatch(ValueError):
    """Operands live over different ground sets."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def num(w: str) -> int:
    """Integer encoded by the bit string ``w`` (``w[0]`` is the most significant bit)."""
    return int(w, 2) if w else 0


def binary(u: int, n: int) -> str:
    """Inverse of ``w -> num(w) + 1`` on ``[2**n]``."""
    if not 1 <= u <= (1 << n):
        raise ValueError(f"{u} is outside [1, {1 << n}]")
    return format(u - 1, f"0{n}b") if n else ""


@dataclass(frozen=True)
class GroundSet:
    """A finite ground set with an ordered list of element labels.

    ``kind`` fixes how labels map to positions:

    * ``index``: arbitrary labels in the given order;
    * ``grid``: 1-indexed coordinate tuples in row-major order (``dims`` holds
      the side lengths, two of them for the usual ``[N] x [M]``);
    * ``hypercube``: bit strings ``w`` stored at position ``num(w)``.
    """

    labels: tuple
    kind: str = "index"
    dims: tuple[int, ...] = ()
    _pos: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ground kind {self.kind!r}")
        if not self.labels:
            raise ValueError("ground set must be non-empty")
        if len(self.labels) > MAX_GROUND:
            raise ValueError(f"ground set of size {len(self.labels)} exceeds cap {MAX_GROUND}")
        pos = {label: i for i, label in enumerate(self.labels)}
        if len(pos) != len(self.labels):
            raise ValueError("ground set labels must be distinct")
        object.__setattr__(self, "_pos", pos)

    @classmethod
    def plain(cls, size: int, labels: Sequence | None = None) -> GroundSet:
        if size < 1:
            raise ValueError("ground set size must be positive")
        labels = tuple(labels) if labels is not None else tuple(range(1, size + 1))
        if len(labels) != size:
            raise ValueError("need exactly one label per element")
        return cls(labels, "index")

    @classmethod
    def grid(cls, *dims: int) -> GroundSet:
        if not dims or any(d < 1 for d in dims):
            raise ValueError("grid dimensions must be positive")
        total = 1
        for d in dims:
            total *= d
        if total > MAX_GROUND:
            raise ValueError(f"grid of size {total} exceeds cap {MAX_GROUND}")
        labels = tuple(product(*(range(1, d + 1) for d in dims)))
        return cls(labels, "grid", tuple(dims))

    @classmethod
    def hypercube(cls, n: int) -> GroundSet:
        if n < 1:
            raise ValueError("hypercube dimension must be positive")
        if (1 << n) > MAX_GROUND:
            raise ValueError(f"hypercube of dimension {n} exceeds cap {MAX_GROUND}")
        return cls(tuple(format(i, f"0{n}b") for i in range(1 << n)), "hypercube", (n,))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise ValueError(f"{label!r} is not an element of this ground set") from None

    def subset(self, elements: Iterable = ()) -> Subset:
        bits = 0
        for label in elements:
            bits |= 1 << self.index(label)
        return Subset(self, bits)

    def empty(self) -> Subset:
        return Subset(self, 0)

    def everything(self) -> Subset:
        return Subset(self, self.full)

    def parse(self, text: str) -> Subset:
        """Read a 0/1 string, or for 2-d grids an N-line by M-column 0/1 matrix."""
        rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
        flat = "".join("".join(r.split()) for r in rows)
        if len(rows) > 1 and not (self.kind == "grid" and len(self.dims) == 2):
            raise ValueError("matrix form is only accepted for two-dimensional grids")
        if len(rows) > 1 and (len(rows) != self.dims[0] or any(len("".join(r.split())) != self.dims[1] for r in rows)):
            raise ValueError(f"expected a {self.dims[0]}x{self.dims[1]} matrix")
        if len(flat) != self.size or set(flat) - {"0", "1"}:
            raise ValueError(f"expected {self.size} characters of 0/1, got {flat!r}")
        bits = 0
        for i, ch in enumerate(flat):
            if ch == "1":
                bits |= 1 << i
        return Subset(self, bits)


@dataclass(frozen=True)
class Subset:
    """A subset of a ground set, stored as a bit mask."""

    ground: GroundSet
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.ground.size:
            raise ValueError("bit mask does not fit the ground set")

    def _check(self, other: Subset):
        if not isinstance(other, Subset):
            raise TypeError(f"expected Subset, got {type(other).__name__}")
        if other.ground is not self.ground and other.ground != self.ground:
            raise GroundMismatch("subsets live over different ground sets")

    def __or__(self, other: Subset) -> Subset:
        self._check(other)
        return Subset(self.ground, self.bits | other.bits)

    def __and__(self, other: Subset) -> Subset:
        self._check(other)
        return Subset(self.ground, self.bits & other.bits)

    def __sub__(self, other: Subset) -> Subset:
        self._check(other)
        return Subset(self.ground, self.bits & ~other.bits)

    def __invert__(self) -> Subset:
        return Subset(self.ground, self.ground.full ^ self.bits)

    def __le__(self, other: Subset) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: Subset) -> bool:
        return self <= other and self.bits != other.bits

    def __contains__(self, label) -> bool:
        return bool(self.bits >> self.ground.index(label) & 1)

    def __len__(self) -> int:
        return popcount(self.bits)

    def __iter__(self) -> Iterator:
        labels = self.ground.labels
        return (labels[i] for i in iter_bits(self.bits))

    def __bool__(self) -> bool:
        return self.bits != 0

    @property
    def complement(self) -> Subset:
        return ~self

    def is_trivial(self) -> bool:
        return self.bits == 0 or self.bits == self.ground.full

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.ground.size))

    def to_matrix(self) -> str:
        if self.ground.kind != "grid" or len(self.ground.dims) != 2:
            raise ValueError("matrix form needs a two-dimensional grid")
        s = self.to_string()
        m = self.ground.dims[1]
        return "\n".join(s[i:i + m] for i in range(0, len(s), m))

    def __repr__(self) -> str:
        return f"Subset({self.to_string()})"


def set_algebra(op: str, x: Subset, y: Subset | None = None):
    """Element-wise ``union``, ``intersection``, ``complement`` or ``is_subset``."""
    if op == "complement":
        return ~x
    if y is None:
        raise ValueError(f"{op} needs two operands")
    if op == "union":
        return x | y
    if op == "intersection":
        return x & y
    if op == "is_subset":
        return x <= y
    raise ValueError(f"unknown set operation {op!r}")


@dataclass(frozen=True)
class DiscreteSpace:
    """A ground set together with a named, ordered generator family.

    The family normally covers the ground set.  Families that do not are
    still representable when built with ``allow_uncovered=True``; the
    ``covering`` flag records which case holds so that solvers can react.
    """

    ground: GroundSet
    names: tuple[str, ...]
    masks: tuple[int, ...]
    descriptor: str = "custom"
    covering: bool = field(default=True, compare=False)

    def __init__(self, ground, names, masks, descriptor="custom", allow_uncovered=False):
        names = tuple(names)
        masks = tuple(int(m) for m in masks)
        if not masks:
            raise ValueError("generator family must be non-empty")
        if len(names) != len(masks):
            raise ValueError("one name per generator")
        for m in masks:
            if m < 0 or m >> ground.size:
                raise ValueError("generator does not fit the ground set")
        cover = 0
        for m in masks:
            cover |= m
        covering = cover == ground.full
        if not covering and not allow_uncovered:
            raise ValueError("generators do not cover the ground set (pass allow_uncovered=True to waive)")
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "covering", covering)

    def __len__(self) -> int:
        return len(self.masks)

    def generator(self, i: int) -> Subset:
        return Subset(self.ground, self.masks[i])

    def members(self) -> list[tuple[str, Subset]]:
        return [(name, Subset(self.ground, m)) for name, m in zip(self.names, self.masks)]

    def named(self, name: str) -> Subset:
        return self.generator(self.names.index(name))

    def subset(self, elements: Iterable = ()) -> Subset:
        return self.ground.subset(elements)

    def uncovered(self) -> int:
        cover = 0
        for m in self.masks:
            cover |= m
        return self.ground.full & ~cover

    def vec(self, element: int) -> int:
        """Membership vector of the element at position ``element`` (bit i = in generator i)."""
        v = 0
        for i, m in enumerate(self.masks):
            if m >> element & 1:
                v |= 1 << i
        return v

    def relativize(self, u: Subset) -> DiscreteSpace:
        if u.ground != self.ground:
            raise GroundMismatch("relativizing set lives over a different ground set")
        return DiscreteSpace(
            self.ground, self.names, [m & u.bits for m in self.masks],
            descriptor=f"{self.descriptor}|rel", allow_uncovered=True,
        )


def relativize(target, u: Subset):
    """Intersect a subset, or every member of a family, with ``u``."""
    if isinstance(target, DiscreteSpace):
        return target.relativize(u)
    if isinstance(target, Subset):
        return target & u
    raise TypeError(f"cannot relativize {type(target).__name__}")
