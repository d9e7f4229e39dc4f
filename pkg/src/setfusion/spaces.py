"""Standard discrete spaces, the graph/Boolean bijection and named example sets."""

from __future__ import annotations

import re

from .core import DiscreteSpace, GroundSet, Subset, binary, iter_bits, num

CLIQUE_LIMIT = 12
RECT_LIMIT = 4


def _set_name(prefix: str, mask: int) -> str:
    return prefix + "{" + ",".join(str(i + 1) for i in iter_bits(mask)) + "}"


def boolean_basis(n: int) -> DiscreteSpace:
    """Literals over {0,1}^n: B_1..B_n then their complements."""
    ground = GroundSet.hypercube(n)
    pos = [0] * n
    for idx, w in enumerate(ground.labels):
        for i in range(n):
            if w[i] == "1":
                pos[i] |= 1 << idx
    neg = [ground.full ^ m for m in pos]
    names = [f"x{i + 1}" for i in range(n)] + [f"~x{i + 1}" for i in range(n)]
    return DiscreteSpace(ground, names, pos + neg, descriptor=f"bool:{n}")


def monotone_basis(n: int) -> DiscreteSpace:
    """Positive literals plus the empty set and the full cube."""
    base = boolean_basis(n)
    ground = base.ground
    masks = list(base.masks[:n]) + [0, ground.full]
    names = list(base.names[:n]) + ["0", "1"]
    return DiscreteSpace(ground, names, masks, descriptor=f"mono:{n}")


def _rows_cols(n_rows: int, n_cols: int) -> tuple[list[int], list[int]]:
    rows = []
    for i in range(n_rows):
        rows.append(((1 << n_cols) - 1) << (i * n_cols))
    cols = []
    for j in range(n_cols):
        m = 0
        for i in range(n_rows):
            m |= 1 << (i * n_cols + j)
        cols.append(m)
    return rows, cols


def graph_stars(n_rows: int, n_cols: int | None = None) -> DiscreteSpace:
    """Row stars R_1..R_N followed by column stars C_1..C_M."""
    n_cols = n_rows if n_cols is None else n_cols
    ground = GroundSet.grid(n_rows, n_cols)
    rows, cols = _rows_cols(n_rows, n_cols)
    names = [f"R{i + 1}" for i in range(n_rows)] + [f"C{j + 1}" for j in range(n_cols)]
    return DiscreteSpace(ground, names, rows + cols, descriptor=f"stars:{n_rows}x{n_cols}")


def clique_family(n_rows: int, n_cols: int | None = None) -> DiscreteSpace:
    """All unions of row stars W_S, then all unions of column stars Z_T."""
    n_cols = n_rows if n_cols is None else n_cols
    if n_rows > CLIQUE_LIMIT or n_cols > CLIQUE_LIMIT:
        raise ValueError(f"clique family is limited to N, M <= {CLIQUE_LIMIT}")
    ground = GroundSet.grid(n_rows, n_cols)
    rows, cols = _rows_cols(n_rows, n_cols)
    names, masks = [], []
    for part, stars, prefix in ((n_rows, rows, "W"), (n_cols, cols, "Z")):
        for s in range(1 << part):
            m = 0
            for i in iter_bits(s):
                m |= stars[i]
            names.append(_set_name(prefix, s))
            masks.append(m)
    return DiscreteSpace(ground, names, masks, descriptor=f"clique:{n_rows}x{n_cols}")


def rectangles(n: int) -> DiscreteSpace:
    """Every combinatorial rectangle U x V inside [N] x [N]."""
    if n > RECT_LIMIT:
        raise ValueError(f"rectangle family is limited to N <= {RECT_LIMIT}")
    ground = GroundSet.grid(n, n)
    names, masks = [], []
    for us in range(1 << n):
        for vs in range(1 << n):
            m = 0
            for i in iter_bits(us):
                for j in iter_bits(vs):
                    m |= 1 << (i * n + j)
            names.append(_set_name("U", us) + "x" + _set_name("V", vs))
            masks.append(m)
    return DiscreteSpace(ground, names, masks, descriptor=f"rect:{n}")


def tensor_stars(n: int, d: int) -> DiscreteSpace:
    """Generators of [N]^d fixing exactly one coordinate, coordinate-major order."""
    ground = GroundSet.grid(*([n] * d))
    names, masks = [], []
    for k in range(d):
        for a in range(1, n + 1):
            m = 0
            for idx, label in enumerate(ground.labels):
                if label[k] == a:
                    m |= 1 << idx
            names.append(f"T{k + 1}={a}")
            masks.append(m)
    return DiscreteSpace(ground, names, masks, descriptor=f"tensor:{n}^{d}")


def custom_family(strings: list[str]) -> DiscreteSpace:
    """Space over a plain ground set given by 0/1 strings, one per generator."""
    if not strings:
        raise ValueError("need at least one generator")
    size = len(strings[0])
    ground = GroundSet.plain(size, labels=range(size))
    masks = [ground.parse(s).bits for s in strings]
    names = [f"B{i + 1}" for i in range(len(strings))]
    return DiscreteSpace(ground, names, masks, descriptor="family:" + ",".join(strings), allow_uncovered=True)


_DESCRIPTORS = {
    "stars": (r"(\d+)x(\d+)", lambda a, b: graph_stars(int(a), int(b))),
    "bool": (r"(\d+)", lambda a: boolean_basis(int(a))),
    "mono": (r"(\d+)", lambda a: monotone_basis(int(a))),
    "clique": (r"(\d+)x(\d+)", lambda a, b: clique_family(int(a), int(b))),
    "rect": (r"(\d+)", lambda a: rectangles(int(a))),
    "tensor": (r"(\d+)\^(\d+)", lambda a, b: tensor_stars(int(a), int(b))),
}


def make_generators(descriptor: str) -> DiscreteSpace:
    """Build a space from a descriptor such as ``stars:4x4`` or ``bool:2``."""
    kind, _, params = descriptor.partition(":")
    if kind == "family":
        return custom_family(params.split(","))
    if kind not in _DESCRIPTORS:
        raise ValueError(f"unknown space descriptor {descriptor!r}")
    pattern, build = _DESCRIPTORS[kind]
    match = re.fullmatch(pattern, params)
    if not match:
        raise ValueError(f"malformed space descriptor {descriptor!r}")
    if any(int(g) < 1 for g in match.groups()):
        raise ValueError(f"space parameters must be positive in {descriptor!r}")
    return build(*match.groups())


# -- graph <-> Boolean function bijection ---------------------------------

def phi_forward(n: int, u: int, v: int) -> str:
    """(u, v) in [2^n] x [2^n]  ->  binary(u) binary(v)."""
    return binary(u, n) + binary(v, n)


def phi_backward(n: int, w: str) -> tuple[int, int]:
    if len(w) != 2 * n or set(w) - {"0", "1"}:
        raise ValueError(f"expected a {2 * n}-bit string, got {w!r}")
    return num(w[:n]) + 1, num(w[n:]) + 1


def phi_map(n: int, direction: str, point):
    if direction == "forward":
        u, v = point
        return phi_forward(n, u, v)
    if direction == "backward":
        return phi_backward(n, point)
    raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")


def _log2_exact(size: int) -> int:
    n = size.bit_length() - 1
    if size < 2 or 1 << n != size:
        raise ValueError(f"{size} is not a power of two (>= 2)")
    return n


def phi_index_map(n: int) -> list[int]:
    """Position map of phi: grid index of (u, v) -> hypercube index of phi(u, v)."""
    size = 1 << n
    # row-major (u-1)*N + (v-1) is exactly num(binary(u) binary(v))
    return list(range(size * size))


def function_from_graph(g: Subset) -> Subset:
    """Image of a graph G over [2^n] x [2^n] under phi, as a subset of {0,1}^{2n}."""
    ground = g.ground
    if ground.kind != "grid" or len(ground.dims) != 2 or ground.dims[0] != ground.dims[1]:
        raise ValueError("function_from_graph needs a square grid")
    n = _log2_exact(ground.dims[0])
    cube = GroundSet.hypercube(2 * n)
    bits = 0
    for u, v in g:
        bits |= 1 << cube.index(phi_forward(n, u, v))
    return Subset(cube, bits)


def graph_from_function(f: Subset) -> Subset:
    """Preimage under phi of a subset of {0,1}^{2n}."""
    ground = f.ground
    if ground.kind != "hypercube" or ground.dims[0] % 2:
        raise ValueError("graph_from_function needs an even-dimensional hypercube")
    n = ground.dims[0] // 2
    grid = GroundSet.grid(1 << n, 1 << n)
    return grid.subset(phi_backward(n, w) for w in f)


# -- catalog -----------------------------------------------------------------

def neq(n: int) -> Subset:
    """Off-diagonal graph {(u, v) : u != v} inside [N] x [N]."""
    ground = GroundSet.grid(n, n)
    return ground.subset((u, v) for u, v in ground.labels if u != v)


def chessboard(n_rows: int, n_cols: int | None = None) -> Subset:
    """{(i, j) : i + j even}, the pattern drawn for the 5x5 example."""
    n_cols = n_rows if n_cols is None else n_cols
    ground = GroundSet.grid(n_rows, n_cols)
    return ground.subset((i, j) for i, j in ground.labels if (i + j) % 2 == 0)


def duality(f: Subset) -> Subset:
    """F over {0,1}^{1+m}: F(1, z) = f(z) and F(0, z) = 1 - f(z)."""
    if f.ground.kind != "hypercube":
        raise ValueError("duality needs a function over a Boolean hypercube")
    m = f.ground.dims[0]
    cube = GroundSet.hypercube(1 + m)
    bits = 0
    for w in f.ground.labels:
        inside = w in f
        bits |= 1 << cube.index(("1" if inside else "0") + w)
    return Subset(cube, bits)


def parse_catalog(name: str) -> Subset:
    """Resolve ``neq:N`` or ``chess:NxM`` to a subset."""
    kind, _, params = name.partition(":")
    if kind == "neq" and params.isdigit() and int(params) >= 1:
        return neq(int(params))
    if kind == "chess":
        match = re.fullmatch(r"(\d+)x(\d+)", params)
        if match and int(match.group(1)) >= 1 and int(match.group(2)) >= 1:
            return chessboard(int(match.group(1)), int(match.group(2)))
    raise ValueError(f"unknown catalog set {name!r}")


def is_catalog_name(name: str) -> bool:
    return bool(re.fullmatch(r"neq:\d+|chess:\d+x\d+", name))


def star_unions_for_literal(space: DiscreteSpace, n: int, literal: int) -> list[int]:
    """Stars whose union is phi^-1 of a literal of bool:2n (indices into ``space``).

    Literal ``i < 2n`` is x_{i+1}; ``i >= 2n`` is its complement.  Rows are the
    first N stars and columns the next N, as built by :func:`graph_stars`.
    """
    size = 1 << n
    bit = literal % (2 * n)
    want = "0" if literal >= 2 * n else "1"
    stars = []
    if bit < n:
        for u in range(1, size + 1):
            if binary(u, n)[bit] == want:
                stars.append(u - 1)
    else:
        for v in range(1, size + 1):
            if binary(v, n)[bit - n] == want:
                stars.append(size + v - 1)
    return stars
