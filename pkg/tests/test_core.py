from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from setfusion.core import (
    DiscreteSpace, GroundMismatch, GroundSet, Subset, binary, iter_bits, num, relativize, set_algebra,
)
from setfusion.spaces import graph_stars


def test_union_with_empty_is_identity():
    ground = GroundSet.plain(5)
    x = ground.parse("10110")
    assert set_algebra("union", x, ground.empty()) == x


def test_intersection_with_complement_is_empty():
    x = GroundSet.plain(5).parse("10110")
    assert set_algebra("intersection", x, set_algebra("complement", x)).bits == 0


def test_row_meets_column_in_one_cell():
    sp = graph_stars(2, 2)
    assert list(sp.named("R1") & sp.named("C2")) == [(1, 2)]


def test_is_subset_and_mismatch():
    ground = GroundSet.plain(3)
    assert set_algebra("is_subset", ground.parse("100"), ground.parse("110"))
    other = GroundSet.plain(4)
    with pytest.raises(GroundMismatch):
        ground.parse("100") | other.parse("1000")
    with pytest.raises(ValueError):
        set_algebra("xor", ground.parse("100"), ground.parse("110"))


def test_grid_and_hypercube_order():
    grid = GroundSet.grid(3, 4)
    assert grid.index((2, 3)) == (2 - 1) * 4 + (3 - 1)
    cube = GroundSet.hypercube(3)
    for w in cube.labels:
        assert cube.index(w) == num(w)
    assert num("10") == 2 and binary(3, 2) == "10"


def test_ground_validation():
    with pytest.raises(ValueError):
        GroundSet.plain(0)
    with pytest.raises(ValueError):
        GroundSet(("a", "a"))
    with pytest.raises(ValueError):
        GroundSet.plain(3).parse("1010")
    with pytest.raises(ValueError):
        GroundSet.plain(3).parse("1x0")


def test_matrix_form_round_trip():
    grid = GroundSet.grid(2, 3)
    x = grid.parse("101\n010")
    assert x.to_string() == "101010"
    assert x.to_matrix() == "101\n010"
    with pytest.raises(ValueError):
        grid.parse("10\n01\n11")


def test_relativize_examples():
    sp = graph_stars(2, 2)
    diag = sp.subset([(1, 1), (2, 2)])
    assert list(relativize(sp.named("R1"), diag)) == [(1, 1)]
    rel = relativize(sp, diag)
    assert [list(x) for _, x in rel.members()] == [[(1, 1)], [(2, 2)], [(1, 1)], [(2, 2)]]
    assert rel.names == sp.names
    a = sp.subset([(1, 2)])
    assert relativize(a, sp.ground.everything()) == a


def test_uncovered_family_is_tagged():
    ground = GroundSet.plain(3)
    with pytest.raises(ValueError):
        DiscreteSpace(ground, ["B1"], [0b011])
    sp = DiscreteSpace(ground, ["B1"], [0b011], allow_uncovered=True)
    assert not sp.covering and sp.uncovered() == 0b100


def test_vec_lists_generators_through_an_element():
    sp = graph_stars(2, 3)
    assert sp.vec(sp.ground.index((2, 3))) == (1 << 1) | (1 << (2 + 2))


def test_iter_bits():
    assert list(iter_bits(0b101001)) == [0, 3, 5]


@pytest.mark.parametrize("size", range(1, 5))
def test_boolean_laws_exhaustive(size):
    ground = GroundSet.plain(size)
    sets = [Subset(ground, b) for b in range(1 << size)]
    for x in sets:
        assert ~~x == x
        for y in sets:
            assert x | y == y | x and x & y == y & x
            assert x | x == x and x & x == x
            assert ~(x | y) == ~x & ~y


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), *[st.integers(0, (1 << n) - 1)] * 3)))
def test_associativity_random(data):
    n, a, b, c = data
    ground = GroundSet.plain(n)
    x, y, z = (Subset(ground, v) for v in (a, b, c))
    assert (x | y) | z == x | (y | z)
    assert (x & y) & z == x & (y & z)
    assert (x <= y) == ((x | y) == y)
