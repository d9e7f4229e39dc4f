from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from setfusion.constructions import Builder, g
from setfusion.core import GroundSet, Subset, popcount
from setfusion.solvers import SearchBudget, finiteness_test, solve_side_count
from setfusion.spaces import (
    boolean_basis, chessboard, clique_family, duality, function_from_graph, graph_from_function,
    graph_stars, make_generators, monotone_basis, neq, parse_catalog, phi_index_map, phi_map, rectangles,
    star_unions_for_literal, tensor_stars,
)


def test_graph_stars_2x2():
    sp = make_generators("stars:2x2")
    assert len(sp) == 4
    assert sorted(sp.named("R1")) == [(1, 1), (1, 2)]


def test_boolean_basis_2():
    sp = boolean_basis(2)
    assert len(sp) == 4 and sp.ground.size == 4
    assert sorted(sp.generator(0)) == ["10", "11"]
    assert sorted(sp.generator(2)) == ["00", "01"]


def test_rectangles_count():
    assert len(rectangles(2)) == 16


def test_other_families():
    assert len(monotone_basis(3)) == 5
    assert monotone_basis(2).masks[2] == 0
    assert len(clique_family(2, 3)) == 4 + 8
    t = tensor_stars(3, 2)
    assert len(t) == 6
    assert all(popcount(m) == 3 for m in t.masks)
    assert make_generators("tensor:2^3").ground.size == 8
    fam = make_generators("family:110,011")
    assert fam.masks == (0b011, 0b110)


@pytest.mark.parametrize("bad", ["clique:13x2", "rect:5", "stars:0x2", "bool:x", "blah:1", "stars:2"])
def test_descriptor_errors(bad):
    with pytest.raises(ValueError):
        make_generators(bad)


def test_phi_examples():
    assert phi_map(2, "forward", (2, 3)) == "0110"
    assert phi_map(1, "forward", (1, 2)) == "01"
    assert phi_map(2, "backward", "0000") == (1, 1)
    with pytest.raises(ValueError):
        phi_map(1, "forward", (3, 1))
    with pytest.raises(ValueError):
        phi_map(1, "backward", "011")


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 1 << n), st.integers(1, 1 << n))))
def test_phi_round_trip(data):
    n, u, v = data
    assert phi_map(n, "backward", phi_map(n, "forward", (u, v))) == (u, v)


def test_phi_index_map_is_position_identity():
    n = 2
    grid, cube = GroundSet.grid(4, 4), GroundSet.hypercube(4)
    for i, x in enumerate(phi_index_map(n)):
        assert cube.labels[x] == phi_map(n, "forward", grid.labels[i])


def test_function_from_graph_examples():
    grid = GroundSet.grid(2, 2)
    assert function_from_graph(grid.empty()).bits == 0
    assert sorted(function_from_graph(grid.subset([(1, 2)]))) == ["01"]
    assert sorted(function_from_graph(neq(2))) == ["01", "10"]
    with pytest.raises(ValueError):
        function_from_graph(GroundSet.grid(3, 3).empty())


@given(st.integers(0, (1 << 16) - 1))
def test_graph_function_round_trip(bits):
    g_set = Subset(GroundSet.grid(4, 4), bits)
    f = function_from_graph(g_set)
    assert len(f) == len(g_set)
    assert graph_from_function(f) == g_set


def test_catalog():
    assert sorted(neq(2)) == [(1, 2), (2, 1)]
    board = chessboard(5, 5)
    assert len(board) == 13 and (1, 1) in board and (1, 2) not in board
    assert parse_catalog("chess:5x5") == board
    with pytest.raises(ValueError):
        parse_catalog("neq:x")


def test_duality_target():
    cube = GroundSet.hypercube(2)
    f = cube.subset(["01", "11"])
    big = duality(f)
    for z in cube.labels:
        assert ("1" + z in big) == (z in f)
        assert ("0" + z in big) == (z not in f)


def test_star_vec_weight_two_and_finiteness_3x3():
    sp = graph_stars(3, 3)
    for w in range(sp.ground.size):
        assert popcount(sp.vec(w)) == 2
    for bits in range(1, sp.ground.full):
        assert finiteness_test(Subset(sp.ground, bits), sp)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phi_preimages_of_literals_are_star_unions(n):
    big = 1 << n
    stars = graph_stars(big, big)
    basis = boolean_basis(2 * n)
    index = phi_index_map(n)
    for lit in range(4 * n):
        want = sum(1 << i for i, x in enumerate(index) if basis.masks[lit] >> x & 1)
        members = star_unions_for_literal(stars, n, lit)
        b = Builder(stars)
        ref = b.union(g(i) for i in members)
        assert b.value_of(ref) == want


def test_clique_family_matches_stars_2x2():
    stars, cliques = graph_stars(2, 2), clique_family(2, 2)
    budget = SearchBudget(max_depth=4)
    for bits in range(1, stars.ground.full):
        a = Subset(stars.ground, bits)
        x = solve_side_count(a, stars, budget=budget, hint=False)
        y = solve_side_count(a, cliques, budget=budget)
        assert x.value == y.value
