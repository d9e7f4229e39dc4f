from __future__ import annotations

import random
import pytest

from conftest import random_construction, random_space
from setfusion.constructions import evaluate_cyclic
from setfusion.core import GroundSet, Subset, iter_bits, popcount
from setfusion.fusion import (
    Lambda, SemiFilter, build_cover_graph, candidate_pairs, canonical_filters, classify_family,
    closure_gw, compile_lambda, covers, covers_canonical, enumerate_semifilters, extract_lambda,
    format_lambda, induce_lambda, is_above, is_inert, neq_separates, parse_lambda, preserves,
    verify_lambda,
)
from setfusion.solvers import SearchBudget, solve_rho
from setfusion.spaces import (
    boolean_basis, function_from_graph, graph_stars, make_generators, neq, rectangles,
)

D11, D22 = 1 << 0, 1 << 3  # diagonal cells of the 2x2 grid
STARS2 = graph_stars(2, 2)
NEQ2_U = D11 | D22
NEQ2_LAMBDA = Lambda(NEQ2_U, [(D11, D22)])


def brute_force_semifilters(universe: int) -> set[frozenset]:
    """Every non-empty upward-closed family over U avoiding the empty set."""
    subsets = []
    sub = universe
    while True:
        subsets.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & universe
    out = set()
    for choice in range(1, 1 << len(subsets)):
        fam = {subsets[i] for i in range(len(subsets)) if choice >> i & 1}
        if 0 in fam:
            continue
        if all((x | y) in fam for x in fam for y in subsets):
            out.add(frozenset(fam))
    return out


def upward(f: SemiFilter) -> frozenset:
    u = f.universe
    out = set()
    sub = u
    while True:
        if sub in f:
            out.add(sub)
        if sub == 0:
            break
        sub = (sub - 1) & u
    return frozenset(out)


def test_classify_examples():
    assert classify_family([0b11], 0b11) == "semifilter"
    assert classify_family([0b01], 0b11) == "semi_ultra_filter"
    assert classify_family([0], 0b11) == "not_semifilter"
    assert classify_family([], 0b11) == "not_semifilter"
    assert classify_family([0b01, 0b11], 0b11) == "not_semifilter"
    with pytest.raises(ValueError):
        classify_family([0b100], 0b11)


def test_ultra_agrees_with_direct_definition():
    for k in range(1, 5):
        u = (1 << k) - 1
        for f in enumerate_semifilters(u):
            direct = all(s in f or (u ^ s) in f for s in range(1 << k))
            assert f.is_ultra() == direct


@pytest.mark.parametrize("k, count", [(1, 1), (2, 4), (3, 18), (4, 166)])
def test_enumeration_counts_match_brute_force(k, count):
    u = (1 << k) - 1
    fs = enumerate_semifilters(u)
    assert len(fs) == count
    assert {upward(f) for f in fs} == brute_force_semifilters(u)


def test_enumeration_ultra_and_cap():
    assert len(enumerate_semifilters(0b11, ultra_only=True)) == 3
    assert len(enumerate_semifilters(0b11111)) == 7579
    with pytest.raises(ValueError):
        enumerate_semifilters(0b111111)


def test_semifilter_validation():
    with pytest.raises(ValueError):
        SemiFilter(0b11, ())
    with pytest.raises(ValueError):
        SemiFilter(0b11, (0,))
    with pytest.raises(ValueError):
        SemiFilter(0b11, (0b01, 0b11))


def test_is_above_neq2():
    w = STARS2.ground.index((1, 2))
    both = SemiFilter.generated_by(NEQ2_U, [D11, D22])
    assert is_above(both, w, STARS2, NEQ2_U)
    assert not is_above(SemiFilter(NEQ2_U, (D11,)), w, STARS2, NEQ2_U)
    with pytest.raises(ValueError):
        is_above(SemiFilter(0b1, (0b1,)), w, STARS2, NEQ2_U)


def test_is_above_needs_both_stars_through_w():
    rng = random.Random(4)
    sp = graph_stars(16, 16)
    bits = rng.getrandbits(256) | 1 << sp.ground.index((2, 15))
    u = sp.ground.full ^ bits
    row, col = sp.named("R2").bits & u, sp.named("C15").bits & u
    w = sp.ground.index((2, 15))
    assert row and col
    assert is_above(SemiFilter.generated_by(u, [row, col]), w, sp, u)
    assert not is_above(SemiFilter(u, (row,)), w, sp, u) or col & ~row == 0
    assert not is_above(SemiFilter(u, (col,)), w, sp, u) or row & ~col == 0


def test_rectangles_have_nothing_above():
    sp = rectangles(2)
    for bits in range(1, sp.ground.full):
        a = Subset(sp.ground, bits)
        u = sp.ground.full ^ bits
        if popcount(u) > 3:
            continue
        for f in enumerate_semifilters(u):
            assert not any(is_above(f, w, sp, u) for w in iter_bits(bits))


def test_preserves_examples():
    f = SemiFilter.generated_by(NEQ2_U, [D11, D22])
    assert preserves(f, Lambda(NEQ2_U))
    assert preserves(f, Lambda(NEQ2_U, [(D11, NEQ2_U)]))
    assert not preserves(f, NEQ2_LAMBDA)


def test_closure_examples():
    w12, w11 = STARS2.ground.index((1, 2)), STARS2.ground.index((1, 1))
    assert closure_gw(w12, STARS2, NEQ2_U, NEQ2_LAMBDA)[1]
    state, reached = closure_gw(w11, STARS2, NEQ2_U, NEQ2_LAMBDA)
    assert not reached and D22 not in state
    a = STARS2.named("R1")
    u = STARS2.ground.full ^ a.bits
    assert closure_gw(w11, STARS2, u, Lambda(u))[1]


def test_verify_examples():
    a = neq(2)
    for mode in ("closure", "enumerate"):
        assert verify_lambda(a, STARS2, NEQ2_LAMBDA, mode) == (True, None)
    ok, witness = verify_lambda(a, STARS2, Lambda(NEQ2_U), "enumerate")
    assert not ok
    f, w = witness
    assert f.minimal == (D11, D22)
    rect = rectangles(2)
    for bits in range(1, rect.ground.full):
        g_set = Subset(rect.ground, bits)
        assert verify_lambda(g_set, rect, Lambda(rect.ground.full ^ bits))[0]
    with pytest.raises(ValueError):
        verify_lambda(rect.ground.everything(), rect, Lambda(0))


def test_closure_and_enumerate_agree_random():
    rng = random.Random(1)
    for _ in range(300):
        sp = random_space(rng, rng.randint(2, 7), rng.randint(1, 4))
        u = 0
        while popcount(u) == 0 or popcount(u) > 4 or u == sp.ground.full:
            u = rng.getrandbits(sp.ground.size)
        a = Subset(sp.ground, sp.ground.full ^ u)
        subs = [x for x in range(1 << sp.ground.size) if x & ~u == 0]
        lam = Lambda(u, [(rng.choice(subs), rng.choice(subs)) for _ in range(rng.randint(0, 3))])
        assert verify_lambda(a, sp, lam, "closure")[0] == verify_lambda(a, sp, lam, "enumerate")[0]


def test_closure_state_is_least():
    rng = random.Random(6)
    for _ in range(100):
        sp = random_space(rng, rng.randint(2, 6), rng.randint(1, 4))
        u = rng.getrandbits(sp.ground.size)
        if not u or popcount(u) > 4:
            continue
        subs = [x for x in range(1 << sp.ground.size) if x & ~u == 0]
        lam = Lambda(u, [(rng.choice(subs), rng.choice(subs)) for _ in range(rng.randint(0, 3))])
        filters = enumerate_semifilters(u)
        for w in range(sp.ground.size):
            state, reached = closure_gw(w, sp, u, lam)
            good = [f for f in filters if is_above(f, w, sp, u) and preserves(f, lam)]
            if reached:
                assert not good
                continue
            assert is_above(state, w, sp, u) and preserves(state, lam)
            assert all(state.is_subfamily_of(f) for f in good)


def test_compile_examples():
    a = neq(2)
    seq, _ = compile_lambda(a, STARS2, NEQ2_LAMBDA)
    assert seq.n_intersections == 1 and evaluate_cyclic(seq)[0] == a
    c, trace = compile_lambda(a, STARS2, NEQ2_LAMBDA, target="acyclic")
    assert c.value == a and c.cost[1] == 1
    assert trace.stages_s[-1][0] == a.bits
    with pytest.raises(ValueError):
        compile_lambda(a, STARS2, Lambda(NEQ2_U))


def test_compile_neq4():
    sp, a = graph_stars(4, 4), neq(4)
    r = solve_rho(a, sp)
    assert r.value == 2
    c, trace = compile_lambda(a, sp, r.witness, target="acyclic")
    assert c.value == a and c.cost[1] <= 4
    assert len(trace.stages_s) == 3
    seq, _ = compile_lambda(a, sp, r.witness)
    assert seq.n_intersections == 2


def test_compile_stage_recurrence():
    """Stage values follow the recurrence: S^j_C is the union of T^j_C' over C' inside C."""
    sp, a = graph_stars(4, 4), neq(4)
    lam = solve_rho(a, sp).witness
    _, trace = compile_lambda(a, sp, lam, target="acyclic")
    pairs = lam.ordered()
    for j, (t_vals, s_vals) in enumerate(zip(trace.stages_t, trace.stages_s)):
        for v, got in s_vals.items():
            want = 0
            for (tag, c), t in zip(trace.omega, t_vals):
                if c & ~v == 0:
                    want |= t
            assert got == want
        if j == 0:
            continue
        prev = trace.stages_s[j - 1]
        for (tag, c), t in zip(trace.omega, t_vals):
            want = prev[c]
            if tag == "EH":
                for e, h in pairs:
                    if e & h == c:
                        want |= prev[e] & prev[h]
            assert t == want


def test_extracted_lambdas_are_valid():
    rng = random.Random(9)
    done = 0
    while done < 200:
        sp = random_space(rng, rng.randint(2, 8), rng.randint(2, 4))
        c = random_construction(rng, sp, rng.randint(1, 6))
        if c.value.is_trivial():
            continue
        lam = extract_lambda(c, c.value)
        assert len(lam) <= c.cost[1]
        assert verify_lambda(c.value, sp, lam)[0]
        done += 1


def test_cover_graph_examples():
    cg = build_cover_graph(neq(2), STARS2)
    assert len(cg.filters) == 1
    assert cg.filters[0].minimal == (D11, D22)
    assert any(cg.covers(p, 0) for p in range(len(cg.pairs)))
    rect = rectangles(2)
    assert build_cover_graph(rect.ground.parse("1000"), rect).filters == []
    with pytest.raises(ValueError):
        build_cover_graph(Subset(graph_stars(3, 3).ground, 1), graph_stars(3, 3))


def test_cover_graph_edges_mean_not_preserved():
    sp = graph_stars(3, 3)
    a = sp.ground.parse("111010110")
    cg = build_cover_graph(a, sp)
    u = sp.ground.full ^ a.bits
    for i, p in enumerate(cg.pairs):
        for j, f in enumerate(cg.filters):
            assert cg.covers(i, j) == (not preserves(f, Lambda(u, [p])))


def test_inert_pairs_cover_nothing():
    for k in range(1, 5):
        u = (1 << k) - 1
        filters = enumerate_semifilters(u)
        subs = range(1 << k)
        for e in subs:
            for h in subs:
                if is_inert(e, h):
                    assert not any(covers(f, (e, h)) for f in filters)


def test_normalized_pairs_dominate():
    for k in range(1, 5):
        u = (1 << k) - 1
        filters = enumerate_semifilters(u)
        for e, h in candidate_pairs(u):
            wide = (e | (u ^ h), h)
            assert wide[0] | wide[1] == u
            for f in filters:
                if covers(f, (e, h)):
                    assert covers(f, wide)
    assert len(candidate_pairs(0b1111, normalized=True)) == 25


def test_canonical_filters_neq():
    for n in range(2, 6):
        fs = canonical_filters(neq(n))
        assert len(fs) == n * (n - 1)
    assert covers_canonical(neq(2), (D11, D22), (1, 2))
    assert not covers_canonical(neq(2), (NEQ2_U, 0), (2, 1))


@pytest.mark.parametrize("n", range(2, 9))
def test_canonical_cover_matches_separation_criterion(n):
    g_set = neq(n)
    fs = canonical_filters(g_set)
    diag = [1 << ((u - 1) * n + (u - 1)) for u in range(1, n + 1)]
    subs = []
    for choice in range(1 << n):
        subs.append(sum(diag[i] for i in range(n) if choice >> i & 1))
    for e in subs:
        for h in subs:
            for edge, f in fs:
                assert covers(f, (e, h)) == neq_separates(n, (e, h), edge)


def test_canonical_filter_needs_both_sides():
    grid = GroundSet.grid(2, 2)
    g_set = grid.parse("1101")
    edges = [e for e, _ in canonical_filters(g_set)]
    assert (1, 1) not in edges  # row 1 holds no cell of the complement
    assert (2, 2) not in edges


def test_induce_lambda():
    assert len(induce_lambda(Lambda(0), 1)) == 0
    from setfusion.constructions import Construction, INTER, UNION, Step, g, s

    bool2 = boolean_basis(2)
    circuit = Construction(bool2, (Step(INTER, g(0), g(3)), Step(INTER, g(2), g(1)), Step(UNION, s(0), s(1))))
    f = function_from_graph(neq(2))
    assert circuit.value == f
    lam_fn = extract_lambda(circuit, f)
    lam_g = induce_lambda(lam_fn, 1)
    assert len(lam_g) <= len(lam_fn)
    assert verify_lambda(neq(2), STARS2, lam_g)[0]


def test_induce_lambda_random_n2():
    rng = random.Random(12)
    basis, stars = boolean_basis(4), graph_stars(4, 4)
    done = 0
    while done < 40:
        c = random_construction(rng, basis, rng.randint(2, 6))
        if c.value.is_trivial():
            continue
        lam = induce_lambda(extract_lambda(c, c.value), 2)
        g_set = Subset(stars.ground, c.value.bits)
        assert verify_lambda(g_set, stars, lam)[0]
        done += 1


def test_lambda_certificate_round_trip():
    text = format_lambda(NEQ2_LAMBDA, STARS2, neq(2))
    assert text == "lambda stars:2x2\ntarget 0110\npairs 1\n10\n01\n"
    desc, a, lam = parse_lambda(text)
    assert desc == "stars:2x2" and a == neq(2) and lam == NEQ2_LAMBDA
    with pytest.raises(ValueError):
        parse_lambda("lambda stars:2x2\ntarget 0110\npairs 2\n10\n01\n")
    with pytest.raises(ValueError):
        parse_lambda("lambda stars:2x2\ntarget 0110\npairs 1\n101\n01\n")


def test_lambda_validation():
    with pytest.raises(ValueError):
        Lambda(0b01, [(0b10, 0b01)])
    assert len(Lambda(0b11, [(0b01, 0b10), (0b10, 0b01)])) == 1


def test_solver_lambda_for_neq4_certificate():
    sp = make_generators("stars:4x4")
    r = solve_rho(neq(4), sp, budget=SearchBudget(max_depth=3))
    text = format_lambda(r.witness, sp, neq(4))
    _, a, lam = parse_lambda(text)
    assert verify_lambda(a, sp, lam)[0]
