import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majlogic.codes import (
    TannerGraph,
    build_ag,
    build_pg,
    check_expansion,
    combine,
    encoder_from_parity,
    from_alist,
    geometry_params,
    girth,
    hamming_distance,
    random_codeword,
    read_alist,
    to_alist,
    write_alist,
)
from majlogic.errors import AlistError, DomainError, InfeasibleError
from majlogic.gf import GF2m, poly_mulmod

from oracles import brute_girth, rank_gf2


# -- GF(2^s) -----------------------------------------------------------------


@pytest.mark.parametrize("s", range(1, 7))
def test_field_axioms(s):
    F = GF2m(s)
    q = F.order
    rng = np.random.default_rng(s)
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == 1
    for _ in range(200):
        a, b, c = (int(x) for x in rng.integers(0, q, 3))
        assert F.mul(a, b) == F.mul(b, a)
        assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
        assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)


def test_field_multiplicative_group_is_cyclic():
    # x generates GF(16)* for the primitive modulus x^4 + x + 1
    F = GF2m(4)
    seen = {1}
    g = 1
    for _ in range(14):
        g = F.mul(g, 2)
        seen.add(g)
    assert len(seen) == 15


def test_field_element_operators():
    F = GF2m(3)
    a, b = F(3), F(6)
    assert (a + b).value == 5
    assert (a * b / b) == a
    assert a**7 == F(1)
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_field_rejects_unsupported_size():
    with pytest.raises(DomainError):
        GF2m(7)


def test_poly_mulmod_hand_value():
    # (x^2 + x)(x + 1) = x^3 + x = (x + 1) + x = 1 mod x^3 + x + 1
    assert poly_mulmod(0b110, 0b011, 3, 0b1011) == 1


# -- geometry codes ----------------------------------------------------------


@pytest.mark.parametrize("s", [1, 2, 3])
def test_pg_parameters_and_pairwise_intersections(s):
    g = build_pg(s)
    q = 1 << s
    assert g.n == g.m == q * q + q + 1
    assert g.gamma == g.rho == q + 1
    lines = [set(c) for c in g.chk_adj]
    for a, b in itertools.combinations(lines, 2):
        assert len(a & b) == 1
    assert girth(g) == 6


@pytest.mark.parametrize("s", [1, 2, 3])
def test_ag_parameters(s):
    g = build_ag(s)
    q = 1 << s
    assert (g.n, g.m, g.gamma, g.rho) == (q * (q + 1), q * q, q, q + 1)
    assert g.n * g.gamma == g.m * g.rho == q * q * (q + 1)
    assert girth(g) == 6


def test_fano_plane():
    g = build_pg(1)
    assert (g.n, g.gamma, g.rho) == (7, 3, 3)
    # every pair of points lies on exactly one line
    for a, b in itertools.combinations(range(7), 2):
        assert sum(1 for line in g.chk_adj if a in line and b in line) == 1


def test_geometry_params_match_construction():
    for s in (1, 2, 3):
        for fam, build in (("pg", build_pg), ("ag", build_ag)):
            g = build(s)
            meta = geometry_params(fam, s)
            assert (meta["n"], meta["m"], meta["gamma"], meta["rho"]) == (g.n, g.m, g.gamma, g.rho)


@pytest.mark.parametrize("s", [0, 7])
def test_geometry_size_guard(s):
    with pytest.raises(DomainError):
        build_pg(s)
    with pytest.raises(DomainError):
        build_ag(s)


def test_construction_is_deterministic():
    assert build_pg(3) == build_pg(3)
    assert to_alist(build_ag(3)) == to_alist(build_ag(3))


# -- graph invariants --------------------------------------------------------


def test_graph_rejects_asymmetric_adjacency():
    with pytest.raises(DomainError):
        TannerGraph(2, 1, ((0,), (0,)), ((0,),), 1, 1)


def test_graph_rejects_parallel_edges():
    with pytest.raises(DomainError):
        TannerGraph(1, 1, ((0, 0),), ((0, 0),), 2, 2)


def test_gate_tables_consistent():
    g = build_pg(2)
    for v in range(g.n):
        for k, e in enumerate(g.var_edges[v]):
            c = g.var_adj[v][k]
            assert g.edge_chk[e] == c and g.edge_var[e] == v
            assert sorted(g.gate_inputs[e]) == sorted(u for u in g.chk_adj[c] if u != v)
            assert g.edge_index(c, v) == e


# -- alist -------------------------------------------------------------------


@pytest.mark.parametrize("g", [build_pg(1), build_pg(2), build_ag(1), build_ag(2)])
def test_alist_round_trip(g):
    assert from_alist(to_alist(g)) == g


def test_alist_file_round_trip(tmp_path):
    g = build_pg(2)
    path = tmp_path / "pg.alist"
    write_alist(g, path)
    assert read_alist(path) == g


def test_hand_written_ag1_alist():
    # points (x, y) of AG(2,2) numbered x*2+y; lines y=b, y=x+b, x=c
    text = """6 4
2 3
2 2 2 2 2 2
3 3 3 3
1 3
2 4
1 4
2 3
1 2
3 4
1 3 5
2 4 5
1 4 6
2 3 6
"""
    g = from_alist(text)
    ref = build_ag(1)
    assert (g.n, g.m, g.gamma, g.rho) == (ref.n, ref.m, ref.gamma, ref.rho)
    assert sorted(map(sorted, g.var_adj)) == sorted(map(sorted, ref.var_adj))


def test_alist_overlong_row_rejected_and_order_kept():
    text = "2 2\n2 2\n2 2\n2 2\n1 2 0\n1 2 0\n1 2\n1 2\n"
    with pytest.raises(AlistError):
        from_alist(text)  # padding beyond the declared maximum is a width error
    text = "2 2\n2 2\n2 2\n2 2\n1 2\n2 1\n1 2\n1 2\n"
    g = from_alist(text)
    assert g.var_adj == ((0, 1), (1, 0))


def test_alist_inconsistent_degree_names_node():
    good = to_alist(build_ag(1)).splitlines()
    good[4] = "1 4"  # variable 1 now claims check 4 instead of 3
    with pytest.raises(AlistError) as info:
        from_alist("\n".join(good))
    assert "variable" in str(info.value) or "check" in str(info.value)


def test_alist_non_integer_reports_line():
    text = to_alist(build_pg(1)).splitlines()
    text[2] = "3 3 x 3 3 3 3"
    with pytest.raises(AlistError) as info:
        from_alist("\n".join(text))
    assert info.value.line == 3
    assert str(info.value).startswith("line 3:")


def test_alist_irregular_rejected():
    text = "3 2\n2 2\n2 1 1\n2 2\n1 2\n1\n2\n1 2\n1 3\n"
    with pytest.raises(AlistError):
        from_alist(text)


# -- girth -------------------------------------------------------------------


def test_girth_k22_is_four():
    g = TannerGraph.from_var_adj([[0, 1], [0, 1]])
    assert girth(g) == 4


def test_girth_path_is_infinite():
    g = TannerGraph.from_var_adj([[0], [1]])
    assert girth(g) == float("inf")


@pytest.mark.parametrize("g", [build_pg(1), build_pg(2), build_ag(2), TannerGraph.from_var_adj([[0, 1], [0, 1]])])
def test_girth_matches_edge_removal_oracle(g):
    assert girth(g) == brute_girth(g.var_adj, g.m)


def test_girth_eight_toy():
    # incidence graph of K_{3,3}: variables are its 9 edges, checks its 6 vertices
    var_adj = [[a, 3 + b] for a in range(3) for b in range(3)]
    g = TannerGraph.from_var_adj(var_adj)
    assert girth(g) == 8 == brute_girth(g.var_adj, g.m)


# -- expansion ---------------------------------------------------------------


def test_expansion_single_variables_always_expand():
    for g in (build_pg(1), build_ag(2)):
        verdict = check_expansion(g, 1.0 / g.n, 1.0)
        assert verdict.expands and verdict.witness is None


def test_expansion_ag1_pair_witness():
    g = build_ag(1)
    verdict = check_expansion(g, 2.0 / g.n, 1.0)
    assert not verdict.expands
    S = verdict.witness
    assert len(S) == 2
    assert len({c for v in S for c in g.var_adj[v]}) == 3


def test_expansion_pg1_pairs_against_enumeration():
    g = build_pg(1)
    delta = 7 / 8 + 0.01
    verdict = check_expansion(g, 2.0 / g.n, delta)
    expected = all(
        len({c for v in S for c in g.var_adj[v]}) >= delta * g.gamma * len(S)
        for k in (1, 2)
        for S in itertools.combinations(range(g.n), k)
    )
    assert verdict.expands == expected


def test_expansion_monotone():
    g = build_pg(1)
    for k in range(1, 4):
        for d in (0.5, 0.7, 0.9):
            if check_expansion(g, k / g.n, d).expands:
                assert check_expansion(g, (k - 1 or 1) / g.n, d - 0.1).expands


def test_expansion_budget_refuses():
    with pytest.raises(InfeasibleError):
        check_expansion(build_pg(3), 0.5, 0.9, budget=1000)


# -- encoder -----------------------------------------------------------------


@pytest.mark.parametrize("g", [build_pg(1), build_pg(2), build_ag(2)])
def test_code_dimension_matches_rank(g):
    basis = encoder_from_parity(g)
    assert basis.shape[0] == g.n - rank_gf2(g.H)
    assert rank_gf2(basis) == basis.shape[0]
    assert not (basis @ g.H.T % 2).any()


def test_known_dimensions():
    assert encoder_from_parity(build_pg(1)).shape[0] == 3
    assert encoder_from_parity(build_pg(2)).shape[0] == 11


def test_zero_combination_is_zero_codeword():
    basis = encoder_from_parity(build_pg(2))
    word = combine(basis, np.zeros(basis.shape[0], dtype=np.uint8))
    assert not word.any()


def test_random_codewords_are_codewords_and_deterministic():
    g = build_ag(2)
    basis = encoder_from_parity(g)
    for seed in range(20):
        w = random_codeword(basis, seed)
        assert g.is_codeword(w)
        assert np.array_equal(w, random_codeword(basis, seed))


# -- hamming -----------------------------------------------------------------


def test_hamming_examples():
    assert hamming_distance([0, 0, 0, 0], [0, 0, 0, 0]) == 0
    assert hamming_distance([0, 1, 0, 1], [1, 0, 1, 0]) == 4
    with pytest.raises(DomainError):
        hamming_distance([0, 1], [0, 1, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=0, max_size=64))
def test_hamming_matches_loop(pairs):
    a = [x for x, _ in pairs]
    b = [y for _, y in pairs]
    assert hamming_distance(a, b) == sum(1 for x, y in pairs if x != y)
