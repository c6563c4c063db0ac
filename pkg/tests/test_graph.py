from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import cube, cycle
from torpid import graph as gr
from torpid.errors import GuardExceeded, InvalidInput


def test_hypercube_labels_and_ids():
    G = cube(3)
    assert G.vertex("100") == 4
    assert G.label(4) == "100"
    assert G.side[G.vertex("011")] == gr.EVEN
    assert sorted(G.adjacency[0]) == [1, 2, 4]


def test_family_shapes():
    for G, n, d in (
        (gr.hypercube(4), 16, 4),
        (gr.even_cycle(10), 10, 2),
        (gr.complete_bipartite(3), 6, 3),
        (gr.torus(4, 2), 16, 4),
    ):
        assert (G.n, G.d) == (n, d)
        assert G.n_even == G.n_odd == n // 2
        assert G.n_edges == n * d // 2


def test_bad_parameters():
    with pytest.raises(InvalidInput):
        gr.even_cycle(5)
    with pytest.raises(InvalidInput):
        gr.torus(3, 2)
    with pytest.raises(InvalidInput):
        gr.build_graph("nosuch", 1)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_even=st.integers(3, 12), d=st.integers(1, 3))
def test_random_regular_is_regular_bipartite_and_simple(seed, n_even, d):
    G = gr.random_regular(n_even, d, seed)
    for v in range(G.n):
        nbrs = G.adjacency[v]
        assert len(nbrs) == len(set(nbrs)) == d
        assert all(G.side[w] != G.side[v] for w in nbrs)
    assert gr.random_regular(n_even, d, seed).adjacency == G.adjacency


def test_graph_text_round_trip():
    for G in (cube(3), cycle(6), gr.random_regular(8, 3, 7)):
        H = gr.parse_graph(gr.format_graph(G))
        assert H.n == G.n and H.d == G.d
        assert gr.format_graph(H) == gr.format_graph(G)


def test_parse_graph_rejects_bad_files():
    with pytest.raises(InvalidInput, match="degree|regular"):
        gr.parse_graph("bipartite 2 2 2\n0 0\n0 1\n1 1\n")
    with pytest.raises(InvalidInput, match="first line"):
        gr.parse_graph("2 2\n0 0\n")
    with pytest.raises(InvalidInput, match="out of range"):
        gr.parse_graph("bipartite 1 1 1\n0 3\n")


def _class_sets(G, side):
    return st.sets(st.sampled_from(G.class_of(side)), max_size=len(G.class_of(side)))


@settings(max_examples=200, deadline=None)
@given(data=st.data(), which=st.sampled_from(["Q3", "Q4", "C8", "T4"]), side=st.sampled_from([0, 1]))
def test_closure_laws(data, which, side):
    G = {"Q3": cube(3), "Q4": cube(4), "C8": cycle(8), "T4": gr.torus(4, 2)}[which]
    A = gr.VertexSet(side, frozenset(data.draw(_class_sets(G, side))))
    NA = gr.neighbourhood(G, A)
    cl = gr.external_closure(G, A)
    assert A.members <= cl.members
    assert gr.external_closure(G, cl) == cl
    assert gr.neighbourhood(G, cl) == NA
    assert gr.internal_closure(G, NA) == cl
    B = gr.VertexSet(side, A.members | frozenset(data.draw(_class_sets(G, side))))
    assert cl.members <= gr.external_closure(G, B).members
    T = gr.VertexSet(side, frozenset(data.draw(_class_sets(G, side))))
    IT = gr.internal_closure(G, T)
    assert IT.members <= gr.neighbourhood(G, T).members or not T.members


def test_vertex_set_rejects_mixed_classes():
    G = cube(2)
    with pytest.raises(InvalidInput):
        G.vertex_set(gr.EVEN, ["00", "01"])


def test_expansion_matches_oracle():
    cases = [
        (cube(2), oracles.cube_adjacency(2)),
        (cube(3), oracles.cube_adjacency(3)),
        (cube(4), oracles.cube_adjacency(4)),
        (cycle(6), oracles.cycle_adjacency(6)),
        (cycle(8), oracles.cycle_adjacency(8)),
    ]
    for G, adj in cases:
        exp = gr.bipartite_expansion(G)
        want = oracles.expansion(adj)
        if want is None:
            assert exp.vacuous
        else:
            assert not exp.vacuous and exp.delta == want
            A = exp.witness
            assert gr.is_small(G, A)
            NA = len(gr.neighbourhood(G, A))
            assert Fraction(NA - len(gr.external_closure(G, A)), NA) == want


def test_expansion_frozen_values():
    assert gr.bipartite_expansion(cube(3)).delta == Fraction(2, 3)
    assert gr.bipartite_expansion(cube(4)).delta == Fraction(3, 7)
    assert gr.bipartite_expansion(cycle(6)).delta == Fraction(1, 2)
    assert gr.bipartite_expansion(cube(2)).vacuous
    assert gr.bipartite_expansion(cube(1)).vacuous


def test_expansion_guard():
    with pytest.raises(GuardExceeded):
        gr.bipartite_expansion(cube(6))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_locality_matches_oracle(d):
    assert gr.locality(cube(d)) == oracles.locality(oracles.cube_adjacency(d)) == d
    K = gr.complete_bipartite(d)
    assert gr.locality(K) == d


def test_locality_witness_is_independent():
    G = cube(4)
    ell, (x, y), S = gr.locality_witness(G)
    assert y in G.adjacency[x]
    union = set(G.adjacency[x]) | set(G.adjacency[y])
    assert S <= union and len(S) == 2 * G.d - ell
    assert all(w not in S for v in S for w in G.adjacency[v])


def test_locality_small_cases():
    assert gr.locality(cycle(6)) == 2
    assert gr.locality(cube(1)) == 1


def test_perfect_matching():
    for G in (cube(3), cycle(6), gr.torus(4, 2), gr.random_regular(10, 3, 1)):
        m = gr.maximum_matching(G)
        assert len(m) == G.n_even
        assert all(e in G.adjacency[o] for o, e in m.items())


def test_component_count():
    G = cycle(8)
    assert gr.component_count(G, [0, 1, 4]) == 2
    assert gr.component_count(G, []) == 0


def _vs(G, side, labels):
    return G.vertex_set(side, labels)


def test_family_examples():
    Q1 = cube(1)
    assert (Q1.n, Q1.n_edges, Q1.d) == (2, 1, 1)
    Q2 = cube(2)
    assert (Q2.n, Q2.n_edges, Q2.n_even, Q2.n_odd) == (4, 4, 2, 2)
    Q3 = cube(3)
    assert (Q3.n, Q3.n_edges, Q3.n_even, Q3.n_odd) == (8, 12, 4, 4)


def test_neighbourhood_examples():
    Q3, Q2, C6 = cube(3), cube(2), cycle(6)
    assert gr.neighbourhood(Q3, _vs(Q3, gr.EVEN, ["000"])).labels(Q3) == ["001", "010", "100"]
    assert gr.neighbourhood(Q2, gr.VertexSet(gr.EVEN, frozenset(Q2.even))).members == frozenset(Q2.odd)
    assert gr.neighbourhood(C6, gr.VertexSet(gr.EVEN, frozenset([0]))).members == {1, 5}


def test_closure_examples():
    Q3, Q2 = cube(3), cube(2)
    assert gr.external_closure(Q3, _vs(Q3, gr.EVEN, ["000"])).labels(Q3) == ["000"]
    assert gr.external_closure(Q3, _vs(Q3, gr.EVEN, ["000", "110"])).members == frozenset(Q3.even)
    assert len(gr.external_closure(Q3, gr.VertexSet(gr.EVEN))) == 0
    assert gr.internal_closure(Q2, _vs(Q2, gr.EVEN, ["00", "11"])).labels(Q2) == ["01", "10"]
    assert len(gr.internal_closure(Q3, _vs(Q3, gr.EVEN, ["000"]))) == 0
    assert len(gr.internal_closure(Q3, gr.VertexSet(gr.EVEN))) == 0


def test_small_examples():
    Q3, Q2 = cube(3), cube(2)
    assert gr.is_small(Q3, _vs(Q3, gr.EVEN, ["000"]))
    assert not gr.is_small(Q3, _vs(Q3, gr.EVEN, ["000", "110"]))
    assert not gr.is_small(Q2, _vs(Q2, gr.EVEN, ["00"]))


def test_component_examples():
    Q3 = cube(3)
    assert gr.component_count(Q3, range(8)) == 1
    assert gr.component_count(Q3, [Q3.vertex("000"), Q3.vertex("111")]) == 2
    for G in (cube(1), cube(3), cycle(6)):
        assert gr.has_perfect_matching(G)


@pytest.mark.parametrize("G", [cube(2), cube(3), cycle(6)])
def test_closure_laws_and_hall_exhaustive(G):
    for side in (gr.EVEN, gr.ODD):
        for members in gr.subsets(G.class_of(side)):
            A = gr.VertexSet(side, members)
            NA = gr.neighbourhood(G, A)
            cl = gr.external_closure(G, A)
            assert len(A) <= len(NA)
            assert A.members <= cl.members and gr.external_closure(G, cl) == cl
            assert gr.neighbourhood(G, cl) == NA
            IT = gr.internal_closure(G, A)
            assert gr.external_closure(G, IT) == IT
            assert IT.members <= NA.members
            assert gr.neighbourhood(G, IT).members <= A.members


@pytest.mark.parametrize("G", [cube(3), cube(4), cycle(6), cycle(8)])
def test_expansion_is_minimal(G):
    exp = gr.bipartite_expansion(G)
    assert 0 <= exp.delta <= 1
    for side in (gr.EVEN, gr.ODD):
        for members in gr.subsets(G.class_of(side)):
            A = gr.VertexSet(side, members)
            if members and gr.is_small(G, A):
                NA = len(gr.neighbourhood(G, A))
                assert Fraction(NA - len(gr.external_closure(G, A)), NA) >= exp.delta


def test_vacuous_expansion_reports_one():
    exp = gr.bipartite_expansion(cube(2))
    assert exp.vacuous and exp.delta == 1 and exp.witness is None


@pytest.mark.parametrize("G", [cube(3), cycle(6), gr.complete_bipartite(3)])
def test_locality_is_maximal_over_edges(G):
    ell = gr.locality(G)
    adj = [list(a) for a in G.adjacency]
    for x, y in G.edges():
        verts = sorted(set(adj[x]) | set(adj[y]))
        assert oracles.max_independent(adj, verts) <= 2 * G.d - ell
