from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import cube, cycle
from torpid import colouring as co
from torpid import graph as gr
from torpid.errors import GuardExceeded, InvalidInput


@pytest.mark.parametrize(
    "G,adj,want",
    [
        (cube(1), oracles.cube_adjacency(1), 6),
        (cube(2), oracles.cube_adjacency(2), 18),
        (cube(3), oracles.cube_adjacency(3), 114),
        (cycle(6), oracles.cycle_adjacency(6), 66),
    ],
)
def test_counts_match_brute_force(G, adj, want):
    assert len(oracles.brute_colourings(adj)) == want
    assert co.count_colourings(G, 3) == want
    assert co.count_via_decomposition(G) == want


def test_enumeration_is_the_same_set_as_brute_force():
    adj = oracles.cube_adjacency(3)
    assert set(co.colour_tuples(cube(3), 3)) == set(oracles.brute_colourings(adj))


def test_q3_by_layer_pairing():
    assert len(oracles.cube_colourings_by_layers(3)) == 114


def test_q4_count_both_methods():
    want = len(oracles.cube_colourings_by_layers(4))
    assert want == 2970
    assert co.count_colourings(cube(4), 3) == want
    assert co.count_via_decomposition(cube(4)) == want


def test_cycle_counts_follow_chromatic_polynomial():
    # (q-1)^n + (q-1) for an n-cycle
    for n in (4, 6, 8, 10):
        assert co.count_colourings(cycle(n), 3) == 2**n + 2
        assert co.count_via_decomposition(cycle(n)) == 2**n + 2


def test_enumeration_guard():
    with pytest.raises(GuardExceeded):
        co.count_colourings(cube(6), 3)
    with pytest.raises(GuardExceeded):
        list(co.compatible_pairs(cube(5)))


@pytest.mark.parametrize("G,adj", [(cube(2), oracles.cube_adjacency(2)), (cycle(6), oracles.cycle_adjacency(6)), (cube(3), oracles.cube_adjacency(3))])
def test_zero_set_identity_pointwise(G, adj):
    hist = Counter()
    for cs in oracles.brute_colourings(adj):
        E = frozenset(v for v in G.even if cs[v] == 0)
        O = frozenset(v for v in G.odd if cs[v] == 0)
        hist[E, O] += 1
    pairs = list(co.compatible_pairs(G))
    assert len(pairs) == len(set(pairs))
    for e, o in pairs:
        E, O = frozenset(gr.bits_of(e)), frozenset(gr.bits_of(o))
        formula = oracles.zero_set_formula(adj, set(E), set(O))
        assert hist[E, O] == formula
        assert co.count_zero_set(G, co.ZeroSetPair(gr.VertexSet(gr.EVEN, E), gr.VertexSet(gr.ODD, O))) == formula
    assert sum(hist.values()) == len(oracles.brute_colourings(adj))
    as_bits = Counter({(gr.to_mask(E), gr.to_mask(O)): c for (E, O), c in hist.items()})
    assert co.zero_set_histogram(G) == as_bits


def test_incompatible_pair_has_no_colourings():
    G = cube(2)
    pair = co.ZeroSetPair(G.vertex_set(gr.EVEN, ["00"]), G.vertex_set(gr.ODD, ["01"]))
    assert not pair.compatible(G)
    assert co.count_zero_set(G, pair) == 0


@pytest.mark.parametrize("G,max_comp", [(cube(2), 1), (cube(3), 1), (cycle(6), 2), (cube(4), 2)])
def test_component_bound(G, max_comp):
    res = co.verify_component_bound(G)
    assert res.holds
    assert res.max_comp == max_comp
    assert res.bound == Fraction(2 * G.M, gr.locality(G))


def test_class_sizes_q3():
    cs = co.class_sizes(cube(3), 0.2)
    assert cs.total == 114
    assert cs.rows == ((10, 52, 52),) * 3
    assert cs.to_csv().splitlines()[0] == "colour,balanced,e_heavy,o_heavy"


def test_phase_threshold_is_exact():
    # rho*M = 0.2*4 = 4/5; a difference of 1 is heavy, 0 is balanced
    assert co.classify(1, co.as_fraction(0.2) * 4) == co.Phase.E_HEAVY
    assert co.classify(0, co.as_fraction(0.2) * 4) == co.Phase.BALANCED
    # 0.25*4 = 1 exactly: strict inequality keeps 1 balanced
    assert co.classify(1, co.as_fraction(0.25) * 4) == co.Phase.BALANCED
    assert co.classify(-2, Fraction(1)) == co.Phase.O_HEAVY


def test_extreme_colouring_phase():
    G = cube(4)
    chi = co.extreme_colouring(G)
    assert co.is_proper(G, chi)
    lab = co.phase_label(G, chi, 0.2)
    assert str(lab) == "EOO" and lab.in_dominant_region
    assert co.imbalance(G, chi, 0) == 1


def test_colouring_file_round_trip():
    G = cube(3)
    for chi in list(co.enumerate_colourings(G, 3))[::17]:
        assert co.parse_colouring(G, co.format_colouring(G, chi), 3) == chi


def test_bad_colouring_rejected():
    with pytest.raises(InvalidInput):
        co.require_proper(cube(2), co.Colouring(3, (0, 0, 1, 1)))
    with pytest.raises(InvalidInput):
        co.Colouring(3, (0, 3))
    with pytest.raises(InvalidInput):
        co.parse_colouring(cube(1), "E 0 1\n", 3)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_zero_set_exponent_agrees_with_oracle_on_random_graphs(data):
    seed = data.draw(st.integers(0, 10**6))
    G = gr.random_regular(5, 3, seed)
    adj = [list(a) for a in G.adjacency]
    e = data.draw(st.sampled_from([m for m in co.submasks(G.class_mask(gr.EVEN))]))
    free = G.class_mask(gr.ODD) & ~gr.nbhd_bits(G, e)
    o = data.draw(st.sampled_from(list(co.submasks(free))))
    want = oracles.zero_set_formula(adj, set(gr.bits_of(e)), set(gr.bits_of(o)))
    assert 1 << co.zero_set_exponent(G, e, o) == want


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_decomposition_equals_enumeration_on_random_graphs(seed):
    G = gr.random_regular(5, 3, seed)
    assert co.count_via_decomposition(G) == co.count_colourings(G, 3)


def test_properness_examples():
    Q2 = cube(2)
    two = tuple(0 if Q2.side[v] == gr.EVEN else 1 for v in range(4))
    assert co.is_proper(Q2, two)
    assert not co.is_proper(Q2, (0, 0, 0, 0))
    assert not co.is_proper(cube(1), (0, 0))


def test_zero_set_examples():
    Q2 = cube(2)
    pair = co.ZeroSetPair(Q2.vertex_set(gr.EVEN, ["00", "11"]), gr.VertexSet(gr.ODD))
    I, J, R = pair.parts(Q2)
    assert I.labels(Q2) == ["01", "10"] and len(J) == 0 and not R
    assert co.count_zero_set(Q2, pair) == 4
    for G in (cube(2), cube(3), cycle(6)):
        empty = co.ZeroSetPair(gr.VertexSet(gr.EVEN), gr.VertexSet(gr.ODD))
        assert co.count_zero_set(G, empty) == 2


@pytest.mark.parametrize("rho", [0.1, 0.2, 0.22])
@pytest.mark.parametrize("G", [cube(2), cube(3), cycle(6), gr.complete_bipartite(3)])
def test_categories_partition_and_swap_symmetry(G, rho):
    sizes = co.class_sizes(G, rho)
    for balanced, e_heavy, o_heavy in sizes.rows:
        assert balanced + e_heavy + o_heavy == sizes.total
        assert e_heavy == o_heavy


def test_q2_heavy_class_lower_bound():
    rows = co.class_sizes(cube(2), 0.2).rows
    assert rows[0][1] >= 2 ** (4 // 2)
    chi = co.Colouring(3, tuple(0 if v in (0, 3) else 1 for v in range(4)))
    assert co.phase_label(cube(2), chi, 0.2)[0] == co.Phase.E_HEAVY


def test_colour_differences_sum_to_zero():
    G = cube(3)
    for chi in co.enumerate_colourings(G, 3):
        counts = co.side_counts(G, chi.colours)
        assert sum(e - o for e, o in counts) == 0
        assert str(co.phase_label(G, chi, 0.2)) != "EEE"


def test_extreme_colouring_q3_example():
    G = cube(3)
    chi = co.extreme_colouring(G)
    assert str(co.phase_label(G, chi, 0.2)) == "EOO"
    assert co.imbalance(G, chi, 0) == 1


def test_empty_pair_component_count():
    G = cube(3)
    assert gr.components_bits(G, G.all_mask) == 1
