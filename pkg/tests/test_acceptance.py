"""Acceptance gate: the ten criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

import math
import time
from collections import Counter
from fractions import Fraction

import pytest

import oracles
from conftest import ACCEPTANCE_LINES, cube, cycle
from torpid import approximation as ap
from torpid import bounds as bd
from torpid import colouring as co
from torpid import dynamics as dy
from torpid import graph as gr
from torpid import heights as ht

RHO = 0.2


def criterion_1():
    t0 = time.perf_counter()
    cases = [
        (cube(1), oracles.cube_adjacency(1), 6),
        (cube(2), oracles.cube_adjacency(2), 18),
        (cube(3), oracles.cube_adjacency(3), 114),
        (cycle(6), oracles.cycle_adjacency(6), 66),
    ]
    for G, adj, want in cases:
        assert len(oracles.brute_colourings(adj)) == want
        assert co.count_colourings(G, 3) == co.count_via_decomposition(G) == want, G.name
    q4 = co.count_colourings(cube(4), 3)
    assert q4 == co.count_via_decomposition(cube(4)) == len(oracles.cube_colourings_by_layers(4)) == 2970
    elapsed = time.perf_counter() - t0
    assert elapsed < 60
    return f"counts 6/18/114/66, Q_4 = {q4} by both methods, {elapsed:.1f}s"


def criterion_2():
    checked = 0
    for G in (cube(2), cycle(6)):
        adj = [list(a) for a in G.adjacency]
        hist = co.zero_set_histogram(G)
        for e, o in co.compatible_pairs(G):
            want = oracles.zero_set_formula(adj, set(gr.bits_of(e)), set(gr.bits_of(o)))
            assert hist.get((e, o), 0) == want == 1 << co.zero_set_exponent(G, e, o), (G.name, e, o)
            checked += 1
        assert sum(hist.values()) == co.count_colourings(G, 3)
    return f"{checked} compatible pairs, zero exceptions"


def criterion_3():
    parts = []
    for G in (cube(2), cube(3), cycle(6)):
        res = co.verify_component_bound(G)
        assert res.holds, (G.name, res.witness)
        parts.append(f"{G.name} max {res.max_comp} <= {res.bound}")
    return "; ".join(parts)


def criterion_4():
    for G in (cube(2), cube(3)):
        T = dy.build_transition_matrix(G, dy.ChainSpec(3))
        assert (T.numer != T.numer.T).nnz == 0
        assert T.row_sums_exact()
        assert dy.check_ergodic(T)
        assert dy.check_detailed_balance(T)
    G = cube(3)
    T4 = dy.build_transition_matrix(G, dy.ChainSpec(4))
    frozen = ht.frozen_four_colouring()
    assert ht.is_frozen(G, frozen, 4)
    i = T4.index[frozen.colours]
    assert T4.row(i) == {i: Fraction(1)}
    assert not dy.check_ergodic(T4)
    return f"P3 exact on Q_2/Q_3; frozen 4-colouring absorbing among {T4.n} states"


def criterion_5():
    G = cube(3)
    cols = [c for c in co.enumerate_colourings(G, 3) if c[0] == 0]
    heights = list(ht.enumerate_height_functions(G, 0))
    assert len(cols) == len(heights) == 38
    for chi in cols:
        assert ht.phi(G, ht.phi_inverse(G, chi, 0)) == chi
        path = ht.ergodicity_path(G, chi, 0)
        ht.path_moves(path)
        assert all(co.is_proper(G, c) for c in path)
        assert len(set(path[-1].colours)) <= 2
    return "38 = 38, round trip and paths valid on all 38"


def criterion_6():
    assert gr.bipartite_expansion(cube(3)).delta == Fraction(2, 3)
    assert gr.bipartite_expansion(cycle(6)).delta == Fraction(1, 2)
    assert gr.bipartite_expansion(cube(2)).vacuous
    for d in range(2, 6):
        assert gr.locality(cube(d)) == d
        assert gr.locality(gr.complete_bipartite(d)) == d
    assert gr.locality(cycle(6)) == 2
    return "delta 2/3, 1/2, vacuous; ell(Q_d) = ell(K_dd) = d; ell(C_6) = 2"


def criterion_7():
    parts = []
    for G in (cube(2), cube(3)):
        T = dy.build_transition_matrix(G, dy.ChainSpec(3))
        cut = dy.heavy_cut(G, T, RHO)
        threshold = co.as_fraction(RHO) * G.M
        e_heavy = [i for i, s in enumerate(T.states) if co.classify(Counter(s[v] for v in G.even)[0] - Counter(s[v] for v in G.odd)[0], threshold) == co.Phase.E_HEAVY]
        assert cut.A == frozenset(e_heavy)
        assert cut.pi_A <= Fraction(1, 2)
        assert dy.verify_bottleneck_condition(T, cut)
        bound = dy.dfj_lower_bound(T, cut)
        tau = dy.exact_mixing_time(T).tau
        assert bound < tau
        parts.append(f"{G.name} {bound} < {tau}")
    return "; ".join(parts)


def criterion_8():
    sets = 0
    for G in (cube(2), cube(3), cycle(6)):
        for side in (gr.EVEN, gr.ODD):
            for m in co.submasks(G.class_mask(side)):
                A = gr.VertexSet.from_mask(side, m)
                assert ap.is_approximation(G, A, ap.trivial_approximation(G, A))
                sets += 1
    runs = 0
    for G in (cube(2), cycle(6)):
        for e, o in co.compatible_pairs(G):
            sx = ap.Sextuple.trivial(G, e, o)
            params = ap.h_params_bits(G, e, o)
            target = ap.containment_targets(G, sx, params)
            for flags in ap.BranchFlags.all():
                assert target <= ap.reconstruct_candidates(G, sx, params, flags), (G.name, e, o, flags)
                runs += 1
    return f"{sets} trivial approximations valid; {runs} reconstruction runs contain the brute-force set"


def criterion_9():
    sweep = bd.chernoff_sweep(200)
    assert sweep["ok"], sweep["failures"][:3]
    assert bd.binary_entropy(0.22) + 0.22 < 1 < bd.binary_entropy(0.23) + 0.23
    a = bd.alpha_of(RHO)
    scan = oracles.alpha_grid_scan(RHO)
    assert abs(a - scan) <= 1e-5
    assert bd.alpha_constraint(a, RHO) <= 0 < bd.alpha_constraint(a + 1e-6, RHO)
    return f"{sweep['checked']} Chernoff checks; alpha(0.2) = {a:.9f}, grid {scan:.6f}"


NON_REPRODUCIBLE = (
    "The mixing-time lower bound exp2(C2 N delta / log d) and the exponential imbalance "
    "probability hold only for d >= d0 with unspecified constants; they cannot be confirmed "
    "at desk scale. Criteria 1-9 stand in for them, plus the Q_4 escape-time report below, "
    "which is recorded and not asserted."
)


def criterion_10():
    G = cube(4)
    stats = dy.escape_statistics(G, dy.ChainSpec(3), RHO, co.extreme_colouring(G), seed=0, runs=10, max_steps=10**6)
    report = f"Q_4 escape times (seed 0, 10 runs): {stats['times']}, median {stats['median']}"
    print(NON_REPRODUCIBLE)
    print(report)
    return "recorded, not asserted. " + report


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _run(n: int) -> tuple[bool, str]:
    try:
        return True, CRITERIA[n - 1]()
    except AssertionError as exc:
        return False, f"assertion failed: {exc}"


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n):
    ok, detail = _run(n)
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


if __name__ == "__main__":
    for n in range(1, 11):
        ok, detail = _run(n)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
