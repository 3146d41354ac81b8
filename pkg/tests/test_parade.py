import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purepair.bigraph import Bigraph, VertexSet, induced
from purepair.coherence import is_coherent
from purepair.containment import OrderedTreeBigraph, enumerate_ordered_trees, rainbow_copies
from purepair.generators import concave_pit_instance, pit_shape_ok
from purepair.parade import (
    LadderError,
    Parade,
    Support,
    balanced_blowup,
    build_ladder,
    build_parade,
    check_ladder_rung,
    contraction,
    find_shrinking_contraction_exact,
    find_uniform_sub_parade,
    full_supports,
    group_blocks,
    grouping_parameters,
    is_bottom_concave,
    is_concave,
    is_contraction_of,
    is_support_invariant_exact,
    is_support_uniform,
    is_top_concave,
    lift_parade,
    minimal_cover,
    multiply,
    parade_from_json,
    pits,
    probe_support_invariance,
    random_contraction,
    sub_parade,
    support_invariant_contraction,
    trace,
    trace_cost,
    trace_cost_bound,
    transferred_coherence,
)

from conftest import parades

HALF = Fraction(1, 2)


def one_edge_parade():
    # one edge, between A-block 0 and B-block 0; K = L = 2, width 2
    G = Bigraph.from_edges(4, 4, [(0, 0)])
    return Parade.from_lists(G, [[0, 1], [2, 3]], [[0, 1], [2, 3]])


# -- construction and minors --------------------------------------------------------


def test_parade_validation():
    G = Bigraph.edgeless(4, 4)
    with pytest.raises(ValueError):
        Parade.from_lists(G, [[0, 1], [1, 2]], [[0]])
    with pytest.raises(ValueError):
        Parade.from_lists(G, [[0, 1], [2]], [[0]])
    with pytest.raises(ValueError):
        Parade.from_lists(G, [[]], [[0]])
    with pytest.raises(ValueError):
        Parade.from_lists(G, [[4]], [[0]])
    P = Parade.from_lists(G, [[0, 1], [2, 3]], [[0, 1], [2, 3]])
    assert P.length == (2, 2) and P.width == (2, 2) and P.is_balanced


def test_sub_parade():
    P = one_edge_parade()
    assert sub_parade(P, [0, 1], [0, 1]) == P
    Q = sub_parade(P, [1], [0])
    assert Q.length == (1, 1) and Q.width == P.width
    for bad in ([], [2], [1, 0]):
        with pytest.raises(ValueError):
            sub_parade(P, bad, [0])


def test_contraction():
    P = one_edge_parade()
    assert contraction(P, P.blocks_a, P.blocks_b) == P
    Q = contraction(P, [[0], [2]], [[1], [3]])
    assert Q.width == (1, 1) and is_contraction_of(Q, P)
    R = contraction(Q, [[0], [2]], [[1], [3]])
    assert is_contraction_of(R, P)
    with pytest.raises(ValueError):
        contraction(P, [[0], [1]], [[1], [3]])
    with pytest.raises(ValueError):
        contraction(P, [[0]], [[1], [3]])


def test_text_and_json_round_trip():
    P = one_edge_parade()
    Q, ref = Parade.loads(P.dumps("g.txt"), P.host)
    assert Q == P and ref == "g.txt"
    assert parade_from_json(P.to_json_dict("g.txt"), P.host) == P
    with pytest.raises(ValueError):
        Parade.loads("p parade 2 1\na 0\nb 0\n", P.host)


def test_build_parade():
    G = Bigraph.edgeless(8, 8)
    P = build_parade(G, 2)
    assert P.width == (2, 2) and P.length == (2, 2)
    assert build_parade(G, 1).length == (1, 1)
    R = build_parade(G, 2, "random", seed=3)
    assert R == build_parade(G, 2, "random", seed=3)
    with pytest.raises(ValueError):
        build_parade(Bigraph.edgeless(3, 8), 2)


# -- traces ---------------------------------------------------------------------------


def test_trace_cost_examples():
    P = one_edge_parade()
    assert trace_cost(P, 1) == P.K + P.L
    E = Parade.from_lists(Bigraph.edgeless(6, 6), [[0, 1], [2, 3], [4, 5]], [[0, 1], [2, 3]])
    assert trace_cost(E, 2) == 5
    edge = OrderedTreeBigraph(Bigraph.complete(1, 1))
    assert len(trace(E, edge)) == 0


@settings(max_examples=60, deadline=None)
@given(parades(max_len=3, max_width=2), st.integers(1, 4))
def test_trace_cost_bound(P, tau):
    assert trace_cost(P, tau) <= trace_cost_bound(P.K, P.L, tau)


@settings(max_examples=100, deadline=None)
@given(parades(), st.randoms(use_true_random=False), st.sampled_from([Fraction(1, 4), HALF, Fraction(3, 4)]))
def test_contraction_monotone(P, rnd, kappa):
    Q = random_contraction(P, kappa, rnd)
    for T in enumerate_ordered_trees(3):
        assert rainbow_copies(Q, T) <= rainbow_copies(P, T)


@settings(max_examples=100, deadline=None)
@given(parades(), st.data())
def test_sub_parade_restricts_trace(P, data):
    I = sorted(data.draw(st.sets(st.integers(0, P.K - 1), min_size=1)))
    J = sorted(data.draw(st.sets(st.integers(0, P.L - 1), min_size=1)))
    Q = sub_parade(P, I, J)
    for T in enumerate_ordered_trees(3):
        expected = {
            Support(tuple(I.index(i) for i in s.I), tuple(J.index(j) for j in s.J))
            for s in rainbow_copies(P, T)
            if set(s.I) <= set(I) and set(s.J) <= set(J)
        }
        assert rainbow_copies(Q, T) == expected


# -- uniformity -----------------------------------------------------------------------


@pytest.mark.parametrize("tau", [1, 2, 3, 4])
def test_uniform_examples(tau):
    K = Parade.from_lists(Bigraph.complete(6, 6), [[0, 1], [2, 3], [4, 5]], [[0, 1], [2, 3], [4, 5]])
    assert is_support_uniform(K, tau)
    E = Parade.from_lists(Bigraph.edgeless(6, 6), [[0, 1], [2, 3], [4, 5]], [[0, 1], [2, 3], [4, 5]])
    assert is_support_uniform(E, tau)


def test_non_uniform_witness():
    G = Bigraph.from_edges(2, 2, [(0, 0)])
    P = Parade.from_lists(G, [[0], [1]], [[0], [1]])
    v = is_support_uniform(P, 2)
    assert not v
    assert v.tree.tree == Bigraph.complete(1, 1)
    assert v.trace == {Support((0,), (0,))}


def test_full_supports():
    assert len(full_supports(3, 2, 2, 1)) == 3 * 2


def test_find_uniform_sub_parade():
    G = Bigraph.from_edges(2, 2, [(0, 0)])
    P = Parade.from_lists(G, [[0], [1]], [[0], [1]])
    Q = find_uniform_sub_parade(P, 1, 2)
    assert Q is not None and Q.length == (1, 1)
    assert find_uniform_sub_parade(P, 2, 2) is None
    assert find_uniform_sub_parade(P, 3, 2) is None


# -- support invariance ----------------------------------------------------------------


def test_probe_examples():
    P = one_edge_parade()
    assert probe_support_invariance(P, 1, 2, trials=20).status == "unrefuted"
    E = Parade.from_lists(Bigraph.edgeless(4, 4), [[0, 1], [2, 3]], [[0, 1], [2, 3]])
    assert probe_support_invariance(E, HALF, 2, trials=50).status == "unrefuted"
    v = probe_support_invariance(P, HALF, 2, trials=200, seed=1)
    assert v.refuted and v.mode == "sampled"
    assert v.witness.lost == Support((0,), (0,))


def test_exact_refutation_witness():
    P = one_edge_parade()
    w, _ = find_shrinking_contraction_exact(P, HALF, 2)
    assert w is not None and is_contraction_of(w.contraction, P)
    assert w.lost not in rainbow_copies(w.contraction, w.tree)
    assert is_support_invariant_exact(P, HALF, 2).refuted
    assert is_support_invariant_exact(P, HALF, 2, budget=0).exhausted


def test_descent_examples():
    E = Parade.from_lists(Bigraph.edgeless(4, 4), [[0, 1], [2, 3]], [[0, 1], [2, 3]])
    out = support_invariant_contraction(E, HALF, 2)
    assert out.parade == E and out.steps == 0 and out.exact
    out = support_invariant_contraction(one_edge_parade(), HALF, 2)
    assert out.steps == 1 and out.exact
    assert not any(rainbow_copies(out.parade, T) for T in enumerate_ordered_trees(2) if T.size == 2)
    assert is_support_invariant_exact(out.parade, HALF, 2).status == "invariant"


@settings(max_examples=40, deadline=None)
@given(parades(max_len=2, max_width=4, max_extra=1), st.integers(1, 2))
def test_descent_sound(P, tau):
    out = support_invariant_contraction(P, HALF, tau)
    assert out.exact
    assert out.steps <= trace_cost_bound(P.K, P.L, tau)
    assert list(out.costs) == sorted(out.costs, reverse=True)
    assert is_contraction_of(out.parade, P)
    w, _ = find_shrinking_contraction_exact(out.parade, HALF, tau)
    assert w is None


def test_descent_sampled_mode_is_flagged():
    G = Bigraph.from_edges(16, 16, [(0, 0), (9, 9)])
    P = Parade.from_lists(G, [range(8), range(8, 16)], [range(8), range(8, 16)])
    out = support_invariant_contraction(P, HALF, 2, w_exact=6, trials=50)
    assert not out.exact and out.locally_invariant_up_to_sampling


# -- concavity -------------------------------------------------------------------------------


def test_concavity_examples():
    G = Bigraph.edgeless(2, 2)
    P = Parade.from_lists(G, [[0], [1]], [[0], [1]])
    assert is_top_concave(P, 1).status == "holds"
    K = Parade.from_lists(Bigraph.complete(6, 6), [[0, 1], [2, 3], [4, 5]], [[0, 1], [2, 3], [4, 5]])
    for lam in (Fraction(1, 3), HALF, 1):
        assert is_concave(K, lam).status == "holds"
    # the only B vertex sees only the middle A-block
    H = Bigraph.from_edges(3, 1, [(1, 0)])
    Q = Parade.from_lists(H, [[0], [1], [2]], [[0]])
    v = is_top_concave(Q, 1)
    assert v.refuted and v.witness == VertexSet(2, {0}) and v.triple == (0, 1, 2)


def test_concavity_sampled_mode():
    G = Bigraph.complete(30, 30)
    P = Parade.from_lists(G, [range(10), range(10, 20), range(20, 30)], [range(10), range(10, 20), range(20, 30)])
    v = is_bottom_concave(P, HALF, n_exact=20)
    assert v.status == "unrefuted" and not v.exact
    H = Bigraph.from_edges(30, 30, [(u, v) for u in range(30) for v in range(10, 20)])
    Q = Parade.from_lists(H, [range(10), range(10, 20), range(20, 30)], [range(10), range(10, 20), range(20, 30)])
    assert is_bottom_concave(Q, HALF, n_exact=20).refuted


# -- grouping, pits and ladders --------------------------------------------------------------


def test_group_blocks():
    G = Bigraph.edgeless(2, 6)
    P = Parade.from_lists(G, [[0], [1]], [[0], [1], [2], [3], [4], [5]])
    assert group_blocks(P, 1) == P
    assert group_blocks(P, 6).blocks_b == (frozenset(range(6)),)
    assert group_blocks(P, 2).width == (1, 2)
    with pytest.raises(ValueError):
        group_blocks(P, 4)
    assert grouping_parameters(3, Fraction(1, 4)) == (HALF, 12)


@settings(max_examples=40, deadline=None)
@given(parades(max_len=4, max_width=2), st.data())
def test_grouping_transfer(P, data):
    r = data.draw(st.sampled_from([d for d in range(1, P.L + 1) if P.L % d == 0]))
    C = group_blocks(P, r)
    if is_support_uniform(P, 3):
        assert is_support_uniform(C, 3)
    for T in enumerate_ordered_trees(3):
        if T.n2 <= P.L // r and rainbow_copies(P, T):
            assert rainbow_copies(C, T)


def test_pits_examples():
    G = Bigraph.complete(2, 4)
    P = Parade.from_lists(G, [[0], [1]], [[0, 1], [2, 3]])
    assert pits(P, VertexSet(1), HALF) == [0, 1]
    assert pits(P, VertexSet(1, {0}), HALF) == []


@pytest.mark.parametrize("seed", range(30))
def test_pit_shape_on_generated_instances(seed):
    inst = concave_pit_instance(random.Random(seed))
    assert pit_shape_ok(pits(inst.grouped, inst.cover, inst.lam))


def test_minimal_cover_is_minimal():
    inst = concave_pit_instance(random.Random(5))
    C, X, lam = inst.grouped, inst.cover, inst.lam
    assert pits(C, X, lam) is not None
    for v in X:
        smaller = VertexSet(1, X.members - {v})
        with pytest.raises(ValueError):
            minimal_cover(C, smaller, lam)
    with pytest.raises(ValueError):
        minimal_cover(C, VertexSet(1), lam)


def _ladder_instance(seed):
    rnd = random.Random(seed)
    while True:
        inst = concave_pit_instance(rnd)
        if inst.grouped.L == 4:
            break
    C = inst.grouped
    if pits(C, inst.cover, inst.lam)[-1] <= 1:
        C = Parade(C.host, C.blocks_a, tuple(reversed(C.blocks_b)))
    return C, inst


@pytest.mark.parametrize("seed", range(10))
def test_ladder_bullets(seed):
    C, inst = _ladder_instance(seed)
    eps = Fraction(6, C.host.n2)
    lad = build_ladder(C, inst.block, inst.cover, inst.lam, eps)
    assert len(lad.chain) == 2
    for rung, X in enumerate(lad.chain):
        assert check_ladder_rung(C, rung, 2, X, inst.lam, eps) is None
        assert X.members <= inst.cover.members
        for v in X:
            smaller = VertexSet(1, X.members - {v})
            with pytest.raises(ValueError):
                minimal_cover(C, smaller, inst.lam, [rung])
    assert lad.chain[0].members <= lad.chain[1].members


def test_ladder_depth_one():
    G = Bigraph.from_edges(2, 4, [(0, 0), (1, 2)])
    P = Parade.from_lists(G, [[0, 1]], [[0, 1], [2, 3]])
    lad = build_ladder(P, 0, VertexSet(1, {0, 1}), HALF, Fraction(1, 4), depth=1)
    assert lad.chain == (VertexSet(1, {0}),)


def test_ladder_failure_is_reported():
    G = Bigraph.complete(2, 4)
    P = Parade.from_lists(G, [[0, 1]], [[0, 1], [2, 3]])
    with pytest.raises(LadderError):
        build_ladder(P, 0, VertexSet(1, {0, 1}), HALF, Fraction(1, 4), depth=1)


# -- multiplication ----------------------------------------------------------------------------


def test_multiply_examples():
    G = Bigraph.from_edges(2, 3, [(0, 1), (1, 2)])
    assert multiply(G, 1, 1).graph == G
    assert multiply(Bigraph.complete(1, 1), 2, 3).graph == Bigraph.complete(2, 3)
    m = multiply(G, 3, 2)
    assert m.graph.edge_count == 6 * G.edge_count
    assert m.maps1[1] == (3, 4, 5) and m.maps2[2] == (4, 5)
    with pytest.raises(ValueError):
        multiply(G, 0, 1)
    with pytest.raises(OverflowError):
        multiply(Bigraph.edgeless(100, 100), 300, 300)


def test_lift_width():
    G = Bigraph.from_edges(6, 6, [(0, 0), (3, 4)])
    P = Parade.from_lists(G, [[0, 1], [2, 3]], [[0, 1, 2], [3, 4, 5]])
    Q = lift_parade(P, multiply(G, 3, 2))
    assert Q.width == (6, 6) and Q.is_balanced
    assert lift_parade(P, multiply(G, 1, 1)) == P


@settings(max_examples=80, deadline=None)
@given(parades(), st.integers(1, 3), st.integers(1, 3))
def test_lift_preserves_traces(P, a, b):
    Q = lift_parade(P, multiply(P.host, a, b))
    for T in enumerate_ordered_trees(3):
        assert rainbow_copies(Q, T) == rainbow_copies(P, T)


def test_balanced_blowup():
    G = Bigraph.from_edges(7, 5, [(0, 0), (2, 3), (6, 4)])
    P = Parade.from_lists(G, [[0, 1], [2, 3]], [[0], [3]])
    bb = balanced_blowup(P)
    assert bb.parade.is_balanced
    assert bb.graph.n1 == bb.graph.n2
    for T in enumerate_ordered_trees(3):
        assert rainbow_copies(bb.parade, T) == rainbow_copies(P, T)
    with pytest.raises(ValueError):
        balanced_blowup(Parade.from_lists(G, [[0]], [[0], [1]]))


@settings(max_examples=60, deadline=None)
@given(parades(max_len=2, max_width=2, max_extra=3), st.sampled_from([Fraction(1, 4), Fraction(1, 3), HALF]))
def test_coherence_transfer(P, eps):
    if P.K != P.L:
        P = Parade(P.host, P.blocks_a[:1], P.blocks_b[:1])
    if not is_coherent(P.host, eps):
        return
    bb = balanced_blowup(P)
    eps2 = transferred_coherence(eps, P)
    assert is_coherent(bb.graph, eps2).verdict == "coherent"
