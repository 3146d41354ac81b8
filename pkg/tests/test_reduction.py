import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purepair import generators as gen
from purepair.bigraph import Bigraph, bicomplement, induced
from purepair.containment import bicontains
from purepair.reduction import (
    FoundCopy,
    PreconditionError,
    SparsePairOutcome,
    betterthm_pipeline,
    density_params,
    density_refine,
    find_dense_pair,
    forestsymm_pipeline,
    getsparse_delta,
    getsparse_extract,
    has_dense_subpair,
    sparse_outcome_ok,
)

from conftest import bigraphs

Q = Fraction(1, 4)
THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


def brute_dense_subpair(G, c, eps):
    """Independent check: every pair of subsets, sizes at least c times the side."""
    for r1 in range(G.n1 + 1):
        if r1 < c * G.n1:
            continue
        for s in itertools.combinations(range(G.n1), r1):
            for r2 in range(G.n2 + 1):
                if r2 < c * G.n2:
                    continue
                for t in itertools.combinations(range(G.n2), r2):
                    e = sum(1 for u in s for v in t if G.has_edge(u, v))
                    if e >= (1 - eps) * r1 * r2:
                        return True
    return False


def is_anticomplete(G, z1, z2):
    return all(not G.has_edge(u, v) for u in z1 for v in z2)


def is_complete(G, z1, z2):
    return all(G.has_edge(u, v) for u in z1 for v in z2)


# -- sparse-or-dense extraction -----------------------------------------------------


def test_delta_values():
    assert getsparse_delta(Bigraph.edgeless(1, 0), Q) == HALF
    assert getsparse_delta(Bigraph.complete(1, 1), Q) == Fraction(1, 8)
    assert getsparse_delta(gen.pattern("p3"), Q) == Fraction(1, 16)
    assert getsparse_delta(gen.pattern("p3t"), Q) == Fraction(1, 64)


def test_extract_finds_copy():
    out = getsparse_extract(Bigraph.complete(10, 10), Bigraph.complete(1, 1), Q)
    assert isinstance(out, FoundCopy)
    assert out.embedding.verify(Bigraph.complete(10, 10))


def test_extract_small_side_shortcut():
    G = Bigraph.from_edges(3, 40, [(0, v) for v in range(30)])
    out = getsparse_extract(G, gen.pattern("p3"), Q)
    assert isinstance(out, SparsePairOutcome)
    assert out.branch == "shortcut-1" and out.mode == "dense"
    assert sparse_outcome_ok(G, out, Q)


def test_extract_argument_errors():
    H = gen.pattern("p3")
    with pytest.raises(ValueError):
        getsparse_extract(Bigraph.edgeless(4, 4), H, 0)
    with pytest.raises(ValueError):
        getsparse_extract(Bigraph.edgeless(4, 4), H, 1)
    with pytest.raises(ValueError):
        getsparse_extract(Bigraph.edgeless(0, 4), H, Q)


@pytest.mark.parametrize("h_id", ["p3", "p3t"])
@pytest.mark.parametrize("index", range(25))
def test_extract_outcomes_on_free_graphs(h_id, index):
    rng = gen.instance_rng(17, index)
    H = gen.pattern(h_id)
    n1, n2 = int(rng.integers(1, 61)), int(rng.integers(1, 61))
    G = gen.random_h_free(n1, n2, H, rng, p=float(rng.uniform(0.2, 1)))
    out = getsparse_extract(G, H, Q)
    assert isinstance(out, SparsePairOutcome)
    assert sparse_outcome_ok(G, out, Q)


def test_extract_main_branch_is_reached():
    branches = set()
    for i in range(40):
        rng = gen.instance_rng(3, i)
        G = gen.random_h_free(60, 60, gen.pattern("p3"), rng, p=0.9)
        out = getsparse_extract(G, gen.pattern("p3"), Q)
        assert sparse_outcome_ok(G, out, Q)
        branches.add(out.branch)
    assert "main" in branches


def test_outcome_checker_rejects_bad_pairs():
    G = Bigraph.complete(20, 20)
    out = getsparse_extract(G, gen.pattern("2k2"), Q)
    assert isinstance(out, SparsePairOutcome) and out.mode == "dense"
    flipped = SparsePairOutcome(out.a1, out.a2, "sparse", out.delta, out.achieved, out.branch)
    assert not sparse_outcome_ok(G, flipped, Q)


# -- density refinement --------------------------------------------------------------


def test_density_params():
    p = density_params(THIRD, Q, HALF)
    assert p.lam == Fraction(15, 16)
    assert p.n == 22
    assert p.delta == THIRD**22
    assert density_params(1, Q, HALF).c == THIRD
    with pytest.raises(PreconditionError):
        density_params(THIRD, HALF, HALF)
    with pytest.raises(PreconditionError):
        density_params(THIRD, Q, Fraction(9, 10))


@settings(max_examples=80, deadline=None)
@given(bigraphs(max_n=4, min_n=1), st.sampled_from([Q, THIRD, HALF]), st.sampled_from([Q, THIRD]))
def test_dense_subpair_matches_brute(G, c, eps):
    got = has_dense_subpair(G, G.full_mask(1), G.full_mask(2), c, eps)
    assert got == brute_dense_subpair(G, c, eps)


@settings(max_examples=80, deadline=None)
@given(bigraphs(max_n=5, min_n=1))
def test_find_dense_pair_sound(G):
    pair, exact = find_dense_pair(G, G.full_mask(1), G.full_mask(2), THIRD, Q)
    assert exact
    if pair is None:
        # at the minimum sizes no pair is dense
        s1, s2 = -(-G.n1 // 3), -(-G.n2 // 3)
        for a in itertools.combinations(range(G.n1), s1):
            for b in itertools.combinations(range(G.n2), s2):
                e = sum(1 for u in a for v in b if G.has_edge(u, v))
                assert e < (1 - Q) * s1 * s2
    else:
        y1, y2 = pair
        e = sum((G.rows[u] & y2).bit_count() for u in range(G.n1) if y1 >> u & 1)
        assert e >= (1 - Q) * y1.bit_count() * y2.bit_count()


def test_density_refine_edgeless():
    G = Bigraph.edgeless(4, 4)
    out = density_refine(G, THIRD, Q, HALF)
    assert out.branch == "descent" and out.t == 0 and out.verified
    assert len(out.z1) == 4 and len(out.z2) == 4


def test_density_refine_descends():
    G = Bigraph.from_edges(4, 4, [(0, 0), (0, 1), (1, 0), (1, 1)])
    out = density_refine(G, THIRD, Q, HALF)
    assert out.t >= 1 and out.verified
    assert out.steps[0].t == 1
    assert not brute_dense_subpair(induced(G, out.z1, out.z2), THIRD, Q)


def test_density_refine_shortcut():
    G = Bigraph.from_edges(4, 4, [(0, 0), (1, 1)])
    out = density_refine(G, THIRD, Q, HALF, shortcut=True)
    assert out.branch == "shortcut" and out.verified


def test_density_refine_preconditions():
    with pytest.raises(PreconditionError):
        density_refine(Bigraph.complete(3, 3), THIRD, Q, HALF)
    with pytest.raises(PreconditionError):
        density_refine(Bigraph.edgeless(0, 3), THIRD, Q, HALF)


@settings(max_examples=60, deadline=None)
@given(bigraphs(max_n=4, min_n=1), st.booleans())
def test_density_refine_sound(G, shortcut):
    if G.edge_count > G.n1 * G.n2 / 2:
        G = bicomplement(G)
    out = density_refine(G, THIRD, Q, HALF, shortcut=shortcut)
    assert out.t <= out.params.n
    assert len(out.z1) > 0 and len(out.z2) > 0
    assert not brute_dense_subpair(induced(G, out.z1, out.z2), THIRD, Q)


# -- pipelines ------------------------------------------------------------------------


def test_forestsymm_edgeless():
    G = Bigraph.edgeless(5, 7)
    out = forestsymm_pipeline(G, gen.pattern("2k2"))
    assert out.kind == "anticomplete" and out.fraction == 1


def test_forestsymm_preconditions():
    with pytest.raises(PreconditionError):
        forestsymm_pipeline(Bigraph.edgeless(4, 4), Bigraph.complete(2, 2))
    with pytest.raises(PreconditionError):
        forestsymm_pipeline(gen.matching(4), gen.pattern("2k2"))
    with pytest.raises(PreconditionError):
        forestsymm_pipeline(Bigraph.complete(3, 3), gen.pattern("p3"))


@pytest.mark.parametrize("index", range(15))
def test_forestsymm_pure_pairs(index):
    rng = gen.instance_rng(8, index)
    H = gen.pattern("p4")
    G = None
    for _ in range(200):
        cand = gen.random_bigraph(6, 6, float(rng.random()), rng)
        if bicontains(cand, H) is None and bicontains(cand, bicomplement(H)) is None:
            G = cand
            break
    if G is None:
        pytest.skip("no doubly free graph sampled")
    out = forestsymm_pipeline(G, H)
    check = is_anticomplete if out.kind == "anticomplete" else is_complete
    assert check(G, out.z1, out.z2)
    assert out.fraction > 0


def test_betterthm_edgeless():
    out = betterthm_pipeline(Bigraph.edgeless(4, 4), gen.pattern("p3"), HALF)
    assert out.kind == "anticomplete" and out.fraction == 1


def test_betterthm_preconditions():
    with pytest.raises(PreconditionError):
        betterthm_pipeline(Bigraph.complete(3, 3), gen.pattern("p3"), HALF)
    with pytest.raises(PreconditionError):
        betterthm_pipeline(Bigraph.edgeless(3, 3), gen.pattern("p3"), HALF, eta=HALF)


@pytest.mark.parametrize("h_id", ["p3", "p3t"])
@pytest.mark.parametrize("index", range(10))
def test_betterthm_pairs_are_anticomplete(h_id, index):
    rng = gen.instance_rng(21, index)
    G = gen.random_h_free(int(rng.integers(1, 9)), int(rng.integers(1, 9)), gen.pattern(h_id), rng)
    if G.edge_count > G.n1 * G.n2 / 2:
        pytest.skip("too dense for tau = 1/2")
    out = betterthm_pipeline(G, gen.pattern(h_id), HALF)
    assert is_anticomplete(G, out.z1, out.z2)
    assert out.fraction > 0
