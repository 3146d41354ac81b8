import random

import pytest

from purepair import generators as gen
from purepair.bigraph import Bigraph
from purepair.containment import bicontains, is_forest, is_tree


def test_exhaustive_counts():
    graphs = list(gen.exhaustive(2, 2))
    assert len(graphs) == 16 and len(set(graphs)) == 16
    assert all(gen.graph_code(G) == i for i, G in enumerate(graphs))
    with pytest.raises(ValueError):
        next(gen.exhaustive(5, 5))


def test_random_bigraph_extremes_and_determinism():
    assert gen.random_bigraph(5, 6, 0, gen.instance_rng(0, 0)) == Bigraph.edgeless(5, 6)
    assert gen.random_bigraph(5, 6, 1, gen.instance_rng(0, 0)) == Bigraph.complete(5, 6)
    a = gen.random_bigraph(9, 9, 0.5, gen.instance_rng(4, 2))
    assert a == gen.random_bigraph(9, 9, 0.5, gen.instance_rng(4, 2))
    assert a != gen.random_bigraph(9, 9, 0.5, gen.instance_rng(4, 3))


def test_named_families():
    assert gen.named("matching", 3, 5).edge_count == 3
    assert gen.half_graph(4).edge_count == 10
    with pytest.raises(ValueError):
        gen.named("nope", 2, 2)
    with pytest.raises(ValueError):
        gen.pattern("nope")


@pytest.mark.parametrize("seed", range(20))
def test_random_forest(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    T = gen.random_forest(n, rng)
    assert T.n1 + T.n2 == n and is_tree(T)
    F = gen.random_forest(n, rng, keep=0.5)
    assert is_forest(F)


@pytest.mark.parametrize("h_id", ["p3", "p3t", "2k2", "p4"])
def test_random_h_free(h_id):
    H = gen.pattern(h_id)
    for i in range(10):
        G = gen.random_h_free(6, 5, H, gen.instance_rng(9, i))
        assert (G.n1, G.n2) == (6, 5)
        assert bicontains(G, H) is None


def test_pit_shape_predicate():
    assert gen.pit_shape_ok([2]) and gen.pit_shape_ok([1, 2])
    assert not gen.pit_shape_ok([]) and not gen.pit_shape_ok([0, 2]) and not gen.pit_shape_ok([0, 1, 2])
