"""Seeded bigraph generators, named families and constructed parade instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .bigraph import Bigraph, VertexSet, transpose
from .parade import Parade, group_blocks, is_bottom_concave, minimal_cover

MAX_EXHAUSTIVE_CELLS = 20


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for instance ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def py_rng(seed: int, index: int) -> random.Random:
    return random.Random(int(instance_rng(seed, index).integers(2**63)))


def random_bigraph(n1: int, n2: int, p: float | Fraction, rng: np.random.Generator) -> Bigraph:
    """Bipartite Erdos-Renyi graph: each of the n1*n2 pairs is an edge with probability p."""
    if n1 == 0 or n2 == 0:
        return Bigraph.edgeless(n1, n2)
    mat = rng.random((n1, n2)) < float(p)
    return Bigraph.from_matrix(mat)


def exhaustive(n1: int, n2: int) -> Iterator[Bigraph]:
    """All 2^(n1*n2) bigraphs on labelled sides, in binary-counter order."""
    cells = n1 * n2
    if cells > MAX_EXHAUSTIVE_CELLS:
        raise ValueError(f"exhaustive enumeration refused: n1*n2 = {cells} > {MAX_EXHAUSTIVE_CELLS}")
    low = (1 << n2) - 1
    for code in range(1 << cells):
        yield Bigraph(n1, n2, tuple((code >> (n2 * u)) & low for u in range(n1)))


def graph_code(G: Bigraph) -> int:
    """Inverse of the enumeration order used by :func:`exhaustive`."""
    return sum(r << (G.n2 * u) for u, r in enumerate(G.rows))


def matching(n: int) -> Bigraph:
    return Bigraph.from_edges(n, n, [(i, i) for i in range(n)])


def half_graph(n: int) -> Bigraph:
    """u_i adjacent to v_j exactly when i <= j."""
    return Bigraph.from_edges(n, n, [(i, j) for i in range(n) for j in range(i, n)])


NAMED = {
    "complete": lambda n1, n2: Bigraph.complete(n1, n2),
    "edgeless": lambda n1, n2: Bigraph.edgeless(n1, n2),
    "matching": lambda n1, n2: matching(min(n1, n2)),
    "half": lambda n1, n2: half_graph(min(n1, n2)),
}


def named(kind: str, n1: int, n2: int) -> Bigraph:
    try:
        return NAMED[kind](n1, n2)
    except KeyError:
        raise ValueError(f"unknown family {kind!r}; choose from {sorted(NAMED)}") from None


def random_tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Uniform labelled tree on n vertices via a random Pruefer sequence."""
    if n <= 1:
        return []
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [v for v in range(n) if degree[v] == 1]
    edges.append((u, w))
    return edges


def _two_colour(n: int, edges: list[tuple[int, int]]) -> list[int]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    colour = [-1] * n
    for s in range(n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if colour[y] < 0:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
    return colour


def random_forest(n: int, rng: random.Random, keep: float = 1.0) -> Bigraph:
    """Random tree on ``n`` vertices, each edge kept with probability ``keep``,
    2-coloured into sides (colour 0 is side 1)."""
    edges = [e for e in random_tree_edges(n, rng) if rng.random() < keep]
    colour = _two_colour(n, edges)
    side1 = [v for v in range(n) if colour[v] == 0]
    side2 = [v for v in range(n) if colour[v] == 1]
    pos1 = {v: i for i, v in enumerate(side1)}
    pos2 = {v: i for i, v in enumerate(side2)}
    bedges = [(pos1[a], pos2[b]) if colour[a] == 0 else (pos1[b], pos2[a]) for a, b in edges]
    return Bigraph.from_edges(len(side1), len(side2), bedges)


# -- small named patterns ------------------------------------------------------------

PATTERNS = {
    "k1": Bigraph.edgeless(1, 0),
    "edge": Bigraph.complete(1, 1),
    # 3-vertex path with its middle vertex on side 1
    "p3": Bigraph.complete(1, 2),
    # 3-vertex path with its middle vertex on side 2
    "p3t": Bigraph.complete(2, 1),
    "2k2": matching(2),
    "p4": Bigraph.from_edges(2, 2, [(0, 0), (0, 1), (1, 1)]),
}


def pattern(name: str) -> Bigraph:
    try:
        return PATTERNS[name]
    except KeyError:
        raise ValueError(f"unknown pattern {name!r}; choose from {sorted(PATTERNS)}") from None


def random_h_free(n1: int, n2: int, H: Bigraph, rng: np.random.Generator, p: float = 0.5, tries: int = 200) -> Bigraph:
    """Rejection-sample G(n1, n2, p) until it avoids ``H``; for the two
    orientations of the 3-vertex path a direct degree-capped sampler is used."""
    from .containment import bicontains

    if H == PATTERNS["p3"] or H == PATTERNS["p3t"]:
        # H-free iff every vertex on the centre side has degree <= 1
        centre_side = 1 if H.n1 == 1 else 2
        n_c, n_o = (n1, n2) if centre_side == 1 else (n2, n1)
        mat = np.zeros((n_c, n_o), dtype=bool)
        for u in range(n_c):
            if rng.random() < p:
                mat[u, rng.integers(n_o)] = True
        G = Bigraph.from_matrix(mat)
        return G if centre_side == 1 else transpose(G)
    for _ in range(tries):
        G = random_bigraph(n1, n2, p, rng)
        if bicontains(G, H) is None:
            return G
    return Bigraph.edgeless(n1, n2)


# -- concave grouped parades with a known pit structure -------------------------------

# complements of a K5 edge labelling: every two meet in exactly one point, so
# the union of two of the complementary 6-sets has 9 of the 10 points
_DESIGN = ((0, 1, 2, 3), (0, 4, 5, 6), (1, 4, 7, 8), (2, 5, 7, 9), (3, 6, 8, 9))
C_SIZE = 10
PIT_LAMBDA = Fraction(1, 5)


@dataclass(frozen=True)
class PitInstance:
    grouped: Parade
    ungrouped: Parade
    r: int
    block: int
    cover: VertexSet
    lam: Fraction


def _design_sets(rng: random.Random) -> list[list[int]]:
    perm = list(range(C_SIZE))
    rng.shuffle(perm)
    return [sorted(perm[x] for x in range(C_SIZE) if x not in comp) for comp in _DESIGN]


def concave_pit_instance(rng: random.Random) -> PitInstance:
    """Grouped parade that is 1/5-bottom-concave with every side-1 vertex having
    at most 6 neighbours in any C-block, plus a minimal cover X of all C-blocks
    inside one A-block.

    Vertices touching a middle C-block have exactly one neighbour there; those
    neighbourhoods pair up with end-block sets from a design in which any two
    sets together reach 9 of 10 vertices, so no X covers a middle block while
    missing the blocks on both sides.
    """
    ell = rng.choice([3, 4])
    r = rng.choice([1, 2, 5])
    n2 = ell * C_SIZE + rng.randrange(3)
    cblocks = [list(range(h * C_SIZE, (h + 1) * C_SIZE)) for h in range(ell)]
    K = rng.choice([1, 2]) if ell == 4 else rng.choice([1, 2, 3])
    extra = rng.randrange(2)
    rows: list[set[int]] = []
    blocks_a: list[list[int]] = []
    if ell == 3:
        left, right = _design_sets(rng), _design_sets(rng)
        combos = [(a, b) for a in range(5) for b in range(5)]
        rng.shuffle(combos)
        width = 2 + extra + rng.randrange(2)
        for i in range(K):
            blk = []
            mids = rng.sample(cblocks[1], 2)
            for t in range(width):
                a, b = combos.pop()
                nb = {cblocks[0][x] for x in left[a]} | {cblocks[2][x] for x in right[b]}
                if t < 2:
                    nb.add(mids[t])
                elif rng.random() < 0.5:
                    nb.add(rng.choice(mids))
                blk.append(len(rows))
                rows.append(nb)
            blocks_a.append(blk)
    else:
        first, last = _design_sets(rng), _design_sets(rng)
        ia, ib = list(range(5)), list(range(5))
        rng.shuffle(ia)
        rng.shuffle(ib)
        for i in range(K):
            blk = []
            for mid, end, designs, pool in ((1, 0, first, ia), (2, 3, last, ib)):
                mids = rng.sample(cblocks[mid], 2)
                for t in range(2):
                    nb = {cblocks[end][x] for x in designs[pool.pop()]}
                    nb.add(mids[t])
                    blk.append(len(rows))
                    rows.append(nb)
            if extra:
                # a vertex seeing only end blocks, at most 6 neighbours in each
                nb = set(rng.sample(cblocks[0], rng.randrange(7))) | set(rng.sample(cblocks[3], rng.randrange(7)))
                blk.append(len(rows))
                rows.append(nb)
            blocks_a.append(blk)
    n1 = len(rows) + rng.randrange(2)
    rows += [set() for _ in range(n1 - len(rows))]
    edges = [(u, v) for u, nb in enumerate(rows) for v in nb]
    G = Bigraph.from_edges(n1, n2, edges)
    # shuffle the side-2 vertices inside each C-block, then cut into B-blocks
    bblocks = []
    for h in range(ell):
        verts = cblocks[h][:]
        rng.shuffle(verts)
        w = C_SIZE // r
        bblocks += [verts[q * w:(q + 1) * w] for q in range(r)]
    width = min(len(b) for b in blocks_a)
    blocks_a = [b[:width] for b in blocks_a]
    P = Parade.from_lists(G, blocks_a, bblocks)
    C = group_blocks(P, r)
    verdict = is_bottom_concave(C, PIT_LAMBDA, n_exact=64)
    if verdict.status != "holds":
        raise AssertionError(f"generator produced a non-concave parade: {verdict}")
    i = rng.randrange(K)
    X = minimal_cover(C, C.block(1, i), PIT_LAMBDA)
    return PitInstance(C, P, r, i, X, PIT_LAMBDA)


def pit_shape_ok(pit_list: list[int]) -> bool:
    return len(pit_list) == 1 or (len(pit_list) == 2 and pit_list[1] == pit_list[0] + 1)


__all__ = [
    "instance_rng",
    "py_rng",
    "random_bigraph",
    "exhaustive",
    "graph_code",
    "matching",
    "half_graph",
    "named",
    "random_tree_edges",
    "random_forest",
    "pattern",
    "random_h_free",
    "concave_pit_instance",
    "pit_shape_ok",
]
