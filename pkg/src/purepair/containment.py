"""Induced bicontainment, rooted/ordered tree bigraphs, and rainbow copies."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterator, Sequence

from .bigraph import Bigraph, VertexRef, _parse, disjoint_union, dumps, iter_bits, transpose

if TYPE_CHECKING:
    from .parade import Parade, Support

MAX_TREE_SIZE = 6


class TreeBudgetError(ValueError):
    pass


def is_connected(G: Bigraph) -> bool:
    n = G.n1 + G.n2
    if n == 0:
        return False
    start = (1, 0) if G.n1 else (2, 0)
    seen = {start}
    queue = deque([start])
    while queue:
        side, i = queue.popleft()
        for j in iter_bits(G.nbr_mask(side, i)):
            w = (3 - side, j)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def is_tree(G: Bigraph) -> bool:
    return G.edge_count == G.n1 + G.n2 - 1 and is_connected(G)


def is_forest(G: Bigraph) -> bool:
    # a graph is a forest iff every component has |E| = |V| - 1
    comps = components(G)
    return sum(len(c1) + len(c2) - 1 for c1, c2 in comps) == G.edge_count


def components(G: Bigraph) -> list[tuple[list[int], list[int]]]:
    seen: set[tuple[int, int]] = set()
    out = []
    for start in [(1, i) for i in range(G.n1)] + [(2, j) for j in range(G.n2)]:
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            side, i = queue.popleft()
            for j in iter_bits(G.nbr_mask(side, i)):
                w = (3 - side, j)
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        out.append((sorted(i for s, i in comp if s == 1), sorted(i for s, i in comp if s == 2)))
    return out


@dataclass(frozen=True)
class Embedding:
    """Side-preserving injective map from a pattern into a host.

    ``map1[i]`` is the host side-1 image of pattern side-1 vertex ``i``;
    likewise ``map2`` for side 2.
    """

    pattern: Bigraph
    map1: tuple[int, ...]
    map2: tuple[int, ...]

    def image(self, ref: VertexRef) -> VertexRef:
        m = self.map1 if ref.side == 1 else self.map2
        return VertexRef(ref.side, m[ref.index])

    def as_dict(self) -> dict[VertexRef, VertexRef]:
        out = {VertexRef(1, i): VertexRef(1, u) for i, u in enumerate(self.map1)}
        out.update({VertexRef(2, j): VertexRef(2, v) for j, v in enumerate(self.map2)})
        return out

    def verify(self, host: Bigraph) -> bool:
        """Independent re-check of injectivity, ranges and adjacency exactness."""
        H = self.pattern
        if len(self.map1) != H.n1 or len(self.map2) != H.n2:
            return False
        if len(set(self.map1)) != H.n1 or len(set(self.map2)) != H.n2:
            return False
        if any(not 0 <= u < host.n1 for u in self.map1):
            return False
        if any(not 0 <= v < host.n2 for v in self.map2):
            return False
        return all(
            H.has_edge(i, j) == host.has_edge(u, v)
            for i, u in enumerate(self.map1)
            for j, v in enumerate(self.map2)
        )


# -- search core ------------------------------------------------------------


def search_order(H: Bigraph) -> list[tuple[int, int]]:
    """Order pattern vertices so each one (after the first of its component)
    has an already-placed neighbour.  Components are visited largest first;
    each BFS starts from the highest-degree vertex adjacent to a leaf."""
    comps = components(H)
    comps.sort(key=lambda c: -(len(c[0]) + len(c[1])))
    order: list[tuple[int, int]] = []
    for c1, c2 in comps:
        verts = [(1, i) for i in c1] + [(2, j) for j in c2]
        if len(verts) == 1:
            order.extend(verts)
            continue

        def leaf_adjacent(v: tuple[int, int]) -> bool:
            return any(H.degree(3 - v[0], w) == 1 for w in iter_bits(H.nbr_mask(*v)))

        start = max(verts, key=lambda v: (leaf_adjacent(v), H.degree(*v), -v[0], -v[1]))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            nbrs = [(3 - v[0], w) for w in iter_bits(H.nbr_mask(*v))]
            nbrs.sort(key=lambda w: (-H.degree(*w), w[1]))
            for w in nbrs:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def _iter_embeddings(
    H: Bigraph,
    G: Bigraph,
    order: Sequence[tuple[int, int]],
    domain: dict[tuple[int, int], int] | None = None,
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All embeddings of ``H`` into ``G`` in lexicographic order of the images
    listed along ``order``.  ``domain`` optionally restricts candidate images."""
    n = len(order)
    if H.n1 > G.n1 or H.n2 > G.n2:
        return
    pos = {v: k for k, v in enumerate(order)}
    # for each depth: the earlier depths on the opposite side, with adjacency flag
    constraints = []
    for k, (side, i) in enumerate(order):
        cons = []
        other = 2 if side == 1 else 1
        for j in range(H.side_size(other)):
            d = pos[(other, j)]
            if d < k:
                adj = H.has_edge(i, j) if side == 1 else H.has_edge(j, i)
                cons.append((d, adj))
        constraints.append(cons)
    full = (G.full_mask(1), G.full_mask(2))
    base = [
        (domain.get(v, full[v[0] - 1]) if domain else full[v[0] - 1]) & full[v[0] - 1]
        for v in order
    ]
    images = [0] * n
    used = [0, 0]

    def rec(k: int) -> Iterator[None]:
        if k == n:
            yield None
            return
        side = order[k][0]
        cand = base[k] & ~used[side - 1]
        other = 2 if side == 1 else 1
        for d, adj in constraints[k]:
            nb = G.nbr_mask(other, images[d])
            cand = cand & nb if adj else cand & ~nb
            if not cand:
                return
        while cand:
            low = cand & -cand
            cand ^= low
            images[k] = low.bit_length() - 1
            used[side - 1] |= low
            yield from rec(k + 1)
            used[side - 1] ^= low

    for _ in rec(0):
        m1 = [0] * H.n1
        m2 = [0] * H.n2
        for (side, i), img in zip(order, images):
            if side == 1:
                m1[i] = img
            else:
                m2[i] = img
        yield tuple(m1), tuple(m2)


def iter_embeddings(G: Bigraph, H: Bigraph) -> Iterator[Embedding]:
    for m1, m2 in _iter_embeddings(H, G, search_order(H)):
        yield Embedding(H, m1, m2)


def bicontains(G: Bigraph, H: Bigraph) -> Embedding | None:
    """First embedding of ``H`` as an induced sub-bigraph of ``G``, or None.

    "First" is lexicographic in the images taken along :func:`search_order`.
    """
    for emb in iter_embeddings(G, H):
        return emb
    return None


# -- rooted and ordered trees -------------------------------------------------


@dataclass(frozen=True)
class RootedTreeBigraph:
    tree: Bigraph
    root: VertexRef

    def __post_init__(self) -> None:
        if not is_tree(self.tree):
            raise ValueError("rooted tree bigraph must be connected and acyclic")
        if self.root.index >= self.tree.side_size(self.root.side):
            raise ValueError("root out of range")

    def transpose(self) -> RootedTreeBigraph:
        return RootedTreeBigraph(transpose(self.tree), VertexRef(3 - self.root.side, self.root.index))

    @property
    def size(self) -> int:
        return self.tree.n1 + self.tree.n2

    def dumps(self) -> str:
        return dumps(self.tree) + f"r {self.root.side} {self.root.index}\n"

    @classmethod
    def loads(cls, text: str) -> RootedTreeBigraph:
        G, extras = _parse(text.splitlines())
        roots = [p for p in extras if p[0] == "r"]
        if len(roots) != 1 or len(roots[0]) != 3:
            raise ValueError("expected exactly one 'r <side> <index>' line")
        return cls(G, VertexRef(int(roots[0][1]), int(roots[0][2])))


@dataclass(frozen=True)
class OrderedTreeBigraph:
    """Tree bigraph whose side-index order is the linear order on each side.

    Two ordered tree bigraphs are isomorphic iff their matrices are equal.
    """

    tree: Bigraph

    def __post_init__(self) -> None:
        if not is_tree(self.tree):
            raise ValueError("ordered tree bigraph must be connected and acyclic")

    @property
    def n1(self) -> int:
        return self.tree.n1

    @property
    def n2(self) -> int:
        return self.tree.n2

    @property
    def size(self) -> int:
        return self.tree.n1 + self.tree.n2

    def sort_key(self) -> tuple:
        return (self.size, self.n1, self.tree.rows)


def _build_levels(a: int, b: int, root_side: int) -> Bigraph:
    # BFS construction; levels alternate sides starting with root_side
    counts = [0, 0]
    edges: list[tuple[int, int]] = []
    frontier = [(root_side, 0)]
    counts[root_side - 1] = 1
    for _ in range(b):
        nxt = []
        for side, idx in frontier:
            child_side = 3 - side
            for _ in range(a):
                c = counts[child_side - 1]
                counts[child_side - 1] += 1
                nxt.append((child_side, c))
                edges.append((idx, c) if side == 1 else (c, idx))
        frontier = nxt
    return Bigraph.from_edges(counts[0], counts[1], edges)


def build_T(a: int, b: int) -> RootedTreeBigraph:
    """Root in side 1 of degree ``a``; internal vertices have degree ``a+1``;
    every root-to-leaf path has length exactly ``b``."""
    if a < 2:
        raise ValueError("a must be at least 2")
    if b < 0:
        raise ValueError("b must be non-negative")
    return RootedTreeBigraph(_build_levels(a, b, 1), VertexRef(1, 0))


def build_T_tilde(a: int, b: int) -> RootedTreeBigraph:
    return build_T(a, b).transpose()


def build_T4(a1: int, b1: int, a2: int, b2: int, delta: int) -> RootedTreeBigraph:
    """New side-1 root joined to the roots of ``a1`` copies of the transposed
    T(delta, b1) and ``a2`` copies of the transposed T(delta, b2)."""
    if delta < 2:
        raise ValueError("delta must be at least 2")
    if min(a1, b1, a2, b2) < 0:
        raise ValueError("a1, b1, a2, b2 must be non-negative")
    parts = [build_T_tilde(delta, b1)] * a1 + [build_T_tilde(delta, b2)] * a2
    root = Bigraph(1, 0)
    union, offsets = disjoint_union(root, *(p.tree for p in parts))
    edges = union.edges()
    for p, (o1, o2) in zip(parts, offsets[1:]):
        edges.append((0, o2 + p.root.index))
    return RootedTreeBigraph(Bigraph.from_edges(union.n1, union.n2, edges), VertexRef(1, 0))


def build_T4_tilde(a1: int, b1: int, a2: int, b2: int, delta: int) -> RootedTreeBigraph:
    return build_T4(a1, b1, a2, b2, delta).transpose()


def _trees_direct(t: int) -> set[Bigraph]:
    found = set()
    if t == 1:
        return {Bigraph(1, 0), Bigraph(0, 1)}
    for p in range(1, t):
        q = t - p
        for bits in range(1 << (p * q)):
            if bits.bit_count() != t - 1:
                continue
            rows = tuple((bits >> (u * q)) & ((1 << q) - 1) for u in range(p))
            G = Bigraph(p, q, rows)
            if is_connected(G):
                found.add(G)
    return found


def _prufer_decode(seq: Sequence[int], t: int) -> list[tuple[int, int]]:
    degree = [1] * t
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(t) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [i for i in range(t) if degree[i] == 1]
    edges.append((u, w))
    return edges


def _trees_prufer(t: int) -> set[Bigraph]:
    if t == 1:
        return {Bigraph(1, 0), Bigraph(0, 1)}
    found = set()
    for seq in itertools.product(range(t), repeat=t - 2):
        edges = _prufer_decode(seq, t)
        adj: dict[int, list[int]] = {i: [] for i in range(t)}
        for x, y in edges:
            adj[x].append(y)
            adj[y].append(x)
        colour = {0: 0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
        for flip in (0, 1):
            side1 = sorted(i for i in range(t) if colour[i] == flip)
            side2 = sorted(i for i in range(t) if colour[i] != flip)
            pos1 = {x: k for k, x in enumerate(side1)}
            pos2 = {x: k for k, x in enumerate(side2)}
            bedges = [
                (pos1[x], pos2[y]) if x in pos1 else (pos1[y], pos2[x]) for x, y in edges
            ]
            found.add(Bigraph.from_edges(len(side1), len(side2), bedges))
    return found


@lru_cache(maxsize=None)
def _trees_of_size(t: int, method: str) -> tuple[Bigraph, ...]:
    gen = _trees_direct if method == "direct" else _trees_prufer
    return tuple(sorted(gen(t), key=lambda g: (g.n1, g.rows)))


def enumerate_ordered_trees(
    tau: int, method: str | None = None, max_size: int = MAX_TREE_SIZE
) -> tuple[OrderedTreeBigraph, ...]:
    """All ordered tree bigraphs with at most ``tau`` vertices, each once.

    ``method`` is ``"direct"`` (adjacency matrices filtered to trees) or
    ``"prufer"``; by default sizes up to 4 use the former, 5 and 6 the latter.
    """
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if tau > max_size:
        raise TreeBudgetError(f"tau={tau} exceeds the tree enumeration budget ({max_size})")
    if method not in (None, "direct", "prufer"):
        raise ValueError(f"unknown method {method!r}")
    out = []
    for t in range(1, tau + 1):
        m = method or ("direct" if t <= 4 else "prufer")
        out.extend(OrderedTreeBigraph(g) for g in _trees_of_size(t, m))
    return tuple(out)


def ordered_tree_counts(tau: int) -> dict[int, int]:
    counts: dict[int, int] = {}
    for T in enumerate_ordered_trees(tau):
        counts[T.size] = counts.get(T.size, 0) + 1
    return counts


# -- rainbow copies -------------------------------------------------------------


def _support_domain(
    P: Parade, T: Bigraph, I: Sequence[int], J: Sequence[int],
    masks_a: Sequence[int] | None = None, masks_b: Sequence[int] | None = None,
) -> dict[tuple[int, int], int]:
    ma = masks_a if masks_a is not None else P.masks_a
    mb = masks_b if masks_b is not None else P.masks_b
    dom = {(1, k): ma[i] for k, i in enumerate(I)}
    dom.update({(2, k): mb[j] for k, j in enumerate(J)})
    return dom


def rainbow_witnesses(P: Parade, T: OrderedTreeBigraph | Bigraph) -> Iterator[tuple[Support, Embedding]]:
    """Every P-rainbow copy of ``T`` (as an embedding) with its support.

    Side-k vertex ``i`` of ``T`` lands in the ``i``-th smallest block used on
    side k, so the P-ordering of each copy equals ``T``.
    """
    from .parade import Support

    H = T.tree if isinstance(T, OrderedTreeBigraph) else T
    order = search_order(H)
    for I in itertools.combinations(range(P.K), H.n1):
        for J in itertools.combinations(range(P.L), H.n2):
            dom = _support_domain(P, H, I, J)
            for m1, m2 in _iter_embeddings(H, P.host, order, dom):
                yield Support(I, J), Embedding(H, m1, m2)


def has_rainbow_copy(
    P: Parade, H: Bigraph, I: Sequence[int], J: Sequence[int],
    masks_a: Sequence[int] | None = None, masks_b: Sequence[int] | None = None,
    order: Sequence[tuple[int, int]] | None = None,
) -> bool:
    dom = _support_domain(P, H, I, J, masks_a, masks_b)
    for _ in _iter_embeddings(H, P.host, order or search_order(H), dom):
        return True
    return False


def rainbow_copies(P: Parade, T: OrderedTreeBigraph | Bigraph) -> frozenset[Support]:
    """The set of supports of all P-rainbow copies of the ordered tree ``T``."""
    from .parade import Support

    H = T.tree if isinstance(T, OrderedTreeBigraph) else T
    order = search_order(H)
    out = set()
    for I in itertools.combinations(range(P.K), H.n1):
        for J in itertools.combinations(range(P.L), H.n2):
            if has_rainbow_copy(P, H, I, J, order=order):
                out.add(Support(I, J))
    return frozenset(out)


def _block_of(P: Parade, ref: VertexRef) -> int | None:
    blocks = P.blocks_a if ref.side == 1 else P.blocks_b
    for k, b in enumerate(blocks):
        if ref.index in b:
            return k
    return None


def _used_blocks(e: Embedding, P: Parade) -> tuple[list[int], list[int]]:
    used_a = [_block_of(P, VertexRef(1, u)) for u in e.map1]
    used_b = [_block_of(P, VertexRef(2, v)) for v in e.map2]
    if None in used_a or None in used_b:
        raise ValueError("embedding is not P-rainbow: a vertex lies outside every block")
    if len(set(used_a)) != len(used_a) or len(set(used_b)) != len(used_b):
        raise ValueError("embedding is not P-rainbow: two vertices share a block")
    return used_a, used_b  # type: ignore[return-value]


def is_left_rainbow(e: Embedding, P: Parade, root: VertexRef) -> bool:
    used_a, used_b = _used_blocks(e, P)
    used = used_a if root.side == 1 else used_b
    h = used[root.index]
    return all(h <= i for i in used)


def is_right_rainbow(e: Embedding, P: Parade, root: VertexRef) -> bool:
    used_a, used_b = _used_blocks(e, P)
    used = used_a if root.side == 1 else used_b
    h = used[root.index]
    return all(h >= i for i in used)
