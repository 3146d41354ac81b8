"""Bigraph representation and elementary operations.

Adjacency is stored as one integer bitmask per side-1 vertex (bit ``j`` set
iff the vertex is adjacent to side-2 vertex ``j``); column masks are derived
lazily.  Every object here is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Rational = Fraction | int


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` (or an integer) into an exact :class:`Fraction`.

    Decimal strings are rejected on purpose: thresholds must stay exact.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"rational must be written as p/q, got {text!r}")
    return Fraction(s)


def format_rational(x: Rational) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def ceil_frac(x: Rational) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class VertexRef:
    side: int
    index: int

    def __post_init__(self) -> None:
        if self.side not in (1, 2):
            raise ValueError(f"side must be 1 or 2, got {self.side}")
        if self.index < 0:
            raise ValueError("vertex index must be non-negative")


@dataclass(frozen=True)
class VertexSet:
    side: int
    members: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.side not in (1, 2):
            raise ValueError(f"side must be 1 or 2, got {self.side}")
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))
        if any(i < 0 for i in self.members):
            raise ValueError("vertex index must be non-negative")

    @classmethod
    def from_mask(cls, side: int, mask: int) -> VertexSet:
        return cls(side, frozenset(iter_bits(mask)))

    @cached_property
    def mask(self) -> int:
        return mask_of(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __contains__(self, item: object) -> bool:
        return item in self.members


@dataclass(frozen=True)
class Bigraph:
    """A bigraph with ``n1`` side-1 and ``n2`` side-2 vertices.

    ``rows[u]`` is the bitmask of side-2 neighbours of side-1 vertex ``u``.
    Within-side edges cannot be represented.
    """

    n1: int
    n2: int
    rows: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("side sizes must be non-negative")
        rows = tuple(int(r) for r in self.rows) if self.rows else (0,) * self.n1
        if len(rows) != self.n1:
            raise ValueError(f"expected {self.n1} rows, got {len(rows)}")
        full = (1 << self.n2) - 1
        if any(r < 0 or r & ~full for r in rows):
            raise ValueError("row mask references a side-2 vertex out of range")
        object.__setattr__(self, "rows", rows)

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n1: int, n2: int, edges: Iterable[tuple[int, int]]) -> Bigraph:
        rows = [0] * n1
        for u, v in edges:
            if not (0 <= u < n1 and 0 <= v < n2):
                raise ValueError(f"edge ({u}, {v}) out of range for {n1}x{n2} bigraph")
            rows[u] |= 1 << v
        return cls(n1, n2, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]] | np.ndarray) -> Bigraph:
        arr = np.asarray(matrix, dtype=bool)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise ValueError("adjacency matrix must be two-dimensional")
        n1, n2 = arr.shape
        rows = tuple(mask_of(np.flatnonzero(arr[u]).tolist()) for u in range(n1))
        return cls(n1, n2, rows)

    @classmethod
    def complete(cls, n1: int, n2: int) -> Bigraph:
        return cls(n1, n2, ((1 << n2) - 1,) * n1)

    @classmethod
    def edgeless(cls, n1: int, n2: int) -> Bigraph:
        return cls(n1, n2, (0,) * n1)

    # queries ------------------------------------------------------------

    @cached_property
    def cols(self) -> tuple[int, ...]:
        cols = [0] * self.n2
        for u, r in enumerate(self.rows):
            for v in iter_bits(r):
                cols[v] |= 1 << u
        return tuple(cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n1, self.n2

    def side_size(self, side: int) -> int:
        return self.n1 if side == 1 else self.n2

    def full_mask(self, side: int) -> int:
        return (1 << self.side_size(side)) - 1

    def nbr_mask(self, side: int, index: int) -> int:
        """Neighbourhood (on the opposite side) of a vertex, as a bitmask."""
        return self.rows[index] if side == 1 else self.cols[index]

    def neighbours(self, ref: VertexRef) -> VertexSet:
        return VertexSet.from_mask(3 - ref.side, self.nbr_mask(ref.side, ref.index))

    def degree(self, side: int, index: int) -> int:
        return self.nbr_mask(side, index).bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, r in enumerate(self.rows) for v in iter_bits(r)]

    @cached_property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def edges_between(self, mask1: int, mask2: int) -> int:
        return sum((self.rows[u] & mask2).bit_count() for u in iter_bits(mask1))

    def to_matrix(self) -> np.ndarray:
        arr = np.zeros((self.n1, self.n2), dtype=bool)
        for u, v in self.edges():
            arr[u, v] = True
        return arr

    def __repr__(self) -> str:
        return f"Bigraph({self.n1}x{self.n2}, edges={self.edges()})"


def transpose(G: Bigraph) -> Bigraph:
    return Bigraph(G.n2, G.n1, G.cols)


def bicomplement(G: Bigraph) -> Bigraph:
    full = (1 << G.n2) - 1
    return Bigraph(G.n1, G.n2, tuple(full ^ r for r in G.rows))


def _check_set(G: Bigraph, X: VertexSet, side: int | None = None) -> None:
    if side is not None and X.side != side:
        raise ValueError(f"expected a side-{side} vertex set, got side {X.side}")
    n = G.side_size(X.side)
    if X.members and max(X.members) >= n:
        raise ValueError(f"vertex index {max(X.members)} out of range for side {X.side} (size {n})")


def induced_with_maps(
    G: Bigraph, X1: VertexSet, X2: VertexSet
) -> tuple[Bigraph, tuple[int, ...], tuple[int, ...]]:
    """Induced sub-bigraph plus the host indices of its vertices, per side."""
    _check_set(G, X1, 1)
    _check_set(G, X2, 2)
    map1 = tuple(sorted(X1.members))
    map2 = tuple(sorted(X2.members))
    rows = []
    for u in map1:
        r = G.rows[u]
        rows.append(mask_of(k for k, v in enumerate(map2) if r >> v & 1))
    return Bigraph(len(map1), len(map2), tuple(rows)), map1, map2


def induced(G: Bigraph, X1: VertexSet, X2: VertexSet) -> Bigraph:
    return induced_with_maps(G, X1, X2)[0]


def disjoint_union(*graphs: Bigraph) -> tuple[Bigraph, list[tuple[int, int]]]:
    """Disjoint union; also returns the (side-1, side-2) offset of each part."""
    offsets = []
    rows: list[int] = []
    o1 = o2 = 0
    for g in graphs:
        offsets.append((o1, o2))
        rows.extend(r << o2 for r in g.rows)
        o1 += g.n1
        o2 += g.n2
    return Bigraph(o1, o2, tuple(rows)), offsets


def _opposite(G: Bigraph, X: VertexSet, Y: VertexSet) -> None:
    if X.side == Y.side:
        raise ValueError("X and Y must lie on opposite sides")
    _check_set(G, X)
    _check_set(G, Y)


def union_nbr_mask(G: Bigraph, side: int, mask: int) -> int:
    acc = 0
    for i in iter_bits(mask):
        acc |= G.nbr_mask(side, i)
    return acc


def covered_count(G: Bigraph, X: VertexSet, Y: VertexSet) -> int:
    """Number of vertices of ``Y`` with at least one neighbour in ``X``."""
    _opposite(G, X, Y)
    return (union_nbr_mask(G, X.side, X.mask) & Y.mask).bit_count()


def lambda_covers(G: Bigraph, X: VertexSet, Y: VertexSet, lam: Rational) -> bool:
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    return covered_count(G, X, Y) >= lam * len(Y)


def lambda_misses(G: Bigraph, X: VertexSet, Y: VertexSet, lam: Rational) -> bool:
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    return len(Y) - covered_count(G, X, Y) >= lam * len(Y)


def is_complete_pair(G: Bigraph, A: VertexSet, B: VertexSet) -> bool:
    _opposite(G, A, B)
    return all(G.nbr_mask(A.side, a) & B.mask == B.mask for a in A.members)


def is_anticomplete_pair(G: Bigraph, A: VertexSet, B: VertexSet) -> bool:
    _opposite(G, A, B)
    return union_nbr_mask(G, A.side, A.mask) & B.mask == 0


# text format ------------------------------------------------------------


def dumps(G: Bigraph, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p bigraph {G.n1} {G.n2}")
    lines.extend(f"e {u} {v}" for u, v in G.edges())
    return "\n".join(lines) + "\n"


def loads(text: str) -> Bigraph:
    return _parse(text.splitlines())[0]


def _parse(lines: Iterable[str]) -> tuple[Bigraph, list[list[str]]]:
    """Parse one bigraph; unknown-but-well-formed lines are returned as extras."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    extras: list[list[str]] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise ValueError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "bigraph":
                raise ValueError(f"line {lineno}: expected 'p bigraph <n1> <n2>'")
            header = (int(parts[2]), int(parts[3]))
        elif parts[0] == "e":
            if header is None:
                raise ValueError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'e <i> <j>'")
            edges.append((int(parts[1]), int(parts[2])))
        else:
            extras.append(parts)
    if header is None:
        raise ValueError("missing 'p bigraph' header")
    return Bigraph.from_edges(header[0], header[1], edges), extras


def split_stream(text: str) -> list[str]:
    """Split a concatenated stream of bigraphs into per-graph chunks."""
    chunks: list[list[str]] = []
    for line in text.splitlines():
        if line.strip().startswith("p "):
            chunks.append([])
        if chunks:
            chunks[-1].append(line)
    return ["\n".join(c) + "\n" for c in chunks]
