"""Coherence certification and exact searches for pure pairs.

A bigraph is eps-coherent when every side-1 vertex has degree below
eps*n2, every side-2 vertex has degree below eps*n1, and no anticomplete
pair (Z1, Z2) has |Zi| >= eps*ni on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .bigraph import Bigraph, Rational, VertexSet, bicomplement, ceil_frac


@dataclass(frozen=True)
class PairSearch:
    """Result of an anticomplete-pair search; ``exact`` means the search finished."""

    pair: tuple[VertexSet, VertexSet] | None
    exact: bool
    nodes: int


def _side1_order(G: Bigraph) -> list[int]:
    # vertices with many non-neighbours first; ties broken by row pattern so
    # the search depends only on the multiset of rows
    return sorted(range(G.n1), key=lambda u: (G.rows[u].bit_count(), G.rows[u], u))


def find_anticomplete_pair(G: Bigraph, s1: int, s2: int, budget: int | None = 10**6) -> PairSearch:
    """Branch and bound for Zi with |Zi| >= si and no edges between Z1 and Z2.

    Side-1 vertices are branched include/exclude; a branch is cut when the
    common non-neighbourhood of the included vertices drops below ``s2`` or
    too few side-1 vertices remain to reach ``s1``.
    """
    if s1 > G.n1 or s2 > G.n2:
        return PairSearch(None, True, 0)
    full = G.full_mask(2)
    if s1 <= 0:
        return PairSearch((VertexSet(1, frozenset()), VertexSet.from_mask(2, full)), True, 1)
    order = _side1_order(G)
    non = [full & ~G.rows[u] for u in order]
    n = len(order)
    nodes = 0
    exhausted = False

    def rec(idx: int, chosen: int, count: int, common: int) -> tuple[int, int] | None:
        nonlocal nodes, exhausted
        nodes += 1
        if budget is not None and nodes > budget:
            exhausted = True
            return None
        if count >= s1:
            return chosen, common
        if count + (n - idx) < s1:
            return None
        c2 = common & non[idx]
        if c2.bit_count() >= s2:
            got = rec(idx + 1, chosen | (1 << order[idx]), count + 1, c2)
            if got is not None or exhausted:
                return got
        return rec(idx + 1, chosen, count, common)

    got = rec(0, 0, 0, full)
    if got is None:
        return PairSearch(None, not exhausted, nodes)
    z1, z2 = got
    return PairSearch((VertexSet.from_mask(1, z1), VertexSet.from_mask(2, z2)), True, nodes)


@dataclass(frozen=True)
class CoherenceReport:
    eps: Fraction
    degree_ok_1: bool
    degree_ok_2: bool
    witness: tuple[VertexSet, VertexSet] | None
    verdict: Literal["coherent", "incoherent", "unknown"]
    exact: bool
    nodes: int

    def __bool__(self) -> bool:
        return self.verdict == "coherent"


def degree_bullets(G: Bigraph, eps: Rational) -> tuple[bool, bool]:
    eps = Fraction(eps)
    ok1 = all(r.bit_count() < eps * G.n2 for r in G.rows)
    ok2 = all(c.bit_count() < eps * G.n1 for c in G.cols)
    return ok1, ok2


def is_coherent(G: Bigraph, eps: Rational, budget: int | None = 10**6) -> CoherenceReport:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    ok1, ok2 = degree_bullets(G, eps)
    s1, s2 = ceil_frac(eps * G.n1), ceil_frac(eps * G.n2)
    search = find_anticomplete_pair(G, s1, s2, budget)
    if search.pair is not None:
        return CoherenceReport(eps, ok1, ok2, search.pair, "incoherent", True, search.nodes)
    if not (ok1 and ok2):
        return CoherenceReport(eps, ok1, ok2, None, "incoherent", search.exact, search.nodes)
    if not search.exact:
        return CoherenceReport(eps, ok1, ok2, None, "unknown", False, search.nodes)
    return CoherenceReport(eps, ok1, ok2, None, "coherent", True, search.nodes)


@dataclass(frozen=True)
class BestPair:
    """Pure pair maximising min(|Z1|/n1, |Z2|/n2)."""

    z1: VertexSet
    z2: VertexSet
    value: Fraction
    exact: bool
    nodes: int


def best_anticomplete_pair(G: Bigraph, budget: int | None = 10**6) -> BestPair:
    """Anticomplete pair maximising the smaller of the two side fractions.

    Returns the all-empty pair with value 0 when a side is empty.
    """
    n1, n2 = G.n1, G.n2
    if n1 == 0 or n2 == 0:
        return BestPair(VertexSet(1, frozenset()), VertexSet(2, frozenset()), Fraction(0), True, 0)
    order = _side1_order(G)
    full = G.full_mask(2)
    non = [full & ~G.rows[u] for u in order]
    n = len(order)
    best = [Fraction(-1), 0, 0]
    nodes = 0
    exhausted = False

    def rec(idx: int, chosen: int, count: int, common: int) -> None:
        nonlocal nodes, exhausted
        nodes += 1
        if budget is not None and nodes > budget:
            exhausted = True
            return
        val = min(Fraction(count, n1), Fraction(common.bit_count(), n2))
        if val > best[0]:
            best[:] = [val, chosen, common]
        bound = min(Fraction(count + n - idx, n1), Fraction(common.bit_count(), n2))
        if idx == n or bound <= best[0]:
            return
        c2 = common & non[idx]
        if c2:
            rec(idx + 1, chosen | (1 << order[idx]), count + 1, c2)
            if exhausted:
                return
        rec(idx + 1, chosen, count, common)

    rec(0, 0, 0, full)
    return BestPair(VertexSet.from_mask(1, best[1]), VertexSet.from_mask(2, best[2]), best[0], not exhausted, nodes)


def best_complete_pair(G: Bigraph, budget: int | None = 10**6) -> BestPair:
    return best_anticomplete_pair(bicomplement(G), budget)


@dataclass(frozen=True)
class Threshold:
    """G is eps-coherent exactly when eps > value (the set of such eps is open)."""

    value: Fraction
    degree_part_1: Fraction
    degree_part_2: Fraction
    pair_part: Fraction
    exact: bool


def coherence_threshold(G: Bigraph, budget: int | None = 10**6) -> Threshold:
    if G.n1 == 0 or G.n2 == 0:
        raise ValueError("threshold needs both sides nonempty")
    d1 = Fraction(max(r.bit_count() for r in G.rows), G.n2)
    d2 = Fraction(max(c.bit_count() for c in G.cols), G.n1)
    best = best_anticomplete_pair(G, budget)
    return Threshold(max(d1, d2, best.value), d1, d2, best.value, best.exact)


def extend_anticomplete(G: Bigraph, z1: VertexSet, z2: VertexSet) -> tuple[VertexSet, VertexSet]:
    """Grow an anticomplete pair until no single vertex can be added.

    Side-1 vertices are added first (ascending index), then side-2 vertices.
    """
    m1, m2 = z1.mask, z2.mask
    for u in range(G.n1):
        if not m1 >> u & 1 and not G.rows[u] & m2:
            m1 |= 1 << u
    cols = G.cols
    for v in range(G.n2):
        if not m2 >> v & 1 and not cols[v] & m1:
            m2 |= 1 << v
    return VertexSet.from_mask(1, m1), VertexSet.from_mask(2, m2)


def extend_complete(G: Bigraph, z1: VertexSet, z2: VertexSet) -> tuple[VertexSet, VertexSet]:
    return extend_anticomplete(bicomplement(G), z1, z2)


__all__ = [
    "PairSearch",
    "find_anticomplete_pair",
    "CoherenceReport",
    "degree_bullets",
    "is_coherent",
    "BestPair",
    "best_anticomplete_pair",
    "best_complete_pair",
    "Threshold",
    "coherence_threshold",
    "extend_anticomplete",
    "extend_complete",
]
