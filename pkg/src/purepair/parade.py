"""Parades: ordered equal-size blocks on each side of a host bigraph.

Block indices are 0-based throughout.  A support ``(I, J)`` records which
side-1 blocks and side-2 blocks a rainbow copy touches; the trace of an
ordered tree is the set of supports of all its rainbow copies.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal, Sequence

from .bigraph import (
    Bigraph,
    Rational,
    VertexSet,
    ceil_frac,
    format_rational,
    induced_with_maps,
    iter_bits,
    mask_of,
    union_nbr_mask,
)
from .containment import (
    OrderedTreeBigraph,
    enumerate_ordered_trees,
    has_rainbow_copy,
    rainbow_copies,
    search_order,
)


@dataclass(frozen=True, order=True)
class Support:
    I: tuple[int, ...]
    J: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "I", tuple(sorted(self.I)))
        object.__setattr__(self, "J", tuple(sorted(self.J)))


@dataclass(frozen=True)
class Trace:
    tree: OrderedTreeBigraph
    supports: frozenset[Support]

    def __len__(self) -> int:
        return len(self.supports)

    def __contains__(self, s: object) -> bool:
        return s in self.supports


@dataclass(frozen=True)
class Parade:
    host: Bigraph
    blocks_a: tuple[frozenset[int], ...]
    blocks_b: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        a = tuple(frozenset(b) for b in self.blocks_a)
        b = tuple(frozenset(x) for x in self.blocks_b)
        object.__setattr__(self, "blocks_a", a)
        object.__setattr__(self, "blocks_b", b)
        for blocks, n, name in ((a, self.host.n1, "A"), (b, self.host.n2, "B")):
            if any(not blk for blk in blocks):
                raise ValueError(f"{name}-blocks must be nonempty")
            if len({len(blk) for blk in blocks}) > 1:
                raise ValueError(f"{name}-blocks must all have the same cardinality")
            seen: set[int] = set()
            for blk in blocks:
                if seen & blk:
                    raise ValueError(f"{name}-blocks must be pairwise disjoint")
                seen |= blk
                if max(blk) >= n or min(blk) < 0:
                    raise ValueError(f"{name}-block vertex out of range")

    @classmethod
    def from_lists(cls, host: Bigraph, blocks_a: Iterable[Iterable[int]], blocks_b: Iterable[Iterable[int]]) -> Parade:
        return cls(host, tuple(frozenset(x) for x in blocks_a), tuple(frozenset(x) for x in blocks_b))

    @property
    def K(self) -> int:
        return len(self.blocks_a)

    @property
    def L(self) -> int:
        return len(self.blocks_b)

    @property
    def length(self) -> tuple[int, int]:
        return self.K, self.L

    @property
    def width(self) -> tuple[int, int]:
        return (len(self.blocks_a[0]) if self.K else 0, len(self.blocks_b[0]) if self.L else 0)

    @property
    def is_balanced(self) -> bool:
        return self.K == self.L and self.width[0] == self.width[1]

    @cached_property
    def masks_a(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.blocks_a)

    @cached_property
    def masks_b(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.blocks_b)

    def block(self, side: int, k: int) -> VertexSet:
        return VertexSet(side, (self.blocks_a if side == 1 else self.blocks_b)[k])

    def to_json_dict(self, host_ref: str | None = None) -> dict:
        return {
            "host": host_ref,
            "length": list(self.length),
            "width": list(self.width),
            "blocks_a": [sorted(b) for b in self.blocks_a],
            "blocks_b": [sorted(b) for b in self.blocks_b],
        }

    def dumps(self, host_ref: str = "-") -> str:
        lines = [f"p parade {self.K} {self.L}", f"h {host_ref}"]
        lines += ["a " + " ".join(map(str, sorted(b))) for b in self.blocks_a]
        lines += ["b " + " ".join(map(str, sorted(b))) for b in self.blocks_b]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, host: Bigraph) -> tuple[Parade, str]:
        """Parse the text form against ``host``; returns the parade and its host reference."""
        ref = "-"
        a: list[list[int]] = []
        b: list[list[int]] = []
        header = None
        for line in text.splitlines():
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                header = (int(parts[2]), int(parts[3]))
            elif parts[0] == "h":
                ref = " ".join(parts[1:])
            elif parts[0] == "a":
                a.append([int(x) for x in parts[1:]])
            elif parts[0] == "b":
                b.append([int(x) for x in parts[1:]])
            else:
                raise ValueError(f"unexpected parade line: {line!r}")
        if header is None or header != (len(a), len(b)):
            raise ValueError("parade header missing or inconsistent with block lines")
        return cls.from_lists(host, a, b), ref


def parade_from_json(d: dict, host: Bigraph) -> Parade:
    return Parade.from_lists(host, d["blocks_a"], d["blocks_b"])


# -- minors -------------------------------------------------------------------


def sub_parade(P: Parade, I: Sequence[int], J: Sequence[int]) -> Parade:
    for idx, n, name in ((I, P.K, "I"), (J, P.L, "J")):
        if not idx:
            raise ValueError(f"{name} must be nonempty")
        if list(idx) != sorted(set(idx)):
            raise ValueError(f"{name} must be sorted without repeats")
        if idx[0] < 0 or idx[-1] >= n:
            raise ValueError(f"{name} index out of range")
    return Parade(P.host, tuple(P.blocks_a[i] for i in I), tuple(P.blocks_b[j] for j in J))


def contraction(P: Parade, new_a: Sequence[Iterable[int]], new_b: Sequence[Iterable[int]]) -> Parade:
    new_a = [frozenset(x) for x in new_a]
    new_b = [frozenset(x) for x in new_b]
    if len(new_a) != P.K or len(new_b) != P.L:
        raise ValueError("a contraction keeps the length of the parade")
    for new, old in zip(new_a + new_b, P.blocks_a + P.blocks_b):
        if not new <= old:
            raise ValueError("contracted block must be a subset of the original block")
    return Parade(P.host, tuple(new_a), tuple(new_b))


def is_contraction_of(Q: Parade, P: Parade) -> bool:
    return (
        Q.host == P.host
        and Q.length == P.length
        and all(q <= p for q, p in zip(Q.blocks_a + Q.blocks_b, P.blocks_a + P.blocks_b))
    )


# -- traces ---------------------------------------------------------------------


def trace(P: Parade, T: OrderedTreeBigraph) -> Trace:
    return Trace(T, rainbow_copies(P, T))


def full_supports(K: int, L: int, p: int, q: int) -> frozenset[Support]:
    return frozenset(
        Support(I, J) for I in itertools.combinations(range(K), p) for J in itertools.combinations(range(L), q)
    )


def trace_cost(P: Parade, tau: int) -> int:
    return sum(len(rainbow_copies(P, T)) for T in enumerate_ordered_trees(tau))


def trace_cost_bound(K: int, L: int, tau: int) -> int:
    return 2 ** (K + L) * tau**tau


@dataclass(frozen=True)
class UniformityVerdict:
    uniform: bool
    tree: OrderedTreeBigraph | None = None
    trace: frozenset[Support] | None = None

    def __bool__(self) -> bool:
        return self.uniform


def is_support_uniform(P: Parade, tau: int) -> UniformityVerdict:
    """Every ordered tree with at most ``tau`` vertices has empty or full trace.

    On failure the verdict carries the first offending tree and its trace.
    """
    for T in enumerate_ordered_trees(tau):
        tr = rainbow_copies(P, T)
        if tr and tr != full_supports(P.K, P.L, T.n1, T.n2):
            return UniformityVerdict(False, T, tr)
    return UniformityVerdict(True)


def find_uniform_sub_parade(P: Parade, k: int, tau: int) -> Parade | None:
    """First (in lexicographic index order) length-(k, k) sub-parade that is
    tau-support-uniform, or None when ``P`` has none."""
    if k < 1 or k > min(P.K, P.L):
        return None
    for I in itertools.combinations(range(P.K), k):
        for J in itertools.combinations(range(P.L), k):
            Q = sub_parade(P, I, J)
            if is_support_uniform(Q, tau):
                return Q
    return None


# -- support invariance ---------------------------------------------------------


def contraction_sizes(P: Parade, kappa: Rational) -> tuple[int, int]:
    """Smallest admissible block sizes of a kappa-contraction."""
    kappa = Fraction(kappa)
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    w1, w2 = P.width
    return ceil_frac(kappa * w1), ceil_frac(kappa * w2)


@dataclass(frozen=True)
class ShrinkWitness:
    """A kappa-contraction of a parade under which a trace loses a support."""

    contraction: Parade
    tree: OrderedTreeBigraph
    lost: Support


@dataclass(frozen=True)
class InvarianceVerdict:
    status: Literal["invariant", "refuted", "unrefuted"]
    mode: Literal["exact", "sampled"]
    witness: ShrinkWitness | None = None
    evaluations: int = 0
    exhausted: bool = False

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"


class BudgetExhausted(RuntimeError):
    pass


def _fill_contraction(P: Parade, s1: int, s2: int, chosen_a: dict[int, frozenset[int]], chosen_b: dict[int, frozenset[int]]) -> Parade:
    new_a = [chosen_a.get(i, frozenset(sorted(b)[:s1])) for i, b in enumerate(P.blocks_a)]
    new_b = [chosen_b.get(j, frozenset(sorted(b)[:s2])) for j, b in enumerate(P.blocks_b)]
    return contraction(P, new_a, new_b)


def find_shrinking_contraction_exact(
    P: Parade, kappa: Rational, tau: int, budget: int | None = None
) -> tuple[ShrinkWitness | None, int]:
    """Exhaustive search for a kappa-contraction that removes some support.

    Only minimum-size contractions are tried (traces are monotone under
    contraction), and for a support only its own blocks matter, so the search
    ranges over sub-block choices for those blocks.  Returns the witness (or
    None) and the number of sub-block combinations evaluated.  Raises
    :class:`BudgetExhausted` when ``budget`` evaluations are exceeded.
    """
    s1, s2 = contraction_sizes(P, kappa)
    if (s1, s2) == P.width:
        return None, 0
    evaluations = 0
    subsets_a = [[mask_of(c) for c in itertools.combinations(sorted(b), s1)] for b in P.blocks_a]
    subsets_b = [[mask_of(c) for c in itertools.combinations(sorted(b), s2)] for b in P.blocks_b]
    for T in enumerate_ordered_trees(tau):
        order = search_order(T.tree)
        for sup in sorted(rainbow_copies(P, T)):
            pools = [subsets_a[i] for i in sup.I] + [subsets_b[j] for j in sup.J]
            for combo in itertools.product(*pools):
                evaluations += 1
                if budget is not None and evaluations > budget:
                    raise BudgetExhausted(f"exact contraction search exceeded {budget} evaluations")
                ma = list(P.masks_a)
                mb = list(P.masks_b)
                for i, m in zip(sup.I, combo):
                    ma[i] = m
                for j, m in zip(sup.J, combo[len(sup.I):]):
                    mb[j] = m
                if not has_rainbow_copy(P, T.tree, sup.I, sup.J, ma, mb, order):
                    chosen_a = {i: frozenset(iter_bits(ma[i])) for i in sup.I}
                    chosen_b = {j: frozenset(iter_bits(mb[j])) for j in sup.J}
                    Q = _fill_contraction(P, s1, s2, chosen_a, chosen_b)
                    return ShrinkWitness(Q, T, sup), evaluations
    return None, evaluations


def random_contraction(P: Parade, kappa: Rational, rng: random.Random) -> Parade:
    s1, s2 = contraction_sizes(P, kappa)
    new_a = [rng.sample(sorted(b), s1) for b in P.blocks_a]
    new_b = [rng.sample(sorted(b), s2) for b in P.blocks_b]
    return contraction(P, new_a, new_b)


def _first_shrink(P: Parade, Q: Parade, trees: Sequence[OrderedTreeBigraph], parent: dict) -> ShrinkWitness | None:
    for T in trees:
        lost = parent[T] - rainbow_copies(Q, T)
        if lost:
            return ShrinkWitness(Q, T, min(lost))
    return None


def probe_support_invariance(
    P: Parade, kappa: Rational, tau: int, trials: int = 100, seed: int = 0
) -> InvarianceVerdict:
    """Sample random minimum-size kappa-contractions; "unrefuted" is not a proof."""
    rng = random.Random(seed)
    trees = enumerate_ordered_trees(tau)
    parent = {T: rainbow_copies(P, T) for T in trees}
    for t in range(trials):
        Q = random_contraction(P, kappa, rng)
        w = _first_shrink(P, Q, trees, parent)
        if w is not None:
            return InvarianceVerdict("refuted", "sampled", w, t + 1)
    return InvarianceVerdict("unrefuted", "sampled", None, trials)


def is_support_invariant_exact(P: Parade, kappa: Rational, tau: int, budget: int | None = None) -> InvarianceVerdict:
    try:
        w, n = find_shrinking_contraction_exact(P, kappa, tau, budget)
    except BudgetExhausted:
        return InvarianceVerdict("unrefuted", "exact", None, budget or 0, exhausted=True)
    if w is None:
        return InvarianceVerdict("invariant", "exact", None, n)
    return InvarianceVerdict("refuted", "exact", w, n)


@dataclass(frozen=True)
class DescentResult:
    parade: Parade
    steps: int
    costs: tuple[int, ...]
    exact: bool
    exhausted: bool = False

    @property
    def locally_invariant_up_to_sampling(self) -> bool:
        return not self.exact


def support_invariant_contraction(
    P: Parade,
    kappa: Rational,
    tau: int,
    w_exact: int = 6,
    trials: int = 200,
    seed: int = 0,
    budget: int | None = 10**6,
) -> DescentResult:
    """Trace-cost descent to a (kappa, tau)-support-invariant contraction.

    While some kappa-contraction of the current parade has a strictly smaller
    trace-cost, adopt it.  The search is exhaustive while both block widths are
    at most ``w_exact``; otherwise random contractions are sampled and the
    result is only invariant up to sampling.
    """
    kappa = Fraction(kappa)
    rng = random.Random(seed)
    trees = enumerate_ordered_trees(tau)
    current = P
    costs = [trace_cost(P, tau)]
    exact = True
    steps = 0
    while True:
        if max(current.width) <= w_exact:
            try:
                w, _ = find_shrinking_contraction_exact(current, kappa, tau, budget)
            except BudgetExhausted:
                return DescentResult(current, steps, tuple(costs), False, exhausted=True)
        else:
            exact = False
            parent = {T: rainbow_copies(current, T) for T in trees}
            w = None
            for _ in range(trials):
                w = _first_shrink(current, random_contraction(current, kappa, rng), trees, parent)
                if w is not None:
                    break
        if w is None:
            return DescentResult(current, steps, tuple(costs), exact)
        current = w.contraction
        new_cost = trace_cost(current, tau)
        if new_cost >= costs[-1]:
            raise AssertionError("trace-cost failed to decrease along the descent")
        costs.append(new_cost)
        steps += 1


# -- concavity --------------------------------------------------------------------


@dataclass(frozen=True)
class ConcavityVerdict:
    status: Literal["holds", "refuted", "unrefuted"]
    exact: bool
    witness: VertexSet | None = None
    triple: tuple[int, int, int] | None = None

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"


def _violation(mask: int, blocks: Sequence[int], lam: Fraction) -> tuple[int, int, int] | None:
    """First (h1, h2, h3) with blocks h1, h3 lam-missed and h2 lam-covered."""
    n = len(blocks)
    if n < 3:
        return None
    covers = []
    misses = []
    for b in blocks:
        size = b.bit_count()
        c = (mask & b).bit_count()
        covers.append(c >= lam * size)
        misses.append(size - c >= lam * size)
    first_miss = next((h for h in range(n) if misses[h]), None)
    if first_miss is None:
        return None
    last_miss = max(h for h in range(n) if misses[h])
    for h2 in range(first_miss + 1, last_miss):
        if covers[h2]:
            return first_miss, h2, last_miss
    return None


def _concavity(
    G: Bigraph, y_side: int, y_blocks: Sequence[int], target_blocks: Sequence[int],
    lam: Rational, n_exact: int, trials: int, seed: int,
) -> ConcavityVerdict:
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    if len(target_blocks) < 3:
        return ConcavityVerdict("holds", True)
    pool = 0
    for b in y_blocks:
        pool |= b
    target_union = 0
    for b in target_blocks:
        target_union |= b
    ys = list(iter_bits(pool))
    if len(ys) <= n_exact:
        # closure of neighbourhood unions: every covered set a Y can produce
        reach: dict[int, int] = {0: 0}
        for y in ys:
            nb = G.nbr_mask(y_side, y) & target_union
            for m, ymask in list(reach.items()):
                m2 = m | nb
                if m2 not in reach:
                    reach[m2] = ymask | (1 << y)
        for m in sorted(reach):
            tri = _violation(m, target_blocks, lam)
            if tri is not None:
                return ConcavityVerdict("refuted", True, VertexSet.from_mask(y_side, reach[m]), tri)
        return ConcavityVerdict("holds", True)
    rng = random.Random(seed)
    candidates = [1 << y for y in ys] + list(y_blocks)
    candidates += [mask_of(y for y in ys if rng.random() < 0.5) for _ in range(trials)]
    for ymask in candidates:
        tri = _violation(union_nbr_mask(G, y_side, ymask) & target_union, target_blocks, lam)
        if tri is not None:
            return ConcavityVerdict("refuted", False, VertexSet.from_mask(y_side, ymask), tri)
    return ConcavityVerdict("unrefuted", False)


def is_top_concave(P: Parade, lam: Rational, n_exact: int = 20, trials: int = 2000, seed: int = 0) -> ConcavityVerdict:
    """No Y inside the B-blocks lam-covers A_h2 while lam-missing A_h1 and A_h3."""
    return _concavity(P.host, 2, P.masks_b, P.masks_a, lam, n_exact, trials, seed)


def is_bottom_concave(P: Parade, lam: Rational, n_exact: int = 20, trials: int = 2000, seed: int = 0) -> ConcavityVerdict:
    """No X inside the A-blocks lam-covers B_h2 while lam-missing B_h1 and B_h3."""
    return _concavity(P.host, 1, P.masks_a, P.masks_b, lam, n_exact, trials, seed)


def is_concave(P: Parade, lam: Rational, n_exact: int = 20, trials: int = 2000, seed: int = 0) -> ConcavityVerdict:
    top = is_top_concave(P, lam, n_exact, trials, seed)
    if top.refuted:
        return top
    bottom = is_bottom_concave(P, lam, n_exact, trials, seed)
    if bottom.refuted:
        return bottom
    if top.exact and bottom.exact:
        return ConcavityVerdict("holds", True)
    return ConcavityVerdict("unrefuted", False)


# -- grouping, pits and ladders -------------------------------------------------------


def grouping_parameters(t: int, kappa: Rational) -> tuple[Fraction, int]:
    """(lambda, r) used when grouping B-blocks: lambda = 2 kappa, r = ceil(t / kappa)."""
    kappa = Fraction(kappa)
    return 2 * kappa, ceil_frac(Fraction(t) / kappa)


def group_blocks(P: Parade, r: int) -> Parade:
    if r < 1 or P.L % r:
        raise ValueError(f"r={r} must be a positive divisor of L={P.L}")
    groups = tuple(
        frozenset().union(*P.blocks_b[g * r:(g + 1) * r]) for g in range(P.L // r)
    )
    return Parade(P.host, P.blocks_a, groups)


def _covered_in(G: Bigraph, xmask: int, block: int) -> int:
    return (union_nbr_mask(G, 1, xmask) & block).bit_count()


def pits(P: Parade, X: VertexSet, lam: Rational) -> list[int]:
    """Indices of the B-blocks that ``X`` (a side-1 set) lam-misses."""
    if X.side != 1:
        raise ValueError("X must be a side-1 vertex set")
    lam = Fraction(lam)
    cov = union_nbr_mask(P.host, 1, X.mask)
    out = []
    for j, b in enumerate(P.masks_b):
        size = b.bit_count()
        if size - (cov & b).bit_count() >= lam * size:
            out.append(j)
    return out


def covers_all(P: Parade, xmask: int, lam: Fraction, blocks: Sequence[int] | None = None) -> bool:
    cov = union_nbr_mask(P.host, 1, xmask)
    idx = range(P.L) if blocks is None else blocks
    return all((cov & P.masks_b[j]).bit_count() >= lam * P.masks_b[j].bit_count() for j in idx)


def minimal_cover(P: Parade, X: VertexSet, lam: Rational, blocks: Sequence[int] | None = None) -> VertexSet:
    """Greedy removal in ascending vertex order; the result still lam-covers every
    listed B-block and loses that property if any single vertex is dropped."""
    lam = Fraction(lam)
    m = X.mask
    if not covers_all(P, m, lam, blocks):
        raise ValueError("X does not lam-cover the requested blocks")
    for v in X.sorted():
        if covers_all(P, m & ~(1 << v), lam, blocks):
            m &= ~(1 << v)
    return VertexSet.from_mask(1, m)


class LadderError(ValueError):
    pass


@dataclass(frozen=True)
class Ladder:
    block_index: int
    chain: tuple[VertexSet, ...]
    lam: Fraction
    eps: Fraction


def check_ladder_rung(P: Parade, rung: int, depth: int, X: VertexSet, lam: Fraction, eps: Fraction) -> int | None:
    """Number (1-4) of the first ladder condition rung ``rung`` violates, else None."""
    G = P.host
    cov = union_nbr_mask(G, 1, X.mask)

    def covered(j: int) -> int:
        return (cov & P.masks_b[j]).bit_count()

    def size(j: int) -> int:
        return P.masks_b[j].bit_count()

    def covers(j: int) -> bool:
        return covered(j) >= lam * size(j)

    def misses(j: int) -> bool:
        return size(j) - covered(j) >= lam * size(j)

    if any(misses(j) for j in range(rung)):
        return 1
    if not (covers(rung) and misses(rung)):
        return 2
    if any(covers(j) for j in range(rung + 1, depth)):
        return 3
    if not covered(rung) < lam * size(rung) + eps * G.n2:
        return 4
    return None


def build_ladder(
    P: Parade, i: int, X: VertexSet, lam: Rational, eps: Rational, depth: int | None = None
) -> Ladder:
    """Nested minimal covering sets X^0 <= ... <= X^(depth-1) inside ``X``.

    ``X^(depth-1)`` is a minimal subset of ``X`` lam-covering B-block
    ``depth-1``; each lower rung is a minimal subset of the one above covering
    its own block.  ``depth`` defaults to half the number of B-blocks.  Raises
    :class:`LadderError` naming the failed rung and condition.
    """
    lam, eps = Fraction(lam), Fraction(eps)
    if depth is None:
        depth = P.L // 2
    if not 1 <= depth <= P.L:
        raise ValueError("depth must lie in 1..L")
    if not X.members <= P.blocks_a[i]:
        raise ValueError(f"X must be a subset of A-block {i}")
    chain: list[VertexSet] = []
    current = X
    for rung in range(depth - 1, -1, -1):
        try:
            current = minimal_cover(P, current, lam, [rung])
        except ValueError as exc:
            raise LadderError(f"rung {rung}: cannot lam-cover its block") from exc
        bad = check_ladder_rung(P, rung, depth, current, lam, eps)
        if bad is not None:
            raise LadderError(f"rung {rung}: condition {bad} fails")
        chain.append(current)
    return Ladder(i, tuple(reversed(chain)), lam, eps)


# -- multiplication -----------------------------------------------------------------

MAX_MULTIPLIED_CELLS = 4_000_000


@dataclass(frozen=True)
class Multiplication:
    graph: Bigraph
    a: int
    b: int
    maps1: tuple[tuple[int, ...], ...]
    maps2: tuple[tuple[int, ...], ...]


def multiply(G: Bigraph, a: int, b: int) -> Multiplication:
    """Replace each side-1 vertex by ``a`` twins and each side-2 vertex by ``b``."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    n1, n2 = a * G.n1, b * G.n2
    if n1 * n2 > MAX_MULTIPLIED_CELLS:
        raise OverflowError(f"multiplied bigraph {n1}x{n2} exceeds the size guard")
    maps1 = tuple(tuple(range(u * a, (u + 1) * a)) for u in range(G.n1))
    maps2 = tuple(tuple(range(v * b, (v + 1) * b)) for v in range(G.n2))
    blockmask = [mask_of(m) for m in maps2]
    rows = []
    for u in range(G.n1):
        r = 0
        for v in iter_bits(G.rows[u]):
            r |= blockmask[v]
        rows.extend([r] * a)
    return Multiplication(Bigraph(n1, n2, tuple(rows)), a, b, maps1, maps2)


def lift_parade(P: Parade, m: Multiplication) -> Parade:
    def lift(block: frozenset[int], maps: tuple[tuple[int, ...], ...]) -> frozenset[int]:
        return frozenset(x for v in block for x in maps[v])

    return Parade(
        m.graph,
        tuple(lift(b, m.maps1) for b in P.blocks_a),
        tuple(lift(b, m.maps2) for b in P.blocks_b),
    )


@dataclass(frozen=True)
class BalancedBlowup:
    graph: Bigraph
    parade: Parade
    kept1: tuple[int, ...]
    kept2: tuple[int, ...]


def balanced_blowup(P: Parade) -> BalancedBlowup:
    """Balanced host and balanced parade obtained by (W2, W1)-multiplication.

    Side sets V1, V2 containing the parade's blocks are chosen with
    |V2| / |V1| = W2 / W1 and V1 as large as possible (extra vertices taken
    in index order); the host restricted to them is then multiplied.
    """
    if P.K != P.L or P.K == 0:
        raise ValueError("balanced blow-up needs a parade of length (K, K) with K >= 1")
    G = P.host
    w1, w2 = P.width
    g = math.gcd(w1, w2)
    u1 = frozenset().union(*P.blocks_a)
    u2 = frozenset().union(*P.blocks_b)
    s = min(G.n1 // (w1 // g), G.n2 // (w2 // g))
    size1, size2 = s * (w1 // g), s * (w2 // g)
    extra1 = [v for v in range(G.n1) if v not in u1][: size1 - len(u1)]
    extra2 = [v for v in range(G.n2) if v not in u2][: size2 - len(u2)]
    V1 = VertexSet(1, u1 | set(extra1))
    V2 = VertexSet(2, u2 | set(extra2))
    sub, map1, map2 = induced_with_maps(G, V1, V2)
    pos1 = {v: k for k, v in enumerate(map1)}
    pos2 = {v: k for k, v in enumerate(map2)}
    P_sub = Parade(
        sub,
        tuple(frozenset(pos1[v] for v in b) for b in P.blocks_a),
        tuple(frozenset(pos2[v] for v in b) for b in P.blocks_b),
    )
    m = multiply(sub, w2, w1)
    return BalancedBlowup(m.graph, lift_parade(P_sub, m), map1, map2)


def transferred_coherence(eps: Rational, P: Parade) -> Fraction:
    """Coherence parameter carried to the balanced blow-up of ``P``."""
    w1, w2 = P.width
    ratio = Fraction(w1, P.host.n1) / Fraction(w2, P.host.n2)
    return 2 * Fraction(eps) * max(ratio, 1 / ratio)


# -- construction ---------------------------------------------------------------------


def build_parade(G: Bigraph, K: int, policy: str = "contiguous", seed: int = 0) -> Parade:
    """K disjoint blocks per side, each of size ceil(n_i / (2K)).

    ``policy`` is ``"contiguous"`` (blocks of consecutive indices) or
    ``"random"`` (a seeded shuffle first).
    """
    if K < 1:
        raise ValueError("K must be positive")
    if G.n1 < 2 * K or G.n2 < 2 * K:
        raise ValueError(f"need at least {2 * K} vertices on each side, got {G.n1}x{G.n2}")
    w1 = -(-G.n1 // (2 * K))
    w2 = -(-G.n2 // (2 * K))
    order1, order2 = list(range(G.n1)), list(range(G.n2))
    if policy == "random":
        rng = random.Random(seed)
        rng.shuffle(order1)
        rng.shuffle(order2)
    elif policy != "contiguous":
        raise ValueError(f"unknown policy {policy!r}")
    blocks_a = [order1[k * w1:(k + 1) * w1] for k in range(K)]
    blocks_b = [order2[k * w2:(k + 1) * w2] for k in range(K)]
    return Parade.from_lists(G, blocks_a, blocks_b)


def verdict_json(v: object) -> dict:
    """JSON-ready view of a verdict/outcome dataclass (rationals as ``p/q``)."""
    from dataclasses import asdict

    def conv(x):
        if isinstance(x, Fraction):
            return format_rational(x)
        if isinstance(x, (frozenset, set)):
            return sorted(conv(y) for y in x)
        if isinstance(x, dict):
            return {str(k): conv(y) for k, y in x.items()}
        if isinstance(x, (list, tuple)):
            return [conv(y) for y in x]
        return x

    return conv(asdict(v))  # type: ignore[arg-type]
