"""Reductions to sparse pairs and the pure-pair pipelines built on them.

``getsparse_extract`` turns an H-free bigraph into a pair (A1, A2) that is
either sparse (low degrees both ways) or dense (high degrees both ways).
``density_refine`` turns a bigraph that is not too dense into a pair with no
large dense sub-pair.  The two pipelines chain these with an exact pure-pair
search.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .bigraph import (
    Bigraph,
    Rational,
    VertexSet,
    bicomplement,
    ceil_frac,
    induced_with_maps,
    iter_bits,
    mask_of,
)
from .coherence import (
    best_anticomplete_pair,
    best_complete_pair,
    extend_anticomplete,
    extend_complete,
)
from .containment import Embedding, bicontains, is_forest


class PreconditionError(ValueError):
    """An input violates the hypotheses an algorithm relies on."""


# -- sparse-or-dense extraction --------------------------------------------------


def getsparse_delta(H: Bigraph, eps: Rational) -> Fraction:
    eps = Fraction(eps)
    k, l = H.n1, H.n2
    base = min(Fraction(1, 2), Fraction(1, k + l))
    if k == 0 or l == 0:
        return base
    return min(base, (eps / 2) ** k / l)


@dataclass(frozen=True)
class SparsePairOutcome:
    a1: VertexSet
    a2: VertexSet
    mode: Literal["sparse", "dense"]
    delta: Fraction
    achieved: Fraction
    branch: str
    sequence: tuple[int, ...] = ()
    j: int | None = None


@dataclass(frozen=True)
class FoundCopy:
    embedding: Embedding


def sparse_outcome_ok(G: Bigraph, out: SparsePairOutcome, eps: Rational) -> bool:
    """Re-check the size bound and the strict degree conditions of an outcome."""
    eps = Fraction(eps)
    a1, a2 = out.a1.mask, out.a2.mask
    s1, s2 = a1.bit_count(), a2.bit_count()
    if s1 < out.delta * G.n1 or s2 < out.delta * G.n2:
        return False
    d1 = [(G.rows[u] & a2).bit_count() for u in iter_bits(a1)]
    d2 = [(G.cols[v] & a1).bit_count() for v in iter_bits(a2)]
    if out.mode == "sparse":
        return all(d < eps * s2 for d in d1) and all(d < eps * s1 for d in d2)
    return all(d > (1 - eps) * s2 for d in d1) and all(d > (1 - eps) * s1 for d in d2)


def _one_vertex_pair(G: Bigraph, delta: Fraction, side: int) -> SparsePairOutcome:
    """One vertex on ``side`` and the larger of its neighbourhood and non-neighbourhood."""
    other = 3 - side
    full = G.full_mask(other)
    nbr = G.nbr_mask(side, 0)
    non = full & ~nbr
    if non.bit_count() >= nbr.bit_count():
        mode, big = "sparse", non
    else:
        mode, big = "dense", nbr
    single = VertexSet(side, frozenset({0}))
    rest = VertexSet.from_mask(other, big)
    a1, a2 = (single, rest) if side == 1 else (rest, single)
    achieved = min(Fraction(len(a1), G.n1), Fraction(len(a2), G.n2))
    return SparsePairOutcome(a1, a2, mode, delta, achieved, f"shortcut-{side}")


def getsparse_extract(
    G: Bigraph, H: Bigraph, eps: Rational, budget: int = 10**5
) -> SparsePairOutcome | FoundCopy:
    """Sparse or dense pair in ``G``, or a copy of ``H`` found along the way.

    When a side of ``G`` has fewer than 1/delta vertices a single vertex with
    the larger of its neighbourhood and non-neighbourhood is returned.
    Otherwise good sequences of side-1 vertices are extended depth first; at
    a sequence no vertex extends, the vertices failing for a common pattern
    vertex ``b_j`` (smallest such j) form A1 and the half-degree filter of the
    j-appropriate set forms A2.  Reaching length |V1(H)| yields a copy of H.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if H.n1 + H.n2 == 0:
        raise ValueError("H must have at least one vertex")
    if G.n1 == 0 or G.n2 == 0:
        raise ValueError("G must have vertices on both sides")
    delta = getsparse_delta(H, eps)
    k, l = H.n1, H.n2
    if k == 0 or l == 0:
        emb = bicontains(G, H)
        if emb is not None:
            return FoundCopy(emb)
    if G.n1 < 1 / delta:
        return _one_vertex_pair(G, delta, 1)
    if G.n2 < 1 / delta:
        return _one_vertex_pair(G, delta, 2)

    n1, n2 = G.n1, G.n2
    full2 = G.full_mask(2)
    thresholds = [(eps / 2) ** i * n2 for i in range(k + 1)]
    hcols = H.cols

    def appropriate(seq: tuple[int, ...]) -> list[int]:
        out = []
        for j in range(l):
            m = full2
            for h, u in enumerate(seq):
                m &= G.rows[u] if hcols[j] >> h & 1 else full2 & ~G.rows[u]
            out.append(m)
        return out

    budget = max(budget, k + 2)
    nodes = 0
    deepest: tuple[int, ...] | None = None

    def extensions(seq: tuple[int, ...]) -> list[int]:
        used = set(seq)
        i = len(seq)
        need = thresholds[i + 1]
        out = []
        for u in range(n1):
            if u in used:
                continue
            if all(m.bit_count() >= need for m in appropriate(seq + (u,))):
                out.append(u)
        return out

    def dfs(seq: tuple[int, ...]) -> tuple[int, ...] | None:
        """Returns a k-good sequence if one is met; records the deepest dead end."""
        nonlocal nodes, deepest
        nodes += 1
        if len(seq) == k:
            return seq
        ext = extensions(seq)
        if not ext:
            if deepest is None or len(seq) > len(deepest):
                deepest = seq
            return None
        for u in ext:
            if nodes >= budget:
                return None
            got = dfs(seq + (u,))
            if got is not None:
                return got
        return None

    full_seq = dfs(())
    if full_seq is not None:
        apps = appropriate(full_seq)
        chosen: list[int] = []
        for m in apps:
            v = next(x for x in iter_bits(m) if x not in chosen)
            chosen.append(v)
        emb = Embedding(H, tuple(full_seq), tuple(chosen))
        if not emb.verify(G):
            raise AssertionError("k-good sequence did not yield an induced copy")
        return FoundCopy(emb)
    assert deepest is not None
    seq = deepest
    i = len(seq)
    need = thresholds[i + 1]
    groups: list[list[int]] = [[] for _ in range(l)]
    for u in range(n1):
        if u in seq:
            continue
        for j, m in enumerate(appropriate(seq + (u,))):
            if m.bit_count() < need:
                groups[j].append(u)
    target = Fraction(n1 - i, l)
    j = next(j for j in range(l) if len(groups[j]) >= target)
    a1 = mask_of(groups[j])
    a2_prime = appropriate(seq)[j]
    adjacent = bool(hcols[j] >> i & 1)
    work = G if adjacent else bicomplement(G)
    s1 = a1.bit_count()
    a2 = mask_of(v for v in iter_bits(a2_prime) if (work.cols[v] & a1).bit_count() < eps * s1)
    A1, A2 = VertexSet.from_mask(1, a1), VertexSet.from_mask(2, a2)
    achieved = min(Fraction(len(A1), n1), Fraction(len(A2), n2))
    return SparsePairOutcome(A1, A2, "sparse" if adjacent else "dense", delta, achieved, "main", seq, j)


# -- density refinement -----------------------------------------------------------


@dataclass(frozen=True)
class DensityParams:
    c: Fraction
    eps: Fraction
    tau: Fraction
    lam: Fraction
    n: int
    delta: Fraction


def density_params(c: Rational, eps: Rational, tau: Rational) -> DensityParams:
    c, eps, tau = Fraction(c), Fraction(eps), Fraction(tau)
    if not (0 < eps < tau <= Fraction(8, 9)):
        raise PreconditionError("need 0 < eps < tau <= 8/9")
    if c <= 0:
        raise PreconditionError("c must be positive")
    c = min(c, Fraction(1, 3))
    lam = 1 - (tau - eps) * c**2 / ((1 - c**2) * (1 - tau))
    target = (1 - eps) * c / 2
    # least n with lam^n (1 - tau) <= target: float estimate, then exact correction
    n = max(0, math.ceil(math.log(target / (1 - tau)) / math.log(lam)))
    while n > 0 and lam ** (n - 1) * (1 - tau) <= target:
        n -= 1
    while lam**n * (1 - tau) > target:
        n += 1
    return DensityParams(c, eps, tau, lam, n, min(c**n, tau))


@dataclass(frozen=True)
class DescentStep:
    t: int
    piece: str
    sizes: tuple[int, int]
    edges: int


@dataclass(frozen=True)
class ReductionOutcome:
    z1: VertexSet
    z2: VertexSet
    t: int
    params: DensityParams
    branch: str
    exact: bool
    steps: tuple[DescentStep, ...] = ()
    verified: bool | None = None


def _edges(G: Bigraph, m1: int, m2: int) -> int:
    return sum((G.rows[u] & m2).bit_count() for u in iter_bits(m1))


def _best_side2(G: Bigraph, y1: int, z2: list[int], s2: int) -> tuple[int, int]:
    """Side-2 set of size ``s2`` inside ``z2`` with the most edges to ``y1``."""
    cols = G.cols
    ranked = sorted(z2, key=lambda v: (-(cols[v] & y1).bit_count(), v))[:s2]
    return mask_of(ranked), sum((cols[v] & y1).bit_count() for v in ranked)


def find_dense_pair(
    G: Bigraph, z1: int, z2: int, c: Fraction, eps: Fraction,
    limit: int = 10**6, trials: int = 200, rng: random.Random | None = None,
) -> tuple[tuple[int, int] | None, bool]:
    """Yi inside Zi of sizes ceil(c|Zi|) with at least (1-eps)|Y1||Y2| edges.

    Side-1 choices are enumerated exhaustively when there are at most
    ``limit`` of them (the best side-2 partner of a fixed Y1 is its top-degree
    vertices); otherwise a swap local search runs and the answer is flagged
    inexact.  Returns (pair or None, exact).
    """
    l1, l2 = list(iter_bits(z1)), list(iter_bits(z2))
    s1, s2 = ceil_frac(c * len(l1)), ceil_frac(c * len(l2))
    need = (1 - eps) * s1 * s2
    if math.comb(len(l1), s1) <= limit:
        for combo in itertools.combinations(l1, s1):
            y1 = mask_of(combo)
            y2, e = _best_side2(G, y1, l2, s2)
            if e >= need:
                return (y1, y2), True
        return None, True
    rng = rng or random.Random(0)
    for _ in range(trials):
        y1_list = rng.sample(l1, s1)
        y1 = mask_of(y1_list)
        y2, e = _best_side2(G, y1, l2, s2)
        improved = True
        while improved and e < need:
            improved = False
            for out_v in list(y1_list):
                for in_v in l1:
                    if y1 >> in_v & 1:
                        continue
                    cand = (y1 & ~(1 << out_v)) | (1 << in_v)
                    c2, ce = _best_side2(G, cand, l2, s2)
                    if ce > e:
                        y1, y2, e = cand, c2, ce
                        y1_list = list(iter_bits(y1))
                        improved = True
                        break
                if improved:
                    break
        if e >= need:
            return (y1, y2), False
    return None, False


def has_dense_subpair(G: Bigraph, z1: int, z2: int, c: Fraction, eps: Fraction) -> bool:
    """Exhaustive: some Yi inside Zi with |Yi| >= c|Zi| and >= (1-eps)|Y1||Y2| edges."""
    l1, l2 = list(iter_bits(z1)), list(iter_bits(z2))
    subs2 = [
        mask_of(s) for r in range(len(l2) + 1) if r >= c * len(l2) for s in itertools.combinations(l2, r)
    ]
    for r1 in range(len(l1) + 1):
        if r1 < c * len(l1):
            continue
        for s in itertools.combinations(l1, r1):
            y1 = mask_of(s)
            for y2 in subs2:
                if _edges(G, y1, y2) >= (1 - eps) * r1 * y2.bit_count():
                    return True
    return False


def _small_side_pair(G: Bigraph, p: DensityParams, branch: str) -> ReductionOutcome:
    """A least-degree vertex on the smaller side and its non-neighbourhood."""
    side = 2 if G.n1 * p.delta > 1 and G.n2 * p.delta <= 1 else 1
    if side == 1:
        u = min(range(G.n1), key=lambda x: (G.rows[x].bit_count(), x))
        z1, z2 = 1 << u, G.full_mask(2) & ~G.rows[u]
    else:
        v = min(range(G.n2), key=lambda x: (G.cols[x].bit_count(), x))
        z1, z2 = G.full_mask(1) & ~G.cols[v], 1 << v
    return ReductionOutcome(VertexSet.from_mask(1, z1), VertexSet.from_mask(2, z2), 0, p, branch, True)


def density_refine(
    G: Bigraph,
    c: Rational,
    eps: Rational,
    tau: Rational,
    shortcut: bool = False,
    limit: int = 10**6,
    trials: int = 200,
    seed: int = 0,
    verify_up_to: int = 12,
) -> ReductionOutcome:
    """Pair (Z1, Z2) inside which no sub-pair of relative size c is (1-eps)-dense.

    With ``shortcut`` a side with at most 1/delta vertices is handled at once
    by one least-degree vertex and its non-neighbourhood.  Otherwise a
    descent shrinks (Z1, Z2) while a dense sub-pair exists, adopting the first
    of the three complementary pieces whose density is small enough; at depth
    n a half-degree filter finishes.  The outcome is verified exhaustively
    when both sides have at most ``verify_up_to`` vertices.
    """
    if G.n1 == 0 or G.n2 == 0:
        raise PreconditionError("G must have vertices on both sides")
    p = density_params(c, eps, tau)
    if G.edge_count > (1 - p.tau) * G.n1 * G.n2:
        raise PreconditionError("G has more than (1 - tau) n1 n2 edges")
    if shortcut and (G.n1 <= 1 / p.delta or G.n2 <= 1 / p.delta):
        out = _small_side_pair(G, p, "shortcut")
        return _verified(G, out, verify_up_to)

    rng = random.Random(seed)
    z1, z2 = G.full_mask(1), G.full_mask(2)
    t = 0
    exact = True
    steps: list[DescentStep] = []
    while t < p.n:
        pair, ex = find_dense_pair(G, z1, z2, p.c, p.eps, limit, trials, rng)
        exact = exact and ex
        if pair is None:
            out = ReductionOutcome(
                VertexSet.from_mask(1, z1), VertexSet.from_mask(2, z2), t, p, "descent", exact, tuple(steps)
            )
            return _verified(G, out, verify_up_to)
        y1, y2 = pair
        x1, x2 = z1 & ~y1, z2 & ~y2
        bound = p.lam ** (t + 1) * (1 - p.tau)
        min1, min2 = p.c ** (t + 1) * G.n1, p.c ** (t + 1) * G.n2
        adopted = None
        for name, m1, m2 in (("Y1X2", y1, x2), ("X1Y2", x1, y2), ("X1X2", x1, x2)):
            s1, s2 = m1.bit_count(), m2.bit_count()
            if s1 == 0 or s2 == 0 or s1 < min1 or s2 < min2:
                continue
            e = _edges(G, m1, m2)
            if e <= bound * s1 * s2:
                adopted = (name, m1, m2, e)
                break
        if adopted is None:
            # the counting step needs |Zi| large; at tiny sizes fall back
            out = _small_side_pair(G, p, "fallback")
            return _verified(G, out, verify_up_to, steps=tuple(steps), exact=exact)
        name, z1, z2, e = adopted
        t += 1
        steps.append(DescentStep(t, name, (z1.bit_count(), z2.bit_count()), e))
    # depth n: keep the side-1 vertices of strictly small degree
    s2 = z2.bit_count()
    keep = mask_of(u for u in iter_bits(z1) if (G.rows[u] & z2).bit_count() < (1 - p.eps) * p.c * s2)
    out = ReductionOutcome(
        VertexSet.from_mask(1, keep), VertexSet.from_mask(2, z2), t, p, "half-filter", exact, tuple(steps)
    )
    return _verified(G, out, verify_up_to)


def _verified(
    G: Bigraph, out: ReductionOutcome, limit: int,
    steps: tuple[DescentStep, ...] | None = None, exact: bool | None = None,
) -> ReductionOutcome:
    verified = None
    if len(out.z1) <= limit and len(out.z2) <= limit:
        verified = not has_dense_subpair(G, out.z1.mask, out.z2.mask, out.params.c, out.params.eps)
    return ReductionOutcome(
        out.z1, out.z2, out.t, out.params, out.branch,
        out.exact if exact is None else exact,
        out.steps if steps is None else steps,
        verified,
    )


# -- pipelines ----------------------------------------------------------------------


@dataclass(frozen=True)
class PurePair:
    z1: VertexSet
    z2: VertexSet
    kind: Literal["complete", "anticomplete"]
    fraction: Fraction
    exact: bool
    details: dict = field(default_factory=dict, compare=False)


def _pair_in(G: Bigraph, a1: VertexSet, a2: VertexSet, kind: str, budget: int) -> tuple[VertexSet, VertexSet, bool]:
    sub, map1, map2 = induced_with_maps(G, a1, a2)
    best = best_anticomplete_pair(sub, budget) if kind == "anticomplete" else best_complete_pair(sub, budget)
    z1 = VertexSet(1, frozenset(map1[i] for i in best.z1))
    z2 = VertexSet(2, frozenset(map2[j] for j in best.z2))
    return z1, z2, best.exact


def _finish(G: Bigraph, z1: VertexSet, z2: VertexSet, kind: str, exact: bool, details: dict) -> PurePair:
    z1, z2 = extend_anticomplete(G, z1, z2) if kind == "anticomplete" else extend_complete(G, z1, z2)
    frac = min(Fraction(len(z1), G.n1), Fraction(len(z2), G.n2))
    return PurePair(z1, z2, kind, frac, exact, details)  # type: ignore[arg-type]


def forestsymm_pipeline(
    G: Bigraph, H: Bigraph, eps: Rational = Fraction(1, 4), budget: int = 10**6
) -> PurePair:
    """Pure pair in a bigraph that contains neither the forest H nor its bicomplement."""
    if not is_forest(H):
        raise PreconditionError("H must be a forest bigraph")
    if G.n1 == 0 or G.n2 == 0:
        raise PreconditionError("G must have vertices on both sides")
    J = bicomplement(H)
    if bicontains(G, H) is not None:
        raise PreconditionError("G contains H")
    if bicontains(G, J) is not None:
        raise PreconditionError("G contains the bicomplement of H")
    out = getsparse_extract(G, H, eps)
    if isinstance(out, FoundCopy):
        raise AssertionError("extraction found H in an H-free bigraph")
    kind = "anticomplete" if out.mode == "sparse" else "complete"
    z1, z2, exact = _pair_in(G, out.a1, out.a2, kind, budget)
    details = {"branch": out.branch, "mode": out.mode, "delta": out.delta, "a_sizes": (len(out.a1), len(out.a2))}
    return _finish(G, z1, z2, kind, exact, details)


def betterthm_pipeline(
    G: Bigraph,
    H: Bigraph,
    tau: Rational,
    eta: Rational | None = None,
    shortcut: bool = False,
    budget: int = 10**6,
) -> PurePair:
    """Anticomplete pair in an H-free bigraph with at most (1 - tau) n1 n2 edges."""
    tau = Fraction(tau)
    if not is_forest(H):
        raise PreconditionError("H must be a forest bigraph")
    if G.n1 == 0 or G.n2 == 0:
        raise PreconditionError("G must have vertices on both sides")
    if bicontains(G, H) is not None:
        raise PreconditionError("G contains H")
    tau = min(tau, Fraction(8, 9))
    eta = Fraction(eta) if eta is not None else tau / 2
    if not 0 < eta < tau:
        raise PreconditionError("need 0 < eta < tau")
    c = getsparse_delta(H, eta)
    red = density_refine(G, c, eta, tau, shortcut=shortcut)
    sub, map1, map2 = induced_with_maps(G, red.z1, red.z2)
    out = getsparse_extract(sub, H, eta)
    if isinstance(out, FoundCopy):
        raise AssertionError("extraction found H in an H-free bigraph")
    if out.mode == "dense":
        raise AssertionError("dense branch after density refinement")
    y1 = VertexSet(1, frozenset(map1[i] for i in out.a1))
    y2 = VertexSet(2, frozenset(map2[j] for j in out.a2))
    z1, z2, exact = _pair_in(G, y1, y2, "anticomplete", budget)
    details = {
        "reduction_branch": red.branch,
        "t": red.t,
        "c": c,
        "eta": eta,
        "z_sizes": (len(red.z1), len(red.z2)),
        "y_sizes": (len(y1), len(y2)),
    }
    return _finish(G, z1, z2, "anticomplete", exact and red.exact, details)
