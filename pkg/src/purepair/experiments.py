"""Experiment runners: invariant suites and the epsilon survey.

Each suite returns a :class:`SuiteReport`; a run is determined by its seed,
with instance ``i`` drawing from the stream ``(seed, i)``.
"""

from __future__ import annotations

import itertools
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import generators as gen
from .bigraph import Bigraph, bicomplement, dumps, iter_bits, transpose
from .coherence import coherence_threshold, find_anticomplete_pair
from .containment import bicontains, enumerate_ordered_trees, rainbow_copies
from .parade import (
    LadderError,
    Parade,
    build_ladder,
    find_shrinking_contraction_exact,
    is_concave,
    lift_parade,
    multiply,
    pits,
    random_contraction,
    support_invariant_contraction,
    trace_cost_bound,
)
from .reduction import (
    FoundCopy,
    betterthm_pipeline,
    density_refine,
    getsparse_extract,
    has_dense_subpair,
    sparse_outcome_ok,
)


@dataclass
class SuiteReport:
    suite: str
    passed: int = 0
    failed: int = 0
    counterexample: str | None = None
    notes: dict = field(default_factory=dict)

    def record(self, ok: bool, describe: Callable[[], str]) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = describe()

    @property
    def ok(self) -> bool:
        return self.failed == 0


# -- independent brute-force oracles -----------------------------------------------


def brute_force_contains(G: Bigraph, H: Bigraph) -> bool:
    """Try every side-preserving injection; no pruning."""
    for m1 in itertools.permutations(range(G.n1), H.n1):
        for m2 in itertools.permutations(range(G.n2), H.n2):
            if all(
                bool(H.rows[i] >> j & 1) == bool(G.rows[u] >> v & 1)
                for i, u in enumerate(m1)
                for j, v in enumerate(m2)
            ):
                return True
    return False


def brute_force_anticomplete(G: Bigraph, s1: int, s2: int) -> bool:
    for z1 in itertools.combinations(range(G.n1), s1):
        for z2 in itertools.combinations(range(G.n2), s2):
            if all(not G.rows[u] >> v & 1 for u in z1 for v in z2):
                return True
    return False


# -- random parades -------------------------------------------------------------------


def random_parade(rng, max_len: int = 3, max_width: int = 3, max_n: int = 9, p: float = 0.5) -> Parade:
    """Random host and parade: lengths and widths uniform in their ranges, blocks
    drawn from a random permutation of each side."""
    K = int(rng.integers(1, max_len + 1))
    L = int(rng.integers(1, max_len + 1))
    w1 = int(rng.integers(1, min(max_width, max_n // K) + 1))
    w2 = int(rng.integers(1, min(max_width, max_n // L) + 1))
    n1 = int(rng.integers(K * w1, max_n + 1))
    n2 = int(rng.integers(L * w2, max_n + 1))
    G = gen.random_bigraph(n1, n2, float(rng.uniform(0.15, 0.85)) if p is None else p, rng)
    o1, o2 = rng.permutation(n1), rng.permutation(n2)
    A = [o1[k * w1:(k + 1) * w1].tolist() for k in range(K)]
    B = [o2[k * w2:(k + 1) * w2].tolist() for k in range(L)]
    return Parade.from_lists(G, A, B)


def _describe_parade(P: Parade) -> str:
    return dumps(P.host) + P.dumps("host")


# -- suites ------------------------------------------------------------------------------


def suite_involutions(seed: int, trials: int) -> SuiteReport:
    rep = SuiteReport("involutions")
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        n1, n2 = int(rng.integers(0, 9)), int(rng.integers(0, 9))
        G = gen.random_bigraph(n1, n2, float(rng.random()), rng)
        ok = (
            bicomplement(bicomplement(G)) == G
            and transpose(transpose(G)) == G
            and G.edge_count + bicomplement(G).edge_count == n1 * n2
            and transpose(G).edge_count == G.edge_count
        )
        rep.record(ok, lambda: dumps(G))
    return rep


def suite_containment_oracle(seed: int, trials: int) -> SuiteReport:
    rep = SuiteReport("containment-oracle")
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        prng = gen.py_rng(seed, i)
        G = gen.random_bigraph(int(rng.integers(1, 5)), int(rng.integers(1, 5)), float(rng.random()), rng)
        H = gen.random_forest(int(rng.integers(1, 6)), prng, keep=float(rng.uniform(0.5, 1)))
        emb = bicontains(G, H)
        ok = (emb is not None) == brute_force_contains(G, H) and (emb is None or emb.verify(G))
        rep.record(ok, lambda: dumps(G) + dumps(H))
    return rep


def suite_getsparse(seed: int, trials: int, eps: Fraction = Fraction(1, 4)) -> SuiteReport:
    rep = SuiteReport("getsparse")
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        H = gen.pattern("p3" if i % 2 else "p3t")
        n1, n2 = int(rng.integers(1, 61)), int(rng.integers(1, 61))
        G = gen.random_h_free(n1, n2, H, rng, p=float(rng.uniform(0.2, 1)))
        out = getsparse_extract(G, H, eps)
        ok = not isinstance(out, FoundCopy) and sparse_outcome_ok(G, out, eps)
        rep.record(ok, lambda: dumps(G))
    return rep


def suite_density(seed: int, trials: int, n: int = 4) -> SuiteReport:
    """Exhaustive over n x n bigraphs below the edge bound (``trials`` unused)."""
    rep = SuiteReport("density")
    c, eps, tau = Fraction(1, 3), Fraction(1, 4), Fraction(1, 2)
    for G in gen.exhaustive(n, n):
        if G.edge_count > (1 - tau) * n * n:
            continue
        out = density_refine(G, c, eps, tau)
        ok = out.t <= out.params.n and not has_dense_subpair(G, out.z1.mask, out.z2.mask, c, eps)
        rep.record(ok, lambda: dumps(G))
    return rep


def suite_trace_monotone(seed: int, trials: int, tau: int = 3) -> SuiteReport:
    rep = SuiteReport("trace-monotone")
    trees = enumerate_ordered_trees(tau)
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        prng = gen.py_rng(seed, i)
        P = random_parade(rng)
        kappa = Fraction(int(rng.integers(1, 4)), 4)
        Q = random_contraction(P, kappa, prng)
        ok = all(rainbow_copies(Q, T) <= rainbow_copies(P, T) for T in trees)
        rep.record(ok, lambda: _describe_parade(P))
    return rep


def suite_multiplication_trace(seed: int, trials: int, tau: int = 3) -> SuiteReport:
    rep = SuiteReport("multiplication-trace")
    trees = enumerate_ordered_trees(tau)
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        P = random_parade(rng)
        a, b = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        Q = lift_parade(P, multiply(P.host, a, b))
        ok = all(rainbow_copies(Q, T) == rainbow_copies(P, T) for T in trees)
        rep.record(ok, lambda: _describe_parade(P))
    return rep


def suite_descent(seed: int, trials: int, kappa: Fraction = Fraction(1, 2)) -> SuiteReport:
    rep = SuiteReport("descent")
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        P = random_parade(rng, max_len=2, max_width=4, max_n=9)
        tau = int(rng.integers(1, 3))
        out = support_invariant_contraction(P, kappa, tau, w_exact=4)
        witness, _ = find_shrinking_contraction_exact(out.parade, kappa, tau)
        ok = out.exact and out.steps <= trace_cost_bound(P.K, P.L, tau) and witness is None
        rep.record(ok, lambda: _describe_parade(P))
    return rep


def suite_concavity(seed: int, trials: int) -> SuiteReport:
    """Exact concavity verdicts agree with a plain scan over all Y."""
    rep = SuiteReport("concavity")
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        P = random_parade(rng, max_len=3, max_width=2, max_n=6, p=None)
        lam = Fraction(int(rng.integers(1, 5)), 4)
        verdict = is_concave(P, lam)
        ok = verdict.exact and (verdict.status == "refuted") == _concavity_scan(P, lam)
        rep.record(ok, lambda: _describe_parade(P))
    return rep


def _concavity_scan(P: Parade, lam: Fraction) -> bool:
    """True when some Y violates top or bottom concavity (plain enumeration)."""
    G = P.host

    def violated(pool: list[int], side: int, targets: tuple[frozenset[int], ...]) -> bool:
        for r in range(len(pool) + 1):
            for Y in itertools.combinations(pool, r):
                hit = set()
                for y in Y:
                    hit |= set(iter_bits(G.nbr_mask(side, y)))
                cov = [len(hit & t) >= lam * len(t) for t in targets]
                mis = [len(t - hit) >= lam * len(t) for t in targets]
                for h1, h2, h3 in itertools.combinations(range(len(targets)), 3):
                    if mis[h1] and cov[h2] and mis[h3]:
                        return True
        return False

    pool_b = sorted(set().union(*P.blocks_b))
    pool_a = sorted(set().union(*P.blocks_a))
    return violated(pool_b, 2, P.blocks_a) or violated(pool_a, 1, P.blocks_b)


def suite_ladder(seed: int, trials: int) -> SuiteReport:
    rep = SuiteReport("ladder")
    for i in range(trials):
        inst = gen.concave_pit_instance(gen.py_rng(seed, i))
        C, X = inst.grouped, inst.cover
        pit_list = pits(C, X, inst.lam)
        ok = gen.pit_shape_ok(pit_list)
        if ok and C.L == 4:
            if pit_list[-1] <= 1:
                C = Parade(C.host, C.blocks_a, tuple(reversed(C.blocks_b)))
            eps = Fraction(6, C.host.n2)
            try:
                build_ladder(C, inst.block, X, inst.lam, eps)
            except LadderError:
                ok = False
        rep.record(ok, lambda: _describe_parade(C))
    return rep


def suite_coherence_oracle(seed: int, trials: int) -> SuiteReport:
    rep = SuiteReport("coherence-oracle")
    for i in range(trials):
        rng = gen.instance_rng(seed, i)
        G = gen.random_bigraph(int(rng.integers(1, 7)), int(rng.integers(1, 7)), float(rng.random()), rng)
        s1, s2 = int(rng.integers(0, G.n1 + 1)), int(rng.integers(0, G.n2 + 1))
        res = find_anticomplete_pair(G, s1, s2, budget=None)
        ok = res.exact and (res.pair is not None) == brute_force_anticomplete(G, s1, s2)
        rep.record(ok, lambda: dumps(G))
    return rep


SUITES: dict[str, Callable[[int, int], SuiteReport]] = {
    "involutions": suite_involutions,
    "containment-oracle": suite_containment_oracle,
    "getsparse": suite_getsparse,
    "density": suite_density,
    "trace-monotone": suite_trace_monotone,
    "multiplication-trace": suite_multiplication_trace,
    "descent": suite_descent,
    "concavity": suite_concavity,
    "ladder": suite_ladder,
    "coherence-oracle": suite_coherence_oracle,
}


def run_suite(name: str, seed: int, trials: int) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(seed, trials)


# -- epsilon survey -------------------------------------------------------------------------


@dataclass(frozen=True)
class SurveyRow:
    n1: int
    n2: int
    h_id: str
    metric: str
    count: int
    minimum: Fraction | None
    median: Fraction | None


def _graphs(n1: int, n2: int, mode: str, trials: int, seed: int):
    if mode == "exhaustive":
        yield from gen.exhaustive(n1, n2)
    elif mode == "sampled":
        for i in range(trials):
            rng = gen.instance_rng(seed, i)
            yield gen.random_bigraph(n1, n2, float(rng.random()), rng)
    else:
        raise ValueError(f"unknown mode {mode!r}")


def survey_epsilon(
    h_id: str, n1: int, n2: int, mode: str = "exhaustive", trials: int = 10_000, seed: int = 0
) -> list[SurveyRow]:
    """Coherence thresholds and best anticomplete-pair fractions over H-free bigraphs.

    ``threshold`` is the value above which the bigraph is eps-coherent;
    ``pure-pair`` is the best min(|Z1|/n1, |Z2|/n2) over anticomplete pairs.
    """
    from .coherence import best_anticomplete_pair

    H = gen.pattern(h_id)
    thresholds: list[Fraction] = []
    pairs: list[Fraction] = []
    for G in _graphs(n1, n2, mode, trials, seed):
        if bicontains(G, H) is not None:
            continue
        thresholds.append(coherence_threshold(G).value)
        pairs.append(best_anticomplete_pair(G).value)

    def row(metric: str, vals: list[Fraction]) -> SurveyRow:
        if not vals:
            return SurveyRow(n1, n2, h_id, metric, 0, None, None)
        return SurveyRow(n1, n2, h_id, metric, len(vals), min(vals), statistics.median_low(vals))

    return [row("threshold", thresholds), row("pure-pair", pairs)]


def desk_betterthm(n: int = 4, tau: Fraction = Fraction(1, 2), h_id: str = "p3") -> tuple[int, Fraction | None]:
    """Run the anticomplete-pair pipeline over every qualifying n x n bigraph.

    Returns the number of qualifying graphs and the least achieved fraction.
    """
    H = gen.pattern(h_id)
    count = 0
    least: Fraction | None = None
    for G in gen.exhaustive(n, n):
        if G.edge_count > (1 - tau) * n * n or bicontains(G, H) is not None:
            continue
        out = betterthm_pipeline(G, H, tau)
        count += 1
        least = out.fraction if least is None else min(least, out.fraction)
    return count, least
