"""Shared brute-force oracles and hypothesis strategies.

The oracles here deliberately avoid the library's search code: they
enumerate injections or vertex choices directly.
"""

from __future__ import annotations

import itertools

from hypothesis import strategies as st

from purepair.bigraph import Bigraph
from purepair.parade import Parade


def adj(G: Bigraph, u: int, v: int) -> bool:
    return bool(G.rows[u] >> v & 1)


def brute_contains(G: Bigraph, H: Bigraph) -> bool:
    for m1 in itertools.permutations(range(G.n1), H.n1):
        for m2 in itertools.permutations(range(G.n2), H.n2):
            if all(adj(H, i, j) == adj(G, u, v) for i, u in enumerate(m1) for j, v in enumerate(m2)):
                return True
    return False


def brute_trace(P: Parade, T: Bigraph) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Supports found by trying every vertex choice, one per chosen block."""
    out = set()
    for I in itertools.combinations(range(P.K), T.n1):
        for J in itertools.combinations(range(P.L), T.n2):
            pools = [sorted(P.blocks_a[i]) for i in I] + [sorted(P.blocks_b[j]) for j in J]
            for pick in itertools.product(*pools):
                m1, m2 = pick[: T.n1], pick[T.n1:]
                if all(adj(T, i, j) == adj(P.host, u, v) for i, u in enumerate(m1) for j, v in enumerate(m2)):
                    out.add((I, J))
                    break
    return out


def brute_anticomplete(G: Bigraph, s1: int, s2: int) -> bool:
    for z1 in itertools.combinations(range(G.n1), s1):
        for z2 in itertools.combinations(range(G.n2), s2):
            if not any(adj(G, u, v) for u in z1 for v in z2):
                return True
    return False


@st.composite
def bigraphs(draw, max_n: int = 6, min_n: int = 0):
    n1 = draw(st.integers(min_n, max_n))
    n2 = draw(st.integers(min_n, max_n))
    rows = tuple(draw(st.integers(0, (1 << n2) - 1)) for _ in range(n1))
    return Bigraph(n1, n2, rows)


@st.composite
def parades(draw, max_len: int = 3, max_width: int = 3, max_extra: int = 2):
    K = draw(st.integers(1, max_len))
    L = draw(st.integers(1, max_len))
    w1 = draw(st.integers(1, max_width))
    w2 = draw(st.integers(1, max_width))
    n1 = K * w1 + draw(st.integers(0, max_extra))
    n2 = L * w2 + draw(st.integers(0, max_extra))
    rows = tuple(draw(st.integers(0, (1 << n2) - 1)) for _ in range(n1))
    G = Bigraph(n1, n2, rows)
    p1 = draw(st.permutations(range(n1)))
    p2 = draw(st.permutations(range(n2)))
    A = [p1[k * w1:(k + 1) * w1] for k in range(K)]
    B = [p2[k * w2:(k + 1) * w2] for k in range(L)]
    return Parade.from_lists(G, A, B)


# -- acceptance reporting --------------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
