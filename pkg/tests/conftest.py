from itertools import product

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from bipartite_reducts.graph import BipartiteGraph, SidedMap
from bipartite_reducts.switching import FlipMatrix, SwitchPattern

# some examples (highly symmetric graphs) are legitimately slow; timing is not under test
settings.register_profile("repo", deadline=None)
settings.load_profile("repo")


def bits_strategy(max_side=4, min_side=1):
    return st.tuples(st.integers(min_side, max_side), st.integers(min_side, max_side)).flatmap(
        lambda mn: st.tuples(
            st.just(mn[0]), st.just(mn[1]), st.lists(st.integers(0, (1 << mn[1]) - 1), min_size=mn[0], max_size=mn[0])
        )
    )


@st.composite
def graphs(draw, max_side=4, min_side=1):
    m, n, rows = draw(bits_strategy(max_side, min_side))
    return BipartiteGraph(m, n, tuple(rows))


@st.composite
def flip_matrices(draw, max_side=4, min_side=1):
    m, n, rows = draw(bits_strategy(max_side, min_side))
    return FlipMatrix(m, n, tuple(rows))


@st.composite
def patterns_for(draw, m, n):
    return SwitchPattern(m, n, draw(st.integers(0, (1 << m) - 1)), draw(st.integers(0, (1 << n) - 1)))


@st.composite
def bijections(draw, m, n):
    lp = draw(st.permutations(range(m)))
    rp = draw(st.permutations(range(n)))
    return SidedMap.total(lp, rp)


def naive_flip(f, G, H):
    """Flip matrix straight from the definition, entry by entry."""
    lm, rm = f.left_map, f.right_map
    return [[G.bit(a, b) ^ H.bit(lm[a], rm[b]) for b in sorted(rm)] for a in sorted(lm)]


def all_matrices(m, n):
    return [FlipMatrix(m, n, rows) for rows in product(range(1 << n), repeat=m)]


def planted_instance(rng, m, n, lam=None, rho=None, exchange=None, G=None):
    """A bijection f: G -> H whose flip matrix is exactly lam ⊕ rho (⊕ all-ones if exchange).

    ``rng`` is a numpy Generator; unspecified parts are drawn from it.
    """
    if G is None:
        G = BipartiteGraph(m, n, tuple(int(x) for x in rng.integers(0, 1 << n, size=m)))
    if lam is None:
        lam = [int(x) for x in rng.integers(0, 2, size=m)]
    if rho is None:
        rho = [int(x) for x in rng.integers(0, 2, size=n)]
    if exchange is None:
        exchange = bool(rng.integers(0, 2))
    lp = [int(x) for x in rng.permutation(m)]
    rp = [int(x) for x in rng.permutation(n)]
    rows = [0] * m
    for a in range(m):
        for b in range(n):
            bit = G.bit(a, b) ^ lam[a] ^ rho[b] ^ int(exchange)
            rows[lp[a]] |= bit << rp[b]
    H = BipartiteGraph(m, n, tuple(rows))
    return SidedMap.total(lp, rp), G, H


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
