from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipartite_reducts.errors import DimensionMismatch, DuplicateTarget, OutOfRange, ParseError, ZeroSide
from bipartite_reducts.graph import (
    BipartiteGraph,
    CrossEdge,
    CrossType,
    SidedMap,
    cross_type,
    find_isomorphisms,
    format_graph,
    induced_subgraph,
    is_isomorphism,
    new_graph,
    parse_graph,
)
from bipartite_reducts.switching import image_graph

from conftest import graphs


def brute_isomorphisms(G, H):
    """Every side-preserving bijection checked against the definition."""
    if G.shape != H.shape:
        return []
    out = []
    for lp in permutations(range(G.left_count)):
        for rp in permutations(range(G.right_count)):
            if all(G.bit(a, b) == H.bit(lp[a], rp[b]) for a in range(G.left_count) for b in range(G.right_count)):
                out.append(SidedMap.total(lp, rp))
    return out


def test_new_graph_examples():
    G = new_graph(1, 1, [[1]])
    assert cross_type(G, CrossEdge.of(0, 0)) is CrossType.P1
    D = new_graph(2, 2, [[1, 0], [0, 1]])
    assert D.cross == ((1, 0), (0, 1))
    with pytest.raises(ZeroSide):
        new_graph(0, 3, [])
    with pytest.raises(DimensionMismatch):
        new_graph(2, 2, [[1, 0]])
    with pytest.raises(DimensionMismatch):
        new_graph(1, 2, [[1, 0, 1]])


def test_cross_type_examples():
    G = new_graph(2, 2, [[1, 0], [0, 1]])
    assert cross_type(G, CrossEdge.of(0, 0)) is CrossType.P1
    assert cross_type(G, CrossEdge.of(0, 1)) is CrossType.P2
    with pytest.raises(OutOfRange):
        cross_type(new_graph(1, 1, [[1]]), CrossEdge.of(0, 1))


def test_induced_subgraph_examples():
    G = new_graph(2, 2, [[1, 0], [0, 1]])
    assert induced_subgraph(G, {0}, {0, 1}).cross == ((1, 0),)
    assert induced_subgraph(G, {0, 1}, {1}).cross == ((0,), (1,))
    with pytest.raises(ZeroSide):
        induced_subgraph(new_graph(1, 1, [[1]]), set(), {0})
    with pytest.raises(OutOfRange):
        induced_subgraph(G, {2}, {0})


@given(graphs(max_side=6), st.data())
def test_induced_subgraph_functorial(G, data):
    L1 = data.draw(st.sets(st.integers(0, G.left_count - 1), min_size=1))
    R1 = data.draw(st.sets(st.integers(0, G.right_count - 1), min_size=1))
    l1, r1 = sorted(L1), sorted(R1)
    L2 = data.draw(st.sets(st.integers(0, len(l1) - 1), min_size=1))
    R2 = data.draw(st.sets(st.integers(0, len(r1) - 1), min_size=1))
    two_step = induced_subgraph(induced_subgraph(G, L1, R1), L2, R2)
    one_step = induced_subgraph(G, {l1[i] for i in L2}, {r1[j] for j in R2})
    assert two_step == one_step


def test_find_isomorphisms_examples():
    assert find_isomorphisms(new_graph(1, 1, [[1]]), new_graph(1, 1, [[0]])) == []
    D = new_graph(2, 2, [[1, 0], [0, 1]])
    A = new_graph(2, 2, [[0, 1], [1, 0]])
    isos = find_isomorphisms(D, A)
    assert isos == [SidedMap.total([0, 1], [1, 0]), SidedMap.total([1, 0], [0, 1])]
    rigid = new_graph(2, 2, [[1, 0], [0, 0]])
    assert find_isomorphisms(rigid, rigid) == [SidedMap.identity(rigid)]


def test_find_isomorphisms_size_mismatch_is_empty():
    assert find_isomorphisms(new_graph(1, 2, [[1, 0]]), new_graph(2, 1, [[1], [0]])) == []


@settings(max_examples=150)
@given(graphs(max_side=4), st.data())
def test_find_isomorphisms_matches_brute_force(G, data):
    # half the time H is an isomorphic relabelling, so the non-empty case is exercised
    if data.draw(st.booleans()):
        lp = data.draw(st.permutations(range(G.left_count)))
        rp = data.draw(st.permutations(range(G.right_count)))
        H = image_graph(G, SidedMap.total(lp, rp))
    else:
        H = data.draw(graphs(max_side=4))
    got = find_isomorphisms(G, H)
    assert got == brute_isomorphisms(G, H)
    key = [(tuple(t for _, t in f.left), tuple(t for _, t in f.right)) for f in got]
    assert key == sorted(key)
    for f in got:
        assert is_isomorphism(f, G, H)
        assert G.popcount() == H.popcount()


@settings(max_examples=60)
@given(graphs(max_side=4))
def test_automorphisms_form_a_group(G):
    auts = set(find_isomorphisms(G, G))
    assert SidedMap.identity(G) in auts
    for f in auts:
        assert f.inverse() in auts
        for g in auts:
            assert g.compose(f) in auts


def test_sided_map_rejects_duplicate_targets():
    with pytest.raises(DuplicateTarget):
        SidedMap.total([0, 0], [0])


def test_graph_text_round_trip():
    G = new_graph(2, 3, [[1, 0, 1], [0, 0, 1]])
    text = format_graph(G)
    assert text == "2 3\n101\n001\n"
    assert parse_graph(text) == G


@given(graphs(max_side=7))
def test_graph_text_round_trip_property(G):
    assert parse_graph(format_graph(G)) == G


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("", 1, 1),
        ("2 2\n10\n01", 3, 3),
        ("2  2\n10\n01\n", 1, 1),
        ("2 2\n10\n0a\n", 3, 2),
        ("2 2\n10\n011\n", 3, 3),
        ("2 2\n10\n0\n", 3, 2),
        ("2 2\n10\n", 3, 1),
        ("2 2\n10\n01\n11\n", 4, 1),
        ("2 2 \n10\n01\n", 1, 1),
        ("02 2\n10\n01\n", 1, 1),
        ("0 2\n", 1, 1),
        ("1 0\n\n", 1, 3),
        ("2 2\n10 \n01\n", 3 - 1, 3),
    ],
)
def test_graph_parser_rejects_deviations(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_graph(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_graph_is_hashable_and_immutable():
    G = new_graph(1, 2, [[1, 0]])
    assert {G: 1}[new_graph(1, 2, [[1, 0]])] == 1
    with pytest.raises(Exception):
        G.rows = (0,)  # type: ignore[misc]


def test_bipartite_graph_rejects_wide_rows():
    with pytest.raises(DimensionMismatch):
        BipartiteGraph(1, 2, (0b100,))
