from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipartite_reducts.analysis import (
    AnalysisTrace,
    GlobalPrefix,
    Polarity,
    StageKind,
    find_uniform_subset,
    format_trace,
    mn_analysis,
    trace_from_records,
    trace_to_records,
    verify_trace,
)
from bipartite_reducts.classify import ReductClass, classify
from bipartite_reducts.errors import NotFound, NotInSLR, TooSmall
from bipartite_reducts.graph import BipartiteGraph, SidedMap, Side, VertexRef, new_graph
from bipartite_reducts.random_lab import sample_graph
from bipartite_reducts.switching import FlipMatrix, SwitchPattern, apply_switch, flip_matrix

from conftest import all_matrices, flip_matrices, planted_instance


def identity_instance(E: FlipMatrix):
    """Identity map from the empty-P1 graph to ``E`` read as a graph; its flip matrix is ``E``."""
    G = BipartiteGraph(E.nrows, E.ncols, (0,) * E.nrows)
    H = BipartiteGraph(E.nrows, E.ncols, E.rows)
    return SidedMap.identity(G), G, H


def brute_uniform(E: FlipMatrix, m, n):
    for value, pol in ((0, Polarity.PRESERVED), (1, Polarity.FLIPPED)):
        for rs in combinations(range(E.nrows), m):
            for cs in combinations(range(E.ncols), n):
                if all(E.bit(a, b) == value for a in rs for b in cs):
                    return rs, cs, pol
    return None


def test_uniform_subset_of_isomorphism_is_everything():
    G = sample_graph(4, 5, 11)
    core = find_uniform_subset(SidedMap.identity(G), G, G, 4, 5)
    assert core.left == (0, 1, 2, 3) and core.right == (0, 1, 2, 3, 4)
    assert core.polarity is Polarity.PRESERVED


def test_uniform_subset_planted_pattern():
    rng = np.random.default_rng(3)
    f, G, H = planted_instance(rng, 3, 3, lam=[0, 0, 1], rho=[1, 0, 0], exchange=False)
    core = find_uniform_subset(f, G, H, 2, 2)
    assert (core.left, core.right, core.polarity) == ((0, 1), (1, 2), Polarity.PRESERVED)


def test_uniform_subset_not_found():
    f, G, H = identity_instance(FlipMatrix.from_bits([[1, 0], [0, 0]]))
    with pytest.raises(NotFound):
        find_uniform_subset(f, G, H, 2, 2)


def test_uniform_subset_prefers_preserved():
    f, G, H = identity_instance(FlipMatrix.from_bits([[1, 1, 0], [1, 1, 0], [0, 0, 0]]))
    core = find_uniform_subset(f, G, H, 2, 1)
    assert core.polarity is Polarity.PRESERVED and core.right == (2,)


@settings(max_examples=200)
@given(flip_matrices(max_side=5), st.data())
def test_uniform_subset_matches_brute_force(E, data):
    m = data.draw(st.integers(1, E.nrows))
    n = data.draw(st.integers(1, E.ncols))
    f, G, H = identity_instance(E)
    expected = brute_uniform(E, m, n)
    if expected is None:
        with pytest.raises(NotFound):
            find_uniform_subset(f, G, H, m, n)
    else:
        core = find_uniform_subset(f, G, H, m, n)
        assert (core.left, core.right, core.polarity) == expected


def test_uniform_subset_reports_domain_indices_of_partial_maps():
    G = new_graph(3, 3, [[1, 0, 1], [0, 0, 1], [1, 1, 1]])
    f = SidedMap.partial({1: 1, 2: 2}, {0: 0, 2: 2})
    core = find_uniform_subset(f, G, G, 2, 2)
    assert core.left == (1, 2) and core.right == (0, 2)


def test_identity_analysis():
    G = sample_graph(4, 4, 5)
    f = SidedMap.identity(G)
    trace = mn_analysis(f, G, G, 3, 3)
    assert trace.global_prefix is GlobalPrefix.IDENTITY
    assert trace.switch_count == 0
    assert trace.final_check
    assert len(trace.stages) == 8 - 6
    assert verify_trace(trace, f, G, G)


@pytest.mark.parametrize("vertex", [VertexRef(Side.L, 0), VertexRef(Side.L, 3), VertexRef(Side.R, 4)])
def test_single_vertex_switch_is_recovered(vertex):
    G = sample_graph(5, 5, 99)
    H = apply_switch(G, SwitchPattern.single(5, 5, vertex))
    f = SidedMap.identity(G)
    trace = mn_analysis(f, G, H, 3, 3)
    switches = [s for s in trace.stages if s.kind is StageKind.SWITCH_VERTEX]
    assert [s.vertex for s in switches] == [vertex]
    assert trace.global_prefix is GlobalPrefix.IDENTITY
    assert verify_trace(trace, f, G, H)


def test_odd_minor_is_not_in_slr():
    G = sample_graph(4, 4, 1)
    H = BipartiteGraph(4, 4, (G.rows[0] ^ 1,) + G.rows[1:])
    with pytest.raises(NotInSLR):
        mn_analysis(SidedMap.identity(G), G, H, 3, 3)


def test_global_exchange_prefix():
    G = sample_graph(5, 4, 8)
    H = apply_switch(G.complement(), SwitchPattern.single(5, 4, VertexRef(Side.R, 1)))
    f = SidedMap.identity(G)
    trace = mn_analysis(f, G, H, 3, 3)
    assert trace.global_prefix is GlobalPrefix.EXCHANGE
    assert [s.vertex for s in trace.stages if s.vertex] == [VertexRef(Side.R, 1)]
    assert verify_trace(trace, f, G, H)


def test_too_small():
    G = sample_graph(4, 4, 2)
    f = SidedMap.identity(G)
    with pytest.raises(TooSmall):
        mn_analysis(f, G, G, 2, 3)
    with pytest.raises(TooSmall):
        mn_analysis(f, G, G, 5, 3)
    with pytest.raises(TooSmall):
        mn_analysis(SidedMap.partial({0: 0, 1: 1, 2: 2}, {0: 0, 1: 1, 2: 2}), G, G, 3, 3)
    # no constant 3x3 block although the map is in S_LR
    f, G, H = identity_instance(FlipMatrix.from_bits([[1, 0, 0, 0]] * 2 + [[0, 1, 1, 1]] * 2))
    with pytest.raises(TooSmall):
        mn_analysis(f, G, H, 3, 3)


def test_verify_trace_detects_moved_vertex():
    rng = np.random.default_rng(7)
    f, G, H = planted_instance(rng, 5, 5, lam=[1, 0, 0, 0, 0], rho=[0] * 5, exchange=False)
    trace = mn_analysis(f, G, H, 3, 3)
    assert verify_trace(trace, f, G, H)
    i = next(i for i, s in enumerate(trace.stages) if s.kind is StageKind.SWITCH_VERTEX)
    stage = trace.stages[i]
    # a different vertex inside the same witness
    moved = replace(stage, vertex=VertexRef(Side.L, stage.witness_left[-1]))
    bad = replace(trace, stages=trace.stages[:i] + (moved,) + trace.stages[i + 1:])
    assert not verify_trace(bad, f, G, H)
    # a vertex outside the witness
    outside = replace(stage, vertex=VertexRef(Side.L, 4))
    bad = replace(trace, stages=trace.stages[:i] + (outside,) + trace.stages[i + 1:])
    assert not verify_trace(bad, f, G, H)


def test_empty_trace_on_non_isomorphism_fails():
    G = sample_graph(3, 3, 4)
    H = apply_switch(G, SwitchPattern.single(3, 3, VertexRef(Side.L, 0)))
    f = SidedMap.identity(G)
    assert not verify_trace(AnalysisTrace(3, 3, GlobalPrefix.IDENTITY, (), True), f, G, H)
    assert verify_trace(AnalysisTrace(3, 3, GlobalPrefix.IDENTITY, (), True), f, G, G)


def test_verify_trace_rejects_false_final_claim():
    G = sample_graph(3, 3, 4)
    f = SidedMap.identity(G)
    assert not verify_trace(AnalysisTrace(3, 3, GlobalPrefix.IDENTITY, (), False), f, G, G)


@pytest.mark.parametrize("size", [5, 6])
def test_soundness_on_planted_patterns(size):
    rng = np.random.default_rng(size)
    for _ in range(60):
        f, G, H = planted_instance(rng, size, size)
        trace = mn_analysis(f, G, H, 3, 3)
        assert verify_trace(trace, f, G, H)
        assert len(trace.stages) == 2 * size - 6
        for s in trace.stages:
            assert len(s.witness_left) == 3 and len(s.witness_right) == 3
            if s.vertex is not None:
                assert s.witness_contains(s.vertex)


def test_not_in_slr_exactly_when_sym_exhaustive_3x3():
    for E in all_matrices(3, 3):
        f, G, H = identity_instance(E)
        sym = classify(E) is ReductClass.SYM
        try:
            trace = mn_analysis(f, G, H, 3, 3)
        except NotInSLR:
            assert sym
        except TooSmall:
            # decomposable but without a constant 3x3 core
            assert not sym
        else:
            assert not sym and trace.final_check


def test_trace_records_round_trip():
    rng = np.random.default_rng(1)
    f, G, H = planted_instance(rng, 6, 5)
    trace = mn_analysis(f, G, H, 3, 3)
    assert trace_from_records(trace_to_records(trace)) == trace
    text = format_trace(trace)
    assert text.startswith("(3x3)-analysis") and "final_check: true" in text
    lines = format_trace(trace, records=True).splitlines()
    assert len(lines) == 1 + len(trace.stages)
