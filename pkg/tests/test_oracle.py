from collections import Counter
from random import Random

import pytest

from bipartite_reducts.classify import ReductClass, classify
from bipartite_reducts.errors import TooLarge
from bipartite_reducts.graph import BipartiteGraph, SidedMap, Side, VertexRef, new_graph
from bipartite_reducts.oracle import (
    all_bijections,
    all_graphs,
    class_families,
    flip_matrix_census,
    group_closure_check,
    oracle_class,
    switch_patterns,
    verify_equivalence,
)
from bipartite_reducts.switching import SwitchPattern, apply_switch, flip_matrix

AUT, SL, SR, SLR, SYM = (
    ReductClass.AUT_STAR,
    ReductClass.S_L,
    ReductClass.S_R,
    ReductClass.S_LR,
    ReductClass.SYM,
)


def test_oracle_identity():
    G = new_graph(2, 3, [[1, 0, 1], [0, 0, 1]])
    assert oracle_class(SidedMap.identity(G), G, G) is AUT


def test_oracle_single_left_switch_of_rigid_graph():
    G = new_graph(2, 2, [[1, 0], [0, 0]])
    H = apply_switch(G, SwitchPattern.single(2, 2, VertexRef(Side.L, 0)))
    assert H.cross == ((0, 1), (0, 0))
    assert oracle_class(SidedMap.identity(G), G, H) is SL


def test_oracle_odd_flip_is_sym():
    G = new_graph(2, 2, [[1, 0], [0, 0]])
    H = BipartiteGraph(2, 2, (G.rows[0] ^ 1, G.rows[1]))
    assert oracle_class(SidedMap.identity(G), G, H) is SYM


def test_oracle_exchange_is_aut_star():
    G = new_graph(2, 2, [[1, 0], [0, 0]])
    assert oracle_class(SidedMap.identity(G), G, G.complement()) is AUT


def test_switch_patterns_counts():
    assert len(switch_patterns(2, 3, frozenset())) == 2
    assert len(switch_patterns(2, 3, frozenset("l"))) == 8
    assert len(switch_patterns(2, 3, frozenset("r"))) == 16
    assert len(switch_patterns(2, 3, frozenset("lr"))) == 64
    pops = [p.popcount() + e for e, p in switch_patterns(2, 2, frozenset("lr"))]
    assert pops == sorted(pops)


def test_families_nest_exhaustive_2x2():
    maps = set(all_bijections(2, 2))
    for G in all_graphs(2, 2):
        for H in all_graphs(2, 2):
            fams = class_families(G, H)
            assert fams[AUT] <= fams[SL] <= fams[SLR] <= maps
            assert fams[AUT] <= fams[SR] <= fams[SLR]
            for f in maps:
                least = next((c for c in (AUT, SL, SR, SLR) if f in fams[c]), SYM)
                assert oracle_class(f, G, H) is least


def test_verify_equivalence_1x1():
    rep = verify_equivalence(1, 1)
    assert rep.ok and rep.total_maps == 4
    assert set(+rep.oracle_counts) == {AUT}


def test_verify_equivalence_2x1():
    rep = verify_equivalence(2, 1)
    assert rep.ok and rep.total_maps == 4 * 4 * 2
    assert set(+rep.oracle_counts) == {AUT, SL}
    assert rep.oracle_counts == rep.classifier_counts


def test_verify_equivalence_2x2_census():
    rep = verify_equivalence(2, 2, workers=2)
    assert rep.ok and rep.first_discrepancy is None
    assert rep.total_maps == 1024
    # each of the 16 flip matrices is hit by 16*4 (G, f) choices, once each
    assert rep.oracle_counts == {AUT: 128, SL: 128, SR: 128, SLR: 128, SYM: 512}
    assert "discrepancies: 0" in rep.to_text()
    assert rep.to_records()[-1]["total_maps"] == 1024


def test_census_matches_matrix_enumeration():
    census = flip_matrix_census(2, 2)
    rep = verify_equivalence(2, 2)
    assert {c: 64 * census[c] for c in census} == dict(+rep.oracle_counts)


def test_too_large():
    big = BipartiteGraph(5, 1, (0,) * 5)
    with pytest.raises(TooLarge):
        oracle_class(SidedMap.identity(big), big, big)
    with pytest.raises(TooLarge):
        verify_equivalence(4, 2)
    with pytest.raises(TooLarge):
        group_closure_check(BipartiteGraph(4, 1, (0,) * 4), "l")


@pytest.mark.parametrize(
    "bits, X",
    [
        ([[1, 0], [0, 0]], ""),
        ([[1, 0], [0, 1]], ""),
        ([[1, 0], [0, 0]], "l"),
        ([[1, 0], [0, 1]], "lr"),
        ([[1, 1], [0, 1]], "r"),
    ],
)
def test_group_closure(bits, X):
    assert group_closure_check(new_graph(2, 2, bits), X)


def test_five_classes_on_sampled_3x3_pairs():
    rng = Random(2024)
    graphs = all_graphs(3, 3)
    maps = all_bijections(3, 3)
    seen = Counter()
    for _ in range(200):
        G, H = rng.choice(graphs), rng.choice(graphs)
        fams = class_families(G, H)
        for f in maps:
            least = next((c for c in (AUT, SL, SR, SLR) if f in fams[c]), SYM)
            assert least is classify(flip_matrix(f, G, H))
            seen[least] += 1
    assert set(seen) == set(ReductClass)
