"""Brute-force ground truth for the classifier.

A map lies in the finite restrictions of the class for a side set ``X``
when it is an isomorphism from ``G`` onto some switch image of ``H`` whose
flip set uses only sides in ``X``, optionally composed with the global
exchange.  The oracle generates those families with
:func:`find_isomorphisms` and never looks at a flip matrix.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product

from .classify import ReductClass, classify
from .errors import TooLarge
from .graph import BipartiteGraph, SidedMap, find_isomorphisms
from .random_lab import _pmap
from .switching import FlipMatrix, SwitchPattern, apply_switch, flip_matrix

__all__ = [
    "SIDE_SETS",
    "OracleReport",
    "switch_patterns",
    "switch_images",
    "class_families",
    "oracle_class",
    "all_graphs",
    "all_bijections",
    "verify_equivalence",
    "flip_matrix_census",
    "group_closure_check",
]

# side sets in lattice order, paired with their class
SIDE_SETS: tuple[tuple[frozenset[str], ReductClass], ...] = (
    (frozenset(), ReductClass.AUT_STAR),
    (frozenset({"l"}), ReductClass.S_L),
    (frozenset({"r"}), ReductClass.S_R),
    (frozenset({"l", "r"}), ReductClass.S_LR),
)

ORACLE_MAX_SIDE = 4
SWEEP_MAX_SIDE = 3


def switch_patterns(left_count: int, right_count: int, X: frozenset[str]) -> list[tuple[bool, SwitchPattern]]:
    """``(exchange, pattern)`` pairs allowed for ``X``, in ascending popcount order."""
    lefts = range(1 << left_count) if "l" in X else [0]
    rights = range(1 << right_count) if "r" in X else [0]
    out = [
        (exch, SwitchPattern(left_count, right_count, lm, rm))
        for exch in (False, True)
        for lm in lefts
        for rm in rights
    ]
    out.sort(key=lambda t: (t[1].popcount() + t[0], t[0], t[1].left_flips, t[1].right_flips))
    return out


def _switched(H: BipartiteGraph, exchange: bool, p: SwitchPattern) -> BipartiteGraph:
    K = apply_switch(H, p)
    return K.complement() if exchange else K


def switch_images(H: BipartiteGraph, X: frozenset[str]) -> list[BipartiteGraph]:
    """Distinct graphs reachable from ``H`` by switches on ``X`` and the global exchange."""
    seen: dict[BipartiteGraph, None] = {}
    for exch, p in switch_patterns(H.left_count, H.right_count, X):
        seen.setdefault(_switched(H, exch, p), None)
    return list(seen)


@lru_cache(maxsize=1 << 16)
def _isos(G: BipartiteGraph, K: BipartiteGraph) -> frozenset[SidedMap]:
    return frozenset(find_isomorphisms(G, K))


def _check_size(*graphs: BipartiteGraph, limit: int = ORACLE_MAX_SIDE) -> None:
    for G in graphs:
        if G.left_count > limit or G.right_count > limit:
            raise TooLarge(f"{G.left_count}x{G.right_count} exceeds the exhaustive limit of {limit} per side")


def class_families(G: BipartiteGraph, H: BipartiteGraph) -> dict[ReductClass, frozenset[SidedMap]]:
    """Every bijection ``G -> H`` generated for each side set, keyed by class."""
    _check_size(G, H)
    fams = {}
    for X, cls in SIDE_SETS:
        maps: set[SidedMap] = set()
        for K in switch_images(H, X):
            maps |= _isos(G, K)
        fams[cls] = frozenset(maps)
    return fams


def oracle_class(f: SidedMap, G: BipartiteGraph, H: BipartiteGraph) -> ReductClass:
    """Least class whose generated maps contain ``f``; SYM if none do."""
    _check_size(G, H)
    for X, cls in SIDE_SETS:
        for exch, p in switch_patterns(H.left_count, H.right_count, X):
            if f in _isos(G, _switched(H, exch, p)):
                return cls
    return ReductClass.SYM


def _least_class(f: SidedMap, fams: dict[ReductClass, frozenset[SidedMap]]) -> ReductClass:
    for _, cls in SIDE_SETS:
        if f in fams[cls]:
            return cls
    return ReductClass.SYM


def all_graphs(m: int, n: int) -> list[BipartiteGraph]:
    full = 1 << n
    return [BipartiteGraph(m, n, rows) for rows in product(range(full), repeat=m)]


def all_bijections(m: int, n: int) -> list[SidedMap]:
    return [SidedMap.total(lp, rp) for lp in permutations(range(m)) for rp in permutations(range(n))]


@dataclass
class OracleReport:
    left: int
    right: int
    total_maps: int = 0
    oracle_counts: Counter = field(default_factory=Counter)
    classifier_counts: Counter = field(default_factory=Counter)
    discrepancies: int = 0
    first_discrepancy: dict | None = None

    @property
    def ok(self) -> bool:
        return self.discrepancies == 0

    def merge(self, other: OracleReport) -> OracleReport:
        first = self.first_discrepancy
        if other.first_discrepancy is not None and (first is None or other.first_discrepancy["order"] < first["order"]):
            first = other.first_discrepancy
        return OracleReport(
            self.left,
            self.right,
            self.total_maps + other.total_maps,
            self.oracle_counts + other.oracle_counts,
            self.classifier_counts + other.classifier_counts,
            self.discrepancies + other.discrepancies,
            first,
        )

    def census_rows(self) -> list[tuple[str, int, int]]:
        return [(c.value, self.oracle_counts[c], self.classifier_counts[c]) for c in ReductClass]

    def to_records(self) -> list[dict]:
        recs: list[dict] = [
            {"record": "census", "class": c, "oracle": o, "classifier": k} for c, o, k in self.census_rows()
        ]
        recs.append(
            {
                "record": "summary",
                "left": self.left,
                "right": self.right,
                "total_maps": self.total_maps,
                "discrepancies": self.discrepancies,
                "first_discrepancy": self.first_discrepancy,
            }
        )
        return recs

    def to_text(self) -> str:
        lines = [
            f"oracle sweep {self.left}x{self.right}: {self.total_maps} maps",
            f"{'class':<10}{'oracle':>10}{'classifier':>12}",
        ]
        lines += [f"{c:<10}{o:>10}{k:>12}" for c, o, k in self.census_rows()]
        lines.append(f"discrepancies: {self.discrepancies}")
        if self.first_discrepancy is not None:
            d = self.first_discrepancy
            lines.append(f"first discrepancy: {d}")
        return "\n".join(lines) + "\n"


def _sweep_source(args) -> OracleReport:
    order, G, targets, maps, m, n = args
    rep = OracleReport(m, n)
    for ti, H in enumerate(targets):
        fams = class_families(G, H)
        for fi, f in enumerate(maps):
            o = _least_class(f, fams)
            c = classify(flip_matrix(f, G, H))
            rep.total_maps += 1
            rep.oracle_counts[o] += 1
            rep.classifier_counts[c] += 1
            if o is not c:
                rep.discrepancies += 1
                if rep.first_discrepancy is None:
                    rep.first_discrepancy = {
                        "order": (order, ti, fi),
                        "source": [list(r) for r in G.cross],
                        "target": [list(r) for r in H.cross],
                        "map": str(f),
                        "oracle": o.value,
                        "classifier": c.value,
                    }
    return rep


def verify_equivalence(max_left: int, max_right: int, workers: int | None = None) -> OracleReport:
    """Compare oracle and classifier on every graph pair and bijection of the given shape."""
    if max_left > SWEEP_MAX_SIDE or max_right > SWEEP_MAX_SIDE:
        raise TooLarge(f"exhaustive sweep is limited to {SWEEP_MAX_SIDE} per side")
    graphs = all_graphs(max_left, max_right)
    maps = all_bijections(max_left, max_right)
    jobs = [(i, G, graphs, maps, max_left, max_right) for i, G in enumerate(graphs)]
    report = OracleReport(max_left, max_right)
    for part in _pmap(_sweep_source, jobs, workers):
        report = report.merge(part)
    return report


def flip_matrix_census(m: int, n: int) -> Counter:
    """Minimal-class counts over all ``2**(m*n)`` flip matrices, via the classifier."""
    return Counter(classify(FlipMatrix(m, n, rows)) for rows in product(range(1 << n), repeat=m))


def group_closure_check(G: BipartiteGraph, X: frozenset[str] | set[str] | str) -> bool:
    """Closure of the generated maps among ``G`` and its switch images.

    Objects are the distinct switch images of ``G`` for ``X`` (with the
    global exchange); the morphisms ``A -> B`` are the oracle family for
    ``X``.  True iff composites and inverses of morphisms are morphisms.
    """
    X = frozenset(X)
    _check_size(G, limit=SWEEP_MAX_SIDE)
    objects = switch_images(G, X)
    hom = {}
    for A in objects:
        for B in objects:
            maps: set[SidedMap] = set()
            for K in switch_images(B, X):
                maps |= _isos(A, K)
            hom[A, B] = frozenset(maps)
    for (A, B), fs in hom.items():
        back = hom[B, A]
        if any(f.inverse() not in back for f in fs):
            return False
        for C in objects:
            target = hom[A, C]
            for g in hom[B, C]:
                for f in fs:
                    if g.compose(f) not in target:
                        return False
    return True
