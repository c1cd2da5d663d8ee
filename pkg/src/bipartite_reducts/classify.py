"""Classify side-preserving maps into the five-class lattice from their flip matrix.

The predicates test parity of flipped cross-types on every (1x2)-, (2x1)-
and (2x2)-subgraph of the map's domain.  Classification reads nothing but
the flip matrix, so maps with equal flip matrices classify identically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import NotDecomposable
from .switching import FlipMatrix, SwitchPattern, format_pattern, pattern_flip_matrix

__all__ = [
    "ReductClass",
    "SwitchDecomposition",
    "ClassificationReport",
    "preserves_2x2_parity",
    "preserves_1x2_parity",
    "preserves_2x1_parity",
    "first_odd_minor",
    "classify",
    "decompose",
    "normalize",
    "classification_report",
]


class ReductClass(enum.Enum):
    AUT_STAR = "AUT_STAR"
    S_L = "S_L"
    S_R = "S_R"
    S_LR = "S_LR"
    SYM = "SYM"

    def __le__(self, other: ReductClass) -> bool:
        return other in _UP[self]

    def __lt__(self, other: ReductClass) -> bool:
        return self is not other and self <= other

    def __ge__(self, other: ReductClass) -> bool:
        return other <= self

    def __gt__(self, other: ReductClass) -> bool:
        return other < self

    def meet(self, other: ReductClass) -> ReductClass:
        lower = [c for c in ReductClass if c <= self and c <= other]
        return max(lower, key=lambda c: len(_DOWN[c]))

    def join(self, other: ReductClass) -> ReductClass:
        upper = [c for c in ReductClass if self <= c and other <= c]
        return min(upper, key=lambda c: len(_DOWN[c]))


# upward closures in the lattice AUT_STAR < S_L, S_R < S_LR < SYM
_UP = {
    ReductClass.AUT_STAR: frozenset(ReductClass),
    ReductClass.S_L: frozenset({ReductClass.S_L, ReductClass.S_LR, ReductClass.SYM}),
    ReductClass.S_R: frozenset({ReductClass.S_R, ReductClass.S_LR, ReductClass.SYM}),
    ReductClass.S_LR: frozenset({ReductClass.S_LR, ReductClass.SYM}),
    ReductClass.SYM: frozenset({ReductClass.SYM}),
}
_DOWN = {c: frozenset(d for d in ReductClass if c in _UP[d]) for c in ReductClass}


def first_odd_minor(E: FlipMatrix) -> tuple[int, int, int, int] | None:
    """Lexicographically first ``(a, a2, b, b2)`` with an odd number of flips, else None."""
    full = E.full_row
    for a in range(E.nrows):
        for a2 in range(a + 1, E.nrows):
            d = E.rows[a] ^ E.rows[a2]
            if d == 0 or d == full:
                continue
            # d is neither constant, so some b has d[b] = 1 and some b2 has d[b2] = 0
            for b in range(E.ncols):
                for b2 in range(b + 1, E.ncols):
                    if ((d >> b) ^ (d >> b2)) & 1:
                        return (a, a2, b, b2)
    return None


def preserves_2x2_parity(E: FlipMatrix) -> bool:
    full = E.full_row
    r0 = E.rows[0] if E.rows else 0
    return all(r == r0 or r == r0 ^ full for r in E.rows)


def preserves_1x2_parity(E: FlipMatrix) -> bool:
    """Every row constant."""
    full = E.full_row
    return all(r == 0 or r == full for r in E.rows)


def preserves_2x1_parity(E: FlipMatrix) -> bool:
    """Every column constant, i.e. all rows equal."""
    return len(set(E.rows)) <= 1


def classify(E: FlipMatrix) -> ReductClass:
    rows_const = preserves_1x2_parity(E)
    cols_const = preserves_2x1_parity(E)
    if rows_const and cols_const:
        return ReductClass.AUT_STAR
    if rows_const:
        return ReductClass.S_L
    if cols_const:
        return ReductClass.S_R
    if preserves_2x2_parity(E):
        return ReductClass.S_LR
    return ReductClass.SYM


@dataclass(frozen=True)
class SwitchDecomposition:
    """``pattern_flip_matrix(pattern)``, XORed with all-ones when ``global_exchange``.

    ``(g, p)``, ``(g, complement(p))`` and ``(not g, p with the left set
    complemented)`` all give the same matrix; :func:`normalize` picks the
    representative with ``global_exchange`` false and first left bit 0.
    """

    global_exchange: bool
    pattern: SwitchPattern

    def flip_matrix(self) -> FlipMatrix:
        E = pattern_flip_matrix(self.pattern)
        return E.complement() if self.global_exchange else E

    @property
    def exchanges_all(self) -> bool:
        """True iff the denoted map exchanges every cross-type (the switch w.r.t. all of L)."""
        return self.flip_matrix().is_ones()


def normalize(d: SwitchDecomposition) -> SwitchDecomposition:
    p = d.pattern
    if d.global_exchange:
        p = SwitchPattern(p.left_count, p.right_count, p.left_flips ^ ((1 << p.left_count) - 1), p.right_flips)
    if p.left_flips & 1:
        p = p.complement()
    elif p.left_count == 0 and p.right_flips & 1:
        p = p.complement()
    return SwitchDecomposition(False, p)


def decompose(E: FlipMatrix) -> SwitchDecomposition:
    """Solve ``E[a][b] = lam[a] ^ rho[b]`` over GF(2).

    Raises NotDecomposable (carrying the first odd minor) when no solution exists.
    """
    m, n = E.shape
    if m == 0 or n == 0:
        return SwitchDecomposition(False, SwitchPattern(m, n))
    rho = E.rows[0]
    rho0 = rho & 1
    lam = 0
    for a, r in enumerate(E.rows):
        if (r & 1) ^ rho0:
            lam |= 1 << a
    p = SwitchPattern(m, n, lam, rho)
    if pattern_flip_matrix(p) != E:
        minor = first_odd_minor(E)
        raise NotDecomposable(f"flip matrix has an odd 2x2 minor at {minor}", minor)
    return SwitchDecomposition(False, p)


@dataclass(frozen=True)
class ClassificationReport:
    reduct_class: ReductClass
    decomposable: bool
    pattern: SwitchPattern | None
    certificate: tuple[int, int, int, int] | None
    # AUT_STAR only: True for an anti-isomorphism (all flipped), False for an isomorphism
    anti: bool | None

    def to_record(self) -> dict:
        return {
            "class": self.reduct_class.value,
            "decomposable": self.decomposable,
            "pattern": format_pattern(self.pattern) if self.pattern is not None else None,
            "certificate": list(self.certificate) if self.certificate is not None else None,
            "anti": self.anti,
        }

    def to_text(self) -> str:
        lines = [f"class: {self.reduct_class.value}", f"decomposable: {str(self.decomposable).lower()}"]
        if self.pattern is not None:
            lines.append(f"pattern: {format_pattern(self.pattern)}")
        if self.anti is not None:
            lines.append(f"aut_star_kind: {'anti-isomorphism' if self.anti else 'isomorphism'}")
        if self.certificate is not None:
            a, a2, b, b2 = self.certificate
            lines.append(f"certificate: odd minor rows {a},{a2} columns {b},{b2}")
        return "\n".join(lines) + "\n"


def classification_report(E: FlipMatrix) -> ClassificationReport:
    cls = classify(E)
    try:
        pattern = decompose(E).pattern
    except NotDecomposable as exc:
        return ClassificationReport(cls, False, None, exc.minor, None)
    anti = None
    if cls is ReductClass.AUT_STAR:
        anti = E.nrows > 0 and E.ncols > 0 and E.is_ones()
    return ClassificationReport(cls, True, pattern, None, anti)
