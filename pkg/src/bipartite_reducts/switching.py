"""Switch patterns and the flip-matrix calculus.

Switching a bipartite graph with respect to a vertex set ``A`` flips the
cross-type of exactly the cross-edges with one endpoint in ``A``.  Splitting
``A`` by side gives a pair of bit vectors; the flip on ``(a, b)`` is then
``left_flips[a] ^ right_flips[b]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import DimensionMismatch, OutOfRange
from .graph import BipartiteGraph, BitMatrix, SidedMap, Side, VertexRef

__all__ = [
    "SwitchPattern",
    "FlipMatrix",
    "apply_switch",
    "compose_patterns",
    "flip_matrix",
    "pattern_flip_matrix",
    "image_graph",
    "format_pattern",
    "parse_pattern",
]


@dataclass(frozen=True)
class SwitchPattern:
    """Flip sets per side, as bitmasks of length ``left_count``/``right_count``."""

    left_count: int
    right_count: int
    left_flips: int = 0
    right_flips: int = 0

    def __post_init__(self):
        if self.left_flips >> self.left_count or self.right_flips >> self.right_count:
            raise DimensionMismatch("flip set exceeds the side size")
        if self.left_flips < 0 or self.right_flips < 0:
            raise ValueError("negative flip mask")

    @classmethod
    def from_sets(cls, left_count: int, right_count: int, left: Iterable[int] = (), right: Iterable[int] = ()) -> SwitchPattern:
        lm = rm = 0
        for a in left:
            if not 0 <= a < left_count:
                raise OutOfRange(f"left vertex {a} outside 0..{left_count - 1}")
            lm |= 1 << a
        for b in right:
            if not 0 <= b < right_count:
                raise OutOfRange(f"right vertex {b} outside 0..{right_count - 1}")
            rm |= 1 << b
        return cls(left_count, right_count, lm, rm)

    @classmethod
    def single(cls, left_count: int, right_count: int, v: VertexRef) -> SwitchPattern:
        """Switch with respect to the single vertex ``v``."""
        if v.side is Side.L:
            return cls.from_sets(left_count, right_count, left=[v.index])
        return cls.from_sets(left_count, right_count, right=[v.index])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.left_count, self.right_count)

    @property
    def left_set(self) -> tuple[int, ...]:
        return tuple(a for a in range(self.left_count) if self.left_flips >> a & 1)

    @property
    def right_set(self) -> tuple[int, ...]:
        return tuple(b for b in range(self.right_count) if self.right_flips >> b & 1)

    def popcount(self) -> int:
        return self.left_flips.bit_count() + self.right_flips.bit_count()

    def complement(self) -> SwitchPattern:
        """Same flip matrix, opposite representative."""
        return SwitchPattern(
            self.left_count,
            self.right_count,
            self.left_flips ^ ((1 << self.left_count) - 1),
            self.right_flips ^ ((1 << self.right_count) - 1),
        )

    def flips(self, v: VertexRef) -> bool:
        mask = self.left_flips if v.side is Side.L else self.right_flips
        return bool(mask >> v.index & 1)

    def __str__(self) -> str:
        return format_pattern(self)


@dataclass(frozen=True)
class FlipMatrix(BitMatrix):
    """``entries[a][b] == 1`` iff a map changes the cross-type of ``(a, b)``.

    Rows follow the map's left domain in ascending order, columns its right
    domain.
    """

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.rows)

    def is_ones(self) -> bool:
        full = self.full_row
        return all(r == full for r in self.rows)


def apply_switch(G: BipartiteGraph, p: SwitchPattern) -> BipartiteGraph:
    if p.shape != G.shape:
        raise DimensionMismatch(f"pattern shape {p.shape} does not match graph shape {G.shape}")
    full = G.full_row
    rows = tuple(
        r ^ p.right_flips ^ (full if p.left_flips >> a & 1 else 0)
        for a, r in enumerate(G.rows)
    )
    return BipartiteGraph(G.nrows, G.ncols, rows)


def compose_patterns(p: SwitchPattern, q: SwitchPattern) -> SwitchPattern:
    if p.shape != q.shape:
        raise DimensionMismatch(f"pattern shapes {p.shape} and {q.shape} differ")
    return SwitchPattern(p.left_count, p.right_count, p.left_flips ^ q.left_flips, p.right_flips ^ q.right_flips)


def flip_matrix(f: SidedMap, G: BipartiteGraph, H: BipartiteGraph) -> FlipMatrix:
    """XOR of the cross-type of ``(a, b)`` in ``G`` and of ``(f a, f b)`` in ``H``."""
    for a, ta in f.left:
        if not (0 <= a < G.left_count and 0 <= ta < H.left_count):
            raise OutOfRange(f"left pair {a}->{ta} outside the graphs")
    for b, tb in f.right:
        if not (0 <= b < G.right_count and 0 <= tb < H.right_count):
            raise OutOfRange(f"right pair {b}->{tb} outside the graphs")
    rows = []
    for a, ta in f.left:
        ga, ha = G.rows[a], H.rows[ta]
        r = 0
        for j, (b, tb) in enumerate(f.right):
            r |= (((ga >> b) ^ (ha >> tb)) & 1) << j
        rows.append(r)
    return FlipMatrix(len(f.left), len(f.right), tuple(rows))


def pattern_flip_matrix(p: SwitchPattern) -> FlipMatrix:
    full = (1 << p.right_count) - 1
    rows = tuple(p.right_flips ^ (full if p.left_flips >> a & 1 else 0) for a in range(p.left_count))
    return FlipMatrix(p.left_count, p.right_count, rows)


def image_graph(G: BipartiteGraph, f: SidedMap) -> BipartiteGraph:
    """The graph ``H`` on the same index sets for which the bijection ``f`` is an isomorphism ``G -> H``."""
    if not f.is_bijection_between(G, G):
        raise DimensionMismatch("image_graph needs a bijection of G's vertex sets")
    lm, rm = f.left_map, f.right_map
    rows = [0] * G.left_count
    for a in range(G.left_count):
        ga = G.rows[a]
        r = 0
        for b in range(G.right_count):
            r |= ((ga >> b) & 1) << rm[b]
        rows[lm[a]] = r
    return BipartiteGraph(G.nrows, G.ncols, tuple(rows))


def _fmt_set(items: tuple[int, ...]) -> str:
    return ",".join(str(i) for i in items) if items else "-"


def format_pattern(p: SwitchPattern) -> str:
    return f"L: {_fmt_set(p.left_set)} ; R: {_fmt_set(p.right_set)}"


def parse_pattern(text: str, left_count: int, right_count: int) -> SwitchPattern:
    """Inverse of :func:`format_pattern`; indices must be ascending."""
    halves = text.strip().split(";")
    if len(halves) != 2:
        raise ValueError(f"pattern must have an L part and an R part: {text!r}")
    sets = []
    for half, tag in zip(halves, ("L:", "R:")):
        half = half.strip()
        if not half.startswith(tag):
            raise ValueError(f"expected {tag!r} in {half!r}")
        body = half[2:].strip()
        if body == "-":
            sets.append([])
            continue
        idx = [int(t) for t in body.split(",")]
        if idx != sorted(set(idx)):
            raise ValueError(f"indices must be strictly ascending: {body!r}")
        sets.append(idx)
    return SwitchPattern.from_sets(left_count, right_count, sets[0], sets[1])
