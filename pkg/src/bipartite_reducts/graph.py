"""Finite bipartite graphs with two complementary cross-types.

A graph is stored as one bitmask per left vertex: bit ``b`` of ``rows[a]``
is set iff the cross-edge ``(a, b)`` has cross-type P1.  Every left/right
pair therefore carries exactly one cross-type and the side axioms hold by
construction.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DimensionMismatch, DuplicateTarget, OutOfRange, ParseError, ZeroSide

__all__ = [
    "Side",
    "CrossType",
    "VertexRef",
    "CrossEdge",
    "BitMatrix",
    "BipartiteGraph",
    "SidedMap",
    "new_graph",
    "cross_type",
    "induced_subgraph",
    "find_isomorphisms",
    "is_isomorphism",
    "parse_graph",
    "format_graph",
]


class Side(enum.Enum):
    L = "L"
    R = "R"

    @property
    def other(self) -> Side:
        return Side.R if self is Side.L else Side.L


class CrossType(enum.Enum):
    P1 = 1
    P2 = 0


@dataclass(frozen=True)
class VertexRef:
    side: Side
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise OutOfRange(f"negative vertex index {self.index}")

    def __str__(self) -> str:
        return f"{self.side.value}{self.index}"

    def key(self) -> tuple[int, int]:
        """Canonical order: all of L ascending, then all of R ascending."""
        return (0 if self.side is Side.L else 1, self.index)

    @classmethod
    def parse(cls, text: str) -> VertexRef:
        text = text.strip()
        if len(text) < 2 or text[0] not in "LR" or not text[1:].isdigit():
            raise ValueError(f"bad vertex reference {text!r}")
        return cls(Side(text[0]), int(text[1:]))


@dataclass(frozen=True)
class CrossEdge:
    left: VertexRef
    right: VertexRef

    def __post_init__(self):
        if self.left.side is not Side.L or self.right.side is not Side.R:
            raise ValueError("a cross-edge joins an L vertex to an R vertex")

    @classmethod
    def of(cls, a: int, b: int) -> CrossEdge:
        return cls(VertexRef(Side.L, a), VertexRef(Side.R, b))


def _full(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class BitMatrix:
    """Dense GF(2) matrix with ``nrows`` rows stored as column bitmasks."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise DimensionMismatch("negative dimension")
        if len(self.rows) != self.nrows:
            raise DimensionMismatch(f"expected {self.nrows} rows, got {len(self.rows)}")
        mask = _full(self.ncols)
        for r in self.rows:
            if r < 0 or r & ~mask:
                raise DimensionMismatch(f"row bitmask {r:#x} exceeds {self.ncols} columns")

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]], ncols: int | None = None):
        bits = [list(row) for row in bits]
        if ncols is None:
            ncols = len(bits[0]) if bits else 0
        rows = []
        for a, row in enumerate(bits):
            if len(row) != ncols:
                raise DimensionMismatch(f"row {a} has {len(row)} entries, expected {ncols}")
            mask = 0
            for b, bit in enumerate(row):
                if bit not in (0, 1, True, False):
                    raise ValueError(f"entry ({a},{b}) is not a bit: {bit!r}")
                if bit:
                    mask |= 1 << b
            rows.append(mask)
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def zeros(cls, nrows: int, ncols: int):
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def ones(cls, nrows: int, ncols: int):
        return cls(nrows, ncols, (_full(ncols),) * nrows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def full_row(self) -> int:
        return _full(self.ncols)

    def bit(self, a: int, b: int) -> int:
        if not (0 <= a < self.nrows and 0 <= b < self.ncols):
            raise OutOfRange(f"({a},{b}) outside a {self.nrows}x{self.ncols} matrix")
        return (self.rows[a] >> b) & 1

    def column(self, b: int) -> int:
        """Column ``b`` as a bitmask over rows."""
        col = 0
        for a, r in enumerate(self.rows):
            col |= ((r >> b) & 1) << a
        return col

    def to_lists(self) -> list[list[int]]:
        return [[(r >> b) & 1 for b in range(self.ncols)] for r in self.rows]

    def popcount(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def complement(self):
        full = self.full_row
        return type(self)(self.nrows, self.ncols, tuple(r ^ full for r in self.rows))

    def xor(self, other: BitMatrix):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")
        return type(self)(self.nrows, self.ncols, tuple(x ^ y for x, y in zip(self.rows, other.rows)))

    def submatrix(self, row_set: Iterable[int], col_set: Iterable[int]):
        rs = sorted(set(row_set))
        cs = sorted(set(col_set))
        for a in rs:
            if not 0 <= a < self.nrows:
                raise OutOfRange(f"row {a} outside 0..{self.nrows - 1}")
        for b in cs:
            if not 0 <= b < self.ncols:
                raise OutOfRange(f"column {b} outside 0..{self.ncols - 1}")
        rows = []
        for a in rs:
            r = self.rows[a]
            rows.append(sum(((r >> b) & 1) << j for j, b in enumerate(cs)))
        return type(self)(len(rs), len(cs), tuple(rows))

    def __str__(self) -> str:
        return "\n".join("".join(str(x) for x in row) for row in self.to_lists())


@dataclass(frozen=True)
class BipartiteGraph(BitMatrix):
    """Bipartite graph; a set bit is cross-type P1, a clear bit is P2."""

    def __post_init__(self):
        if self.nrows < 1 or self.ncols < 1:
            raise ZeroSide(f"both sides must be nonempty, got {self.nrows}x{self.ncols}")
        super().__post_init__()

    @property
    def left_count(self) -> int:
        return self.nrows

    @property
    def right_count(self) -> int:
        return self.ncols

    @property
    def cross(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(row) for row in self.to_lists())

    def side_count(self, side: Side) -> int:
        return self.nrows if side is Side.L else self.ncols

    def vertices(self) -> Iterator[VertexRef]:
        for a in range(self.nrows):
            yield VertexRef(Side.L, a)
        for b in range(self.ncols):
            yield VertexRef(Side.R, b)


def new_graph(left_count: int, right_count: int, cross: Sequence[Sequence[int]]) -> BipartiteGraph:
    if left_count < 1 or right_count < 1:
        raise ZeroSide(f"both sides must be nonempty, got {left_count}x{right_count}")
    if len(cross) != left_count:
        raise DimensionMismatch(f"expected {left_count} rows, got {len(cross)}")
    m = BitMatrix.from_bits(cross, right_count)
    return BipartiteGraph(left_count, right_count, m.rows)


def cross_type(G: BipartiteGraph, e: CrossEdge) -> CrossType:
    return CrossType.P1 if G.bit(e.left.index, e.right.index) else CrossType.P2


def induced_subgraph(G: BipartiteGraph, left_set: Iterable[int], right_set: Iterable[int]) -> BipartiteGraph:
    left_set, right_set = set(left_set), set(right_set)
    if not left_set or not right_set:
        raise ZeroSide("induced subgraph needs a vertex on each side")
    sub = G.submatrix(left_set, right_set)
    return BipartiteGraph(sub.nrows, sub.ncols, sub.rows)


def _check_injective(pairs: Mapping[int, int], side: str) -> None:
    seen: dict[int, int] = {}
    for s, t in pairs.items():
        if s < 0 or t < 0:
            raise OutOfRange(f"negative index in {side} map: {s}->{t}")
        if t in seen:
            raise DuplicateTarget(f"{side} map sends both {seen[t]} and {s} to {t}")
        seen[t] = s


@dataclass(frozen=True)
class SidedMap:
    """Side-preserving injection, possibly partial.

    ``left`` and ``right`` are ``(source, target)`` pairs sorted by source.
    Build with :meth:`total` or :meth:`partial`.
    """

    left: tuple[tuple[int, int], ...]
    right: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for name, pairs in (("left", self.left), ("right", self.right)):
            d = dict(pairs)
            if len(d) != len(pairs):
                raise ValueError(f"{name} map lists a source twice")
            _check_injective(d, name)

    @classmethod
    def total(cls, left_map: Sequence[int], right_map: Sequence[int]) -> SidedMap:
        return cls(tuple(enumerate(left_map)), tuple(enumerate(right_map)))

    @classmethod
    def partial(cls, left: Mapping[int, int] | None = None, right: Mapping[int, int] | None = None) -> SidedMap:
        return cls(tuple(sorted((left or {}).items())), tuple(sorted((right or {}).items())))

    @classmethod
    def identity(cls, G: BipartiteGraph) -> SidedMap:
        return cls.total(range(G.left_count), range(G.right_count))

    @property
    def left_map(self) -> dict[int, int]:
        return dict(self.left)

    @property
    def right_map(self) -> dict[int, int]:
        return dict(self.right)

    @property
    def left_domain(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.left)

    @property
    def right_domain(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.right)

    def side_map(self, side: Side) -> dict[int, int]:
        return self.left_map if side is Side.L else self.right_map

    def __call__(self, v: VertexRef) -> VertexRef:
        return VertexRef(v.side, self.side_map(v.side)[v.index])

    def is_total_on(self, G: BipartiteGraph) -> bool:
        return self.left_domain == tuple(range(G.left_count)) and self.right_domain == tuple(range(G.right_count))

    def is_bijection_between(self, G: BipartiteGraph, H: BipartiteGraph) -> bool:
        return (
            self.is_total_on(G)
            and sorted(t for _, t in self.left) == list(range(H.left_count))
            and sorted(t for _, t in self.right) == list(range(H.right_count))
        )

    def compose(self, first: SidedMap) -> SidedMap:
        """``self ∘ first``; defined where ``first``'s image lies in our domain."""
        lm, rm = self.left_map, self.right_map
        try:
            left = {s: lm[t] for s, t in first.left}
            right = {s: rm[t] for s, t in first.right}
        except KeyError as exc:
            raise OutOfRange(f"image vertex {exc.args[0]} outside the domain of the outer map") from None
        return SidedMap.partial(left, right)

    def inverse(self) -> SidedMap:
        return SidedMap.partial({t: s for s, t in self.left}, {t: s for s, t in self.right})

    def extend(self, v: VertexRef, w: int) -> SidedMap:
        side = self.side_map(v.side)
        if v.index in side:
            raise ValueError(f"{v} already in the domain")
        side[v.index] = w
        if v.side is Side.L:
            return SidedMap.partial(side, self.right_map)
        return SidedMap.partial(self.left_map, side)

    def __str__(self) -> str:
        def fmt(pairs):
            return " ".join(f"{s}->{t}" for s, t in pairs)

        return f"L: {fmt(self.left)}\nR: {fmt(self.right)}"


def is_isomorphism(f: SidedMap, G: BipartiteGraph, H: BipartiteGraph) -> bool:
    """True iff ``f`` preserves every cross-type on its domain."""
    rm = f.right
    for a, ta in f.left:
        if ta >= H.left_count:
            return False
        ga, ha = G.rows[a], H.rows[ta]
        for b, tb in rm:
            if tb >= H.right_count:
                return False
            if ((ga >> b) ^ (ha >> tb)) & 1:
                return False
    return True


def find_isomorphisms(G: BipartiteGraph, H: BipartiteGraph) -> list[SidedMap]:
    """All side-preserving isomorphisms ``G -> H`` in lexicographic order.

    Different side sizes give an empty list.  Left vertices are assigned by
    backtracking, pruned by row weight and by the multiset of partial column
    signatures; the right map is then forced up to permuting equal columns.
    """
    m, n = G.shape
    if H.shape != (m, n):
        return []
    if sorted(r.bit_count() for r in G.rows) != sorted(r.bit_count() for r in H.rows):
        return []

    out: list[SidedMap] = []
    perm = [0] * m
    g_w = [r.bit_count() for r in G.rows]
    h_w = [r.bit_count() for r in H.rows]

    def right_maps(sig_g: list[int], sig_h: list[int]) -> Iterator[list[int]]:
        sigma = [0] * n
        used = [False] * n

        def rec(b: int):
            if b == n:
                yield list(sigma)
                return
            for j in range(n):
                if not used[j] and sig_h[j] == sig_g[b]:
                    used[j] = True
                    sigma[b] = j
                    yield from rec(b + 1)
                    used[j] = False

        yield from rec(0)

    def rec_left(a: int, used: int, sig_g: list[int], sig_h: list[int]):
        if a == m:
            for sigma in right_maps(sig_g, sig_h):
                out.append(SidedMap.total(perm, sigma))
            return
        ga = G.rows[a]
        new_g = [s | (((ga >> b) & 1) << a) for b, s in enumerate(sig_g)]
        cg = Counter(new_g)
        for t in range(m):
            if used >> t & 1 or h_w[t] != g_w[a]:
                continue
            ht = H.rows[t]
            new_h = [s | (((ht >> j) & 1) << a) for j, s in enumerate(sig_h)]
            if Counter(new_h) != cg:
                continue
            perm[a] = t
            rec_left(a + 1, used | (1 << t), new_g, new_h)

    rec_left(0, 0, [0] * n, [0] * n)
    return out


def _format_matrix(M: BitMatrix) -> str:
    lines = [f"{M.nrows} {M.ncols}"]
    lines.extend("".join("1" if (r >> b) & 1 else "0" for b in range(M.ncols)) for r in M.rows)
    return "\n".join(lines) + "\n"


def format_graph(G: BitMatrix) -> str:
    """Text form: header ``"m n"`` then ``m`` rows of ``n`` bits, newline-terminated."""
    return _format_matrix(G)


def _parse_decimal(tok: str, line: int, col: int) -> int:
    if not tok or not tok.isascii() or not tok.isdigit():
        raise ParseError(f"expected a decimal count, got {tok!r}", line, col)
    if len(tok) > 1 and tok[0] == "0":
        raise ParseError(f"leading zero in {tok!r}", line, col)
    return int(tok)


def parse_bit_matrix(text: str) -> BitMatrix:
    """Strict parser for the graph text format, returning a bare matrix."""
    if not text:
        raise ParseError("empty input", 1, 1)
    if not text.endswith("\n"):
        nl = text.count("\n")
        raise ParseError("missing final newline", nl + 1, len(text) - (text.rfind("\n") + 1) + 1)
    lines = text[:-1].split("\n")
    header = lines[0]
    parts = header.split(" ")
    if len(parts) != 2:
        raise ParseError("header must be two counts separated by one space", 1, 1)
    m = _parse_decimal(parts[0], 1, 1)
    n = _parse_decimal(parts[1], 1, len(parts[0]) + 2)
    if m == 0:
        raise ParseError("left side is empty", 1, 1)
    if n == 0:
        raise ParseError("right side is empty", 1, len(parts[0]) + 2)
    body = lines[1:]
    if len(body) < m:
        raise ParseError(f"expected {m} rows, found {len(body)}", len(lines) + 1, 1)
    if len(body) > m:
        raise ParseError("unexpected content after last row", m + 2, 1)
    rows = []
    for a, row in enumerate(body):
        lineno = a + 2
        for c, ch in enumerate(row):
            if c >= n:
                raise ParseError(f"row longer than {n} characters", lineno, c + 1)
            if ch not in "01":
                raise ParseError(f"unexpected character {ch!r}", lineno, c + 1)
        if len(row) < n:
            raise ParseError(f"row shorter than {n} characters", lineno, len(row) + 1)
        rows.append(sum(1 << b for b, ch in enumerate(row) if ch == "1"))
    return BitMatrix(m, n, tuple(rows))


def parse_graph(text: str) -> BipartiteGraph:
    M = parse_bit_matrix(text)
    return BipartiteGraph(M.nrows, M.ncols, M.rows)
