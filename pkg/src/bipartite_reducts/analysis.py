"""Staged (m x n)-analysis of a finite side-preserving map.

The existential Ramsey step is replaced by an exact search for an m x n
block on which the flip matrix is constant (the uniform core).  After an
optional global exchange the core is preserved, and every remaining vertex
is peeled off in canonical order as either an automorphism step or a
single-vertex switch, read off the GF(2) decomposition of the flip matrix.

Replay model: undoing a stage's switch is modelled as switching the current
target graph at the image of the stage vertex, keeping the vertex map fixed.
The automorphism part of each step does not change any flip bit and is not
tracked.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations

from .classify import preserves_2x2_parity
from .errors import NotFound, NotInSLR, TooSmall
from .graph import BipartiteGraph, SidedMap, Side, VertexRef
from .switching import SwitchPattern, apply_switch, flip_matrix

__all__ = [
    "Polarity",
    "StageKind",
    "GlobalPrefix",
    "AnalysisStage",
    "AnalysisTrace",
    "UniformCore",
    "find_uniform_subset",
    "mn_analysis",
    "verify_trace",
    "trace_to_records",
    "trace_from_records",
    "format_trace",
]


class Polarity(enum.Enum):
    PRESERVED = "PRESERVED"
    FLIPPED = "FLIPPED"


class StageKind(enum.Enum):
    ISO = "ISO"
    SWITCH_VERTEX = "SWITCH_VERTEX"


class GlobalPrefix(enum.Enum):
    IDENTITY = "IDENTITY"
    EXCHANGE = "EXCHANGE"


@dataclass(frozen=True)
class UniformCore:
    left: tuple[int, ...]
    right: tuple[int, ...]
    polarity: Polarity


@dataclass(frozen=True)
class AnalysisStage:
    kind: StageKind
    vertex: VertexRef | None
    witness_left: tuple[int, ...]
    witness_right: tuple[int, ...]

    def __post_init__(self):
        if (self.kind is StageKind.SWITCH_VERTEX) != (self.vertex is not None):
            raise ValueError("a vertex is required exactly for SWITCH_VERTEX stages")

    def witness_contains(self, v: VertexRef) -> bool:
        return v.index in (self.witness_left if v.side is Side.L else self.witness_right)


@dataclass(frozen=True)
class AnalysisTrace:
    m: int
    n: int
    global_prefix: GlobalPrefix
    stages: tuple[AnalysisStage, ...] = field(default_factory=tuple)
    final_check: bool = False

    @property
    def switch_count(self) -> int:
        return sum(1 for s in self.stages if s.kind is StageKind.SWITCH_VERTEX)


def _search_block(rows: tuple[int, ...], ncols: int, m: int, n: int, value: int):
    """Lexicographically least (row set, column set) of an all-``value`` m x n block."""
    full = (1 << ncols) - 1
    for rs in combinations(range(len(rows)), m):
        ok = full
        for a in rs:
            ok &= rows[a] if value else ~rows[a]
            if (ok & full).bit_count() < n:
                break
        ok &= full
        if ok.bit_count() >= n:
            cs = [b for b in range(ncols) if ok >> b & 1][:n]
            return rs, tuple(cs)
    return None


def find_uniform_subset(f: SidedMap, G: BipartiteGraph, H: BipartiteGraph, m: int, n: int) -> UniformCore:
    """m left and n right domain vertices on which ``f`` either keeps or flips every cross-type.

    PRESERVED is tried first; within a polarity the lexicographically least
    (left set, right set) wins.  Raises NotFound if no such block exists.
    """
    E = flip_matrix(f, G, H)
    ldom, rdom = f.left_domain, f.right_domain
    if m < 1 or n < 1 or m > E.nrows or n > E.ncols:
        raise NotFound(f"no {m}x{n} block inside a {E.nrows}x{E.ncols} domain")
    for value, polarity in ((0, Polarity.PRESERVED), (1, Polarity.FLIPPED)):
        hit = _search_block(E.rows, E.ncols, m, n, value)
        if hit is not None:
            rs, cs = hit
            return UniformCore(tuple(ldom[i] for i in rs), tuple(rdom[j] for j in cs), polarity)
    raise NotFound(f"flip matrix has no constant {m}x{n} block")


def _witness(core: UniformCore, v: VertexRef, m: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if v.side is Side.L:
        return tuple(sorted(core.left[: m - 1] + (v.index,))), core.right[:n]
    return core.left[:m], tuple(sorted(core.right[: n - 1] + (v.index,)))


def mn_analysis(f: SidedMap, G: BipartiteGraph, H: BipartiteGraph, m: int, n: int) -> AnalysisTrace:
    """Build a verified staged analysis of ``f : G -> H``.

    Raises TooSmall when ``m, n <= 2``, ``f`` is not total on ``G``, the
    domain is smaller than ``m x n``, or no constant m x n core exists (the
    domain is below the Ramsey threshold for this map).  Raises NotInSLR when
    the flip matrix has an odd 2x2 minor.
    """
    if m <= 2 or n <= 2:
        raise TooSmall(f"analysis needs m, n > 2, got m={m}, n={n}")
    if not f.is_total_on(G):
        raise TooSmall("the map must be total on the source graph")
    if G.left_count < m or G.right_count < n:
        raise TooSmall(f"domain {G.left_count}x{G.right_count} is smaller than {m}x{n}")
    E = flip_matrix(f, G, H)
    if not preserves_2x2_parity(E):
        raise NotInSLR("flip matrix has an odd 2x2 minor")
    try:
        core = find_uniform_subset(f, G, H, m, n)
    except NotFound as exc:
        raise TooSmall(f"no uniform {m}x{n} core: {exc}") from None

    exchange = core.polarity is Polarity.FLIPPED
    full = E.full_row
    rows = [r ^ full for r in E.rows] if exchange else list(E.rows)
    # decomposition anchored at the core, so every core vertex gets bit 0
    a0, b0 = core.left[0], core.right[0]
    lam = [(r >> b0) & 1 for r in rows]
    rho = rows[a0]

    core_l, core_r = set(core.left), set(core.right)
    stages = []
    for a in range(G.left_count):
        if a not in core_l:
            v = VertexRef(Side.L, a)
            stages.append(_stage(lam[a], v, core, m, n))
    for b in range(G.right_count):
        if b not in core_r:
            v = VertexRef(Side.R, b)
            stages.append(_stage(rho >> b & 1, v, core, m, n))

    prefix = GlobalPrefix.EXCHANGE if exchange else GlobalPrefix.IDENTITY
    trace = AnalysisTrace(m, n, prefix, tuple(stages), True)
    ok = _replay(trace, f, G, H)
    return AnalysisTrace(m, n, prefix, tuple(stages), ok)


def _stage(bit: int, v: VertexRef, core: UniformCore, m: int, n: int) -> AnalysisStage:
    wl, wr = _witness(core, v, m, n)
    if bit:
        return AnalysisStage(StageKind.SWITCH_VERTEX, v, wl, wr)
    return AnalysisStage(StageKind.ISO, None, wl, wr)


def _replay(trace: AnalysisTrace, f: SidedMap, G: BipartiteGraph, H: BipartiteGraph) -> bool:
    """Check all three conditions by direct cross-type comparison."""
    lm, rm = f.left_map, f.right_map
    K = H.complement() if trace.global_prefix is GlobalPrefix.EXCHANGE else H
    for stage in trace.stages:
        wl, wr = stage.witness_left, stage.witness_right
        if len(wl) != trace.m or len(wr) != trace.n:
            return False
        if any(a not in lm for a in wl) or any(b not in rm for b in wr):
            return False
        v = stage.vertex
        if v is not None and not stage.witness_contains(v):
            return False
        # the composite restricted to Y_j must agree with the stage map there
        for a in wl:
            ga, ka = G.rows[a], K.rows[lm[a]]
            for b in wr:
                changed = ((ga >> b) ^ (ka >> rm[b])) & 1
                expected = 0
                if v is not None:
                    expected = int((v.side is Side.L and v.index == a) or (v.side is Side.R and v.index == b))
                if changed != expected:
                    return False
        if v is not None:
            target = VertexRef(v.side, (lm if v.side is Side.L else rm)[v.index])
            K = apply_switch(K, SwitchPattern.single(K.left_count, K.right_count, target))
    for a, ta in f.left:
        ga, ka = G.rows[a], K.rows[ta]
        for b, tb in f.right:
            if ((ga >> b) ^ (ka >> tb)) & 1:
                return False
    return True


def verify_trace(trace: AnalysisTrace, f: SidedMap, G: BipartiteGraph, H: BipartiteGraph) -> bool:
    """Independently replay ``trace`` against ``f``; False on any violated condition."""
    try:
        ok = _replay(trace, f, G, H)
    except (KeyError, IndexError, ValueError):
        return False
    return ok and trace.final_check


def trace_to_records(trace: AnalysisTrace) -> list[dict]:
    records: list[dict] = [
        {
            "record": "header",
            "m": trace.m,
            "n": trace.n,
            "global_prefix": trace.global_prefix.value,
            "final_check": trace.final_check,
        }
    ]
    for i, s in enumerate(trace.stages):
        records.append(
            {
                "record": "stage",
                "stage": i,
                "kind": s.kind.value,
                "vertex": str(s.vertex) if s.vertex is not None else None,
                "Y_left": list(s.witness_left),
                "Y_right": list(s.witness_right),
            }
        )
    return records


def trace_from_records(records: list[dict]) -> AnalysisTrace:
    head, *rest = records
    if head.get("record") != "header":
        raise ValueError("first record must be the trace header")
    stages = []
    for i, r in enumerate(rest):
        if r.get("record") != "stage" or r.get("stage") != i:
            raise ValueError(f"stage record {i} out of order")
        v = VertexRef.parse(r["vertex"]) if r["vertex"] is not None else None
        stages.append(AnalysisStage(StageKind(r["kind"]), v, tuple(r["Y_left"]), tuple(r["Y_right"])))
    return AnalysisTrace(head["m"], head["n"], GlobalPrefix(head["global_prefix"]), tuple(stages), head["final_check"])


def format_trace(trace: AnalysisTrace, records: bool = False) -> str:
    if records:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in trace_to_records(trace))
    lines = [
        f"({trace.m}x{trace.n})-analysis",
        f"global_prefix: {trace.global_prefix.value}",
        f"stages: {len(trace.stages)} ({trace.switch_count} switches)",
    ]
    for i, s in enumerate(trace.stages):
        v = str(s.vertex) if s.vertex is not None else "-"
        yl = ",".join(map(str, s.witness_left))
        yr = ",".join(map(str, s.witness_right))
        lines.append(f"  {i:3d} {s.kind.value:<13} {v:<5} Y=L{{{yl}}} R{{{yr}}}")
    lines.append(f"final_check: {str(trace.final_check).lower()}")
    return "\n".join(lines) + "\n"
