"""Seeded sampling, extension-property checks and the SFBSP failure bound.

Bit stream
----------
All randomness comes from SplitMix64 with random access.  With
``GAMMA = 0x9E3779B97F4A7C15`` and arithmetic mod 2**64::

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

    output(seed, k) = mix64(seed + (k + 1) * GAMMA)        # k-th output, k >= 0

The cross-edge ``(a, b)`` reads the top bit of ``output(seed, pos(a, b))``
where ``pos`` is the Rosenberg-Strong pairing
``pos(a, b) = s*s + s + a - b`` with ``s = max(a, b)``.  Position depends
only on ``(a, b)``, so ``sample_graph(m, n, seed)`` is an induced subgraph
of ``sample_graph(m', n', seed)`` whenever ``m <= m'`` and ``n <= n'``.

Per-trial seeds are ``derive_seed(master, i) = mix64(master ^ mix64((i + 1) * GAMMA))``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .errors import NoExtension, ZeroSide
from .graph import BipartiteGraph, SidedMap, Side, VertexRef, is_isomorphism

__all__ = [
    "GAMMA",
    "mix64",
    "stream_output",
    "derive_seed",
    "pair_position",
    "sample_graph",
    "sfbsp_sides",
    "ThetaWitness",
    "check_theta",
    "failure_bound_term",
    "log_failure_bound_term",
    "bound_ratio",
    "dominance_point",
    "bound_tail_sum",
    "analytic_failure_term",
    "ThetaEstimate",
    "estimate_theta_failure",
    "build_chain",
    "theta_stabilization",
    "extend_partial_iso",
    "random_partial_iso",
    "SfbspRow",
    "sfbsp_scan",
    "worker_count",
]

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

T = TypeVar("T")
R = TypeVar("R")


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_output(seed: int, k: int) -> int:
    return mix64(seed + (k + 1) * GAMMA)


def derive_seed(master: int, index: int) -> int:
    return mix64((master & MASK64) ^ mix64((index + 1) * GAMMA))


def pair_position(a: int, b: int) -> int:
    s = max(a, b)
    return s * s + s + a - b


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _bits(m: int, n: int, seed: int) -> np.ndarray:
    a = np.arange(m, dtype=np.uint64)[:, None]
    b = np.arange(n, dtype=np.uint64)[None, :]
    s = np.maximum(a, b)
    pos = s * s + s + a - b
    with np.errstate(over="ignore"):
        state = np.uint64(seed & MASK64) + (pos + np.uint64(1)) * np.uint64(GAMMA)
        out = _mix64_np(state)
    return (out >> np.uint64(63)).astype(np.uint8)


def _rows_from_bits(bits: np.ndarray) -> tuple[int, ...]:
    packed = np.packbits(bits, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def sample_graph(m: int, n: int, seed: int) -> BipartiteGraph:
    """Each cross-type is P1 with probability 1/2, reproducibly in ``(m, n, seed)``."""
    if m < 1 or n < 1:
        raise ZeroSide(f"both sides must be nonempty, got {m}x{n}")
    return BipartiteGraph(m, n, _rows_from_bits(_bits(m, n, seed)))


def sfbsp_sides(total: int) -> tuple[int, int]:
    """Side split of a chain member of the given total size (left gets the extra vertex)."""
    return (total + 1) // 2, total // 2


# ---------------------------------------------------------------- extension property


@dataclass(frozen=True)
class ThetaWitness:
    ok: bool
    side: Side | None = None
    x1: tuple[int, ...] | None = None
    x2: tuple[int, ...] | None = None

    def describe(self) -> str:
        if self.ok:
            return "ok"
        opp = self.side.other.value
        fmt = lambda xs: "{" + ",".join(str(x) for x in xs) + "}"  # noqa: E731
        return (
            f"fails: X1={fmt(self.x1)}, X2={fmt(self.x2)} on side {self.side.value}; "
            f"no vertex on side {opp} is P1 to all of X1 and P2 to all of X2"
        )


def _small_subsets(size: int, k: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for r in range(min(k, size) + 1):
        out.extend(combinations(range(size), r))
    return out


def _as_words(masks: Sequence[int], nbits: int) -> np.ndarray:
    words = max(1, (nbits + 63) // 64)
    arr = np.zeros((len(masks), words), dtype=np.uint64)
    for i, mask in enumerate(masks):
        for w in range(words):
            arr[i, w] = (mask >> (64 * w)) & MASK64
    return arr


def _first_failure(rows: Sequence[int], opp_count: int, k: int):
    """First (X1, X2) in (size, lex) order with no realizing opposite vertex."""
    full = (1 << opp_count) - 1
    subsets = _small_subsets(len(rows), k)
    ones, zeros, members = [], [], []
    for S in subsets:
        m1 = m0 = full
        for x in S:
            m1 &= rows[x]
            m0 &= ~rows[x]
        ones.append(m1)
        zeros.append(m0 & full)
        members.append(sum(1 << x for x in S))
    zeros_w = _as_words(zeros, opp_count)
    members_w = _as_words(members, len(rows))
    for i, S in enumerate(subsets):
        m1 = _as_words([ones[i]], opp_count)[0]
        mem = _as_words([members[i]], len(rows))[0]
        realized = (zeros_w & m1).any(axis=1)
        disjoint = ~(members_w & mem).any(axis=1)
        bad = np.flatnonzero(disjoint & ~realized)
        if bad.size:
            return S, subsets[int(bad[0])]
    return None


def check_theta(G: BipartiteGraph, k: int) -> ThetaWitness:
    """Exhaustive check of the extension property for sets of size at most ``k``.

    Clause order: left-side sets first, then right-side sets.  Pairs
    ``(X1, X2)`` are scanned with X1 outermost, each in (size, lex) order.
    Empty requirements are met by any opposite vertex.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    hit = _first_failure(G.rows, G.ncols, k)
    if hit is not None:
        return ThetaWitness(False, Side.L, hit[0], hit[1])
    cols = [G.column(b) for b in range(G.ncols)]
    hit = _first_failure(cols, G.nrows, k)
    if hit is not None:
        return ThetaWitness(False, Side.R, hit[0], hit[1])
    return ThetaWitness(True)


# ---------------------------------------------------------------- analytic bound


def log_failure_bound_term(m: int, k: int) -> float:
    """``log C_m``, or ``-inf`` when a binomial vanishes."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if m + 1 - k < k:
        return -math.inf
    q = 1.0 - 0.25**k
    return (
        math.log(math.comb(m + 1, k))
        + math.log(math.comb(m + 1 - k, k))
        + (m - 2 * k) * math.log(q)
    )


def failure_bound_term(m: int, k: int) -> float:
    """``C_m = binom(m+1, k) binom(m+1-k, k) (1 - 4**-k)**(m - 2k)``.

    Evaluated as written, including a negative exponent when ``m < 2k``.
    Underflows to 0.0 for very large ``m``; use the log form there.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if m + 1 < k:
        return 0.0
    q = 1.0 - 0.25**k
    return math.comb(m + 1, k) * math.comb(m + 1 - k, k) * q ** (m - 2 * k)


def bound_ratio(m: int, k: int) -> float:
    """``C_{m+1} / C_m`` in closed form, ``(1 - 4**-k) (m + 2) / (m + 2 - 2k)``."""
    if m + 1 < 2 * k:
        raise ValueError(f"C_{m} vanishes for k={k}")
    return (1.0 - 0.25**k) * (m + 2) / (m + 2 - 2 * k)


def dominance_point(k: int) -> int:
    """Least ``m`` from which the term ratio stays below 1."""
    m = 2 * k - 1
    while bound_ratio(m, k) >= 1.0:
        m += 1
    return m


def bound_tail_sum(m0: int, k: int, terms: int) -> float:
    """``sum_{m=m0}^{m0+terms-1} 4 C_m`` plus a rigorous bound on the rest.

    The ratio of consecutive terms decreases towards ``1 - 4**-k``, so past
    the dominance point the tail from ``M`` is at most
    ``4 C_M / (1 - ratio(M))``.  Before it, the tail bound is ``inf``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    partial = sum(4.0 * failure_bound_term(m, k) for m in range(m0, m0 + terms))
    M = m0 + terms
    if M + 1 < 2 * k:
        M = 2 * k - 1  # C_m is zero below this
    r = bound_ratio(M, k)
    if r >= 1.0:
        return math.inf
    tail = 4.0 * math.exp(log_failure_bound_term(M, k)) / (1.0 - r)
    return partial + tail


def analytic_failure_term(n_total: int, k: int) -> float:
    """``4 C_m`` with ``m = n_total // 2``: the summand covering chain sizes ``2m`` and ``2m+1``."""
    return 4.0 * failure_bound_term(n_total // 2, k)


# ---------------------------------------------------------------- Monte Carlo


def worker_count(workers: int | None = None) -> int:
    """Explicit ``workers``, else the THREADS environment variable, else 1."""
    if workers is None:
        env = os.environ.get("THREADS", "").strip()
        workers = int(env) if env else 1
    return max(1, workers)


def _pmap(fn: Callable[[T], R], items: Iterable[T], workers: int | None) -> list[R]:
    items = list(items)
    w = worker_count(workers)
    if w == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ThetaEstimate:
    rate: float
    ci95: float
    failures: int
    trials: int


def estimate_theta_failure(n_total: int, k: int, trials: int, seed: int, workers: int | None = None) -> ThetaEstimate:
    """Fraction of sampled chain-shaped graphs failing the extension property."""
    if n_total < 2:
        raise ZeroSide(f"total size {n_total} leaves a side empty")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    m, n = sfbsp_sides(n_total)

    def one(i: int) -> bool:
        return not check_theta(sample_graph(m, n, derive_seed(seed, i)), k).ok

    failures = sum(_pmap(one, range(trials), workers))
    rate = failures / trials
    ci95 = 1.96 * math.sqrt(rate * (1.0 - rate) / trials)
    return ThetaEstimate(rate, ci95, failures, trials)


@dataclass(frozen=True)
class SfbspRow:
    n_total: int
    m_left: int
    n_right: int
    empirical_rate: float
    ci95: float
    analytic_term: float

    @property
    def within_bound(self) -> bool:
        return self.empirical_rate <= min(1.0, self.analytic_term) + 3.0 * self.ci95

    def to_record(self) -> dict:
        return {
            "n_total": self.n_total,
            "m_left": self.m_left,
            "n_right": self.n_right,
            "empirical_rate": self.empirical_rate,
            "ci95": self.ci95,
            "analytic_term": self.analytic_term,
            "within_bound": self.within_bound,
        }


def sfbsp_scan(k: int, sizes: Sequence[int], trials: int, seed: int, workers: int | None = None) -> list[SfbspRow]:
    rows = []
    for i, n_total in enumerate(sizes):
        est = estimate_theta_failure(n_total, k, trials, derive_seed(seed, n_total), workers)
        m, n = sfbsp_sides(n_total)
        rows.append(SfbspRow(n_total, m, n, est.rate, est.ci95, analytic_failure_term(n_total, k)))
    return rows


# ---------------------------------------------------------------- chains


def build_chain(max_size: int, seed: int) -> list[BipartiteGraph]:
    """``[Γ_2, Γ_3, ..., Γ_max_size]``; ``Γ_i`` has ``i`` vertices split by :func:`sfbsp_sides`."""
    if max_size < 2:
        raise ValueError("max_size must be at least 2")
    m, n = sfbsp_sides(max_size)
    top = sample_graph(m, n, seed)
    chain = []
    for i in range(2, max_size + 1):
        mi, ni = sfbsp_sides(i)
        chain.append(top.submatrix(range(mi), range(ni)))
    return chain


def theta_stabilization(chain: Sequence[BipartiteGraph], k: int, run: int = 20) -> tuple[int | None, bool]:
    """First chain size starting ``run`` consecutive Θ_k successes, and whether Θ_k then holds to the end.

    Chain index ``i`` is taken to be size ``i + 2``, as produced by :func:`build_chain`.
    """
    ok = [check_theta(G, k).ok for G in chain]
    streak = 0
    for i, good in enumerate(ok):
        streak = streak + 1 if good else 0
        if streak == run:
            start = i - run + 1
            return start + 2, all(ok[start:])
    return None, False


# ---------------------------------------------------------------- back and forth


def extend_partial_iso(G: BipartiteGraph, f: SidedMap, v: VertexRef) -> SidedMap:
    """Extend the partial automorphism ``f`` of ``G`` to ``v`` with the least usable image."""
    if not is_isomorphism(f, G, G):
        raise ValueError("f is not a partial isomorphism of G")
    own = f.side_map(v.side)
    if v.index in own:
        raise ValueError(f"{v} is already in the domain")
    if not 0 <= v.index < G.side_count(v.side):
        raise ValueError(f"{v} is not a vertex of G")
    used = set(own.values())
    if v.side is Side.L:
        vrow = G.rows[v.index]
        wanted = [((vrow >> b) & 1, tb) for b, tb in f.right]
        for w in range(G.left_count):
            if w in used:
                continue
            wrow = G.rows[w]
            if all(((wrow >> tb) & 1) == bit for bit, tb in wanted):
                return f.extend(v, w)
    else:
        wanted = [((G.rows[a] >> v.index) & 1, ta) for a, ta in f.left]
        for w in range(G.right_count):
            if w in used:
                continue
            if all(((G.rows[ta] >> w) & 1) == bit for bit, ta in wanted):
                return f.extend(v, w)
    raise NoExtension(f"no unused vertex on side {v.side.value} matches the cross-types of {v}")


def random_partial_iso(G: BipartiteGraph, left_size: int, right_size: int, rng: np.random.Generator) -> SidedMap:
    """Random partial automorphism of ``G`` with the given domain sizes.

    Domain vertices are drawn at random and each image is drawn uniformly
    from the images that keep the map a partial isomorphism.
    """
    order = [VertexRef(Side.L, int(a)) for a in rng.choice(G.left_count, left_size, replace=False)]
    order += [VertexRef(Side.R, int(b)) for b in rng.choice(G.right_count, right_size, replace=False)]
    rng.shuffle(order)
    f = SidedMap.partial()
    for v in order:
        used = set(f.side_map(v.side).values())
        options = [w for w in range(G.side_count(v.side)) if w not in used and is_isomorphism(f.extend(v, w), G, G)]
        if not options:
            raise NoExtension(f"no admissible image for {v}")
        f = f.extend(v, options[int(rng.integers(len(options)))])
    return f
