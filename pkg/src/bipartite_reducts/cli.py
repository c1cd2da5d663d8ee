"""Command-line front door.

Exit status: 0 on success or agreement, 1 on a property violation or oracle
discrepancy, 2 on usage errors (bad flags, unreadable or malformed files).
The effective configuration is echoed to stderr as one ``# config`` line so
stdout stays a clean report (or graph file, for ``sample`` without ``-o``).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from .analysis import format_trace, mn_analysis
from .classify import classification_report, decompose
from .errors import DuplicateTarget, NotDecomposable, NotInSLR, OutOfRange, ParseError, ReductError, TooSmall
from .graph import BipartiteGraph, SidedMap, format_graph, parse_bit_matrix, parse_graph
from .oracle import verify_equivalence
from .random_lab import check_theta, sample_graph, sfbsp_scan, worker_count
from .switching import FlipMatrix, flip_matrix, format_pattern

__all__ = ["main", "run", "parse_map_file", "parse_map_text", "parse_seed"]

USAGE_ERROR = 2
VIOLATION = 1

_PAIR = re.compile(r"(\d+)->(\d+)")


def parse_seed(text: str) -> int:
    """Decimal or ``0x`` hexadecimal, reduced to 64 bits."""
    t = text.strip().lower()
    try:
        value = int(t, 16) if t.startswith("0x") else int(t, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if value < 0 or value >= 1 << 64:
        raise argparse.ArgumentTypeError(f"seed {text!r} is outside 0..2**64-1")
    return value


def _parse_side_line(line: str, tag: str, lineno: int) -> dict[int, int]:
    if not line.startswith(tag):
        raise ParseError(f"expected line to start with {tag!r}", lineno, 1)
    pairs: dict[int, int] = {}
    targets: dict[int, int] = {}
    col = len(tag) + 1
    rest = line[len(tag):]
    pos = 0
    while pos < len(rest):
        if rest[pos] == " ":
            pos += 1
            continue
        m = _PAIR.match(rest, pos)
        if m is None:
            raise ParseError("expected 'source->target'", lineno, col + pos)
        s, t = int(m.group(1)), int(m.group(2))
        if s in pairs:
            raise ParseError(f"source {s} listed twice", lineno, col + pos)
        if t in targets:
            raise DuplicateTarget(f"line {lineno}: {targets[t]} and {s} both map to {t}")
        pairs[s] = t
        targets[t] = s
        pos = m.end()
        if pos < len(rest) and rest[pos] != " ":
            raise ParseError("pairs must be separated by spaces", lineno, col + pos)
    return pairs


def parse_map_text(text: str, source: BipartiteGraph | None = None, target: BipartiteGraph | None = None) -> SidedMap:
    """Parse ``"L: a->b ...\\nR: c->d ..."`` into a validated map."""
    if not text.strip():
        raise ParseError("empty map file", 1, 1)
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 2:
        raise ParseError(f"expected an 'L:' line and an 'R:' line, found {len(lines)} lines", min(len(lines), 3), 1)
    left = _parse_side_line(lines[0], "L:", 1)
    right = _parse_side_line(lines[1], "R:", 2)
    f = SidedMap.partial(left, right)
    for G, idx, name in ((source, 0, "source"), (target, 1, "target")):
        if G is None:
            continue
        for s, t in f.left:
            if (s, t)[idx] >= G.left_count:
                raise OutOfRange(f"left index {(s, t)[idx]} outside the {name} graph")
        for s, t in f.right:
            if (s, t)[idx] >= G.right_count:
                raise OutOfRange(f"right index {(s, t)[idx]} outside the {name} graph")
    return f


def parse_map_file(path: str | Path, source: BipartiteGraph | None = None, target: BipartiteGraph | None = None) -> SidedMap:
    return parse_map_text(Path(path).read_text(encoding="ascii"), source, target)


def _read_graph(path: str) -> BipartiteGraph:
    return parse_graph(Path(path).read_text(encoding="ascii"))


def _emit(records: bool, text: str, recs: Sequence[dict]) -> None:
    if records:
        for r in recs:
            sys.stdout.write(json.dumps(r, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)


def _cmd_sample(args) -> int:
    G = sample_graph(args.m, args.n, args.seed)
    if args.output:
        Path(args.output).write_text(format_graph(G), encoding="ascii")
        _emit(args.records, f"wrote {args.m}x{args.n} graph to {args.output}\n", [{"record": "sample", "m": args.m, "n": args.n, "seed": args.seed, "path": args.output}])
    else:
        sys.stdout.write(format_graph(G))
    return 0


def _cmd_theta(args) -> int:
    G = _read_graph(args.file)
    w = check_theta(G, args.k)
    rec = {"record": "theta", "k": args.k, "ok": w.ok}
    if not w.ok:
        rec.update(side=w.side.value, X1=list(w.x1), X2=list(w.x2))
    _emit(args.records, f"theta_{args.k}: {w.describe()}\n", [rec])
    return 0 if w.ok else VIOLATION


def _load_triple(args):
    G = _read_graph(args.source)
    H = _read_graph(args.target)
    f = parse_map_file(args.map, G, H)
    return f, G, H


def _cmd_classify(args) -> int:
    f, G, H = _load_triple(args)
    rep = classification_report(flip_matrix(f, G, H))
    _emit(args.records, rep.to_text(), [dict(record="classification", **rep.to_record())])
    return 0


def _cmd_decompose(args) -> int:
    M = parse_bit_matrix(Path(args.flip).read_text(encoding="ascii"))
    E = FlipMatrix(M.nrows, M.ncols, M.rows)
    try:
        d = decompose(E)
    except NotDecomposable as exc:
        rec = {"record": "decomposition", "decomposable": False, "certificate": list(exc.minor)}
        a, a2, b, b2 = exc.minor
        _emit(args.records, f"not decomposable: odd minor rows {a},{a2} columns {b},{b2}\n", [rec])
        return VIOLATION
    pat = format_pattern(d.pattern)
    rec = {"record": "decomposition", "decomposable": True, "global_exchange": d.global_exchange, "pattern": pat}
    _emit(args.records, f"global_exchange: {str(d.global_exchange).lower()}\npattern: {pat}\n", [rec])
    return 0


def _cmd_analyze(args) -> int:
    f, G, H = _load_triple(args)
    try:
        trace = mn_analysis(f, G, H, args.m, args.n)
    except (NotInSLR, TooSmall) as exc:
        kind = type(exc).__name__
        _emit(args.records, f"{kind}: {exc}\n", [{"record": "analysis_error", "error": kind, "message": str(exc)}])
        return VIOLATION
    sys.stdout.write(format_trace(trace, records=args.records))
    return 0 if trace.final_check else VIOLATION


def _cmd_oracle(args) -> int:
    rep = verify_equivalence(args.max_left, args.max_right)
    _emit(args.records, rep.to_text(), rep.to_records())
    return 0 if rep.ok else VIOLATION


def _cmd_sfbsp(args) -> int:
    rows = sfbsp_scan(args.k, args.sizes, args.trials, args.seed)
    header = f"{'n_total':>8}{'m_left':>8}{'n_right':>8}{'empirical_rate':>16}{'ci95':>10}{'analytic_term':>16}"
    lines = [f"SFBSP scan: k={args.k}, trials={args.trials}", header]
    for r in rows:
        lines.append(
            f"{r.n_total:>8}{r.m_left:>8}{r.n_right:>8}{r.empirical_rate:>16.6f}{r.ci95:>10.6f}{r.analytic_term:>16.6g}"
        )
    bad = [r for r in rows if not r.within_bound]
    lines.append("bound respected at every size" if not bad else f"bound exceeded at sizes {[r.n_total for r in bad]}")
    _emit(args.records, "\n".join(lines) + "\n", [dict(record="sfbsp", **r.to_record()) for r in rows])
    return VIOLATION if bad else 0


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes or any(s < 2 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be a comma list of integers >= 2")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bireduct", description="Side-preserving reducts of the random bipartite graph at finite scale.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--records", action="store_true", help="emit line-delimited JSON records")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="sample a random bipartite graph")
    s.add_argument("-m", type=_positive, required=True)
    s.add_argument("-n", type=_positive, required=True)
    s.add_argument("--seed", type=parse_seed, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_sample)

    s = sub.add_parser("theta", parents=[common], help="check the extension property")
    s.add_argument("-k", type=_positive, required=True)
    s.add_argument("file")
    s.set_defaults(func=_cmd_theta)

    for name, func, helptext in (
        ("classify", _cmd_classify, "classify a side-preserving map"),
        ("analyze", _cmd_analyze, "(m x n)-analysis of a map"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--source", required=True)
        s.add_argument("--target", required=True)
        s.add_argument("--map", required=True)
        if name == "analyze":
            s.add_argument("-m", type=int, required=True)
            s.add_argument("-n", type=int, required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("decompose", parents=[common], help="decompose a flip matrix")
    s.add_argument("--flip", required=True)
    s.set_defaults(func=_cmd_decompose)

    s = sub.add_parser("oracle", parents=[common], help="exhaustive oracle/classifier agreement")
    s.add_argument("--max-left", type=_positive, required=True)
    s.add_argument("--max-right", type=_positive, required=True)
    s.set_defaults(func=_cmd_oracle)

    s = sub.add_parser("sfbsp", parents=[common], help="Monte Carlo extension failure vs the analytic bound")
    s.add_argument("-k", type=_positive, required=True)
    s.add_argument("--sizes", type=_sizes, required=True)
    s.add_argument("--trials", type=_positive, default=1000)
    s.add_argument("--seed", type=parse_seed, default=0)
    s.set_defaults(func=_cmd_sfbsp)
    return p


def _echo_config(args) -> None:
    items = {k: v for k, v in vars(args).items() if k != "func"}
    items["threads"] = worker_count()
    body = " ".join(f"{k}={json.dumps(items[k], separators=(',', ':'))}" for k in sorted(items))
    sys.stderr.write(f"# config {body}\n")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    _echo_config(args)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"error: malformed input: {exc}\n")
        return USAGE_ERROR
    except (OSError, DuplicateTarget, OutOfRange, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR
    except ReductError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return VIOLATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
