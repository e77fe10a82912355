"""Command-line entry point.

Exit codes: 0 computed, 1 property violated (or a pattern was found under
``--expect-free``), 2 usage, format or budget error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .containment import MODES, UNORDERED, OccurrenceQuery, enumerate_occurrences, find_occurrence
from .core import FormatError, Pattern, SymbolMatrix, expand_wildcards, format_matrix, parse_matrix, parse_pattern
from .editing import (
    DEFAULT_BUDGET,
    BudgetError,
    extremal_f,
    merge_smallest_classes,
    min_edit_distance,
    theoretical_bound,
)
from .graphs import EXHAUSTIVE, EXHAUSTIVE_MAX_VERTICES, SAMPLED, is_epsilon_regular, to_coloring
from .harness import ExperimentConfig, corollary3_sweep, estimate_f_monte_carlo, random_coloring

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_matrix(args) -> SymbolMatrix:
    try:
        return parse_matrix(_read(args.matrix), args.s)
    except FormatError as e:
        raise UsageError(f"{args.matrix}: {e}") from None


def _load_patterns(args) -> tuple[Pattern, ...]:
    try:
        P = parse_pattern(_read(args.pattern))
    except FormatError as e:
        raise UsageError(f"{args.pattern}: {e}") from None
    return expand_wildcards(P)


def _emit(args, payload: dict | list, table: str) -> None:
    if args.format == "json":
        records = payload if isinstance(payload, list) else [payload]
        text = "\n".join(json.dumps(r) for r in records)
    else:
        text = table
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n")
    else:
        print(text)


def _grid(entries) -> str:
    return "\n".join("  " + " ".join(str(x) for x in row) for row in entries)


def cmd_contains(args) -> int:
    M = _load_matrix(args)
    found = []
    for P in _load_patterns(args):
        q = OccurrenceQuery(P, M, mode=args.mode_inj, limit=args.limit)
        occs = enumerate_occurrences(q) if args.all else [o for o in [find_occurrence(q)] if o]
        found.extend((P, o) for o in occs)
    lines = ["verdict: " + ("contains" if found else "free")]
    for P, o in found:
        d = o.to_dict()
        lines.append(f"rows {d['row_map']} cols {d['col_map']} classes {d['class_symbol']}")
        lines.append(_grid([[M[i, j] for j in o.col_map] for i in o.row_map]))
    # header record, then one record per occurrence
    payload = [{"verdict": "contains" if found else "free", "count": len(found)}]
    payload += [o.to_dict() for _, o in found]
    _emit(args, payload, "\n".join(lines))
    return EXIT_VIOLATION if (found and args.expect_free) else EXIT_OK


def cmd_edit(args) -> int:
    M = _load_matrix(args)
    plan = min_edit_distance(M, _load_patterns(args), budget=args.budget, mode=args.mode_inj)
    tag = "exact" if plan.exact else f"bracket [{plan.lower_bound}, {plan.upper_bound}]"
    table = f"cost: {plan.cost} ({tag})\n" + "\n".join(
        f"  ({i + 1},{j + 1}) -> {v}" for i, j, v in plan.edits
    ) + "\nresult:\n" + _grid(plan.result.entries)
    _emit(args, plan.to_dict(), table)
    return EXIT_OK


def cmd_destroy(args) -> int:
    M = _load_matrix(args)
    patterns = _load_patterns(args)
    r = args.r or min(p.num_classes for p in patterns)
    if r > M.max_symbols:
        raise UsageError(f"r={r} exceeds s={M.max_symbols}; no such pattern can occur")
    plan = merge_smallest_classes(M, r)
    for P in patterns:
        if find_occurrence(OccurrenceQuery(P, plan.result)) is not None:
            print("error: merged matrix still contains the pattern", file=sys.stderr)
            return EXIT_VIOLATION
    bound = theoretical_bound(M.rows, M.cols, M.max_symbols, r)
    payload = plan.to_dict() | {"bound": str(bound)}
    table = f"cost: {plan.cost} (bound {bound})\nresult:\n" + _grid(plan.result.entries)
    _emit(args, payload, table)
    return EXIT_VIOLATION if plan.cost > bound else EXIT_OK


def cmd_extremal(args) -> int:
    patterns = _load_patterns(args)
    rep = extremal_f(args.m, args.n, args.s, patterns, mode=args.mode_inj)
    table = (
        f"f({args.m},{args.n};{args.s}) = {rep.f_value}  (upper bound {rep.upper_bound}, "
        f"{rep.representatives} orbit representatives)\nwitness:\n" + _grid(rep.witness_matrix.entries)
    )
    _emit(args, rep.to_dict(), table)
    return EXIT_OK if rep.f_value <= rep.upper_bound else EXIT_VIOLATION


def cmd_bound(args) -> int:
    b = theoretical_bound(args.m, args.n, args.s, args.r)
    text = str(b.numerator) if b.denominator == 1 else f"{b.numerator}/{b.denominator}"
    _emit(args, {"bound": text}, text)
    return EXIT_OK


def cmd_regcheck(args) -> int:
    M = _load_matrix(args)
    C = to_coloring(M)
    method = args.mode
    if method == "exact":
        method = EXHAUSTIVE
    elif method == "auto":
        method = EXHAUSTIVE if M.rows + M.cols <= EXHAUSTIVE_MAX_VERTICES else SAMPLED
    colors = [args.color] if args.color else range(1, M.max_symbols + 1)
    verdicts = [
        is_epsilon_regular(C, c, args.epsilon, method=method, sample_budget=args.samples, seed=args.seed)
        for c in colors
    ]
    lines = []
    for v in verdicts:
        d = v.to_dict()
        status = "regular" if v.regular else "IRREGULAR"
        if not v.definitive:
            status += " (not definitive)"
        lines.append(f"color {v.color}: density {d['density']} {status}")
        if d["witness"]:
            w = d["witness"]
            lines.append(f"  witness X'={w['left_subset']} Y'={w['right_subset']} density {w['density']}")
    _emit(args, {"verdicts": [v.to_dict() for v in verdicts]}, "\n".join(lines))
    return EXIT_OK


def cmd_random(args) -> int:
    M = random_coloring(args.m, args.n, args.s, args.seed)
    text = format_matrix(M).rstrip("\n")
    _emit(args, {"m": M.rows, "n": M.cols, "s": M.max_symbols, "entries": [list(r) for r in M.entries]}, text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    patterns = _load_patterns(args)
    sizes = tuple((k, k) for k in args.sizes) if args.sizes else ()
    cfg = ExperimentConfig(
        args.m or 0, args.n or 0, args.s, patterns, args.trials, args.seed, args.budget, sizes,
        ilp_time_limit=args.ilp_time_limit,
    )
    if not cfg.sizes and not (cfg.m and cfg.n):
        raise UsageError("give --m and --n, or --sizes")
    rep = estimate_f_monte_carlo(cfg)
    lines = [f"{'size':>7} {'mean_lo':>8} {'mean_up':>8} {'exact':>5} {'lo/mn':>7} {'up/mn':>7} bound"]
    for row in rep.rows:
        lines.append(
            f"{row.m:>3}x{row.n:<3} {row.mean_lower:8.3f} {row.mean_upper:8.3f} {row.exact_count:5d} "
            f"{row.ratio_lower:7.4f} {row.ratio_upper:7.4f} {row.bound}"
        )
    _emit(args, rep.to_dict(), "\n".join(lines))
    b = rep.rows[0].bound.split("/")
    limit = int(b[0]) / int(b[1])
    ok = all(row.mean_lower <= row.mean_upper and row.ratio_upper <= limit for row in rep.rows)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_corollary3(args) -> int:
    seeds = args.seeds or [args.seed]
    entries = corollary3_sweep(args.m, args.n, args.s, args.side, seeds)
    lines = [f"seed {e.seed}: {e.targets - e.missing_count}/{e.targets} occur, {e.missing_count} missing" for e in entries]
    payload = {"entries": [{"seed": e.seed, "targets": e.targets, "missing": e.missing} for e in entries]}
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matavoid", description="Forbidden patterns in symbol matrices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matrix=False, pattern=False):
        p.add_argument("--format", choices=("table", "json"), default="table")
        p.add_argument("--output", help="write the report here instead of stdout")
        if matrix:
            p.add_argument("--matrix", required=True, help="matrix file ('-' for stdin)")
            p.add_argument("--s", type=int, help="alphabet size (default: largest entry)")
        if pattern:
            p.add_argument("--pattern", required=True, help="pattern file; '*' cells are wildcards")
            p.add_argument("--injection", dest="mode_inj", choices=MODES, default=UNORDERED)

    p = sub.add_parser("contains", help="does the matrix contain the pattern?")
    common(p, matrix=True, pattern=True)
    p.add_argument("--all", action="store_true", help="list every occurrence")
    p.add_argument("--limit", type=int)
    p.add_argument("--expect-free", action="store_true", help="exit 1 if the pattern occurs")
    p.set_defaults(func=cmd_contains)

    p = sub.add_parser("edit", help="minimum number of entry changes")
    common(p, matrix=True, pattern=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node budget")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("destroy", help="merge-smallest-classes plan")
    common(p, matrix=True, pattern=True)
    p.add_argument("--r", type=int, help="class count (default: from the pattern)")
    p.set_defaults(func=cmd_destroy)

    p = sub.add_parser("extremal", help="exact f(m,n;s,P) at tiny sizes")
    common(p, pattern=True)
    for name in ("m", "n", "s"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("bound", help="((s-r+1)/s)*m*n")
    common(p)
    for name in ("m", "n", "s", "r"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("regcheck", help="epsilon-regularity of each color")
    common(p, matrix=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--color", type=int)
    p.add_argument("--mode", choices=("exact", "sampled", "auto"), default="auto")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_regcheck)

    p = sub.add_parser("random", help="seeded uniform random matrix")
    common(p)
    for name in ("m", "n", "s"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("experiment", help="Monte Carlo edit-distance trend")
    common(p, pattern=True)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--sizes", type=int, nargs="+", help="square sizes to sweep")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--ilp-time-limit", type=float, default=60.0)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("corollary3", help="which K_{l,l} colorings occur in random colorings")
    common(p)
    for name in ("m", "n", "s"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--side", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, nargs="+")
    p.set_defaults(func=cmd_corollary3)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, BudgetError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
