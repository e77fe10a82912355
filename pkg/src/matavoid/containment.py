"""Finding patterns inside symbol matrices.

The search picks matrix rows for the pattern rows first, then matrix columns
for the pattern columns, binding each class to a symbol the first time one of
its cells is placed. A class may only bind a symbol no other class holds, so
the cross-class inequality is enforced while searching rather than filtered
afterwards.

Two injection policies are supported. ``UNORDERED`` (the default) allows any
injection of pattern rows/columns into matrix rows/columns; ``ORDERED``
requires them to be increasing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .core import MAX_PATTERN_SHAPE, Occurrence, Pattern, SymbolMatrix

UNORDERED = "unordered"
ORDERED = "ordered"
MODES = (UNORDERED, ORDERED)


@dataclass(frozen=True)
class OccurrenceQuery:
    pattern: Pattern
    matrix: SymbolMatrix
    limit: int | None = None
    mode: str = UNORDERED

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.pattern.is_concrete:
            raise ValueError("pattern has wildcards; expand it with expand_wildcards() and query each member")
        if self.limit is not None and self.limit < 1:
            raise ValueError("limit must be a positive integer")
        k, l = self.pattern.shape
        if k > MAX_PATTERN_SHAPE[0] or l > MAX_PATTERN_SHAPE[1]:
            raise ValueError(f"pattern {k}x{l} exceeds the supported maximum {MAX_PATTERN_SHAPE}")


def iter_matches(
    grid: Sequence[Sequence[int]],
    host: Sequence[Sequence[int]],
    *,
    ordered: bool = False,
    fixed: bool = False,
    blocked: set | None = None,
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], dict]]:
    """Yield ``(row_map, col_map, binding)`` for every placement of ``grid`` in ``host``.

    ``grid`` holds class labels. With ``fixed`` the labels must equal the host
    entries exactly (coloring occurrence); otherwise labels are bound lazily
    and injectively to symbols. Cells in ``blocked`` may not be used; the set
    is consulted live, so callers may grow it between yields.

    Placements come out in lexicographic order of row_map, then col_map.
    The yielded binding is a snapshot.
    """
    k, l = len(grid), len(grid[0])
    m, n = len(host), len(host[0])
    if k > m or l > n:
        return

    # pattern row/col needs at least as many distinct symbols as it has labels
    pat_row_kinds = [len(set(r)) for r in grid]
    host_row_kinds = [len(set(r)) for r in host]
    if not fixed:
        needed = len({c for r in grid for c in r})
        if needed > len({x for r in host for x in r}):
            return
        row_candidates = [
            [i for i in range(m) if host_row_kinds[i] >= pat_row_kinds[a]] for a in range(k)
        ]
    else:
        row_candidates = [
            [i for i in range(m) if set(grid[a]) <= set(host[i])] for a in range(k)
        ]

    row_map = [0] * k
    col_map = [0] * l
    used_rows = [False] * m
    used_cols = [False] * n
    binding: dict = {}
    taken: dict = {}  # symbol -> label

    def place_cols(b: int):
        if b == l:
            yield tuple(row_map), tuple(col_map), dict(binding)
            return
        start = col_map[b - 1] + 1 if (ordered and b) else 0
        for j in range(start, n):
            if used_cols[j]:
                continue
            new = []
            ok = True
            for a in range(k):
                i = row_map[a]
                if blocked and (i, j) in blocked:
                    ok = False
                    break
                label = grid[a][b]
                x = host[i][j]
                if fixed:
                    if label != x:
                        ok = False
                        break
                    continue
                bound = binding.get(label)
                if bound is None:
                    if x in taken:
                        ok = False
                        break
                    binding[label] = x
                    taken[x] = label
                    new.append(label)
                elif bound != x:
                    ok = False
                    break
            if ok:
                used_cols[j] = True
                col_map[b] = j
                yield from place_cols(b + 1)
                used_cols[j] = False
            for label in new:
                del taken[binding.pop(label)]

    def place_rows(a: int):
        if a == k:
            yield from place_cols(0)
            return
        lo = row_map[a - 1] + 1 if (ordered and a) else 0
        for i in row_candidates[a]:
            if i < lo or used_rows[i]:
                continue
            used_rows[i] = True
            row_map[a] = i
            yield from place_rows(a + 1)
            used_rows[i] = False

    yield from place_rows(0)


def _to_occurrence(P: Pattern, rmap, cmap, binding) -> Occurrence:
    return Occurrence(rmap, cmap, tuple(binding[t] for t in range(1, P.num_classes + 1)))


def verify_occurrence(P: Pattern, M: SymbolMatrix, occ: Occurrence, mode: str = UNORDERED) -> bool:
    """Check an occurrence directly against the definition."""
    k, l = P.shape
    if len(occ.row_map) != k or len(occ.col_map) != l or len(occ.class_symbol) != P.num_classes:
        return False
    for seq, bound in ((occ.row_map, M.rows), (occ.col_map, M.cols)):
        if len(set(seq)) != len(seq) or not all(0 <= x < bound for x in seq):
            return False
        if mode == ORDERED and list(seq) != sorted(seq):
            return False
    if len(set(occ.class_symbol)) != len(occ.class_symbol):
        return False
    for a in range(k):
        for b in range(l):
            t = P.cells[a][b]
            if t is not None and M[occ.row_map[a], occ.col_map[b]] != occ.class_symbol[t - 1]:
                return False
    return True


def _matches(q: OccurrenceQuery, blocked=None):
    return iter_matches(q.pattern.cells, q.matrix.entries, ordered=q.mode == ORDERED, blocked=blocked)


def find_occurrence(q: OccurrenceQuery) -> Occurrence | None:
    """The first occurrence in enumeration order, or None."""
    for rmap, cmap, binding in _matches(q):
        occ = _to_occurrence(q.pattern, rmap, cmap, binding)
        if not verify_occurrence(q.pattern, q.matrix, occ, q.mode):
            raise AssertionError(f"search produced an invalid occurrence {occ}")
        return occ
    return None


def contains(q: OccurrenceQuery) -> bool:
    return find_occurrence(q) is not None


def enumerate_occurrences(q: OccurrenceQuery) -> list[Occurrence]:
    """All occurrences (up to ``q.limit``), ordered by row_map, col_map, class_symbol."""
    out = []
    for rmap, cmap, binding in _matches(q):
        occ = _to_occurrence(q.pattern, rmap, cmap, binding)
        if not verify_occurrence(q.pattern, q.matrix, occ, q.mode):
            raise AssertionError(f"search produced an invalid occurrence {occ}")
        out.append(occ)
        if q.limit is not None and len(out) >= q.limit:
            break
    return out


def pack_disjoint(q: OccurrenceQuery) -> list[Occurrence]:
    """Greedy first-fit packing of pairwise cell-disjoint occurrences.

    Every pattern-free matrix differs from ``q.matrix`` in at least one cell of
    each packed occurrence, so the packing size bounds the edit distance from
    below.
    """
    blocked: set = set()
    out = []
    for rmap, cmap, binding in _matches(q, blocked=blocked):
        occ = _to_occurrence(q.pattern, rmap, cmap, binding)
        cells = occ.cells()
        # columns placed before the last update were checked against an older blocked set
        if not blocked.isdisjoint(cells):
            continue
        out.append(occ)
        blocked.update(cells)
        if q.limit is not None and len(out) >= q.limit:
            break
    return out


def any_occurrence(patterns: Sequence[Pattern], M: SymbolMatrix, mode: str = UNORDERED) -> tuple[Pattern, Occurrence] | None:
    """First occurrence of any member of a pattern set, tried in the given order."""
    for P in patterns:
        occ = find_occurrence(OccurrenceQuery(P, M, mode=mode))
        if occ is not None:
            return P, occ
    return None
