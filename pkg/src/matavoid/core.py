"""Patterns, symbol matrices and their text formats.

A pattern is a partition of a k x l index grid into r nonempty classes,
optionally with wildcard cells that match any entry. A symbol matrix is an
m x n grid over the alphabet {1, ..., s}. A matrix *has* a pattern when two
cells carry equal entries exactly when they lie in the same class.

Rows and columns are 0-indexed in the API; text formats and serialized
reports use 1-indexed coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

WILDCARD = None
WILDCARD_TOKEN = "*"

# Containment cost grows steeply with pattern size.
MAX_PATTERN_SHAPE = (4, 4)


class FormatError(ValueError):
    """Malformed pattern or matrix text. ``line`` is 1-indexed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


Cell = tuple[int, int]


def _first_occurrence_labels(grid: Iterable[Iterable[Hashable]], skip=()) -> tuple[tuple, ...]:
    labels: dict = {}
    out = []
    for row in grid:
        new_row = []
        for tok in row:
            if tok in skip:
                new_row.append(WILDCARD)
                continue
            if tok not in labels:
                labels[tok] = len(labels) + 1
            new_row.append(labels[tok])
        out.append(tuple(new_row))
    return tuple(out)


@dataclass(frozen=True)
class Pattern:
    """Partition of a k x l grid into classes 1..r, with ``None`` marking wildcards."""

    cells: tuple[tuple[int | None, ...], ...]

    def __post_init__(self):
        cells = tuple(tuple(row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells or not cells[0]:
            raise ValueError("pattern must have at least one row and one column")
        width = len(cells[0])
        if any(len(row) != width for row in cells):
            raise ValueError("pattern rows have unequal lengths")
        ids = {c for row in cells for c in row if c is not WILDCARD}
        for c in ids:
            if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                raise ValueError(f"class id {c!r} is not a positive integer")
        if ids != set(range(1, len(ids) + 1)):
            raise ValueError(f"class ids {sorted(ids)} are not exactly 1..r")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Hashable]]) -> "Pattern":
        """Build a pattern from arbitrary labels; ``"*"`` and ``None`` are wildcards."""
        return cls(_first_occurrence_labels(rows, skip=(WILDCARD_TOKEN, WILDCARD)))

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def num_classes(self) -> int:
        return max((c for row in self.cells for c in row if c is not WILDCARD), default=0)

    @property
    def wildcards(self) -> list[Cell]:
        return [(a, b) for a, row in enumerate(self.cells) for b, c in enumerate(row) if c is WILDCARD]

    @property
    def is_concrete(self) -> bool:
        return not self.wildcards

    def classes(self) -> dict[int, list[Cell]]:
        """Map each class id to its cells in row-major order."""
        out: dict[int, list[Cell]] = {}
        for a, row in enumerate(self.cells):
            for b, c in enumerate(row):
                if c is not WILDCARD:
                    out.setdefault(c, []).append((a, b))
        return dict(sorted(out.items()))

    def transpose(self) -> "Pattern":
        return Pattern(tuple(zip(*self.cells)))

    def __str__(self) -> str:
        return "\n".join(
            " ".join(WILDCARD_TOKEN if c is WILDCARD else str(c) for c in row) for row in self.cells
        )


@dataclass(frozen=True)
class SymbolMatrix:
    """An m x n matrix over {1, ..., max_symbols}.

    ``max_symbols`` defaults to the largest entry. Use :meth:`from_tokens`
    to map arbitrary tokens onto the canonical alphabet.
    """

    entries: tuple[tuple[int, ...], ...]
    max_symbols: int = 0

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries or not entries[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(entries[0])
        if any(len(row) != width for row in entries):
            raise ValueError("matrix rows have unequal lengths")
        top = max(max(row) for row in entries)
        s = self.max_symbols or top
        object.__setattr__(self, "max_symbols", s)
        low = min(min(row) for row in entries)
        if low < 1 or top > s:
            raise ValueError(f"entries must lie in 1..{s}, found range {low}..{top}")

    @classmethod
    def from_tokens(cls, rows: Iterable[Iterable[Hashable]], max_symbols: int = 0) -> "SymbolMatrix":
        """Relabel arbitrary tokens to 1, 2, ... by first row-major occurrence."""
        return cls(_first_occurrence_labels(rows), max_symbols)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: Cell) -> int:
        i, j = ij
        return self.entries[i][j]

    def symbols_used(self) -> set[int]:
        return {x for row in self.entries for x in row}

    def class_sizes(self) -> dict[int, int]:
        """Cell count of every symbol in 1..s, zero-count symbols included."""
        sizes = dict.fromkeys(range(1, self.max_symbols + 1), 0)
        for row in self.entries:
            for x in row:
                sizes[x] += 1
        return sizes

    def with_edits(self, edits: Iterable[tuple[int, int, int]]) -> "SymbolMatrix":
        grid = [list(row) for row in self.entries]
        for i, j, v in edits:
            grid[i][j] = v
        return SymbolMatrix(grid, self.max_symbols)

    def relabel(self, mapping: Mapping[int, int], max_symbols: int | None = None) -> "SymbolMatrix":
        grid = [[mapping[x] for x in row] for row in self.entries]
        return SymbolMatrix(grid, max_symbols if max_symbols is not None else self.max_symbols)

    def permute(self, row_order: Sequence[int], col_order: Sequence[int]) -> "SymbolMatrix":
        """Row ``a`` of the result is row ``row_order[a]`` of self (same for columns)."""
        grid = [[self.entries[i][j] for j in col_order] for i in row_order]
        return SymbolMatrix(grid, self.max_symbols)

    def transpose(self) -> "SymbolMatrix":
        return SymbolMatrix(tuple(zip(*self.entries)), self.max_symbols)

    def hamming(self, other: "SymbolMatrix") -> int:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return sum(a != b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries)


@dataclass(frozen=True)
class Occurrence:
    """A pattern placed inside a matrix.

    ``row_map[a]`` is the matrix row hosting pattern row ``a``;
    ``class_symbol[t - 1]`` is the symbol carried by class ``t``.
    """

    row_map: tuple[int, ...]
    col_map: tuple[int, ...]
    class_symbol: tuple[int, ...] = field(default=())

    def cells(self) -> frozenset[Cell]:
        return frozenset(itertools.product(self.row_map, self.col_map))

    def to_dict(self) -> dict:
        return {
            "row_map": [i + 1 for i in self.row_map],
            "col_map": [j + 1 for j in self.col_map],
            "class_symbol": list(self.class_symbol),
        }


def _grid(M) -> Sequence[Sequence[Hashable]]:
    return M.entries if isinstance(M, SymbolMatrix) else M


def pattern_of(M) -> Pattern:
    """Partition of M's cells by entry equality, labelled by first occurrence."""
    return Pattern(_first_occurrence_labels(_grid(M)))


def canonicalize(P: Pattern) -> Pattern:
    """Relabel classes by first row-major occurrence, keeping wildcards in place."""
    return Pattern(_first_occurrence_labels(P.cells, skip=(WILDCARD,)))


def pattern_bijection(A, B) -> dict | None:
    """Return the bijection g with B = g(A) entrywise, or None if A and B differ in pattern."""
    ga, gb = _grid(A), _grid(B)
    if len(ga) != len(gb) or any(len(ra) != len(rb) for ra, rb in zip(ga, gb)):
        raise ValueError("matrices must have equal dimensions")
    fwd: dict = {}
    back: dict = {}
    for ra, rb in zip(ga, gb):
        for x, y in zip(ra, rb):
            if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
                return None
    return fwd


def same_pattern(A, B) -> bool:
    """True when A and B have the same pattern (equal dimensions required)."""
    return pattern_bijection(A, B) is not None


def is_trivial(P: Pattern) -> bool:
    if not P.is_concrete:
        raise ValueError("triviality is defined for concrete patterns; expand wildcards first")
    return P.num_classes == 1


def expand_wildcards(P: Pattern) -> tuple[Pattern, ...]:
    """All concrete patterns obtained by filling the wildcard cells.

    Each wildcard becomes an existing class or a fresh one; fresh classes may
    be shared among wildcards in every possible way. The result is
    deduplicated by canonical form and sorted.
    """
    holes = P.wildcards
    r = P.num_classes
    if not holes:
        return (canonicalize(P),)

    found: set[Pattern] = set()
    grid = [list(row) for row in P.cells]

    def assign(idx: int, fresh: int) -> None:
        if idx == len(holes):
            found.add(canonicalize(Pattern(grid)))
            return
        a, b = holes[idx]
        # restricted-growth labelling over fresh classes avoids duplicate set partitions
        for c in range(1, r + fresh + 2):
            grid[a][b] = c
            assign(idx + 1, max(fresh, c - r))
        grid[a][b] = WILDCARD

    assign(0, 0)
    return tuple(sorted(found, key=lambda p: p.cells))


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def all_patterns(rows: int, cols: int, num_classes: int | None = None) -> list[Pattern]:
    """Every canonical concrete pattern on a rows x cols grid, optionally with exactly r classes."""
    out = expand_wildcards(Pattern([[WILDCARD] * cols for _ in range(rows)]))
    if num_classes is not None:
        out = tuple(p for p in out if p.num_classes == num_classes)
    return list(out)


# ---------------------------------------------------------------------------
# Text formats


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def _parse_header(lines, what: str) -> tuple[int, int]:
    if not lines:
        raise FormatError(f"empty {what} file", 1)
    lineno, toks = lines[0]
    if len(toks) != 2:
        raise FormatError(f"{what} header must be two integers 'rows cols'", lineno)
    try:
        k, l = int(toks[0]), int(toks[1])
    except ValueError:
        raise FormatError(f"{what} header must be two integers, got {' '.join(toks)!r}", lineno) from None
    if k < 1 or l < 1:
        raise FormatError(f"{what} dimensions must be positive", lineno)
    body = lines[1:]
    if len(body) != k:
        where = body[k][0] if len(body) > k else (body[-1][0] if body else lineno)
        raise FormatError(f"expected {k} {what} rows, found {len(body)}", where)
    for ln, row in body:
        if len(row) != l:
            raise FormatError(f"expected {l} tokens, found {len(row)}", ln)
    return k, l


def parse_pattern(text: str, max_shape: tuple[int, int] | None = MAX_PATTERN_SHAPE) -> Pattern:
    """Parse ``k l`` followed by k rows of labels; ``*`` is a wildcard."""
    lines = _content_lines(text)
    k, l = _parse_header(lines, "pattern")
    if max_shape is not None and (k > max_shape[0] or l > max_shape[1]):
        raise FormatError(f"pattern {k}x{l} exceeds the supported maximum {max_shape[0]}x{max_shape[1]}", lines[0][0])
    return Pattern.from_rows(row for _, row in lines[1:])


def parse_matrix(text: str, max_symbols: int | None = None) -> SymbolMatrix:
    """Parse ``m n`` followed by m rows of integers in 1..s (s = max token unless given)."""
    lines = _content_lines(text)
    m, n = _parse_header(lines, "matrix")
    grid = []
    for ln, row in lines[1:]:
        vals = []
        for tok in row:
            try:
                v = int(tok)
            except ValueError:
                raise FormatError(f"matrix entry {tok!r} is not an integer", ln) from None
            if v < 1 or (max_symbols and v > max_symbols):
                hi = max_symbols if max_symbols else "s"
                raise FormatError(f"matrix entry {v} outside 1..{hi}", ln)
            vals.append(v)
        grid.append(vals)
    return SymbolMatrix(grid, max_symbols or 0)


def format_pattern(P: Pattern) -> str:
    return f"{P.rows} {P.cols}\n{P}\n"


def format_matrix(M: SymbolMatrix) -> str:
    return f"{M.rows} {M.cols}\n{M}\n"
