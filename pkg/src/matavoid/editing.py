"""Edit plans that remove every occurrence of a pattern from a matrix.

An edit rewrites one cell to another symbol of {1, ..., s}. Four tools live
here:

* :func:`merge_smallest_classes` recolors the s - r + 1 smallest symbol
  classes into the largest one. Fewer than r symbols remain, so no r-class
  pattern can survive, and the cost never exceeds ((s - r + 1)/s) * m * n.
* :func:`min_edit_distance` is an exact iterative-deepening branch and bound.
  When its node budget runs out it returns a bracketed, inexact plan instead.
* :func:`brute_force_min_edit` enumerates every matrix in the alphabet and
  serves as an independent oracle for the exact solver.
* :func:`extremal_f` maximizes the oracle over all small matrices up to
  row/column permutation and symbol renaming.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .containment import ORDERED, UNORDERED, iter_matches
from .core import Pattern, SymbolMatrix, canonicalize, _first_occurrence_labels

DEFAULT_BUDGET = 200_000
BRUTE_FORCE_MAX_CELLS = 12
BRUTE_FORCE_MAX_SYMBOLS = 3
EXTREMAL_MAX_MATRICES = 2**16
HITTING_SET_MAX_SETS = 5000


class BudgetError(RuntimeError):
    """An exhaustive computation would exceed its configured cap."""


@dataclass(frozen=True)
class EditPlan:
    edits: tuple[tuple[int, int, int], ...]
    cost: int
    result: SymbolMatrix
    exact: bool = True
    lower_bound: int = 0
    upper_bound: int = 0
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "cost": self.cost,
            "edits": [{"row": i + 1, "col": j + 1, "new": v} for i, j, v in self.edits],
            "exact": self.exact,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
        }


@dataclass(frozen=True)
class ExtremalReport:
    m: int
    n: int
    s: int
    patterns: tuple[Pattern, ...]
    f_value: int
    witness_matrix: SymbolMatrix
    upper_bound: Fraction
    representatives: int = field(default=0)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "s": self.s,
            "patterns": [[list(r) for r in p.cells] for p in self.patterns],
            "f": self.f_value,
            "witness": [list(r) for r in self.witness_matrix.entries],
            "upper_bound": str(self.upper_bound),
            "representatives": self.representatives,
        }


def theoretical_bound(m: int, n: int, s: int, r: int) -> Fraction:
    """((s - r + 1) / s) * m * n as an exact rational."""
    if not 1 <= r <= s:
        raise ValueError(f"need 1 <= r <= s, got r={r}, s={s}")
    return Fraction(s - r + 1, s) * m * n


def _plan(M: SymbolMatrix, edits, exact=True, lower=None, upper=None, nodes=0) -> EditPlan:
    edits = tuple(sorted(edits))
    cost = len(edits)
    return EditPlan(
        edits=edits,
        cost=cost,
        result=M.with_edits(edits),
        exact=exact,
        lower_bound=cost if lower is None else lower,
        upper_bound=cost if upper is None else upper,
        nodes=nodes,
    )


def merge_smallest_classes(M: SymbolMatrix, r: int) -> EditPlan:
    """Recolor the s - r + 1 smallest symbol classes to the largest class's symbol.

    Class sizes range over the full alphabet, so unused symbols count as empty
    classes and cost nothing to merge. Ties order by symbol id: among equal
    sizes the smaller id counts as smaller, and the largest class is the last
    one in that order.
    """
    s = M.max_symbols
    if not 1 <= r <= s:
        raise ValueError(f"need 1 <= r <= s, got r={r}, s={s}")
    sizes = M.class_sizes()
    order = sorted(sizes, key=lambda x: (sizes[x], x))
    target = order[-1]
    # for r = 1 the smallest s classes include the target itself
    recolor = {x for x in order[: s - r + 1] if x != target}
    edits = [
        (i, j, target)
        for i, row in enumerate(M.entries)
        for j, x in enumerate(row)
        if x in recolor
    ]
    return _plan(M, edits)


def _as_pattern_set(P: Pattern | Iterable[Pattern]) -> tuple[Pattern, ...]:
    patterns = (P,) if isinstance(P, Pattern) else tuple(P)
    if not patterns:
        raise ValueError("empty pattern set")
    for p in patterns:
        if not p.is_concrete:
            raise ValueError("pattern has wildcards; pass expand_wildcards(P) instead")
        if p.num_classes == 1:
            raise ValueError("trivial (single-class) patterns cannot be edited away in general")
    return tuple(dict.fromkeys(canonicalize(p) for p in patterns))


def _occurrence_cells(patterns, grid, ordered, blocked=None):
    for p in patterns:
        for rmap, cmap, _ in iter_matches(p.cells, grid, ordered=ordered, blocked=blocked):
            yield frozenset(itertools.product(rmap, cmap))


def _greedy_packing(patterns, grid, ordered, cap: int | None = None) -> int:
    blocked: set = set()
    count = 0
    for cells in _occurrence_cells(patterns, grid, ordered, blocked):
        if blocked.isdisjoint(cells):
            blocked.update(cells)
            count += 1
            if cap is not None and count >= cap:
                break
    return count


def packing_lower_bound(M: SymbolMatrix, P, mode: str = UNORDERED) -> int:
    """Size of a greedy cell-disjoint packing of occurrences of any member of P."""
    return _greedy_packing(_as_pattern_set(P), M.entries, mode == ORDERED)


def hitting_set_lower_bound(
    M: SymbolMatrix,
    P,
    mode: str = UNORDERED,
    max_sets: int = HITTING_SET_MAX_SETS,
    time_limit: float = 10.0,
) -> int:
    """Minimum number of cells meeting every occurrence (over at most ``max_sets`` of them).

    Any pattern-free matrix differs from M somewhere in each occurrence, so
    a minimum hitting set of any subfamily of occurrences bounds the edit
    distance from below. Solved as a 0/1 program with HiGHS.
    """
    patterns = _as_pattern_set(P)
    sets = []
    seen = set()
    for cells in _occurrence_cells(patterns, M.entries, mode == ORDERED):
        if cells not in seen:
            seen.add(cells)
            sets.append(cells)
            if len(sets) >= max_sets:
                break
    if not sets:
        return 0
    n = M.cols
    rows, cols = [], []
    for k, cells in enumerate(sets):
        for i, j in cells:
            rows.append(k)
            cols.append(i * n + j)
    nvar = M.rows * n
    A = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(sets), nvar)).tocsr()
    res = milp(
        c=np.ones(nvar),
        constraints=LinearConstraint(A, lb=np.ones(len(sets)), ub=np.inf),
        integrality=np.ones(nvar),
        bounds=Bounds(0, 1),
        options={"time_limit": time_limit},
    )
    if res.status == 0:
        return int(round(res.fun))
    dual = getattr(res, "mip_dual_bound", None)
    if dual is None or not np.isfinite(dual):
        return 0
    return max(0, math.ceil(dual - 1e-6))


class _OutOfBudget(Exception):
    pass


class _Search:
    def __init__(self, M: SymbolMatrix, patterns, ordered: bool, budget: int):
        self.s = M.max_symbols
        self.grid = [list(row) for row in M.entries]
        self.patterns = patterns
        self.ordered = ordered
        self.budget = budget
        self.nodes = 0
        self.count = [0] * (self.s + 1)
        for row in self.grid:
            for x in row:
                self.count[x] += 1
        self.edits: dict = {}
        self.seen: set = set()

    def first_occurrence(self):
        for p in self.patterns:
            for rmap, cmap, _ in iter_matches(p.cells, self.grid, ordered=self.ordered):
                return rmap, cmap
        return None

    def set_cell(self, i, j, v):
        self.count[self.grid[i][j]] -= 1
        self.count[v] += 1
        self.grid[i][j] = v

    def dfs(self, left: int) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _OutOfBudget
        hit = self.first_occurrence()
        if hit is None:
            return True
        if left == 0:
            return False
        if left < 4 or self.nodes % 2 == 0:
            if _greedy_packing(self.patterns, self.grid, self.ordered, cap=left + 1) > left:
                return False
        key = frozenset(self.edits.items())
        if key in self.seen:
            return False
        self.seen.add(key)
        rmap, cmap = hit
        for i in rmap:
            for j in cmap:
                if (i, j) in self.edits:
                    continue
                cur = self.grid[i][j]
                choices = [v for v in range(1, self.s + 1) if v != cur and self.count[v] > 0]
                # unused symbols are interchangeable; a lone symbol moved to one changes nothing
                if self.count[cur] > 1:
                    fresh = next((v for v in range(1, self.s + 1) if self.count[v] == 0), None)
                    if fresh is not None:
                        choices.append(fresh)
                for v in choices:
                    self.set_cell(i, j, v)
                    self.edits[(i, j)] = v
                    if self.dfs(left - 1):
                        return True
                    del self.edits[(i, j)]
                    self.set_cell(i, j, cur)
        return False


def min_edit_distance(
    M: SymbolMatrix,
    P: Pattern | Iterable[Pattern],
    *,
    budget: int = DEFAULT_BUDGET,
    mode: str = UNORDERED,
    use_hitting_set: bool = True,
) -> EditPlan:
    """Fewest cell rewrites leaving M free of every pattern in P.

    P is one concrete pattern or a set of them (e.g. ``expand_wildcards(W)``).
    Iterative deepening on cost; each node branches on the cells of one
    surviving occurrence, since any pattern-free result must change one of
    them. Packing and hitting-set bounds prune.

    If the node budget runs out, the returned plan is the merge heuristic's,
    flagged ``exact=False`` with the best proven lower bound.
    """
    patterns = _as_pattern_set(P)
    ordered = mode == ORDERED
    r_min = min(p.num_classes for p in patterns)
    s = M.max_symbols

    search = _Search(M, patterns, ordered, budget)
    if search.first_occurrence() is None:
        return _plan(M, (), nodes=1)

    # occurrences exist, so r_min <= number of symbols used <= s
    fallback = merge_smallest_classes(M, r_min)
    upper = fallback.cost
    lower = _greedy_packing(patterns, M.entries, ordered)
    if use_hitting_set and lower < upper:
        lower = max(lower, hitting_set_lower_bound(M, patterns, mode))

    depth = lower
    try:
        while depth < upper:
            search.seen.clear()
            if search.dfs(depth):
                edits = [(i, j, v) for (i, j), v in search.edits.items()]
                return _plan(M, edits, nodes=search.nodes)
            depth += 1
    except _OutOfBudget:
        return EditPlan(
            edits=fallback.edits,
            cost=fallback.cost,
            result=fallback.result,
            exact=False,
            lower_bound=depth,
            upper_bound=upper,
            nodes=search.nodes,
        )
    # every cost below the heuristic's was refuted
    return EditPlan(fallback.edits, fallback.cost, fallback.result, True, upper, upper, search.nodes)


ILP_MAX_NONZEROS = 3_000_000


def _window_grids(P: Pattern, s: int, ordered: bool) -> list[tuple[tuple[int, ...], ...]]:
    """Every k x l grid over {1..s} that has pattern P (up to row/column order when unordered)."""
    k, l = P.shape
    out = []
    for flat in itertools.product(range(1, s + 1), repeat=k * l):
        g = tuple(flat[a * l : (a + 1) * l] for a in range(k))
        if naive_contains(g, P, ordered):
            out.append(g)
    return out


def ilp_min_edit(
    M: SymbolMatrix,
    P: Pattern | Iterable[Pattern],
    *,
    mode: str = UNORDERED,
    time_limit: float = 30.0,
) -> EditPlan:
    """Minimum edit distance as a 0/1 program solved by HiGHS.

    One binary per (cell, symbol) with exactly one symbol per cell. For every
    choice of k rows and l columns and every grid G carrying the pattern on
    that window, at most kl - 1 of the window's cells may take their G value.
    The objective counts cells moved off their original symbol.

    On timeout the plan is the solver's incumbent (or the merge heuristic)
    with ``exact=False`` and the solver's proven dual bound as lower bound.
    """
    patterns = _as_pattern_set(P)
    ordered = mode == ORDERED
    m, n, s = M.rows, M.cols, M.max_symbols
    nvar = m * n * s
    rows: list[int] = []
    cols: list[int] = []
    ub: list[int] = []
    for p in patterns:
        k, l = p.shape
        if k > m or l > n:
            continue
        grids = _window_grids(p, s, ordered)
        windows = math.comb(m, k) * math.comb(n, l)
        if windows * len(grids) * k * l + len(rows) > ILP_MAX_NONZEROS:
            raise BudgetError(f"0/1 program for a {m}x{n} matrix exceeds {ILP_MAX_NONZEROS} nonzeros")
        for R in itertools.combinations(range(m), k):
            for C in itertools.combinations(range(n), l):
                for g in grids:
                    con = len(ub)
                    for a, i in enumerate(R):
                        base = i * n
                        for b, j in enumerate(C):
                            rows.append(con)
                            cols.append((base + j) * s + g[a][b] - 1)
                    ub.append(k * l - 1)
    if not ub:
        return _plan(M, ())

    A = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(ub), nvar)).tocsr()
    onehot = coo_matrix((np.ones(nvar), (np.arange(nvar) // s, np.arange(nvar))), shape=(m * n, nvar)).tocsr()
    cost = np.ones(nvar)
    for i, row in enumerate(M.entries):
        for j, x in enumerate(row):
            cost[(i * n + j) * s + x - 1] = 0
    res = milp(
        c=cost,
        constraints=[LinearConstraint(A, -np.inf, np.array(ub)), LinearConstraint(onehot, 1, 1)],
        integrality=np.ones(nvar),
        bounds=Bounds(0, 1),
        options={"time_limit": time_limit},
    )
    if res.x is not None:
        choice = np.asarray(res.x).reshape(m * n, s).argmax(axis=1) + 1
        edits = [
            (i, j, int(choice[i * n + j]))
            for i in range(m)
            for j in range(n)
            if choice[i * n + j] != M.entries[i][j]
        ]
    else:
        edits = list(merge_smallest_classes(M, min(p.num_classes for p in patterns)).edits)
    if res.status == 0:
        return _plan(M, edits)
    dual = getattr(res, "mip_dual_bound", None)
    lower = max(0, math.ceil(dual - 1e-6)) if dual is not None and np.isfinite(dual) else 0
    plan = _plan(M, edits)
    return EditPlan(plan.edits, plan.cost, plan.result, False, min(lower, plan.cost), plan.cost)


# ---------------------------------------------------------------------------
# Brute-force oracle. Deliberately shares no code with the search kernel.


def naive_contains(grid: Sequence[Sequence[int]], P: Pattern, ordered: bool = False) -> bool:
    """Literal definition: some choice of k rows and l columns has pattern P."""
    k, l = P.shape
    m, n = len(grid), len(grid[0])
    if k > m or l > n:
        return False
    target = canonicalize(P).cells
    pick = itertools.combinations if ordered else itertools.permutations
    for rows in pick(range(m), k):
        for cols in pick(range(n), l):
            if _first_occurrence_labels([[grid[i][j] for j in cols] for i in rows]) == target:
                return True
    return False


@lru_cache(maxsize=64)
def _forbidden_free_matrices(m: int, n: int, s: int, patterns: tuple[Pattern, ...], ordered: bool) -> np.ndarray:
    free = []
    for flat in itertools.product(range(1, s + 1), repeat=m * n):
        grid = [flat[i * n : (i + 1) * n] for i in range(m)]
        if not any(naive_contains(grid, p, ordered) for p in patterns):
            free.append(flat)
    return np.array(free, dtype=np.int8).reshape(len(free), m * n)


def brute_force_min_edit(
    M: SymbolMatrix,
    P: Pattern | Iterable[Pattern],
    *,
    mode: str = UNORDERED,
    max_cells: int = BRUTE_FORCE_MAX_CELLS,
    max_symbols: int = BRUTE_FORCE_MAX_SYMBOLS,
) -> int:
    """Minimum Hamming distance from M to any pattern-free matrix over {1..s}, by enumeration."""
    patterns = _as_pattern_set(P)
    m, n, s = M.rows, M.cols, M.max_symbols
    if m * n > max_cells or s > max_symbols:
        raise BudgetError(f"brute force limited to {max_cells} cells and {max_symbols} symbols; got {m}x{n}, s={s}")
    free = _forbidden_free_matrices(m, n, s, patterns, mode == ORDERED)
    if len(free) == 0:
        raise ValueError("no pattern-free matrix exists at this size")
    flat = np.array([x for row in M.entries for x in row], dtype=np.int8)
    return int((free != flat).sum(axis=1).min())


def _orbit_key(flat: tuple[int, ...], m: int, n: int, row_perms, col_perms) -> tuple:
    best = None
    for rp in row_perms:
        for cp in col_perms:
            key = _first_occurrence_labels([[flat[i * n + j] for j in cp] for i in rp])
            if best is None or key < best:
                best = key
    return best


def extremal_f(
    m: int,
    n: int,
    s: int,
    P: Pattern | Iterable[Pattern],
    *,
    mode: str = UNORDERED,
    max_matrices: int = EXTREMAL_MAX_MATRICES,
) -> ExtremalReport:
    """Exact f(m, n; s, P) by exhaustive search over matrices with at most s symbols.

    One matrix per orbit under row permutations, column permutations and
    symbol renaming is evaluated; all three preserve the distance to the
    pattern-free class. The witness is re-certified with the exact solver.
    """
    patterns = _as_pattern_set(P)
    if s ** (m * n) > max_matrices:
        raise BudgetError(
            f"{s}^{m * n} matrices exceed the cap of {max_matrices}; use estimate_f_monte_carlo instead"
        )
    row_perms = list(itertools.permutations(range(m))) if mode == UNORDERED else [tuple(range(m))]
    col_perms = list(itertools.permutations(range(n))) if mode == UNORDERED else [tuple(range(n))]
    seen = set()
    best, witness = -1, None
    for flat in itertools.product(range(1, s + 1), repeat=m * n):
        key = _orbit_key(flat, m, n, row_perms, col_perms)
        if key in seen:
            continue
        seen.add(key)
        M = SymbolMatrix([flat[i * n : (i + 1) * n] for i in range(m)], s)
        d = brute_force_min_edit(M, patterns, mode=mode)
        if d > best:
            best, witness = d, M
    plan = min_edit_distance(witness, patterns, mode=mode)
    if not plan.exact or plan.cost != best:
        raise AssertionError(f"exact solver disagrees with enumeration on witness: {plan.cost} vs {best}")
    r = min(p.num_classes for p in patterns)
    bound = theoretical_bound(m, n, s, r) if r <= s else Fraction(0)
    return ExtremalReport(m, n, s, patterns, best, witness, bound, len(seen))
