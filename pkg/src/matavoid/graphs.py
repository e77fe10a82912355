"""Edge-colored complete bipartite graphs.

An m x n symbol matrix is the same object as an s-edge-coloring of K_{m,n}:
entry (i, j) is the color of the edge between left vertex i and right vertex
j. This module gives that view its own vocabulary: color densities,
color neighborhoods, epsilon-regularity and exact-coloring occurrence.

Densities are exact rationals so that regularity comparisons never depend
on floating-point rounding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .containment import iter_matches
from .core import SymbolMatrix

LEFT = "left"
RIGHT = "right"
EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
EXHAUSTIVE_MAX_VERTICES = 16


class Vertex(NamedTuple):
    side: str
    index: int


@dataclass(frozen=True)
class ColoredPair:
    left_size: int
    right_size: int
    colors: tuple[tuple[int, ...], ...]
    num_colors: int

    def __post_init__(self):
        colors = tuple(tuple(row) for row in self.colors)
        object.__setattr__(self, "colors", colors)
        if len(colors) != self.left_size or any(len(r) != self.right_size for r in colors):
            raise ValueError("color grid does not match the side sizes")
        if any(not 1 <= c <= self.num_colors for r in colors for c in r):
            raise ValueError(f"colors must lie in 1..{self.num_colors}")

    def color(self, i: int, j: int) -> int:
        return self.colors[i][j]


def to_coloring(M: SymbolMatrix) -> ColoredPair:
    return ColoredPair(M.rows, M.cols, M.entries, M.max_symbols)


def to_matrix(C: ColoredPair) -> SymbolMatrix:
    return SymbolMatrix(C.colors, C.num_colors)


def _index_set(S: Iterable[int], size: int, name: str) -> frozenset[int]:
    S = frozenset(S)
    if not S:
        raise ValueError(f"{name} must be nonempty")
    if not all(0 <= v < size for v in S):
        raise ValueError(f"{name} has vertices outside 0..{size - 1}")
    return S


def color_density(C: ColoredPair, color: int, X: Iterable[int] | None = None, Y: Iterable[int] | None = None) -> Fraction:
    """Fraction of edges between X and Y carrying ``color`` (whole sides by default)."""
    X = _index_set(range(C.left_size) if X is None else X, C.left_size, "X")
    Y = _index_set(range(C.right_size) if Y is None else Y, C.right_size, "Y")
    hits = sum(1 for i in X for j in Y if C.colors[i][j] == color)
    return Fraction(hits, len(X) * len(Y))


def neighborhood(C: ColoredPair, v: Vertex, color: int) -> frozenset[int]:
    """Indices on the opposite side joined to v by an edge of ``color``."""
    side, idx = v
    if side == LEFT and 0 <= idx < C.left_size:
        return frozenset(j for j, c in enumerate(C.colors[idx]) if c == color)
    if side == RIGHT and 0 <= idx < C.right_size:
        return frozenset(i for i in range(C.left_size) if C.colors[i][idx] == color)
    raise ValueError(f"no vertex {v!r} in a {C.left_size}+{C.right_size} pair")


@dataclass(frozen=True)
class RegularityVerdict:
    color: int
    epsilon: Fraction
    global_density: Fraction
    regular: bool
    witness: tuple[tuple[int, ...], tuple[int, ...], Fraction] | None
    method: str
    samples: int = 0

    @property
    def definitive(self) -> bool:
        return self.method == EXHAUSTIVE or not self.regular

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            X, Y, d = self.witness
            w = {"left_subset": [i + 1 for i in X], "right_subset": [j + 1 for j in Y], "density": _ratio(d)}
        return {
            "color": self.color,
            "epsilon": float(self.epsilon),
            "density": _ratio(self.global_density),
            "regular": self.regular,
            "method": self.method,
            "witness": w,
            "samples": self.samples,
        }


def _ratio(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _as_fraction(eps) -> Fraction:
    if isinstance(eps, float):
        eps = Fraction(repr(eps))
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    return eps


def _bits(mask: int, size: int) -> tuple[int, ...]:
    return tuple(v for v in range(size) if mask >> v & 1)


def is_epsilon_regular(
    C: ColoredPair,
    color: int,
    epsilon,
    method: str = EXHAUSTIVE,
    sample_budget: int = 1000,
    seed: int = 0,
    max_vertices: int = EXHAUSTIVE_MAX_VERTICES,
) -> RegularityVerdict:
    """Check whether every X', Y' with |X'| >= eps|X|, |Y'| >= eps|Y| keeps
    the color density within eps of the whole pair's.

    ``exhaustive`` checks every qualifying subset pair and, if irregular,
    reports the most deviating one (larger subsets win ties, then the first
    in bitmask order). ``sampled`` draws a subset size uniformly from the
    qualifying sizes, then a uniform subset of that size, and stops at the
    first violation; a sampled "regular" is not definitive.
    """
    eps = _as_fraction(epsilon)
    m, n = C.left_size, C.right_size
    total = sum(1 for row in C.colors for c in row if c == color)
    mn = m * n
    global_d = Fraction(total, mn)
    xmin = max(1, math.ceil(eps * m))
    ymin = max(1, math.ceil(eps * n))
    p, q = eps.numerator, eps.denominator

    def violates(cnt: int, x: int, y: int) -> bool:
        # |cnt/(x*y) - total/(m*n)| >= p/q, cross-multiplied
        return abs(cnt * mn - total * x * y) * q >= p * x * y * mn

    if method == EXHAUSTIVE:
        if m + n > max_vertices:
            raise ValueError(f"exhaustive check limited to {max_vertices} vertices; use method='sampled'")
        rowmask = [sum(1 << j for j, c in enumerate(row) if c == color) for row in C.colors]
        popcount = [bin(y).count("1") for y in range(1 << n)]
        best = None
        best_key = None
        for xmask in range(1, 1 << m):
            x = bin(xmask).count("1")
            if x < xmin:
                continue
            colcount = [0] * n
            for i in range(m):
                if xmask >> i & 1:
                    rm = rowmask[i]
                    for j in range(n):
                        if rm >> j & 1:
                            colcount[j] += 1
            sums = [0] * (1 << n)
            for ymask in range(1, 1 << n):
                low = (ymask & -ymask).bit_length() - 1
                sums[ymask] = sums[ymask & (ymask - 1)] + colcount[low]
                y = popcount[ymask]
                if y < ymin or not violates(sums[ymask], x, y):
                    continue
                d = Fraction(sums[ymask], x * y)
                key = (abs(d - global_d), x, y)
                if best_key is None or key > best_key:
                    best_key = key
                    best = (_bits(xmask, m), _bits(ymask, n), d)
        return RegularityVerdict(color, eps, global_d, best is None, best, EXHAUSTIVE)

    if method == SAMPLED:
        if sample_budget < 1:
            raise ValueError("sample_budget must be at least 1")
        rng = np.random.Generator(np.random.Philox(seed))
        grid = np.asarray(C.colors) == color
        for k in range(1, sample_budget + 1):
            x = int(rng.integers(xmin, m + 1))
            y = int(rng.integers(ymin, n + 1))
            X = np.sort(rng.choice(m, size=x, replace=False))
            Y = np.sort(rng.choice(n, size=y, replace=False))
            cnt = int(grid[np.ix_(X, Y)].sum())
            if violates(cnt, x, y):
                w = (tuple(int(i) for i in X), tuple(int(j) for j in Y), Fraction(cnt, x * y))
                return RegularityVerdict(color, eps, global_d, False, w, SAMPLED, k)
        return RegularityVerdict(color, eps, global_d, True, None, SAMPLED, sample_budget)

    raise ValueError(f"method must be {EXHAUSTIVE!r} or {SAMPLED!r}, got {method!r}")


def coloring_occurs(C: ColoredPair, target: ColoredPair) -> bool:
    """True when target's exact colors appear on some K_{k,l} inside C."""
    for _ in iter_matches(target.colors, C.colors, fixed=True):
        return True
    return False


def all_colorings(left: int, right: int, s: int) -> list[ColoredPair]:
    """Every coloring of K_{left,right} with colors 1..s, in lexicographic order."""
    out = []
    for flat in itertools.product(range(1, s + 1), repeat=left * right):
        out.append(ColoredPair(left, right, [flat[i * right : (i + 1) * right] for i in range(left)], s))
    return out
