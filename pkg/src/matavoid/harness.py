"""Seeded random colorings and the desk-scale experiments.

All randomness comes from numpy's Philox (a counter-based generator) keyed
through ``numpy.random.SeedSequence``. A trial's stream is keyed by
``(seed, trial_index)``, so trials can run in any order or in parallel and
still produce identical reports.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import Pattern, SymbolMatrix
from .editing import DEFAULT_BUDGET, BudgetError, _as_pattern_set, ilp_min_edit, min_edit_distance
from .graphs import all_colorings, coloring_occurs, to_coloring

log = logging.getLogger(__name__)

COROLLARY_MAX_SIDE = 2
COROLLARY_MAX_SYMBOLS = 3


def make_rng(seed: int | Sequence[int]) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def random_coloring(m: int, n: int, s: int, seed: int | Sequence[int]) -> SymbolMatrix:
    """Each cell independently uniform over {1, ..., s}."""
    if s < 1 or m < 1 or n < 1:
        raise ValueError("m, n and s must be positive")
    grid = make_rng(seed).integers(1, s + 1, size=(m, n))
    return SymbolMatrix(grid.tolist(), s)


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    n: int
    s: int
    pattern: Pattern | tuple[Pattern, ...]
    trials: int = 20
    seed: int = 0
    solver_budget: int = DEFAULT_BUDGET
    sizes: tuple[tuple[int, int], ...] = ()
    output: str | None = None
    ilp_time_limit: float = 60.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.solver_budget < 1:
            raise ValueError("solver_budget must be at least 1")

    def shapes(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.sizes) or ((self.m, self.n),)


@dataclass
class TrendRow:
    m: int
    n: int
    mean_lower: float
    mean_upper: float
    exact_count: int
    ratio_lower: float
    ratio_upper: float
    bound: str
    brackets: list[tuple[int, int, bool]] = field(default_factory=list)


@dataclass
class TrendReport:
    s: int
    r: int
    seed: int
    trials: int
    rows: list[TrendRow]

    def to_dict(self) -> dict:
        return asdict(self)

    def lower_ratios(self) -> list[float]:
        return [row.ratio_lower for row in self.rows]

    def upper_ratios(self) -> list[float]:
        return [row.ratio_upper for row in self.rows]


def run_trial(
    m: int, n: int, s: int, patterns, seed: int, trial: int, budget: int, ilp_time_limit: float = 0.0
) -> tuple[int, int, bool]:
    """Edit-distance bracket (lower, upper, exact) for one random coloring.

    The branch and bound runs first; if it gives up and ``ilp_time_limit`` is
    positive, the 0/1 program tightens both ends of the bracket.
    """
    M = random_coloring(m, n, s, (seed, trial))
    plan = min_edit_distance(M, patterns, budget=budget)
    lower, upper = plan.lower_bound, plan.upper_bound
    if not plan.exact and ilp_time_limit > 0:
        try:
            alt = ilp_min_edit(M, patterns, time_limit=ilp_time_limit)
        except BudgetError:
            log.info("%dx%d trial %d: 0/1 program too large, keeping bracket", m, n, trial)
        else:
            lower, upper = max(lower, alt.lower_bound), min(upper, alt.upper_bound)
    return lower, upper, lower == upper


def estimate_f_monte_carlo(cfg: ExperimentConfig) -> TrendReport:
    """Mean edit-distance brackets of random colorings, one row per size.

    Trials that no exact method settles contribute their proven lower bound
    and the best known upper bound; ``exact_count`` says how many were exact.
    """
    patterns = _as_pattern_set(cfg.pattern)
    r = min(p.num_classes for p in patterns)
    bound = Fraction(cfg.s - r + 1, cfg.s)
    rows = []
    for m, n in cfg.shapes():
        brackets = [run_trial(m, n, cfg.s, patterns, cfg.seed, t, cfg.solver_budget, cfg.ilp_time_limit) for t in range(cfg.trials)]
        lo = sum(b[0] for b in brackets) / cfg.trials
        hi = sum(b[1] for b in brackets) / cfg.trials
        exact = sum(1 for b in brackets if b[2])
        log.info("%dx%d: lower %.3f upper %.3f exact %d/%d", m, n, lo, hi, exact, cfg.trials)
        rows.append(TrendRow(m, n, lo, hi, exact, lo / (m * n), hi / (m * n), f"{bound.numerator}/{bound.denominator}", brackets))
    return TrendReport(cfg.s, r, cfg.seed, cfg.trials, rows)


@dataclass
class SweepEntry:
    seed: int
    targets: int
    missing: list[list[list[int]]]

    @property
    def missing_count(self) -> int:
        return len(self.missing)


def corollary3_sweep(
    m: int,
    n: int,
    s: int,
    side: int,
    seeds: Iterable[int],
    *,
    max_side: int = COROLLARY_MAX_SIDE,
    max_symbols: int = COROLLARY_MAX_SYMBOLS,
) -> list[SweepEntry]:
    """For each seed, which exact colorings of K_{side,side} fail to appear in a random coloring."""
    if side > max_side or s > max_symbols:
        raise ValueError(f"sweep limited to side <= {max_side} and s <= {max_symbols}")
    if side < 1:
        raise ValueError("side must be positive")
    targets = all_colorings(side, side, s)
    out = []
    for seed in seeds:
        host = to_coloring(random_coloring(m, n, s, seed))
        missing = [[list(r) for r in t.colors] for t in targets if not coloring_occurs(host, t)]
        out.append(SweepEntry(seed, len(targets), missing))
    return out
