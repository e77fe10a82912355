"""Forbidden patterns in symbol matrices and edge-colored bipartite graphs."""

from .containment import (
    ORDERED,
    UNORDERED,
    OccurrenceQuery,
    contains,
    enumerate_occurrences,
    find_occurrence,
    pack_disjoint,
)
from .core import (
    Occurrence,
    Pattern,
    SymbolMatrix,
    canonicalize,
    expand_wildcards,
    is_trivial,
    parse_matrix,
    parse_pattern,
    pattern_of,
    same_pattern,
)
from .editing import (
    EditPlan,
    ExtremalReport,
    brute_force_min_edit,
    extremal_f,
    ilp_min_edit,
    merge_smallest_classes,
    min_edit_distance,
    theoretical_bound,
)
from .graphs import (
    ColoredPair,
    RegularityVerdict,
    Vertex,
    color_density,
    coloring_occurs,
    is_epsilon_regular,
    neighborhood,
    to_coloring,
    to_matrix,
)
from .harness import ExperimentConfig, TrendReport, corollary3_sweep, estimate_f_monte_carlo, random_coloring

__version__ = "0.1.0"
