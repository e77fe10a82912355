import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from matavoid.containment import OccurrenceQuery, contains, pack_disjoint
from matavoid.core import Pattern, SymbolMatrix, all_patterns, expand_wildcards
from matavoid.editing import (
    BudgetError,
    brute_force_min_edit,
    extremal_f,
    hitting_set_lower_bound,
    ilp_min_edit,
    merge_smallest_classes,
    min_edit_distance,
    naive_contains,
    theoretical_bound,
)
from matavoid.harness import random_coloring

EX2 = Pattern([[1, 1], [1, 2]])
DIAG = Pattern([[1, 2], [2, 1]])
TWO_CLASS_UP_TO_2X2 = all_patterns(1, 2, 2) + all_patterns(2, 1, 2) + all_patterns(2, 2, 2)


def matrices(m, n, s):
    return st.lists(st.integers(1, s), min_size=m * n, max_size=m * n).map(
        lambda flat: SymbolMatrix([flat[i * n : (i + 1) * n] for i in range(m)], s)
    )


def check_plan(M, patterns, plan):
    assert plan.cost == len(plan.edits)
    assert len({(i, j) for i, j, _ in plan.edits}) == plan.cost
    assert M.hamming(plan.result) == plan.cost
    assert len(plan.result.symbols_used()) <= M.max_symbols
    for P in patterns:
        assert not contains(OccurrenceQuery(P, plan.result))


def test_merge_example():
    M = SymbolMatrix([[1, 2, 3], [1, 1, 2]])
    plan = merge_smallest_classes(M, 2)
    assert plan.result.entries == ((1, 1, 1), (1, 1, 1))
    assert plan.cost == 3 <= theoretical_bound(2, 3, 3, 2) == 4


def test_merge_degenerate_cases():
    const = SymbolMatrix([[2, 2], [2, 2]], 3)
    assert merge_smallest_classes(const, 3).cost == 0
    M = SymbolMatrix([[1, 2], [1, 1]])
    plan = merge_smallest_classes(M, 2)
    assert plan.cost == 1 and plan.result.symbols_used() == {1}
    with pytest.raises(ValueError):
        merge_smallest_classes(M, 3)


def test_merge_equal_sizes_still_leaves_fewer_than_r_symbols():
    M = SymbolMatrix([[1, 2], [2, 1]])
    plan = merge_smallest_classes(M, 2)
    assert len(plan.result.symbols_used()) == 1 and plan.cost == 2


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 5), st.data())
def test_merge_cost_is_sum_of_smallest_and_within_bound(m, n, s, data):
    M = data.draw(matrices(m, n, s))
    r = data.draw(st.integers(1, s))
    plan = merge_smallest_classes(M, r)
    sizes = sorted(M.class_sizes().values())
    if r >= 2:
        assert plan.cost == sum(sizes[: s - r + 1])
        assert len(plan.result.symbols_used()) <= r - 1
    assert plan.cost <= theoretical_bound(m, n, s, r)
    assert M.hamming(plan.result) == plan.cost


@settings(max_examples=40, deadline=None)
@given(matrices(4, 4, 3))
def test_merge_result_avoids_every_two_class_pattern(M):
    result = merge_smallest_classes(M, 2).result
    for P in TWO_CLASS_UP_TO_2X2:
        assert not contains(OccurrenceQuery(P, result))


def test_theoretical_bound():
    assert theoretical_bound(30, 30, 4, 2) == 675
    assert theoretical_bound(5, 7, 3, 3) == Fraction(35, 3)
    assert theoretical_bound(4, 5, 1, 1) == 20
    with pytest.raises(ValueError):
        theoretical_bound(2, 2, 2, 3)


def test_min_edit_example_two():
    M = SymbolMatrix([[1, 1], [1, 2]])
    plan = min_edit_distance(M, EX2)
    assert plan.exact and plan.cost == 1
    check_plan(M, [EX2], plan)
    assert brute_force_min_edit(M, EX2) == 1


def test_min_edit_free_matrix_costs_nothing():
    M = SymbolMatrix([[1, 1], [2, 2]])
    plan = min_edit_distance(M, EX2)
    assert plan.cost == 0 and plan.edits == () and plan.exact


def test_constant_matrix_distance_zero():
    M = SymbolMatrix([[2, 2, 2], [2, 2, 2]], 3)
    for P in TWO_CLASS_UP_TO_2X2:
        assert brute_force_min_edit(M, P) == 0


def test_trivial_and_wildcard_patterns_rejected():
    M = SymbolMatrix([[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        min_edit_distance(M, Pattern([[1, 1]]))
    with pytest.raises(ValueError):
        min_edit_distance(M, Pattern([[1, None]]))
    with pytest.raises(ValueError):
        extremal_f(2, 2, 2, Pattern([[1]]))


def test_brute_force_caps():
    with pytest.raises(BudgetError):
        brute_force_min_edit(SymbolMatrix([[1] * 13]), EX2)
    with pytest.raises(BudgetError):
        brute_force_min_edit(SymbolMatrix([[1, 4]]), EX2)


def test_naive_contains_reference():
    assert naive_contains([[1, 1], [2, 1]], EX2)
    assert not naive_contains([[1, 1], [2, 1]], EX2, ordered=True)


@pytest.mark.parametrize("P", [EX2, DIAG])
def test_exact_matches_brute_force_on_all_2x3(P):
    for flat in itertools.product((1, 2), repeat=6):
        M = SymbolMatrix([flat[:3], flat[3:]], 2)
        plan = min_edit_distance(M, P)
        assert plan.exact
        assert plan.cost == brute_force_min_edit(M, P)
        check_plan(M, [P], plan)


@settings(max_examples=30, deadline=None)
@given(matrices(3, 4, 2), st.sampled_from([EX2, DIAG, Pattern([[1, 2, 1]]), Pattern([[1, 2], [1, 2]])]))
def test_three_engines_agree_3x4(M, P):
    plan = min_edit_distance(M, P)
    assert plan.exact
    expected = brute_force_min_edit(M, P)
    assert plan.cost == expected
    assert ilp_min_edit(M, P).cost == expected
    check_plan(M, [P], plan)


@settings(max_examples=25, deadline=None)
@given(matrices(3, 3, 3), st.sampled_from([EX2, DIAG, Pattern([[1, 2], [1, 3]]), Pattern([[1, 2, 3]])]))
def test_bounds_sandwich_exact(M, P):
    exact = min_edit_distance(M, P)
    packing = len(pack_disjoint(OccurrenceQuery(P, M)))
    assert packing <= hitting_set_lower_bound(M, P) <= exact.cost
    r = P.num_classes
    if r <= M.max_symbols:
        assert exact.cost <= merge_smallest_classes(M, r).cost
    assert exact.cost == brute_force_min_edit(M, P)


def test_budget_exhaustion_returns_bracket():
    M = random_coloring(8, 8, 2, 5)
    plan = min_edit_distance(M, DIAG, budget=3, use_hitting_set=False)
    assert not plan.exact
    assert plan.lower_bound <= plan.upper_bound == plan.cost
    check_plan(M, [DIAG], plan)
    d = plan.to_dict()
    assert list(d) == ["cost", "edits", "exact", "lower_bound", "upper_bound"]
    assert d["exact"] is False


def test_ilp_matches_exact_on_medium_instance():
    M = random_coloring(6, 6, 2, 11)
    a = min_edit_distance(M, DIAG)
    b = ilp_min_edit(M, DIAG)
    assert a.exact and b.exact and a.cost == b.cost
    check_plan(M, [DIAG], b)


def test_edit_plan_serialization():
    plan = min_edit_distance(SymbolMatrix([[1, 1], [1, 2]]), EX2)
    assert plan.to_dict() == {
        "cost": 1,
        "edits": [{"row": 2, "col": 2, "new": 1}],
        "exact": True,
        "lower_bound": 1,
        "upper_bound": 1,
    }


@settings(max_examples=30, deadline=None)
@given(matrices(3, 3, 3), st.permutations(range(1, 4)), st.permutations(range(3)), st.permutations(range(3)))
def test_cost_invariant_under_symmetries(M, perm, rows, cols):
    P = Pattern([[1, 2], [1, 3]])
    base = min_edit_distance(M, P).cost
    sigma = {x: perm[x - 1] for x in range(1, 4)}
    assert min_edit_distance(M.relabel(sigma), P).cost == base
    assert min_edit_distance(M.permute(rows, cols), P).cost == base


def test_wildcard_set_costs_at_most_any_member_and_forbids_all():
    W = Pattern.from_rows([[1, 2], [1, "*"]])
    members = expand_wildcards(W)
    for seed in range(15):
        M = random_coloring(3, 3, 3, seed)
        plan = min_edit_distance(M, members)
        check_plan(M, members, plan)
        for P in members:
            assert min_edit_distance(M, P).cost <= plan.cost
        assert plan.cost == brute_force_min_edit(M, members)


def standalone_f(m, n, s, P):
    """Max over all matrices of min Hamming distance to a pattern-free matrix; no shared code."""
    k, l = P.shape
    target = P.cells

    def has(grid):
        for rows in itertools.permutations(range(m), k):
            for cols in itertools.permutations(range(n), l):
                sub = [[grid[i][j] for j in cols] for i in rows]
                fwd, back = {}, {}
                ok = True
                for a in range(k):
                    for b in range(l):
                        t, x = target[a][b], sub[a][b]
                        if fwd.setdefault(t, x) != x or back.setdefault(x, t) != t:
                            ok = False
                if ok:
                    return True
        return False

    all_flat = list(itertools.product(range(1, s + 1), repeat=m * n))
    free = [f for f in all_flat if not has([f[i * n : (i + 1) * n] for i in range(m)])]
    return max(min(sum(a != b for a, b in zip(f, g)) for g in free) for f in all_flat)


# frozen from standalone_f on first computation
F_2_2_2_EX2 = 1
F_2_3_2_EX2 = 1


def test_standalone_oracle_reproduces_frozen_values():
    assert standalone_f(2, 2, 2, EX2) == F_2_2_2_EX2
    assert standalone_f(2, 3, 2, EX2) == F_2_3_2_EX2


@pytest.mark.parametrize("m, n, expected", [(2, 2, F_2_2_2_EX2), (2, 3, F_2_3_2_EX2)])
def test_extremal_values(m, n, expected):
    rep = extremal_f(m, n, 2, EX2)
    assert rep.f_value == expected
    assert rep.f_value <= rep.upper_bound
    assert brute_force_min_edit(rep.witness_matrix, EX2) == expected


def test_extremal_diag_matches_standalone():
    assert extremal_f(2, 3, 2, DIAG).f_value == standalone_f(2, 3, 2, DIAG)
    assert extremal_f(3, 3, 2, DIAG).f_value == standalone_f(3, 3, 2, DIAG)


def test_extremal_transpose_symmetry():
    P = Pattern([[1, 2, 2]])
    assert extremal_f(2, 3, 2, P).f_value == extremal_f(3, 2, 2, P.transpose()).f_value


def test_extremal_budget():
    with pytest.raises(BudgetError, match="monte_carlo"):
        extremal_f(5, 5, 2, EX2)
