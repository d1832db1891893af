import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxent_tsp import fixtures as fx
from maxent_tsp.heldkarp import (CutViolation, LpSolution,
                                 check_spanning_tree_polytope,
                                 separate_subtour, solve_held_karp, split_root)
from maxent_tsp.instances import MetricInstance, exact_opt, random_euclidean
from maxent_tsp.simplex import solve_lp


def unit_square():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    c = np.array([[np.hypot(a[0] - b[0], a[1] - b[1]) for b in pts] for a in pts])
    return MetricInstance(4, c, "square")


def test_unit_k4_objective_is_n():
    inst = MetricInstance(4, np.ones((4, 4)) - np.eye(4), "k4")
    sol = solve_held_karp(inst)
    assert abs(sol.objective - 4.0) < 1e-9


def test_unit_square_integral_support():
    sol = solve_held_karp(unit_square())
    assert abs(sol.objective - 4.0) < 1e-9
    support = {(u, v) for u, v, x in sol.edges if x > 0.5}
    assert support == {(0, 1), (1, 2), (2, 3), (0, 3)}
    opt, _ = exact_opt(unit_square())
    assert sol.objective <= opt + 1e-9


@pytest.mark.parametrize("n,seed", [(10, 0), (12, 5), (16, 11), (12, 42)])
def test_lp_bounds_optimum(n, seed):
    inst = random_euclidean(n, seed)
    sol = solve_held_karp(inst)
    opt, _ = exact_opt(inst)
    assert sol.objective <= opt + 1e-9
    assert opt <= 1.5 * sol.objective + 1e-9
    deg = sol.degrees()
    assert np.allclose(deg, 2.0, atol=1e-8)


def test_objective_rises_when_cuts_are_added():
    # the pure degree relaxation is weaker than the final cut-closed one
    inst = random_euclidean(16, 8)
    pairs = [(i, j) for i in range(16) for j in range(i + 1, 16)]
    cost = np.array([inst.cost[i, j] for i, j in pairs])
    A = np.zeros((16, len(pairs)))
    for k, (i, j) in enumerate(pairs):
        A[i, k] = A[j, k] = 1.0
    _, degree_only, _ = solve_lp(cost, A, np.full(16, 2.0))
    sol = solve_held_karp(inst)
    assert sol.objective >= degree_only - 1e-9


def test_separation_disconnected_support():
    sol = LpSolution(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0),
                         (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)], 6.0)
    v = separate_subtour(sol)
    assert v is not None and v.weight == 0.0
    assert v.vertex_set in (frozenset({3, 4, 5}), frozenset({0, 1, 2}))


def test_separation_single_cycle_none():
    sol = LpSolution(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)], 4.0)
    assert separate_subtour(sol) is None


def test_separation_fractional_k4_none():
    sol = LpSolution(4, [(u, v, 2 / 3) for u in range(4)
                         for v in range(u + 1, 4)], 4.0)
    assert separate_subtour(sol) is None


def test_split_cycle():
    sol = LpSolution(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)],
                     4.0, edge_costs=[1.0] * 4)
    sp = split_root(sol)
    assert sp.n == 5
    assert sp.edges[sp.root_edge] == (0, 4, 1.0)
    assert np.allclose(sp.degrees(), 2.0)
    assert sp.objective == sol.objective


def test_split_fractional_k4_half_mass():
    sol = LpSolution(4, [(u, v, 2 / 3) for u in range(4)
                         for v in range(u + 1, 4)], 4.0,
                     edge_costs=[1.0] * 6)
    sp = split_root(sol)
    at_u0 = sum(x for u, v, x in sp.edges
                if 0 in (u, v) and sp.edges.index((u, v, x)) != sp.root_edge)
    # three half edges of value 1/3 each plus the unit root edge
    assert abs(at_u0 - 1.0) < 1e-12
    assert np.allclose(sp.degrees(), 2.0)


def test_split_preserves_cut_values_away_from_the_pair():
    rng = np.random.default_rng(3)
    sol = solve_held_karp(random_euclidean(12, 11))
    sp = split_root(sol)
    for _ in range(40):
        size = int(rng.integers(1, 11))
        side = frozenset(int(v) for v in rng.choice(range(1, 12), size=size,
                                                    replace=False))
        assert abs(sol.cut_value(side) - sp.cut_value(side)) < 1e-12
        assert sp.cut_value(side) >= 2.0 - 1e-8


def test_fixture_solutions_are_valid_split_solutions():
    for sol in (fx.triangle_chain_solution(), fx.bad_edge_solution()):
        assert np.allclose(sol.degrees(), 2.0)
        u, v, x = sol.edges[sol.root_edge]
        assert x == 1.0 and sol.edge_costs[sol.root_edge] == 0.0
        assert check_spanning_tree_polytope(sol) is None
        values = sorted({round(x, 6) for _, _, x in sol.edges})
        assert values == [0.5, 1.0]


def test_polytope_check_passes_on_split_solutions():
    for n, seed in [(10, 0), (12, 11)]:
        sp = split_root(solve_held_karp(random_euclidean(n, seed)))
        assert check_spanning_tree_polytope(sp) is None


def test_polytope_check_split_cycle_and_split_k4():
    cyc = LpSolution(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)],
                     4.0, edge_costs=[1.0] * 4)
    sp = split_root(cyc)
    assert sum(x for _, _, x in sp.restricted_edges()) == sp.n - 1
    assert check_spanning_tree_polytope(sp) is None

    assert check_spanning_tree_polytope(fx.split_k4_solution()) is None


def test_polytope_check_catches_overfull_set():
    # x(E(S)) = |S| on {0,1,2} while degrees stay 2: a clear violation
    sol = LpSolution(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0),
                         (3, 4, 0.5), (4, 5, 0.5), (3, 5, 0.5),
                         (0, 3, 0.0), (5, 0, 0.0)], 0.0,
                     root_edge=7, split_origin=0)
    w = check_spanning_tree_polytope(sol)
    assert isinstance(w, CutViolation)
    assert frozenset({0, 1, 2}) <= w.vertex_set or w.vertex_set <= frozenset({0, 1, 2, 3, 4, 5})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_simplex_agrees_with_reference_solver(seed):
    from scipy.optimize import linprog
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 6)), int(rng.integers(3, 10))
    A = rng.normal(size=(m, n))
    b = A @ rng.random(n)
    c = rng.normal(size=n)
    reference = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if reference.status != 0:
        return
    x, obj, _ = solve_lp(c.copy(), A.copy(), b.copy())
    assert np.min(x) >= -1e-9
    assert abs(obj - reference.fun) <= 1e-6 * max(1.0, abs(reference.fun))
