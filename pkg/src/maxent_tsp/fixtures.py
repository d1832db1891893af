"""Shared fixture library for tests, probes and the CLI probe command.

Two hand-built half-integral LP solutions ("triangle chain" and "bad
edge") exercise the structural and probabilistic machinery; both sit on
the boundary of the spanning-tree polytope, so their entropy-maximizing
distributions are explicit products rather than finite-weight fits.
"""

from __future__ import annotations


import numpy as np

from .heldkarp import LpSolution
from .instances import MetricInstance, Tour, metric_completion
from .maxent import fit_lambda
from .treedist import ExactTreeDistribution, WeightedGraph, enumerate_trees

A_, B_, C_, D_, U0, V0 = 0, 1, 2, 3, 4, 5


def _metric_from_support(n, edges, scale=1.0):
    big = 1e6
    c = np.full((n, n), big)
    np.fill_diagonal(c, 0.0)
    for u, v, _x in edges:
        c[u, v] = c[v, u] = scale
    return metric_completion(c)


def _tour(inst: MetricInstance, order) -> Tour:
    return Tour(tuple(order), inst.tour_cost(order))


# ---------------------------------------------------------------------------
# Triangle chain: two unit pairs joined by half edges, half edges to the
# root pair on both sides.  Minimum cuts {a,b}, {c,d} and {a,b,c,d} stack
# into three nested triangles.
# ---------------------------------------------------------------------------

def triangle_chain_solution() -> LpSolution:
    edges = [
        (A_, B_, 1.0), (C_, D_, 1.0),
        (A_, C_, 0.5), (B_, D_, 0.5),
        (A_, U0, 0.5), (B_, U0, 0.5),
        (C_, V0, 0.5), (D_, V0, 0.5),
        (U0, V0, 1.0),
    ]
    inst = triangle_chain_instance()
    costs = [float(inst.cost[u, v]) for u, v, _ in edges]
    objective = sum(x * c for (_, _, x), c in zip(edges, costs))
    return LpSolution(6, edges, objective, root_edge=8, split_origin=U0,
                      edge_costs=costs)


def triangle_chain_instance() -> MetricInstance:
    sol_edges = [
        (A_, B_, 1.0), (C_, D_, 1.0), (A_, C_, 0.5), (B_, D_, 0.5),
        (A_, U0, 0.5), (B_, U0, 0.5), (C_, V0, 0.5), (D_, V0, 0.5),
    ]
    c = _metric_from_support(6, sol_edges)
    c[U0, V0] = c[V0, U0] = 0.0
    c = metric_completion(c)
    return MetricInstance(6, c, "triangle-chain")


def triangle_chain_tour() -> Tour:
    return _tour(triangle_chain_instance(), (U0, V0, C_, D_, B_, A_))


def triangle_chain_distribution() -> ExactTreeDistribution:
    """Exact entropy-maximizing distribution for the triangle chain.

    The unit edges are forced and each half-edge pair contributes exactly
    one edge, independently and uniformly: 8 trees of probability 1/8.
    """
    sol = triangle_chain_solution()
    edges = sol.restricted_edges()
    g = WeightedGraph(6, edges)
    idx = {(u, v): i for i, (u, v, _x) in enumerate(edges)}
    forced = [idx[(A_, B_)], idx[(C_, D_)]]
    pairs = [
        (idx[(A_, C_)], idx[(B_, D_)]),
        (idx[(A_, U0)], idx[(B_, U0)]),
        (idx[(C_, V0)], idx[(D_, V0)]),
    ]
    return _product_of_pairs(g, forced, pairs)


# ---------------------------------------------------------------------------
# Bad edge: the complementary wiring.  The unit edges (a,c), (b,d) are
# forced, the pair {(a,b), (c,d)} is perfectly anti-correlated, and the
# (a,b) bundle fails the simultaneous-even-cuts test.
# ---------------------------------------------------------------------------

def bad_edge_solution() -> LpSolution:
    edges = [
        (A_, B_, 0.5), (C_, D_, 0.5),
        (A_, C_, 1.0), (B_, D_, 1.0),
        (A_, U0, 0.5), (B_, U0, 0.5),
        (C_, V0, 0.5), (D_, V0, 0.5),
        (U0, V0, 1.0),
    ]
    inst = bad_edge_instance()
    costs = [float(inst.cost[u, v]) for u, v, _ in edges]
    objective = sum(x * c for (_, _, x), c in zip(edges, costs))
    return LpSolution(6, edges, objective, root_edge=8, split_origin=U0,
                      edge_costs=costs)


def bad_edge_instance() -> MetricInstance:
    sol_edges = [
        (A_, B_, 0.5), (C_, D_, 0.5), (A_, C_, 1.0), (B_, D_, 1.0),
        (A_, U0, 0.5), (B_, U0, 0.5), (C_, V0, 0.5), (D_, V0, 0.5),
    ]
    c = _metric_from_support(6, sol_edges)
    c[U0, V0] = c[V0, U0] = 0.0
    c = metric_completion(c)
    return MetricInstance(6, c, "bad-edge")


def bad_edge_tour_triangles() -> Tour:
    """Reference tour making {a,c} and {b,d} intervals (all-triangle tree)."""
    return _tour(bad_edge_instance(), (U0, V0, C_, A_, B_, D_))


def bad_edge_tour_degree() -> Tour:
    """Reference tour making neither pair an interval (one degree cut)."""
    return _tour(bad_edge_instance(), (U0, V0, A_, B_, C_, D_))


def bad_edge_distribution() -> ExactTreeDistribution:
    sol = bad_edge_solution()
    edges = sol.restricted_edges()
    g = WeightedGraph(6, edges)
    idx = {(u, v): i for i, (u, v, _x) in enumerate(edges)}
    forced = [idx[(A_, C_)], idx[(B_, D_)]]
    pairs = [
        (idx[(A_, B_)], idx[(C_, D_)]),
        (idx[(A_, U0)], idx[(B_, U0)]),
        (idx[(C_, V0)], idx[(D_, V0)]),
    ]
    return _product_of_pairs(g, forced, pairs)


def _product_of_pairs(g, forced, pairs) -> ExactTreeDistribution:
    trees = []
    for mask in range(1 << len(pairs)):
        t = list(forced)
        for k, (i, j) in enumerate(pairs):
            t.append(i if (mask >> k) & 1 else j)
        trees.append((tuple(sorted(t)), 1.0 / (1 << len(pairs))))
    d = ExactTreeDistribution(g, trees)
    want = g.weight_vector()
    if not np.allclose(d.marginals, want, atol=1e-12):
        raise AssertionError("fixture marginals do not match the solution")
    return d


# ---------------------------------------------------------------------------
# Integral cycle (post-split form) and split complete graph
# ---------------------------------------------------------------------------

def integral_cycle_solution(n_free: int) -> LpSolution:
    """Unit cycle u0 - v0 - w1 - ... - w_k - u0 in post-split form."""
    n = n_free + 2
    u0, v0 = n - 2, n - 1
    order = [u0, v0] + list(range(n_free))
    edges = []
    for i in range(n):
        a, b = order[i], order[(i + 1) % n]
        edges.append((a, b, 1.0))
    root = next(i for i, (a, b, _x) in enumerate(edges)
                if {a, b} == {u0, v0})
    costs = [0.0 if i == root else 1.0 for i in range(len(edges))]
    objective = float(n - 1)
    return LpSolution(n, edges, objective, root_edge=root, split_origin=u0,
                      edge_costs=costs)


def integral_cycle_tour(n_free: int) -> Tour:
    n = n_free + 2
    u0, v0 = n - 2, n - 1
    order = [u0, v0] + list(range(n_free))
    return Tour(tuple(order), float(n - 1))


def integral_cycle_distribution(n_free: int) -> ExactTreeDistribution:
    sol = integral_cycle_solution(n_free)
    edges = sol.restricted_edges()
    g = WeightedGraph(sol.n, edges)
    trees = [(tuple(range(len(edges))), 1.0)]
    return ExactTreeDistribution(g, trees)


def split_k4_solution() -> LpSolution:
    """Complete graph on four vertices at 2/3, split at vertex 0."""
    u0, v0 = 0, 4
    edges = []
    for v in (1, 2, 3):
        edges.append((u0, v, 1.0 / 3.0))
    for v in (1, 2, 3):
        edges.append((v0, v, 1.0 / 3.0))
    edges += [(1, 2, 2.0 / 3.0), (1, 3, 2.0 / 3.0), (2, 3, 2.0 / 3.0)]
    edges.append((u0, v0, 1.0))
    costs = [1.0] * 9 + [0.0]
    objective = 4.0
    return LpSolution(5, edges, objective, root_edge=9, split_origin=0,
                      edge_costs=costs)


def split_k4_distribution(eps: float = 1e-10) -> ExactTreeDistribution:
    sol = split_k4_solution()
    return maxent_exact_distribution(sol.n, sol.restricted_edges(), eps=eps)


def maxent_exact_distribution(n, edges, eps: float = 1e-8,
                              limit: int = 10 ** 6) -> ExactTreeDistribution:
    """Fit weights to the fractional values and enumerate the result.

    Forced edges are spliced back into every tree and independent factors
    are combined as a product, giving an exact distribution on the full
    edge list whose marginals match the fractional values up to the fit
    tolerance.
    """
    from .maxent import factor_views

    fit = fit_lambda(n, edges, [x for _, _, x in edges], eps=eps)
    full_graph = WeightedGraph(n, edges)
    forced = sorted(fit.contracted)
    combos: list[tuple[list[int], float]] = [(forced, 1.0)]
    for g, idx in factor_views(fit):
        part = enumerate_trees(g, limit=limit)
        if len(combos) * len(part.trees) > limit:
            raise ValueError("factor product exceeds the tree budget")
        combos = [(acc + [idx[j] for j in t], pa * p)
                  for acc, pa in combos for t, p in part.trees]
    trees = [(tuple(sorted(t)), p) for t, p in combos]
    return ExactTreeDistribution(full_graph, trees)


# ---------------------------------------------------------------------------
# Small weighted graphs for sampler validation
# ---------------------------------------------------------------------------

def unit_triangle() -> WeightedGraph:
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def weighted_triangle() -> WeightedGraph:
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)])


def unit_c4() -> WeightedGraph:
    return WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])


def unit_k4() -> WeightedGraph:
    return WeightedGraph(4, [(u, v, 1.0) for u in range(4)
                             for v in range(u + 1, 4)])


def unit_k(n: int) -> WeightedGraph:
    return WeightedGraph(n, [(u, v, 1.0) for u in range(n)
                             for v in range(u + 1, n)])


def sampler_fixtures() -> list[tuple[str, WeightedGraph]]:
    return [
        ("k3", unit_triangle()),
        ("c4", unit_c4()),
        ("k4", unit_k4()),
        ("triangle-1-1-2", weighted_triangle()),
    ]


# ---------------------------------------------------------------------------
# Bundled instances and the evaluation suite
# ---------------------------------------------------------------------------

TSPLIB_FIXTURES = ("small1e", "small2e", "small1m", "small2m", "small1l")

# documented optimal tour lengths for bundled instances
DOCUMENTED_OPTIMA = {"berlin52": 7542.0}


def load_bundled(name: str) -> MetricInstance:
    from importlib import resources

    from .instances import load_tsplib

    text = (resources.files("maxent_tsp") / "data" / f"{name}.tsp").read_text()
    return load_tsplib(text, name=name)


def suite_instances(random_count: int = 50) -> list[MetricInstance]:
    """The evaluation suite: random Euclidean n in 10..16 plus the bundled
    TSPLIB fixtures."""
    from .instances import random_euclidean

    out = []
    for seed in range(random_count):
        n = 10 + seed % 7
        out.append(random_euclidean(n, seed))
    for name in TSPLIB_FIXTURES:
        out.append(load_bundled(name))
    return out


def maxflow_event_fixtures() -> list[tuple[str, ExactTreeDistribution, list[int], list[int]]]:
    """(name, distribution, A, B) combinations with E[A_T] = E[B_T] = 1."""
    out = []
    d1 = triangle_chain_distribution()
    sol1 = triangle_chain_solution()
    e1 = sol1.restricted_edges()

    def between(edges, s, t):
        return [i for i, (u, v, _x) in enumerate(edges)
                if (u in s and v in t) or (u in t and v in s)]

    rest1 = lambda s: set(range(6)) - set(s)
    out.append(("chain-left", d1, between(e1, {A_}, rest1({A_, B_})),
                between(e1, {B_}, rest1({A_, B_}))))
    out.append(("chain-right", d1, between(e1, {C_}, rest1({C_, D_})),
                between(e1, {D_}, rest1({C_, D_}))))
    out.append(("chain-root", d1, between(e1, {A_, B_}, {U0, V0}),
                between(e1, {C_, D_}, {U0, V0})))

    d2 = bad_edge_distribution()
    sol2 = bad_edge_solution()
    e2 = sol2.restricted_edges()
    out.append(("bad-left", d2, between(e2, {A_}, rest1({A_, C_})),
                between(e2, {C_}, rest1({A_, C_}))))
    out.append(("bad-right", d2, between(e2, {B_}, rest1({B_, D_})),
                between(e2, {D_}, rest1({B_, D_}))))
    out.append(("bad-root", d2, between(e2, {A_, C_}, {U0, V0}),
                between(e2, {B_, D_}, {U0, V0})))

    for nf in (4, 6):
        dI = integral_cycle_distribution(nf)
        solI = integral_cycle_solution(nf)
        eI = solI.restricted_edges()
        u0, v0 = nf, nf + 1
        out.append((f"cycle{nf}-ends", dI, between(eI, {0}, {u0, v0}),
                    between(eI, {nf - 1}, {u0, v0})))

    dk = split_k4_distribution()
    ek = split_k4_solution().restricted_edges()
    left = [i for i, (u, v, _x) in enumerate(ek) if 0 in (u, v)]
    right = [i for i, (u, v, _x) in enumerate(ek) if 4 in (u, v)]
    out.append(("splitk4-ends", dk, left, right))
    half = [i for i, (u, v, _x) in enumerate(ek)
            if {u, v} in ({1, 2}, {0, 3})]
    other = [i for i, (u, v, _x) in enumerate(ek)
             if {u, v} in ({1, 3}, {4, 2})]
    out.append(("splitk4-mixed", dk, half, other))

    from .treedist import condition
    idx1 = {(u, v): i for i, (u, v, _x) in enumerate(e1)}
    d1c = condition(d1, ("in", idx1[(A_, U0)]))
    out.append(("chain-right-conditioned", d1c,
                between(e1, {C_}, rest1({C_, D_})),
                between(e1, {D_}, rest1({C_, D_}))))
    return out
