import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxent_tsp import fixtures as fx
from maxent_tsp.treedist import (DisconnectedGraphError, EmptySupportError,
                                 TreeCountBudgetError, WeightedGraph,
                                 condition, enumerate_trees, marginals,
                                 rank_sequence, rank_sequence_report,
                                 tree_count)


def test_marginals_symmetric_graphs():
    assert np.allclose(marginals(fx.unit_triangle()), 2 / 3)
    assert np.allclose(marginals(fx.unit_k4()), 0.5)
    assert np.allclose(marginals(fx.unit_c4()), 0.75)


def test_marginals_weighted_triangle():
    assert np.allclose(marginals(fx.weighted_triangle()), [0.6, 0.6, 0.8])


def test_marginals_sum_to_tree_size():
    g = WeightedGraph(6, [(0, 1, 0.3), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 0.7),
                          (4, 5, 1.1), (5, 0, 0.9), (1, 4, 0.5), (2, 5, 0.4)])
    assert abs(marginals(g).sum() - 5.0) < 1e-9


def test_parallel_edges_supported():
    # two parallel edges split the connection probability by weight
    g = WeightedGraph(3, [(0, 1, 1.0), (0, 1, 3.0), (1, 2, 1.0)])
    m = marginals(g)
    assert np.allclose(m, [0.25, 0.75, 1.0])
    d = enumerate_trees(g)
    assert len(d.trees) == 2
    assert np.allclose(d.marginals, m)


def test_marginals_disconnected_raises():
    g = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DisconnectedGraphError):
        marginals(g)


def test_enumerate_uniform_triangle():
    d = enumerate_trees(fx.unit_triangle())
    assert len(d.trees) == 3
    assert all(abs(p - 1 / 3) < 1e-12 for _, p in d.trees)


def test_enumerate_weighted_triangle_probabilities():
    d = enumerate_trees(fx.weighted_triangle())
    probs = {t: p for t, p in d.trees}
    assert abs(probs[(0, 1)] - 0.2) < 1e-12
    assert abs(probs[(0, 2)] - 0.4) < 1e-12
    assert abs(probs[(1, 2)] - 0.4) < 1e-12


def test_enumerate_cycle_paths():
    d = enumerate_trees(fx.unit_c4())
    assert len(d.trees) == 4
    assert all(abs(p - 0.25) < 1e-12 for _, p in d.trees)


def test_enumeration_budget_error_carries_count():
    g = fx.unit_k(7)  # 7^5 = 16807 spanning trees
    with pytest.raises(TreeCountBudgetError) as err:
        enumerate_trees(g, limit=100)
    assert err.value.count == 7 ** 5
    assert tree_count(g) == 7 ** 5


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_oracle_equivalence_marginals_vs_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 7))
    edges = [(u, v, float(rng.uniform(0.1, 3.0)))
             for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.85]
    g = WeightedGraph(n, edges)
    if not g.is_connected():
        return
    d = enumerate_trees(g)
    assert np.allclose(marginals(g), d.marginals, atol=1e-9)


def test_condition_edge_in_out():
    d = enumerate_trees(fx.unit_triangle())
    din = condition(d, ("in", 0))
    assert abs(din.marginals[0] - 1.0) < 1e-12
    assert np.allclose(din.marginals[1:], 0.5)
    dout = condition(d, ("out", 0))
    assert dout.marginals[0] == 0.0
    assert np.allclose(dout.marginals[1:], 1.0)
    with pytest.raises(EmptySupportError):
        condition(condition(d, ("out", 0)), ("in", 0))


def test_condition_tree_set_factorizes():
    # conditioning a vertex set to be a tree makes inside and outside
    # independent; verified on the exact joint frequencies
    d = fx.triangle_chain_distribution()
    for s in ({0, 1}, {0, 1, 2, 3}):
        dc = condition(d, ("tree", s))
        inner = dc.edges_inside(s)
        outer = [i for i in range(len(dc.graph.edges)) if i not in inner]
        joint: dict[tuple, float] = {}
        pa: dict[tuple, float] = {}
        pb: dict[tuple, float] = {}
        for t, p in dc.trees:
            a = tuple(sorted(set(t) & set(inner)))
            b = tuple(sorted(set(t) & set(outer)))
            joint[(a, b)] = joint.get((a, b), 0.0) + p
            pa[a] = pa.get(a, 0.0) + p
            pb[b] = pb.get(b, 0.0) + p
        for (a, b), p in joint.items():
            assert abs(p - pa[a] * pb[b]) < 1e-12


def test_rank_sequence_point_mass_on_everything():
    d = enumerate_trees(fx.unit_k4())
    seq = rank_sequence(d, list(range(6)))
    assert abs(seq[3] - 1.0) < 1e-12
    assert np.allclose(seq[:3], 0.0) and abs(seq[4]) < 1e-12


def test_rank_sequence_k4_vertex_boundary():
    d = enumerate_trees(fx.unit_k4())
    boundary = [i for i, (u, v, _w) in enumerate(d.graph.edges) if 0 in (u, v)]
    seq = rank_sequence(d, boundary)
    assert np.allclose(seq, [0.0, 9 / 16, 6 / 16, 1 / 16])


def test_rank_sequence_single_edge():
    d = enumerate_trees(fx.weighted_triangle())
    seq = rank_sequence(d, [2])
    assert np.allclose(seq, [0.2, 0.8])


def test_rank_sequences_log_concave_everywhere():
    d = enumerate_trees(fx.unit_k4())
    rng = np.random.default_rng(1)
    for _ in range(20):
        k = int(rng.integers(1, 7))
        subset = list(rng.choice(6, size=k, replace=False))
        rep = rank_sequence_report(rank_sequence(d, subset))
        assert rep["log_concave"] and rep["no_internal_zeros"]
        assert rep["mode_near_mean"]


def test_pairwise_negative_correlation():
    from maxent_tsp.probes import negative_association_pairs
    for d in (enumerate_trees(fx.unit_k4()),
              fx.triangle_chain_distribution(),
              fx.bad_edge_distribution()):
        assert negative_association_pairs(d)["ok"]


def test_conditioning_monotonicity_on_counts():
    from maxent_tsp.probes import stochastic_dominance_check
    d = enumerate_trees(fx.unit_k4())
    boundary = [i for i, (u, v, _w) in enumerate(d.graph.edges) if 0 in (u, v)]
    assert stochastic_dominance_check(d, boundary)["ok"]
