import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxent_tsp import fixtures as fx
from maxent_tsp.heldkarp import solve_held_karp, split_root
from maxent_tsp.instances import random_euclidean
from maxent_tsp.maxent import (FitConvergenceError, fit_lambda, fit_marginals,
                               factor_views)
from maxent_tsp.treedist import WeightedGraph, marginals


def test_symmetric_targets_give_uniform_weights():
    edges = [(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0)]
    fit = fit_lambda(3, edges, [2 / 3] * 3, eps=1e-10)
    lam = fit.lam / fit.lam[0]
    assert np.allclose(lam, 1.0, atol=1e-6)
    assert fit.max_rel_err <= 1e-10

    edges = [(0, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0), (0, 3, 0.0)]
    fit = fit_lambda(4, edges, [0.75] * 4, eps=1e-10)
    assert np.allclose(fit.lam / fit.lam[0], 1.0, atol=1e-6)


def test_weighted_triangle_recovered():
    edges = [(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0)]
    fit = fit_lambda(3, edges, [0.6, 0.6, 0.8], eps=1e-9)
    lam = fit.lam / fit.lam[0]
    assert np.allclose(lam, [1.0, 1.0, 2.0], rtol=1e-6)


def test_fit_marginals_match_targets_and_sum():
    sp = split_root(solve_held_karp(random_euclidean(12, 11)))
    edges = sp.restricted_edges()
    xs = np.array([x for _, _, x in edges])
    fit = fit_lambda(sp.n, edges, xs, eps=1e-8)
    marg = fit_marginals(fit, len(edges))
    assert np.max(np.abs(marg - xs) / np.maximum(xs, 1e-12)) <= 1e-8
    assert abs(marg.sum() - (sp.n - 1)) < 1e-9
    assert np.all((marg > 0) & (marg <= 1))


def test_forced_and_deleted_edges():
    edges = [(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0), (0, 3, 0.0), (2, 3, 0.0)]
    targets = [1.0, 0.5, 0.5, 0.0, 1.0]
    fit = fit_lambda(4, edges, targets, eps=1e-10)
    assert fit.contracted == [0, 4]
    assert fit.deleted == [3]
    marg = fit_marginals(fit, len(edges))
    assert np.allclose(marg, targets, atol=1e-9)


def test_scaling_invariance_of_marginals():
    g = fx.weighted_triangle()
    scaled = WeightedGraph(3, [(u, v, 7.5 * w) for u, v, w in g.edges])
    assert np.allclose(marginals(g), marginals(scaled), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_known_weights(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 8))
    edges = [(u, v, float(rng.uniform(0.3, 3.0)))
             for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.8]
    g = WeightedGraph(n, edges)
    if not g.is_connected():
        return
    target = marginals(g)
    fit = fit_lambda(n, edges, target, eps=1e-8)
    recovered = fit_marginals(fit, len(edges))
    assert np.max(np.abs(recovered - target)) <= 1e-6


def test_budget_error_carries_best_fit():
    edges = [(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0)]
    with pytest.raises(FitConvergenceError) as err:
        fit_lambda(3, edges, [0.6, 0.6, 0.8], eps=1e-13, max_evals=3)
    assert err.value.best_fit is not None
    assert 0 < err.value.best_err < 1.0


def test_factor_views_cover_kept_edges():
    sp = split_root(solve_held_karp(random_euclidean(16, 41)))
    edges = sp.restricted_edges()
    fit = fit_lambda(sp.n, edges, [x for _, _, x in edges], eps=1e-8)
    seen = set(fit.contracted) | set(fit.deleted)
    for g, idx in factor_views(fit):
        assert g.is_connected()
        assert not (set(idx) & seen)
        seen |= set(idx)
    assert seen == set(range(len(edges)))


def test_targets_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        fit_lambda(3, [(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0)], [1.5, 0.5, 0.5])
