import numpy as np
import pytest

from maxent_tsp.instances import random_euclidean
from maxent_tsp.kernels import BACKEND, kernels
from maxent_tsp.sampling import TreeSampler
from maxent_tsp.treedist import WeightedGraph

needs_compiled = pytest.mark.skipif(BACKEND != "compiled",
                                    reason="extension not built")


@needs_compiled
def test_backends_sample_identical_trees(monkeypatch):
    g = WeightedGraph(7, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 0.5),
                          (4, 5, 1.0), (5, 6, 1.3), (6, 0, 1.0), (0, 3, 1.5),
                          (1, 4, 1.0), (2, 6, 0.7)])
    compiled = [TreeSampler(g, seed=9).sample(i) for i in range(300)]
    monkeypatch.setenv("MAXENT_TSP_KERNELS", "python")
    pure = [TreeSampler(g, seed=9).sample(i) for i in range(300)]
    assert compiled == pure


@needs_compiled
def test_backends_agree_on_exact_tours(monkeypatch):
    for seed in (1, 2, 3):
        inst = random_euclidean(11, seed)
        cost = np.array(inst.cost)
        c1, order1 = kernels("compiled").held_karp_dp(cost)
        c2, order2 = kernels("python").held_karp_dp(cost)
        assert abs(c1 - c2) < 1e-12
        assert inst.tour_cost(order1) == pytest.approx(inst.tour_cost(order2))


def test_forced_backend_selection(monkeypatch):
    monkeypatch.setenv("MAXENT_TSP_KERNELS", "python")
    assert kernels().NAME == "python"
    monkeypatch.delenv("MAXENT_TSP_KERNELS")
    assert kernels().NAME == BACKEND


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels("fortran")


def test_walk_kernel_buffer_exhaustion_is_prefix_stable():
    g = WeightedGraph(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0),
                          (4, 0, 1.0), (0, 2, 1.0), (1, 3, 1.0)])
    s = TreeSampler(g, seed=5)
    # sample normally, then force a tiny initial buffer and compare
    want = [s.sample(i) for i in range(50)]
    s2 = TreeSampler(g, seed=5)
    s2._init_buf = 2
    got = [s2.sample(i) for i in range(50)]
    assert want == got
