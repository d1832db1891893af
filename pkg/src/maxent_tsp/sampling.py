"""Exact spanning-tree sampling and sampler validation.

Wilson-style loop-erased random walks with transition probability
proportional to edge weight; the sampled tree is distributed exactly
proportionally to the product of its edge weights.  Randomness comes from a
counter-based generator keyed by (seed, sample index), so batches are
reproducible regardless of execution order or thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .kernels import kernels
from .treedist import (DisconnectedGraphError, WeightedGraph, enumerate_trees)


def _sample_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed % (1 << 64), index % (1 << 64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _WalkPlan:
    """CSR layout of one weighted graph, ready for the walk kernel."""

    def __init__(self, g: WeightedGraph):
        self.n = g.n
        pos = [(u, v, w) for u, v, w in g.edges if w > 0]
        if not WeightedGraph(g.n, pos).is_connected():
            raise DisconnectedGraphError("support is disconnected")
        adj: list[list[tuple[int, int, float]]] = [[] for _ in range(g.n)]
        for i, (u, v, w) in enumerate(g.edges):
            if w > 0:
                adj[u].append((v, i, w))
                adj[v].append((u, i, w))
        indptr = [0]
        nbr_vertex: list[int] = []
        nbr_edge: list[int] = []
        cumw: list[float] = []
        for u in range(g.n):
            acc = 0.0
            for v, i, w in adj[u]:
                acc += w
                nbr_vertex.append(v)
                nbr_edge.append(i)
                cumw.append(acc)
            indptr.append(len(nbr_vertex))
        self.indptr = np.array(indptr, dtype=np.int64)
        self.nbr_vertex = np.array(nbr_vertex, dtype=np.int64)
        self.nbr_edge = np.array(nbr_edge, dtype=np.int64)
        self.cumw = np.array(cumw, dtype=np.float64)


class _Stream:
    """Deterministic uniform stream with prefix-stable growth."""

    def __init__(self, rng, initial: int):
        self.rng = rng
        self.buf = rng.random(initial)
        self.offset = 0

    def run(self, kern, plan: _WalkPlan):
        if plan.n == 1:
            return np.zeros(0, dtype=np.int64)
        while True:
            used, edges = kern.wilson_walk(
                plan.n, plan.indptr, plan.nbr_vertex, plan.nbr_edge,
                plan.cumw, self.buf[self.offset:])
            if used >= 0:
                self.offset += used
                return edges
            self.buf = np.concatenate([self.buf, self.rng.random(len(self.buf))])


class TreeSampler:
    """Reusable exact sampler over one weighted graph.

    The default method is the loop-erased walk; "conditional" selects the
    sequential sampler (one factorization per edge) kept as a cross-check
    path.  Both draw from the same distribution but consume randomness
    differently, so their streams are not interchangeable.
    """

    def __init__(self, g: WeightedGraph, seed: int = 0, method: str = "walk"):
        if method not in ("walk", "conditional"):
            raise ValueError(f"unknown sampling method {method!r}")
        self.graph = g
        self.seed = seed
        self.method = method
        self._plan = _WalkPlan(g)  # also validates connectivity
        self._kern = kernels()
        self._init_buf = max(64, 8 * g.n)

    def sample(self, index: int = 0) -> tuple[int, ...]:
        """Tree for this (seed, index) pair, as a sorted edge-index tuple."""
        if self.method == "conditional":
            return _sample_conditional(self.graph, _sample_rng(self.seed, index))
        stream = _Stream(_sample_rng(self.seed, index), self._init_buf)
        edges = stream.run(self._kern, self._plan)
        return tuple(sorted(int(e) for e in edges))


def _sample_conditional(g: WeightedGraph, rng) -> tuple[int, ...]:
    """Edge-by-edge conditional sampling via effective resistances.

    Processes edges in index order: take edge e with its current marginal,
    then contract (taken) or delete (skipped) and continue on the minor.
    """
    from .treedist import _contract, marginals as exact_marginals

    current = g
    index_map = list(range(len(g.edges)))
    chosen: list[int] = []
    while index_map:
        marg = exact_marginals(current)
        p = float(marg[0])
        take = p > 1.0 - 1e-12 or (p > 1e-12 and rng.random() < p)
        if take:
            chosen.append(index_map[0])
            sub, _, emap = _contract(current, 0)
            current = sub
            index_map = [index_map[i] for i in range(1, len(index_map))
                         if emap[i] >= 0]
        else:
            current = WeightedGraph(current.n, current.edges[1:])
            index_map = index_map[1:]
    return tuple(sorted(chosen))


class FitSampler:
    """Sampler for a fitted (possibly factorized) distribution.

    Draws one tree per factor from a single per-sample stream, maps factor
    edges back to the original indices and adds the contracted edges.
    """

    def __init__(self, fit, seed: int = 0):
        from .maxent import factor_views

        self.seed = seed
        self.forced = sorted(fit.contracted)
        self.parts = [( _WalkPlan(g), idx) for g, idx in factor_views(fit)]
        self._kern = kernels()
        self._init_buf = max(64, 8 * sum(p.n for p, _ in self.parts) or 64)

    def sample(self, index: int = 0) -> tuple[int, ...]:
        out = list(self.forced)
        stream = _Stream(_sample_rng(self.seed, index), self._init_buf)
        for plan, idx in self.parts:
            for e in stream.run(self._kern, plan):
                out.append(idx[int(e)])
        return tuple(sorted(out))


def sample_tree(g: WeightedGraph, seed: int, index: int = 0) -> tuple[int, ...]:
    return TreeSampler(g, seed).sample(index)


def validate_tree(g: WeightedGraph, tree: tuple[int, ...]) -> bool:
    if len(tree) != g.n - 1:
        return False
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in tree:
        u, v, _ = g.edges[i]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


@dataclass
class SampleBatch:
    """Batch of sampled trees with summary statistics."""

    trees: list[tuple[int, ...]]
    seed: int
    mean_cost: float | None
    edge_frequency: np.ndarray

    def to_json(self) -> dict:
        return {
            "count": len(self.trees),
            "seed": self.seed,
            "mean_cost": self.mean_cost,
            "edge_frequency": [float(f) for f in self.edge_frequency],
        }


def sample_batch(g: WeightedGraph, k: int, seed: int,
                 costs=None, threads: int = 1) -> SampleBatch:
    """k independent trees; aggregation is commutative, so the result does
    not depend on the thread count."""
    sampler = TreeSampler(g, seed)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(sampler.sample, range(k)))
    else:
        trees = [sampler.sample(i) for i in range(k)]
    freq = np.zeros(len(g.edges))
    for t in trees:
        freq[list(t)] += 1.0
    freq /= max(k, 1)
    mean_cost = None
    if costs is not None:
        costs = np.asarray(costs, dtype=float)
        mean_cost = float(np.mean([costs[list(t)].sum() for t in trees]))
    return SampleBatch(trees, seed, mean_cost, freq)


def chi_square_check(g: WeightedGraph, samples: int, seed: int,
                     sample_fn=None) -> dict:
    """Chi-square goodness of fit of sampled versus enumerated trees.

    `sample_fn(index) -> tree tuple` may be injected (used by the biased
    negative control); default is the exact sampler.
    """
    exact = enumerate_trees(g)
    index = {t: i for i, (t, _) in enumerate(exact.trees)}
    expected = np.array([p for _, p in exact.trees]) * samples
    counts = np.zeros(len(exact.trees))
    if sample_fn is None:
        sample_fn = TreeSampler(g, seed).sample
    for i in range(samples):
        t = sample_fn(i)
        counts[index[t]] += 1.0
    stat = float(np.sum((counts - expected) ** 2 / expected))
    dof = len(exact.trees) - 1
    pvalue = float(chi2.sf(stat, dof)) if dof > 0 else 1.0
    return {"statistic": stat, "dof": dof, "p_value": pvalue,
            "samples": samples, "trees": len(exact.trees)}


def frequency_deviation_bound(num_edges: int, samples: int) -> float:
    """Allowed max |empirical frequency - marginal| for a sampler batch."""
    return 5.0 * np.sqrt(np.log(max(num_edges, 2)) / samples)


def expected_cost_check(sampler, costs, target_cost: float,
                        fit_eps: float, samples: int,
                        threads: int = 1) -> dict:
    """Empirical mean tree cost versus the linear cost of the marginals.

    With exact marginals the two agree in expectation; the fit error enters
    as a relative bias bound, sampling noise as three standard errors.
    `sampler` is anything with a ``sample(index) -> edge tuple`` method.
    """
    costs = np.asarray(costs, dtype=float)
    vals = np.empty(samples)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(sampler.sample, range(samples)))
        for i, t in enumerate(trees):
            vals[i] = costs[list(t)].sum()
    else:
        for i in range(samples):
            vals[i] = costs[list(sampler.sample(i))].sum()
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    tol = fit_eps * abs(target_cost) + 3.0 * se
    return {
        "mean": mean,
        "target": target_cost,
        "stderr": se,
        "tolerance": tol,
        "pass": bool(abs(mean - target_cost) <= tol + 1e-12),
        "samples": samples,
    }
