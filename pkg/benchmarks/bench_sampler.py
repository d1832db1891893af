"""Compare the compiled and pure-Python kernels.

Usage: python benchmarks/bench_sampler.py [--samples N]

Times the tree-sampling walk and the exact-tour dynamic program on a few
graph sizes with both backends, and confirms their outputs are identical.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from maxent_tsp.heldkarp import solve_held_karp, split_root
from maxent_tsp.instances import random_euclidean
from maxent_tsp.kernels import BACKEND, kernels
from maxent_tsp.maxent import fit_lambda
from maxent_tsp.sampling import FitSampler, TreeSampler
from maxent_tsp.treedist import WeightedGraph


def dense_graph(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(u, v, float(rng.uniform(0.2, 2.0)))
             for u in range(n) for v in range(u + 1, n)]
    return WeightedGraph(n, edges)


def time_sampling(backend, g, samples):
    import os
    os.environ["MAXENT_TSP_KERNELS"] = backend
    try:
        s = TreeSampler(g, seed=0)
        t0 = time.perf_counter()
        trees = [s.sample(i) for i in range(samples)]
        return time.perf_counter() - t0, trees
    finally:
        del os.environ["MAXENT_TSP_KERNELS"]


def time_dp(backend, cost):
    k = kernels(backend)
    t0 = time.perf_counter()
    out = k.held_karp_dp(np.array(cost))
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=5000)
    args = ap.parse_args()

    print(f"default backend: {BACKEND}")
    backends = ["python"] + (["compiled"] if BACKEND == "compiled" else [])

    print(f"\ntree sampling ({args.samples} samples)")
    print(f"{'graph':>12} " + " ".join(f"{b:>12}" for b in backends) + "  speedup")
    for n in (8, 16, 32):
        g = dense_graph(n, seed=n)
        times = {}
        trees = {}
        for b in backends:
            times[b], trees[b] = time_sampling(b, g, args.samples)
        if len(backends) == 2:
            assert trees["python"] == trees["compiled"], "backend mismatch"
            ratio = times["python"] / times["compiled"]
        else:
            ratio = 1.0
        row = " ".join(f"{times[b]:>10.3f}s" for b in backends)
        print(f"{f'K{n}':>12} {row}  {ratio:>6.1f}x")

    print("\nexact tour dynamic program")
    for n in (12, 14, 16):
        inst = random_euclidean(n, seed=n)
        times = {}
        vals = {}
        for b in backends:
            times[b], vals[b] = time_dp(b, inst.cost)
        if len(backends) == 2:
            assert abs(vals["python"][0] - vals["compiled"][0]) < 1e-12
            ratio = times["python"] / times["compiled"]
        else:
            ratio = 1.0
        row = " ".join(f"{times[b]:>10.3f}s" for b in backends)
        print(f"{f'n={n}':>12} {row}  {ratio:>6.1f}x")

    print("\nfull fitted-sampler path (one fractional relaxation)")
    inst = random_euclidean(16, 11)
    sp = split_root(solve_held_karp(inst))
    edges = sp.restricted_edges()
    fit = fit_lambda(sp.n, edges, [x for _, _, x in edges], eps=1e-8)
    import os
    for b in backends:
        os.environ["MAXENT_TSP_KERNELS"] = b
        try:
            sampler = FitSampler(fit, seed=0)
            t0 = time.perf_counter()
            for i in range(args.samples):
                sampler.sample(i)
            dt = time.perf_counter() - t0
        finally:
            del os.environ["MAXENT_TSP_KERNELS"]
        print(f"{b:>12} {dt:>10.3f}s "
              f"({args.samples / dt:,.0f} trees/s)")


if __name__ == "__main__":
    main()
