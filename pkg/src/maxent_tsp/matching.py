"""Parity correction and tour assembly.

Odd-degree vertices of a sampled tree get a minimum-cost perfect matching
under the instance metric (blossom algorithm); tree plus matching is an
even connected multigraph whose Eulerian circuit shortcuts to a tour.
Includes the classical tree-plus-matching baseline heuristic.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .blossom import min_cost_perfect_matching
from .instances import MetricInstance, Tour


def odd_vertices(n: int, edges) -> list[int]:
    """Vertices of odd degree in an edge multiset (always evenly many)."""
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    odd = [v for v in range(n) if deg[v] % 2]
    assert len(odd) % 2 == 0
    return odd


def min_matching(inst: MetricInstance, odd: list[int],
                 method: str = "blossom") -> tuple[list[tuple[int, int]], float]:
    """Minimum-cost perfect matching on the odd set under inst's metric.

    Returns (pairs, cost) with pairs in original vertex labels.  The "dp"
    method is the exhaustive bitmask oracle used for cross-checking.
    """
    k = len(odd)
    if k % 2:
        raise ValueError("odd set must have even cardinality")
    if k == 0:
        return [], 0.0
    sub = np.asarray(inst.cost)[np.ix_(odd, odd)]
    if method == "blossom":
        local = min_cost_perfect_matching(k, sub.tolist())
    elif method == "dp":
        if k > 20:
            raise ValueError("dp oracle limited to 20 vertices")
        local = _dp_matching(k, tuple(map(tuple, sub.tolist())))
    else:
        raise ValueError(f"unknown method {method!r}")
    pairs = [(odd[i], odd[j]) for i, j in local]
    cost = float(sum(inst.cost[u, v] for u, v in pairs))
    return pairs, cost


def _dp_matching(k, cost) -> list[tuple[int, int]]:
    @lru_cache(maxsize=None)
    def rec(mask):
        if mask == 0:
            return 0.0, ()
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        best, bestp = float("inf"), ()
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m ^= 1 << j
            val, sub = rec(rest ^ (1 << j))
            val += cost[i][j]
            if val < best:
                best, bestp = val, sub + ((i, j),)
        return best, bestp

    _, pairs = rec((1 << k) - 1)
    rec.cache_clear()
    return sorted(tuple(sorted(p)) for p in pairs)


def ojoin_feasible(n: int, edges_y, odd_set, tol: float = 1e-9,
                   cuts=None):
    """Check y(cut) >= 1 for every cut with odd intersection with odd_set.

    `edges_y` is a list of (u, v, y) triples.  With `cuts` None all
    2^(n-1) bipartitions are enumerated (n <= 14); otherwise only the
    supplied vertex sets are tested.  Returns None or a witness set.
    """
    odd = frozenset(odd_set)
    if cuts is None:
        if n > 14:
            raise ValueError("exhaustive cut check limited to n <= 14")
        masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
        weight = np.zeros(len(masks))
        for u, v, y in edges_y:
            bu = (masks >> u) & 1 if u < n - 1 else np.zeros_like(masks)
            bv = (masks >> v) & 1 if v < n - 1 else np.zeros_like(masks)
            weight = weight + y * np.asarray(bu ^ bv, dtype=float)
        parity = np.zeros(len(masks), dtype=np.int64)
        for v in odd:
            if v < n - 1:
                parity += (masks >> v) & 1
        if (n - 1) in odd:
            parity += 1  # the fixed side contains vertex n-1
        bad = np.flatnonzero((parity % 2 == 1) & (weight < 1.0 - tol))
        if bad.size:
            mask = int(masks[bad[0]])
            side = frozenset(v for v in range(n - 1) if (mask >> v) & 1)
            return side
        return None
    for side in cuts:
        side = frozenset(side)
        if len(side & odd) % 2 == 1:
            w = sum(y for u, v, y in edges_y if (u in side) != (v in side))
            if w < 1.0 - tol:
                return side
    return None


def eulerian_shortcut(inst: MetricInstance, multi_edges) -> Tour:
    """Eulerian circuit of an even connected multigraph, shortcut to a tour.

    First occurrence of each vertex in circuit order is kept; repeats are
    skipped, which never increases the cost under the triangle inequality.
    """
    n = inst.n
    adj: list[list[int]] = [[] for _ in range(n)]
    edges = list(multi_edges)
    for i, (u, v) in enumerate(edges):
        adj[u].append(i)
        adj[v].append(i)
    for v in range(n):
        if len(adj[v]) % 2:
            raise ValueError(f"vertex {v} has odd degree")
    for lst in adj:
        lst.sort(reverse=True)  # deterministic traversal order

    used = [False] * len(edges)
    stack = [0]
    circuit = []
    while stack:
        v = stack[-1]
        while adj[v] and used[adj[v][-1]]:
            adj[v].pop()
        if not adj[v]:
            circuit.append(stack.pop())
        else:
            i = adj[v].pop()
            used[i] = True
            a, b = edges[i]
            stack.append(b if a == v else a)
    if not all(used):
        raise ValueError("multigraph is not connected")

    seen = set()
    order = []
    for v in circuit:
        if v not in seen:
            seen.add(v)
            order.append(v)
    if len(order) != n:
        raise ValueError("circuit did not visit every vertex")
    return Tour(tuple(order), inst.tour_cost(order))


def minimum_spanning_tree(inst: MetricInstance) -> list[tuple[int, int]]:
    """Dense Prim with deterministic tie-breaking by vertex index."""
    n = inst.n
    in_tree = [False] * n
    best = np.full(n, np.inf)
    best_to = np.full(n, -1, dtype=int)
    in_tree[0] = True
    for v in range(1, n):
        best[v] = inst.cost[0, v]
        best_to[v] = 0
    edges = []
    for _ in range(n - 1):
        v = int(np.argmin(np.where(in_tree, np.inf, best)))
        edges.append((int(best_to[v]), v))
        in_tree[v] = True
        upd = inst.cost[v] < best
        upd &= ~np.array(in_tree)
        best = np.where(upd, inst.cost[v], best)
        best_to = np.where(upd, v, best_to)
    return edges


def christofides_baseline(inst: MetricInstance) -> Tour:
    """Spanning tree plus matching on its odd vertices, then shortcut."""
    tree = minimum_spanning_tree(inst)
    odd = odd_vertices(inst.n, tree)
    pairs, _ = min_matching(inst, odd)
    return eulerian_shortcut(inst, tree + pairs)


def split_instance(inst: MetricInstance) -> MetricInstance:
    """Instance with vertex 0 duplicated as vertex n at distance 0.

    Matches the root-splitting transform of the LP: the new vertex copies
    all of vertex 0's distances (a pseudometric; triangle holds with
    equality through the zero edge).
    """
    n = inst.n
    c = np.zeros((n + 1, n + 1))
    c[:n, :n] = inst.cost
    c[n, :n] = inst.cost[0, :]
    c[:n, n] = inst.cost[:, 0]
    c[n, n] = 0.0
    return MetricInstance(n + 1, c, inst.name + "+split")


def tour_from_tree(inst: MetricInstance, split: MetricInstance,
                   tree_edges, root_edge: tuple[int, int]) -> tuple[Tour, float]:
    """Complete a sampled tree (on the split instance) to a tour of inst.

    Returns the shortcut tour on original labels plus the matching cost.
    The tree lives on n+1 vertices; the root edge is appended before
    parity correction, and the split pair collapses during shortcutting.
    """
    n = inst.n
    multi = list(tree_edges) + [root_edge]
    odd = odd_vertices(split.n, multi)
    pairs, mcost = min_matching(split, odd)
    walk = eulerian_shortcut(split, multi + pairs)
    order = [v if v < n else 0 for v in walk.order]
    seen = set()
    final = [v for v in order if not (v in seen or seen.add(v))]
    return Tour(tuple(final), inst.tour_cost(final)), mcost
