"""Global minimum cuts and near-minimum-cut enumeration.

Deterministic Stoer-Wagner for separation; exhaustive (vectorized bitmask)
enumeration at small n with a verified randomized-contraction path beyond.
"""

from __future__ import annotations

import math

import numpy as np


def adjacency_matrix(n: int, edges) -> np.ndarray:
    w = np.zeros((n, n))
    for u, v, x in edges:
        w[u, v] += x
        w[v, u] += x
    return w


def connected_components(n: int, edges) -> list[set[int]]:
    adj = [[] for _ in range(n)]
    for u, v, x in edges:
        if x > 0:
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp = {s}
        seen[s] = True
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def stoer_wagner(n: int, edges, collect_phase_cuts: bool = False):
    """Deterministic global min cut of a connected weighted graph.

    Returns (weight, side) or (weight, side, phase_cuts).  Ties in the
    maximum-adjacency order break toward the smallest vertex index, making
    the result reproducible.
    """
    if n < 2:
        raise ValueError("min cut needs at least two vertices")
    w = adjacency_matrix(n, edges)
    groups = [frozenset([v]) for v in range(n)]
    active = list(range(n))
    best_weight, best_side = math.inf, None
    phase_cuts = []
    while len(active) > 1:
        # maximum adjacency ordering
        start = active[0]
        in_a = {start}
        weights = {v: w[start, v] for v in active if v != start}
        order = [start]
        while weights:
            t = max(sorted(weights), key=lambda v: weights[v])
            order.append(t)
            in_a.add(t)
            del weights[t]
            for v in weights:
                weights[v] += w[t, v]
        s, t = order[-2], order[-1]
        cut_weight = float(sum(w[t, v] for v in active if v != t))
        side = groups[t]
        if collect_phase_cuts:
            phase_cuts.append((cut_weight, side))
        if cut_weight < best_weight - 1e-15:
            best_weight, best_side = cut_weight, side
        # merge t into s
        w[s, :] += w[t, :]
        w[:, s] += w[:, t]
        w[s, s] = 0.0
        groups[s] = groups[s] | groups[t]
        active.remove(t)
    if collect_phase_cuts:
        return best_weight, best_side, phase_cuts
    return best_weight, best_side


def cut_weight(edges, side: frozenset) -> float:
    return float(sum(x for u, v, x in edges if (u in side) != (v in side)))


BRUTE_FORCE_MAX_FREE = 20  # number of free (non-root) vertices


def enumerate_cuts_below(n: int, edges, threshold: float,
                         root_pair=None, rng_seed: int = 0,
                         eta_hint: float | None = None) -> list[tuple[frozenset, float]]:
    """All cuts of weight <= threshold, one side per bipartition.

    The reported side omits the root pair (or vertex 0 when no root pair is
    given).  Exhaustive for up to BRUTE_FORCE_MAX_FREE free vertices;
    randomized contraction with exact verification and dedup beyond, with
    enough repetitions that any individual near-minimum cut is missed with
    probability at most 1e-4.
    """
    if root_pair is None:
        anchored = [0]
    else:
        anchored = sorted(set(root_pair))
    free = [v for v in range(n) if v not in anchored]
    if len(free) <= BRUTE_FORCE_MAX_FREE:
        return _enumerate_brute(edges, free, threshold)
    return _enumerate_contraction(n, edges, threshold, anchored, rng_seed, eta_hint)


def _enumerate_brute(edges, free, threshold):
    k = len(free)
    pos = {v: i for i, v in enumerate(free)}
    masks = np.arange(1, 1 << k, dtype=np.int64)
    weight = np.zeros(masks.shape)
    for u, v, x in edges:
        bu = (masks >> pos[u]) & 1 if u in pos else np.zeros_like(masks)
        bv = (masks >> pos[v]) & 1 if v in pos else np.zeros_like(masks)
        weight = weight + x * np.asarray((bu ^ bv), dtype=float)
    hits = np.flatnonzero(weight <= threshold + 1e-12)
    out = []
    for h in hits:
        mask = int(masks[h])
        side = frozenset(v for v in free if (mask >> pos[v]) & 1)
        out.append((side, float(weight[h])))
    out.sort(key=lambda sw: (len(sw[0]), sorted(sw[0])))
    return out


def _enumerate_contraction(n, edges, threshold, anchored, rng_seed, eta_hint):
    eta = eta_hint if eta_hint is not None else max(0.0, threshold - 2.0)
    reps = int(math.ceil(n ** (2.0 + eta) * math.log(max(n * n, 2) * 1e4))) + 1
    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    found: dict[frozenset, float] = {}

    # singletons are cheap to scan directly
    for v in range(n):
        if v in anchored:
            continue
        side = frozenset([v])
        wgt = cut_weight(edges, side)
        if wgt <= threshold + 1e-12:
            found[side] = wgt

    ew = np.array([x for _, _, x in edges])
    for _ in range(reps):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        r0 = anchored[0]
        for a in anchored[1:]:
            parent[find(a)] = find(r0)
        ncomp = n - len(anchored) + 1
        weights = ew.copy()
        while ncomp > 2:
            alive = np.array([weights[i] if find(edges[i][0]) != find(edges[i][1])
                              else 0.0 for i in range(len(edges))])
            total = alive.sum()
            if total <= 0:
                break
            i = int(rng.choice(len(edges), p=alive / total))
            u, v, _ = edges[i]
            parent[find(v)] = find(u)
            ncomp -= 1
        root = find(anchored[0])
        side = frozenset(v for v in range(n) if find(v) != root)
        if 0 < len(side) < n and side not in found:
            wgt = cut_weight(edges, side)
            if wgt <= threshold + 1e-12:
                found[side] = wgt
    out = sorted(found.items(), key=lambda sw: (len(sw[0]), sorted(sw[0])))
    return out
