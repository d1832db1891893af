"""Pure-Python twin of the compiled kernels.

Selected automatically when the extension is unavailable.  Consumes the
uniform stream in exactly the same order as the compiled version, so both
backends produce identical samples for identical seeds.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def wilson_walk(n, indptr, nbr_vertex, nbr_edge, cumw, uniforms):
    in_tree = np.zeros(n, dtype=bool)
    nxt_edge = np.full(n, -1, dtype=np.int64)
    nxt_vertex = np.full(n, -1, dtype=np.int64)
    out = []
    pos = 0
    nu = len(uniforms)

    in_tree[0] = True
    for start in range(1, n):
        u = start
        while not in_tree[u]:
            if pos >= nu:
                return -1, None
            lo = int(indptr[u])
            hi = int(indptr[u + 1])
            r = uniforms[pos] * cumw[hi - 1]
            pos += 1
            k = lo
            while k < hi - 1 and cumw[k] <= r:
                k += 1
            nxt_edge[u] = nbr_edge[k]
            nxt_vertex[u] = nbr_vertex[k]
            u = int(nbr_vertex[k])
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            out.append(int(nxt_edge[u]))
            u = int(nxt_vertex[u])
    return pos, np.array(out, dtype=np.int64)


def held_karp_dp(cost):
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    full = (1 << n) - 1
    dp = np.full((1 << n, n), np.inf)
    par = np.full((1 << n, n), -1, dtype=np.int8)
    dp[1, 0] = 0.0
    ks_cache = [np.array([k for k in range(1, n) if not (mask >> k) & 1], dtype=int)
                for mask in range(1 << n)]
    for mask in range(1, full + 1):
        if not mask & 1:
            continue
        ks = ks_cache[mask]
        if ks.size == 0:
            continue
        js = [j for j in range(n) if (mask >> j) & 1 and dp[mask, j] < np.inf]
        if not js:
            continue
        js = np.array(js, dtype=int)
        cand = dp[mask, js][:, None] + cost[np.ix_(js, ks)]
        arg = np.argmin(cand, axis=0)
        vals = cand[arg, np.arange(ks.size)]
        for i, k in enumerate(ks):
            nm = mask | (1 << k)
            if vals[i] < dp[nm, k]:
                dp[nm, k] = vals[i]
                par[nm, k] = js[arg[i]]

    closes = dp[full, 1:] + cost[1:, 0]
    best_j = int(np.argmin(closes)) + 1
    best = float(closes[best_j - 1])
    order = []
    mask, j = full, best_j
    while j != -1:
        order.append(j)
        pj = int(par[mask, j])
        mask ^= (1 << j)
        j = pj
    order.reverse()
    return best, order
