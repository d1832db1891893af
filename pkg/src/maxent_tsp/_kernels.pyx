# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: loop-erased random-walk tree sampling and the
bitmask dynamic program for exact tours.

Must stay behaviourally identical to _kernels_py (same uniforms consumed
in the same order) so that results do not depend on which backend is
selected at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def wilson_walk(int n,
                cnp.int64_t[::1] indptr,
                cnp.int64_t[::1] nbr_vertex,
                cnp.int64_t[::1] nbr_edge,
                cnp.float64_t[::1] cumw,
                cnp.float64_t[::1] uniforms):
    """One random spanning tree via loop-erased walks rooted at vertex 0.

    Returns (used, edges) where `used` is the number of uniforms consumed,
    or (-1, None) if the supplied uniform buffer ran out.
    """
    cdef cnp.ndarray[cnp.npy_bool, ndim=1] in_tree_arr = np.zeros(n, dtype=np.bool_)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt_edge_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt_vertex_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_arr = np.empty(n - 1, dtype=np.int64)
    cdef cnp.npy_bool[::1] in_tree = in_tree_arr
    cdef cnp.int64_t[::1] nxt_edge = nxt_edge_arr
    cdef cnp.int64_t[::1] nxt_vertex = nxt_vertex_arr
    cdef cnp.int64_t[::1] out = out_arr

    cdef Py_ssize_t pos = 0, nu = uniforms.shape[0], m = 0
    cdef long start, u, k, lo, hi
    cdef double r, total

    in_tree[0] = True
    for start in range(1, n):
        u = start
        while not in_tree[u]:
            if pos >= nu:
                return -1, None
            lo = indptr[u]
            hi = indptr[u + 1]
            total = cumw[hi - 1]
            r = uniforms[pos] * total
            pos += 1
            k = lo
            while k < hi - 1 and cumw[k] <= r:
                k += 1
            nxt_edge[u] = nbr_edge[k]
            nxt_vertex[u] = nbr_vertex[k]
            u = nbr_vertex[k]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            out[m] = nxt_edge[u]
            m += 1
            u = nxt_vertex[u]
    return pos, np.asarray(out_arr[:m])


def held_karp_dp(cnp.float64_t[:, ::1] cost):
    """Optimal Hamiltonian cycle through all vertices: (cost, order)."""
    cdef long n = cost.shape[0]
    cdef long full = (1 << n) - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dp_arr = np.full((1 << n, n), np.inf)
    cdef cnp.ndarray[cnp.int8_t, ndim=2] par_arr = np.full((1 << n, n), -1, dtype=np.int8)
    cdef cnp.float64_t[:, ::1] dp = dp_arr
    cdef cnp.int8_t[:, ::1] par = par_arr
    cdef long mask, j, k, nm
    cdef double d, nd

    dp[1, 0] = 0.0
    for mask in range(1, full + 1):
        if not mask & 1:
            continue
        for j in range(n):
            if not (mask >> j) & 1:
                continue
            d = dp[mask, j]
            if d == np.inf:
                continue
            for k in range(1, n):
                if (mask >> k) & 1:
                    continue
                nm = mask | (1 << k)
                nd = d + cost[j, k]
                if nd < dp[nm, k]:
                    dp[nm, k] = nd
                    par[nm, k] = <cnp.int8_t> j

    cdef double best = np.inf
    cdef long best_j = 0
    for j in range(1, n):
        d = dp[full, j] + cost[j, 0]
        if d < best:
            best = d
            best_j = j

    order = []
    mask = full
    j = best_j
    while j != -1:
        order.append(j)
        pj = par[mask, j]
        mask ^= (1 << j)
        j = pj
    order.reverse()
    return best, order
