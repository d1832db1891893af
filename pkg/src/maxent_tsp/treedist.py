"""Weighted spanning-tree distributions.

Two routes to the same quantities: `marginals` uses the weighted Laplacian
(edge marginal = weight times effective resistance, one dense factorization),
while `enumerate_trees` builds the exact distribution by deletion/contraction
and serves as the brute-force oracle.  Exact distributions support the
closure operations needed by the verification suites: conditioning on an
edge, conditioning a vertex set to be a tree, and rank sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

LAMBDA_PRUNE_REL = 1e-12
FORCED_MARGINAL = 1.0 - 1e-12


class DisconnectedGraphError(ValueError):
    pass


class TreeCountBudgetError(RuntimeError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} spanning trees exceeds budget {limit}")
        self.count = count
        self.limit = limit


class EmptySupportError(ValueError):
    """Conditioning event has probability zero."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected multigraph with nonnegative edge weights.

    Parallel edges are allowed (contraction produces them); self-loops are
    not.  Edge order is significant: marginals and tree edge sets refer to
    indices into `edges`.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __init__(self, n: int, edges):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple((int(u), int(v), float(w))
                                                for u, v, w in edges))
        for u, v, w in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            if w < 0:
                raise ValueError("negative weight")

    def weight_vector(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges])

    def is_connected(self, support_only: bool = True) -> bool:
        seen = {0} if self.n else set()
        stack = [0]
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            if w > 0 or not support_only:
                adj[u].append(v)
                adj[v].append(u)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n


def _contract(g: WeightedGraph, edge_idx: int):
    """Contract one edge; returns (graph, vertex_map, edge_map).

    edge_map[i] is the new index of old edge i, or -1 for edges removed
    (the contracted edge and any resulting self-loops).
    """
    u, v, _ = g.edges[edge_idx]
    a, b = min(u, v), max(u, v)
    vmap = [x if x < b else (a if x == b else x - 1) for x in range(g.n)]
    new_edges = []
    emap = []
    for i, (p, q, w) in enumerate(g.edges):
        np_, nq = vmap[p], vmap[q]
        if np_ == nq:
            emap.append(-1)
        else:
            emap.append(len(new_edges))
            new_edges.append((np_, nq, w))
    return WeightedGraph(g.n - 1, new_edges), vmap, emap


def _laplacian(n: int, edges) -> np.ndarray:
    lap = np.zeros((n, n))
    for u, v, w in edges:
        lap[u, u] += w
        lap[v, v] += w
        lap[u, v] -= w
        lap[v, u] -= w
    return lap


def tree_count(g: WeightedGraph) -> int:
    """Number of spanning trees of the support (matrix-tree determinant)."""
    support = [(u, v, 1.0) for u, v, w in g.edges if w > 0]
    if g.n <= 1:
        return 1
    lap = _laplacian(g.n, support)
    sign, logdet = np.linalg.slogdet(lap[1:, 1:])
    if sign <= 0:
        return 0
    return int(round(math.exp(logdet)))


def marginals(g: WeightedGraph) -> np.ndarray:
    """P[e in T] for the weight-proportional spanning-tree distribution.

    Computed as weight(e) times the effective resistance of e, from one
    Cholesky factorization of the reduced Laplacian.  Weights are scaled to
    max 1 first; near-zero weights are deleted and forced edges (marginal
    above 1 - 1e-12) are contracted and re-expanded, which keeps the
    factorization well conditioned under the extreme weight ratios the
    fitting loop can produce.
    """
    out = np.zeros(len(g.edges))
    _marginals_into(g, np.arange(len(g.edges)), out)
    return out


def _marginals_into(g: WeightedGraph, idx_map, out) -> None:
    w = g.weight_vector()
    if len(w) == 0:
        if g.n > 1:
            raise DisconnectedGraphError("no edges")
        return
    wmax = w.max()
    if wmax <= 0:
        raise DisconnectedGraphError("all weights zero")
    keep = w > LAMBDA_PRUNE_REL * wmax
    if not keep.all():
        sub = WeightedGraph(g.n, [g.edges[i] for i in np.flatnonzero(keep)])
        _marginals_into(sub, idx_map[keep], out)
        return

    scaled = [(u, v, wt / wmax) for u, v, wt in g.edges]
    lap = _laplacian(g.n, scaled)[1:, 1:]
    try:
        factor = cho_factor(lap)
    except np.linalg.LinAlgError as exc:
        raise DisconnectedGraphError("singular reduced Laplacian") from exc

    m = len(g.edges)
    rhs = np.zeros((g.n - 1, m))
    for i, (u, v, _) in enumerate(g.edges):
        if u > 0:
            rhs[u - 1, i] = 1.0
        if v > 0:
            rhs[v - 1, i] = -1.0
    pots = cho_solve(factor, rhs)
    reff = np.einsum("ij,ij->j", rhs, pots)
    marg = (w / wmax) * reff

    forced = marg > FORCED_MARGINAL
    if forced.any():
        # Contract the most forced edge and redo the rest on the minor.
        i = int(np.argmax(marg))
        out[idx_map[i]] = 1.0
        sub, _, emap = _contract(g, i)
        sub_idx = np.array([idx_map[j] for j in range(m) if emap[j] >= 0], dtype=int)
        if len(sub.edges):
            _marginals_into(sub, sub_idx, out)
        dropped = [idx_map[j] for j in range(m) if emap[j] < 0 and j != i]
        for j in dropped:
            out[j] = 0.0
        return

    out[idx_map] = np.clip(marg, 0.0, 1.0)


@dataclass
class ExactTreeDistribution:
    """Explicit list of spanning trees with probabilities.

    Trees are sorted tuples of edge indices into `graph.edges`.  The
    incidence matrix (trees x edges, boolean) drives all event queries.
    """

    graph: WeightedGraph
    trees: list[tuple[tuple[int, ...], float]]
    _matrix: np.ndarray | None = field(default=None, repr=False)
    _probs: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        total = sum(p for _, p in self.trees)
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValueError(f"probabilities sum to {total}")

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            m = np.zeros((len(self.trees), len(self.graph.edges)), dtype=bool)
            for i, (t, _) in enumerate(self.trees):
                m[i, list(t)] = True
            self._matrix = m
        return self._matrix

    @property
    def probs(self) -> np.ndarray:
        if self._probs is None:
            self._probs = np.array([p for _, p in self.trees])
        return self._probs

    @property
    def marginals(self) -> np.ndarray:
        return self.probs @ self.matrix

    def count_in(self, edge_set) -> np.ndarray:
        """Per-tree |T intersect edge_set| as an integer vector."""
        idx = list(edge_set)
        if not idx:
            return np.zeros(len(self.trees), dtype=int)
        return self.matrix[:, idx].sum(axis=1)

    def prob(self, mask) -> float:
        return float(self.probs[np.asarray(mask)].sum())

    def expect(self, values) -> float:
        return float(self.probs @ np.asarray(values))

    def tree_mask(self, vertex_set) -> np.ndarray:
        """Boolean per-tree vector of the event 'vertex_set induces a tree'.

        The restriction of a spanning tree to E(S) is always acyclic, so it
        is a tree on S exactly when it has |S| - 1 edges.
        """
        s = set(vertex_set)
        inner = [i for i, (u, v, _) in enumerate(self.graph.edges)
                 if u in s and v in s]
        return self.count_in(inner) == len(s) - 1

    def edges_inside(self, vertex_set) -> list[int]:
        s = set(vertex_set)
        return [i for i, (u, v, _) in enumerate(self.graph.edges)
                if u in s and v in s]

    def edges_crossing(self, vertex_set) -> list[int]:
        s = set(vertex_set)
        return [i for i, (u, v, _) in enumerate(self.graph.edges)
                if (u in s) != (v in s)]

    def to_json(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": [[u, v, w] for u, v, w in self.graph.edges],
            "trees": [[list(t), p] for t, p in self.trees],
            "marginals": list(map(float, self.marginals)),
        }


def enumerate_trees(g: WeightedGraph, limit: int = 10 ** 6) -> ExactTreeDistribution:
    """All spanning trees with probability proportional to the weight product.

    Deletion/contraction recursion, O(#trees * n).  Raises
    TreeCountBudgetError (carrying the matrix-tree count) when the number of
    trees exceeds `limit`.
    """
    support_edges = [(i, u, v, w) for i, (u, v, w) in enumerate(g.edges) if w > 0]
    support = WeightedGraph(g.n, [(u, v, w) for _, u, v, w in support_edges])
    if not support.is_connected():
        raise DisconnectedGraphError("support is disconnected")
    count = tree_count(support)
    if count > limit:
        raise TreeCountBudgetError(count, limit)

    orig_idx = [i for i, _, _, _ in support_edges]
    results: list[tuple[tuple[int, ...], float]] = []

    def rec(graph: WeightedGraph, idx: list[int], chosen: list[int], weight: float):
        if graph.n == 1:
            results.append((tuple(sorted(chosen)), weight))
            return
        # bridges must be taken; otherwise branch on edge 0
        u0, v0, w0 = graph.edges[0]
        minus = WeightedGraph(graph.n, graph.edges[1:])
        sub, _, emap = _contract(graph, 0)
        sub_idx = [idx[j] for j in range(len(graph.edges)) if emap[j] >= 0]
        rec(sub, sub_idx, chosen + [idx[0]], weight * w0)
        if minus.is_connected():
            rec(minus, idx[1:], chosen, weight)

    rec(support, orig_idx, [], 1.0)
    total = sum(w for _, w in results)
    trees = [(t, w / total) for t, w in results]
    return ExactTreeDistribution(g, trees)


def condition(d: ExactTreeDistribution, constraint) -> ExactTreeDistribution:
    """Condition an exact distribution.

    `constraint` is one of
      ("in", edge_index)     - edge in the tree
      ("out", edge_index)    - edge not in the tree
      ("tree", vertex_set)   - the restriction to vertex_set is a tree
    """
    kind = constraint[0]
    if kind == "in":
        mask = d.matrix[:, constraint[1]]
    elif kind == "out":
        mask = ~d.matrix[:, constraint[1]]
    elif kind == "tree":
        mask = d.tree_mask(constraint[1])
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    total = d.prob(mask)
    if total <= 0:
        raise EmptySupportError(f"constraint {constraint!r} has probability 0")
    trees = [(t, p / total) for (t, p), keep in zip(d.trees, mask) if keep]
    return ExactTreeDistribution(d.graph, trees)


def rank_sequence(d: ExactTreeDistribution, edge_set) -> np.ndarray:
    """P[|A cap T| = k] for k = 0..|A|."""
    counts = d.count_in(edge_set)
    seq = np.zeros(len(list(edge_set)) + 1)
    for c, p in zip(counts, d.probs):
        seq[c] += p
    return seq


def rank_sequence_report(seq: np.ndarray, tol: float = 1e-12) -> dict:
    """Log-concavity / no-internal-zeros / mode-vs-mean facts for a sequence."""
    nz = np.flatnonzero(seq > tol)
    no_internal_zeros = bool(nz.size == 0 or np.all(np.diff(nz) == 1))
    lc_margin = math.inf
    for k in range(1, len(seq) - 1):
        if seq[k - 1] > tol and seq[k + 1] > tol:
            lc_margin = min(lc_margin, seq[k] ** 2 - seq[k - 1] * seq[k + 1])
        elif seq[k] <= tol and (seq[k - 1] > tol and seq[k + 1] > tol):
            lc_margin = min(lc_margin, -1.0)
    mean = float(np.dot(np.arange(len(seq)), seq))
    mode = int(np.argmax(seq))
    return {
        "log_concave": bool(lc_margin >= -tol),
        "log_concavity_margin": None if math.isinf(lc_margin) else float(lc_margin),
        "no_internal_zeros": no_internal_zeros,
        "mode": mode,
        "mean": mean,
        "mode_near_mean": bool(abs(mode - mean) < 1.0 + 1e-9),
    }


def product_distribution(parts: list[ExactTreeDistribution],
                         graph: WeightedGraph,
                         embeddings: list[list[int]]) -> ExactTreeDistribution:
    """Independent combination of component distributions into one graph.

    `embeddings[i][j]` maps edge j of part i to an edge index of `graph`.
    Used to build limit distributions for inputs that sit on the boundary of
    the spanning-tree polytope, where no finite weight vector is exact.
    """
    combos: list[tuple[tuple[int, ...], float]] = [((), 1.0)]
    for part, emb in zip(parts, embeddings):
        nxt = []
        for t_acc, p_acc in combos:
            for t, p in part.trees:
                nxt.append((t_acc + tuple(emb[i] for i in t), p_acc * p))
        combos = nxt
    trees = [(tuple(sorted(t)), p) for t, p in combos]
    return ExactTreeDistribution(graph, trees)
