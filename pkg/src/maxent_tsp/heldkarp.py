"""Subtour-elimination LP for metric TSP, solved to an extreme point.

Cutting-plane loop: start from the degree equalities, separate violated
cuts with a deterministic global-min-cut routine on the support, re-solve,
and stop once the minimum cut weighted by the current solution is at least
2 - tol.  Includes the root-splitting transform that introduces a
unit-value, zero-cost edge, and the membership test for the spanning-tree
polytope used before weight fitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instances import MetricInstance
from .mincut import connected_components, cut_weight, stoer_wagner
from .simplex import SimplexError, solve_lp

SUPPORT_PRUNE = 1e-9
MAX_ROUNDS = 400


class HeldKarpError(RuntimeError):
    def __init__(self, msg, iterations: int = 0):
        super().__init__(msg)
        self.iterations = iterations


@dataclass(frozen=True)
class CutViolation:
    vertex_set: frozenset
    weight: float


@dataclass
class LpSolution:
    """Fractional solution over an explicit support edge list.

    Pre-split solutions have root_edge None; after split_root the solution
    carries the unit-value zero-cost edge and the id of the vertex that was
    split.  edge_costs is kept alongside for downstream cost accounting but
    is not part of the serialized schema.
    """

    n: int
    edges: list[tuple[int, int, float]]
    objective: float
    root_edge: int | None = None
    split_origin: int | None = None
    edge_costs: list[float] = field(default_factory=list)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n)
        for u, v, x in self.edges:
            deg[u] += x
            deg[v] += x
        return deg

    def cut_value(self, side) -> float:
        return cut_weight(self.edges, frozenset(side))

    def restricted_edges(self) -> list[tuple[int, int, float]]:
        """Support without the root edge (the tree-sampling ground set)."""
        return [e for i, e in enumerate(self.edges) if i != self.root_edge]

    def restricted_costs(self) -> list[float]:
        return [c for i, c in enumerate(self.edge_costs) if i != self.root_edge]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edges": [[u, v, x] for u, v, x in self.edges],
            "root_edge": self.root_edge,
            "objective": self.objective,
        }


def _pair_index(n: int):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    idx = {p: k for k, p in enumerate(pairs)}
    return pairs, idx


def solve_held_karp(inst: MetricInstance, tol: float = 1e-9,
                    max_rounds: int = MAX_ROUNDS) -> LpSolution:
    """Extreme-point optimum of the degree + subtour relaxation.

    Equality rows are the vertex degrees; subtour cuts are added lazily
    from the separation oracle until the support's global min cut reaches
    2 - tol.  The reported support is pruned at 1e-9.
    """
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError("tol outside [1e-12, 1e-6]")
    n = inst.n
    pairs, idx = _pair_index(n)
    nv = len(pairs)
    cost = np.array([inst.cost[i, j] for i, j in pairs])

    deg_rows = np.zeros((n, nv))
    for k, (i, j) in enumerate(pairs):
        deg_rows[i, k] = 1.0
        deg_rows[j, k] = 1.0
    cut_rows: list[frozenset] = []
    seen_cuts: set[frozenset] = set()

    x = np.zeros(nv)
    for _ in range(max_rounds):
        m_cuts = len(cut_rows)
        A = np.zeros((n + m_cuts, nv + m_cuts))
        A[:n, :nv] = deg_rows
        b = np.full(n + m_cuts, 2.0)
        for r, side in enumerate(cut_rows):
            for k, (i, j) in enumerate(pairs):
                if (i in side) != (j in side):
                    A[n + r, k] = 1.0
            A[n + r, nv + r] = -1.0  # surplus
        try:
            sol, _, _ = solve_lp(np.concatenate([cost, np.zeros(m_cuts)]), A, b)
        except SimplexError as exc:
            raise HeldKarpError(f"LP solve failed after {exc.iterations} "
                                f"pivots: {exc}", exc.iterations) from exc
        x = sol[:nv]

        violations = _find_violations(n, pairs, x, tol)
        if not violations:
            break
        added = 0
        for side in violations:
            if side not in seen_cuts:
                seen_cuts.add(side)
                cut_rows.append(side)
                added += 1
        if added == 0:
            raise HeldKarpError("separation returned only known cuts; stalled")
    else:
        raise HeldKarpError(f"no convergence in {max_rounds} cutting-plane rounds")

    support = [(pairs[k][0], pairs[k][1], float(x[k]))
               for k in range(nv) if x[k] > SUPPORT_PRUNE]
    costs = [float(inst.cost[u, v]) for u, v, _ in support]
    objective = float(cost @ x)
    return LpSolution(n, support, objective, edge_costs=costs)


def _find_violations(n, pairs, x, tol, cap=20) -> list[frozenset]:
    support = [(pairs[k][0], pairs[k][1], float(x[k]))
               for k in range(len(pairs)) if x[k] > SUPPORT_PRUNE]
    out: list[frozenset] = []
    comps = connected_components(n, support)
    if len(comps) > 1:
        return [frozenset(c) for c in comps[:-1]][:cap]
    for k, (i, j) in enumerate(pairs):
        if x[k] > 1.0 + 1e-9:
            out.append(frozenset([i, j]))
    weight, side, phase_cuts = stoer_wagner(n, support, collect_phase_cuts=True)
    for w, s in sorted(phase_cuts, key=lambda t: t[0]):
        if w < 2.0 - tol and 0 < len(s) < n:
            out.append(frozenset(s))
    dedup = []
    seen = set()
    for s in out:
        canon = s if 0 not in s else frozenset(range(n)) - s
        if canon not in seen and 0 < len(canon) < n:
            seen.add(canon)
            dedup.append(canon)
    return dedup[:cap]


def separate_subtour(sol: LpSolution, tol: float = 1e-9) -> CutViolation | None:
    """Most violated subtour cut of a degree-feasible candidate, if any.

    Disconnected support returns one component (weight 0); otherwise the
    deterministic global min cut of the support, when below 2 - tol.
    """
    comps = connected_components(sol.n, sol.edges)
    if len(comps) > 1:
        side = frozenset(sorted(comps, key=lambda c: sorted(c)[0])[0])
        if 0 in side:
            side = frozenset(range(sol.n)) - side
        return CutViolation(side, cut_weight(sol.edges, side))
    weight, side = stoer_wagner(sol.n, sol.edges)
    if weight < 2.0 - tol:
        return CutViolation(frozenset(side), float(weight))
    return None


def split_root(sol: LpSolution) -> LpSolution:
    """Split the lowest-index vertex into two endpoints of a new unit edge.

    Every edge at the split vertex donates half its value to each copy; the
    new edge has value 1 and cost 0.  Degrees and the objective are
    preserved exactly, as are all cuts that avoid the new pair.
    """
    if sol.root_edge is not None:
        raise ValueError("solution is already split")
    u = 0
    v0 = sol.n
    edges: list[tuple[int, int, float]] = []
    costs: list[float] = []
    for (a, b, x), c in zip(sol.edges, sol.edge_costs or [0.0] * len(sol.edges)):
        if u in (a, b):
            w = a if b == u else b
            edges.append((u, w, x / 2.0))
            costs.append(c)
            edges.append((v0, w, x / 2.0))
            costs.append(c)
        else:
            edges.append((a, b, x))
            costs.append(c)
    root_edge = len(edges)
    edges.append((u, v0, 1.0))
    costs.append(0.0)
    return LpSolution(sol.n + 1, edges, sol.objective, root_edge=root_edge,
                      split_origin=u, edge_costs=costs)


TREE_POLYTOPE_BRUTE_MAX = 17


def check_spanning_tree_polytope(sol: LpSolution, tol: float = 1e-8):
    """Membership of the root-edge-free restriction in the tree polytope.

    Exhaustive subset check up to 17 vertices; beyond that the equivalent
    certificate min-cut(x0) >= 2 is used together with sampled subsets.
    Returns None on success, else a witness CutViolation carrying x(E(S)).
    """
    if sol.root_edge is None:
        raise ValueError("check applies to the post-split solution")
    edges = sol.restricted_edges()
    n = sol.n
    total = sum(x for _, _, x in edges)
    if abs(total - (n - 1)) > tol:
        return CutViolation(frozenset(range(n)), total)

    if n <= TREE_POLYTOPE_BRUTE_MAX:
        masks = np.arange(1, 1 << n, dtype=np.int64)
        inside = np.zeros(len(masks))
        for u, v, x in edges:
            inside += x * np.asarray(((masks >> u) & 1) & ((masks >> v) & 1),
                                     dtype=float)
        sizes = np.zeros(len(masks), dtype=np.int64)
        for v in range(n):
            sizes += (masks >> v) & 1
        bad = np.flatnonzero(inside > sizes - 1 + tol)
        if bad.size:
            mask = int(masks[bad[0]])
            side = frozenset(v for v in range(n) if (mask >> v) & 1)
            return CutViolation(side, float(inside[bad[0]]))
        return None

    # x(E(S)) <= |S|-1 for all S is equivalent to every cut of the full
    # (root-edge included) solution having weight >= 2
    weight, side = stoer_wagner(n, sol.edges)
    if weight < 2.0 - 2 * tol:
        inner = sum(x for u, v, x in edges if u in side and v in side)
        return CutViolation(frozenset(side), float(inner))
    rng = np.random.Generator(np.random.Philox(key=7))
    for _ in range(200):
        size = int(rng.integers(2, n))
        side = frozenset(int(v) for v in rng.choice(n, size=size, replace=False))
        inner = sum(x for u, v, x in edges if u in side and v in side)
        if inner > len(side) - 1 + tol:
            return CutViolation(side, float(inner))
    return None
