"""Exact verification of the probabilistic toolbox on small distributions.

Groups of checks:

* Bernoulli-sum facts: the even-sum product formula, the even-probability
  upper bound for means up to 1.2, and two Poisson-style lower bounds on
  point and tail probabilities.
* Tree conditioning: near-minimum-cut restrictions are trees with high
  probability, adjacent near-minimum pairs are joined by exactly one tree
  edge, and a tree avoids an edge set with probability at least one minus
  its fractional mass.
* A generalized product-form lower bound for hitting prescribed counts on
  up to three disjoint sets simultaneously.
* The marginal-preserving event: a max-flow construction selecting a
  sub-event of {A_T = B_T = 1} of quadratic-in-zeta probability whose
  conditional marginals on A and B move by at most zeta in total
  variation.
* Edge-bundle classification over a cut hierarchy: half/good/bad with the
  simultaneous-even, 2-1-1 and 2-2-2 happiness probabilities, plus the
  necessary conditions for badness.

All exact-distribution checks are deterministic; the only tolerance is
float round-off (1e-9 or tighter).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import RuleConstants
from .cuts import CutHierarchy, degree_partition
from .maxflow import max_flow
from .treedist import ExactTreeDistribution

GRID = 10 ** 15


class DegenerateEventError(ValueError):
    pass


class InputMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Bernoulli sums
# ---------------------------------------------------------------------------

def bernoulli_pmf(ps) -> np.ndarray:
    """Exact (convolution) pmf of a sum of independent Bernoullis."""
    pmf = np.array([1.0])
    for p in ps:
        pmf = np.convolve(pmf, [1.0 - p, p])
    return pmf


def _poi(lam: float, k: int) -> float:
    return math.exp(-lam) * lam ** k / math.factorial(k)


def _poi_tail(lam: float, k: int) -> float:
    if k <= 0:
        return 1.0
    return max(0.0, 1.0 - sum(_poi(lam, i) for i in range(k)))


def point_prob_lower_bound(p: float, k: int) -> float:
    """Lower bound on P[X = k] for any Bernoulli sum X with mean p,
    valid for integer k with k - 1 < p < k + 1."""
    best = math.inf
    for ell in range(0, min(int(math.floor(p + 1e-12)), k) + 1):
        base = _poi(p - ell, k - ell)
        if p > k:
            base *= (1.0 - (p - ell) / (k - ell + 1.0)) ** (p - k)
        best = min(best, base)
    return best


def tail_prob_lower_bound(p: float) -> float:
    """Lower bound on P[X >= ceil(p)] for any Bernoulli sum X with mean p."""
    k = math.ceil(p - 1e-12)
    best = math.inf
    for ell in range(0, int(math.floor(p + 1e-12)) + 1):
        best = min(best, _poi_tail(p - ell, k - ell))
    return best


def even_prob(pmf: np.ndarray) -> float:
    return float(pmf[::2].sum())


def bernoulli_facts(n_max: int = 30, seed: int = 0) -> dict:
    """Sweep the Bernoulli-sum facts over equal, random and extremal
    probability vectors; returns per-check margins and any violations."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    checks = []

    def vectors(q, n):
        out = [np.full(n, q / n)]
        for _ in range(3):
            raw = rng.random(n)
            out.append(raw * (q / raw.sum()))
        # extremal profiles: some ones, the rest equal, zeros allowed
        for ones in range(0, int(q)):
            rest = n - ones
            if rest > 0 and q - ones <= rest:
                v = np.concatenate([np.ones(ones),
                                    np.full(rest, (q - ones) / rest)])
                out.append(v)
        return [v for v in out if np.all(v <= 1.0 + 1e-12)]

    # even-sum product formula for equal probabilities (exact identity)
    for n in range(1, n_max + 1, 3):
        for p in (0.0, 0.1, 0.3, 0.5, 0.77, 1.0):
            got = even_prob(bernoulli_pmf([p] * n))
            want = 0.5 * (1.0 + (1.0 - 2.0 * p) ** n)
            checks.append({"rule": "even_sum_product_formula", "n": n, "p": p,
                           "margin": 1e-12 - abs(got - want)})

    # even-probability upper bound for 0 < q <= 1.2
    for q in (0.05, 0.2, 0.5, 0.8, 1.0, 1.1, 1.2):
        bound = 0.5 * (1.0 + math.exp(-2.0 * q))
        for n in range(max(1, int(q)), n_max + 1, 4):
            for v in vectors(q, n):
                got = even_prob(bernoulli_pmf(v))
                checks.append({"rule": "even_prob_upper_bound", "q": q, "n": n,
                               "margin": bound - got + 1e-12})

    # Poisson-style point lower bound, k - 1 < p < k + 1
    for p in (0.3, 0.8, 1.0, 1.3, 1.9, 2.4, 3.1):
        for n in range(max(1, math.ceil(p)), n_max + 1, 5):
            for v in vectors(p, n):
                pmf = bernoulli_pmf(v)
                for k in range(max(0, math.ceil(p - 1) if p != int(p) else int(p) - 1),
                               min(len(pmf) - 1, math.floor(p + 1)) + 1):
                    if not (k - 1 < p < k + 1):
                        continue
                    got = float(pmf[k])
                    checks.append({"rule": "point_prob_lower_bound",
                                   "p": p, "k": k, "n": n,
                                   "margin": got - point_prob_lower_bound(p, k)
                                   + 1e-12})

    # Poisson-style tail lower bound at k = ceil(p)
    for p in (0.3, 0.8, 1.0, 1.5, 2.2, 3.7):
        for n in range(max(1, math.ceil(p)), n_max + 1, 5):
            for v in vectors(p, n):
                pmf = bernoulli_pmf(v)
                k = math.ceil(p - 1e-12)
                got = float(pmf[k:].sum())
                checks.append({"rule": "tail_prob_lower_bound", "p": p, "n": n,
                               "margin": got - tail_prob_lower_bound(p) + 1e-12})

    violations = [c for c in checks if c["margin"] < 0]
    per_rule: dict[str, dict] = {}
    for c in checks:
        agg = per_rule.setdefault(c["rule"], {"count": 0,
                                              "min_margin": math.inf})
        agg["count"] += 1
        if c["margin"] < agg["min_margin"]:
            agg["min_margin"] = c["margin"]
            agg["tightest"] = {k: v for k, v in c.items() if k != "rule"}
    return {"checks": len(checks), "violations": violations,
            "per_rule": per_rule, "ok": not violations}


# ---------------------------------------------------------------------------
# Tree conditioning
# ---------------------------------------------------------------------------

def verify_tree_conditioning(d: ExactTreeDistribution, x, cuts,
                             extra_edge_sets=(), tol: float = 1e-9) -> dict:
    """Exact conditioning facts for the given near-minimum cuts.

    `cuts` is a list of vertex sets avoiding the root endpoints; their
    slack is measured from the fractional vector x.  Reports margins for
    the tree-restriction bound, the one-edge bound for disjoint pairs with
    near-minimum union, and the empty-intersection bound.
    """
    marg = d.marginals
    x = np.asarray(x, dtype=float)
    if np.max(np.abs(marg - x)) > 1e-6:
        raise InputMismatchError("distribution marginals do not match x")

    def cut_weight(s):
        return float(sum(x[i] for i in d.edges_crossing(s)))

    checks = []
    cuts = [frozenset(s) for s in cuts]
    for s in cuts:
        eps = max(0.0, cut_weight(s) - 2.0)
        got = d.prob(d.tree_mask(s))
        checks.append({"rule": "near_tree_restriction", "set": sorted(s),
                       "eps": eps, "value": got,
                       "margin": got - (1.0 - eps / 2.0) + tol})

    for i, a in enumerate(cuts):
        for b in cuts[i + 1:]:
            if a & b:
                continue
            u = a | b
            eps_a = max(0.0, cut_weight(a) - 2.0)
            eps_b = max(0.0, cut_weight(b) - 2.0)
            eps_u = cut_weight(u) - 2.0
            if eps_u > 1.0:  # union nowhere near minimum: statement vacuous
                continue
            eps_u = max(0.0, eps_u)
            between = [k for k, (p, q, _w) in enumerate(d.graph.edges)
                       if (p in a and q in b) or (p in b and q in a)]
            got = d.prob(d.count_in(between) == 1)
            bound = 1.0 - (eps_a + eps_b + eps_u) / 2.0
            checks.append({"rule": "one_edge_between", "sets": [sorted(a), sorted(b)],
                           "value": got, "margin": got - bound + tol})

    probe_sets = [d.edges_crossing(s) for s in cuts] + [list(s) for s in extra_edge_sets]
    for a in probe_sets:
        mass = float(sum(x[i] for i in a))
        got = d.prob(d.count_in(a) == 0)
        checks.append({"rule": "avoid_edge_set", "mass": mass, "value": got,
                       "margin": got - (1.0 - mass) + tol})

    violations = [c for c in checks if c["margin"] < 0]
    return {"checks": checks, "violations": violations, "ok": not violations}


# ---------------------------------------------------------------------------
# Generalized simultaneous-count lower bound
# ---------------------------------------------------------------------------

def gurvits_bound_check(d: ExactTreeDistribution, sets, ns,
                        tol: float = 1e-12) -> dict:
    """P[all counts hit] versus the doubly-exponential product bound.

    eps is measured as the worst one-sided probability of reaching the
    prescribed totals over every subset of the (at most three) set indices.
    """
    m = len(sets)
    if m > 3:
        raise ValueError("bound is vacuous beyond three sets at this scale")
    flat = [set(s) for s in sets]
    for i in range(m):
        for j in range(i + 1, m):
            if flat[i] & flat[j]:
                raise ValueError("sets must be disjoint")
    counts = [d.count_in(s) for s in sets]
    ns = list(ns)

    eps = 1.0
    for mask in range(1, 1 << m):
        tot = sum(counts[i] for i in range(m) if (mask >> i) & 1)
        target = sum(ns[i] for i in range(m) if (mask >> i) & 1)
        eps = min(eps, d.prob(tot >= target), d.prob(tot <= target))

    all_hit = np.ones(len(d.trees), dtype=bool)
    for c, k in zip(counts, ns):
        all_hit &= (c == k)
    lhs = d.prob(all_hit)
    total = sum(counts)
    sum_hit = d.prob(total == sum(ns))

    factor = 1.0
    for k in range(2, m + 1):
        factor /= max(ns[k - 1], sum(ns[:k - 1])) + 1.0
    bound = (eps ** (2 ** m)) * factor * sum_hit
    return {"eps": eps, "lhs": lhs, "bound": bound, "sum_prob": sum_hit,
            "margin": lhs - bound + tol, "ok": bool(lhs >= bound - tol)}


# ---------------------------------------------------------------------------
# Marginal-preserving event
# ---------------------------------------------------------------------------

@dataclass
class EventSubdistribution:
    """Sub-event of {A_T = B_T = 1} given by per-tree masses."""

    dist: ExactTreeDistribution
    masses: np.ndarray                       # aligned with dist.trees
    probability: float
    set_a: list[int]
    set_b: list[int]
    report: dict = field(default_factory=dict)

    def conditional_marginal(self, edge: int) -> float:
        sel = self.dist.matrix[:, edge]
        return float(self.masses[sel].sum() / self.probability)

    def tv_distortion(self, edge_set) -> float:
        return float(sum(abs(self.dist.marginals[e] - self.conditional_marginal(e))
                         for e in edge_set))


def _grid(x) -> Fraction:
    return Fraction(round(float(x) * GRID), GRID)


def construct_maxflow_event(d: ExactTreeDistribution, set_a, set_b,
                            zeta: float, eps: float | None = None,
                            beta: Fraction | None = None) -> EventSubdistribution:
    """Marginal-preserving sub-event of {A_T = B_T = 1} via exact max flow.

    Source -> A arcs carry beta * marginal, A -> B arcs the conditional
    pair probabilities, B -> sink again beta * marginal; the maximum flow
    converts into per-tree event masses.  With 300*eps < zeta < 0.003 the
    probability and distortion bounds are asserted; outside that window
    they are only reported.
    """
    A = sorted(set_a)
    B = sorted(set_b)
    if set(A) & set(B):
        raise ValueError("A and B must be disjoint")
    ca = d.count_in(A)
    cb = d.count_in(B)
    exp_a = float(d.probs @ ca)
    exp_b = float(d.probs @ cb)
    if eps is None:
        eps = max(abs(exp_a - 1.0), abs(exp_b - 1.0))
    cond = (ca == 1) & (cb == 1)
    p_cond = d.prob(cond)
    if p_cond <= 0:
        raise DegenerateEventError("A_T = B_T = 1 has probability zero")

    marg = d.marginals
    pair_prob: dict[tuple[int, int], float] = {}
    tree_pair = {}
    for t_idx in np.flatnonzero(cond):
        tset = d.trees[t_idx][0]
        e = next(i for i in A if i in tset)
        f = next(i for i in B if i in tset)
        tree_pair[t_idx] = (e, f)
        pair_prob[(e, f)] = pair_prob.get((e, f), 0.0) + d.probs[t_idx] / p_cond

    if beta is None:
        beta = _grid(zeta) ** 2 / 360 / _grid(p_cond)
    src, snk = 0, 1
    node_a = {e: 2 + i for i, e in enumerate(A)}
    node_b = {f: 2 + len(A) + j for j, f in enumerate(B)}
    caps = {}
    for e in A:
        caps[(src, node_a[e])] = beta * _grid(marg[e])
    for f in B:
        caps[(node_b[f], snk)] = beta * _grid(marg[f])
    for (e, f), y in pair_prob.items():
        caps[(node_a[e], node_b[f])] = _grid(y)
    flow_value, flow = max_flow(2 + len(A) + len(B), caps, src, snk)

    masses = np.zeros(len(d.trees))
    for t_idx, (e, f) in tree_pair.items():
        y = pair_prob[(e, f)]
        z = flow[(node_a[e], node_b[f])]
        if y > 0 and z > 0:
            masses[t_idx] = d.probs[t_idx] * float(z / _grid(y))
    probability = float(masses.sum())

    ev = EventSubdistribution(d, masses, probability, A, B)
    tv_a = ev.tv_distortion(A)
    tv_b = ev.tv_distortion(B)
    prob_bound = 0.002 * zeta ** 2 * (1.0 - zeta / 3.0 - eps)
    cut_bound = float(beta) * (1.0 - zeta / 3.0 - eps)
    in_window = 300.0 * eps < zeta < 0.003
    ev.report = {
        "probability": probability,
        "probability_bound": prob_bound,
        "flow_value": float(flow_value),
        "min_cut_bound": cut_bound,
        "beta": float(beta),
        "tv_a": tv_a,
        "tv_b": tv_b,
        "zeta": zeta,
        "eps": eps,
        "exp_a": exp_a,
        "exp_b": exp_b,
        "conditional_support_ok": bool(np.all(masses[~cond] == 0.0)),
        "in_window": in_window,
    }
    if np.any(masses > d.probs + 1e-12):
        raise AssertionError("event mass exceeds tree probability")
    if in_window:
        if probability < prob_bound - 1e-11:
            raise AssertionError(
                f"event probability {probability:.3e} below {prob_bound:.3e}")
        if float(flow_value) < cut_bound - 1e-9 * float(beta):
            raise AssertionError("max flow below the analytic min-cut bound")
        if tv_a > zeta + 1e-9 or tv_b > zeta + 1e-9:
            raise AssertionError("conditional marginals distorted beyond zeta")
    return ev


# ---------------------------------------------------------------------------
# Edge-bundle classification over a hierarchy
# ---------------------------------------------------------------------------

def _restricted_index(h: CutHierarchy, root_edge: int):
    def conv(i):
        if i == root_edge:
            raise ValueError("root edge is not part of the tree ground set")
        return i - 1 if i > root_edge else i
    return conv


def classify_edges(h: CutHierarchy, d: ExactTreeDistribution,
                   consts: RuleConstants, root_edge: int) -> dict:
    """Half / good / bad labels for every top edge bundle of the hierarchy.

    `d` lives on the LP edges without the root edge; `root_edge` is that
    edge's index in h.edges.  The boundary count of the two special
    endpoints includes the always-present root edge.  Bundles touching
    those endpoints are classified for observability but are treated as
    bad by definition.
    """
    conv = _restricted_index(h, root_edge)
    u0, v0 = h.root_pair
    x = {i: w for i, (_u, _v, w) in enumerate(h.edges)}

    node_sets = {i: nd.vertex_set for i, nd in enumerate(h.nodes)}
    tree_masks = {i: d.tree_mask(s) if len(s) > 1 else np.ones(len(d.trees), bool)
                  for i, s in node_sets.items()}

    def boundary_count(vertex_set, include_root_edge):
        s = set(vertex_set)
        idx = [conv(i) for i, (a, b, _w) in enumerate(h.edges)
               if i != root_edge and (a in s) != (b in s)]
        cnt = d.count_in(idx)
        if include_root_edge:
            cnt = cnt + 1
        return cnt

    even2 = {}

    def deg_is_2(node_id=None, special=None):
        key = (node_id, special)
        if key not in even2:
            if special is not None:
                cnt = boundary_count({special}, True)
            else:
                cnt = boundary_count(node_sets[node_id], False)
            even2[key] = cnt == 2
        return even2[key]

    bundles = []
    for s_id, nd in enumerate(h.nodes):
        if nd.kind != "degree":
            continue
        kids = nd.children
        pair_list = [(kids[i], kids[j]) for i in range(len(kids))
                     for j in range(i + 1, len(kids))]
        specials = [(c, sp) for c in kids for sp in (u0, v0)] if s_id == h.root else []
        for u_id, v_id in pair_list:
            su, sv = node_sets[u_id], node_sets[v_id]
            idx = [i for i, (a, b, _w) in enumerate(h.edges)
                   if i != root_edge and ((a in su and b in sv) or (a in sv and b in su))]
            if not idx:
                continue
            bundles.append(_classify_one(h, d, consts, conv, s_id, u_id, v_id,
                                         idx, x, tree_masks, deg_is_2))
        for c, sp in specials:
            sc = node_sets[c]
            idx = [i for i, (a, b, _w) in enumerate(h.edges)
                   if i != root_edge and ((a in sc and b == sp) or (a == sp and b in sc))]
            if not idx:
                continue
            xb = sum(x[i] for i in idx)
            half = abs(xb - 0.5) <= consts.eps_half
            mask = tree_masks[c] & (deg_is_2(node_id=c)) & (deg_is_2(special=sp))
            p22 = d.prob(mask)
            bundles.append({
                "parent": s_id, "u": sorted(sc), "v": f"root-end-{sp}",
                "kind": "root-adjacent", "x": xb, "half": half,
                "p22": p22, "good22": bool(p22 >= 3 * consts.eps_half - 1e-15),
                "bad_by_definition": True,
            })

    # bottom bundles are good by definition; record them for completeness
    for s_id, nd in enumerate(h.nodes):
        if nd.kind != "polygon":
            continue
        kids = [node_sets[c] for c in nd.children]
        inner = []
        for i, (a, b, _w) in enumerate(h.edges):
            if i == root_edge:
                continue
            ka = next((k for k, s in enumerate(kids) if a in s), None)
            kb = next((k for k, s in enumerate(kids) if b in s), None)
            if ka is not None and kb is not None and ka != kb:
                inner.append(i)
        if inner:
            bundles.append({"parent": s_id, "kind": "bottom",
                            "x": sum(x[i] for i in inner), "good22": True,
                            "edges": inner})

    records = [b for b in bundles if b.get("kind") == "top"]
    conditions = _badness_conditions(records, consts)
    ok = all(c["ok"] for c in conditions)
    return {"bundles": bundles, "badness_conditions": conditions, "ok": ok}


def _classify_one(h, d, consts, conv, s_id, u_id, v_id, idx, x,
                  tree_masks, deg_is_2) -> dict:
    xb = float(sum(x[i] for i in idx))
    half = abs(xb - 0.5) <= consts.eps_half
    trees_uv = tree_masks[u_id] & tree_masks[v_id]
    mask22 = trees_uv & deg_is_2(node_id=u_id) & deg_is_2(node_id=v_id)
    p22 = d.prob(mask22)
    p_trees = d.prob(trees_uv)
    p22_cond = p22 / p_trees if p_trees > 0 else 0.0
    good22 = (not half) or (p22_cond >= 3 * consts.eps_half - 1e-15)

    parent_set = h.nodes[s_id].vertex_set

    def x_up(node_id):
        s = h.nodes[node_id].vertex_set
        return float(sum(w for a, b, w in h.edges
                         if ((a in s) != (b in s))
                         and not ({a, b} <= parent_set)))

    rec = {
        "parent": s_id, "u_id": u_id, "v_id": v_id,
        "u": sorted(h.nodes[u_id].vertex_set),
        "v": sorted(h.nodes[v_id].vertex_set),
        "kind": "top", "x": xb, "half": half,
        "p22": p22, "p22_cond": p22_cond, "good22": bool(good22),
        "x_up_u": x_up(u_id), "x_up_v": x_up(v_id),
        "edges": idx,
    }
    # 2-1-1 happiness with respect to each endpoint
    for tag, here, there in (("u", u_id, v_id), ("v", v_id, u_id)):
        part = degree_partition(h, here, consts.eps_one_one)
        A = [conv(i) for i in part["A"]]
        B = [conv(i) for i in part["B"]]
        C = [conv(i) for i in part["C"]]
        mask = (d.count_in(A) == 1) & (d.count_in(B) == 1) & (d.count_in(C) == 0)
        mask &= deg_is_2(node_id=there)
        mask &= tree_masks[here] & tree_masks[there]
        p211 = d.prob(mask)
        rec[f"p211_{tag}"] = p211
        rec[f"good211_{tag}"] = bool(p211 >= consts.p_good - 1e-18)
    return rec


def classify_pair_222(h: CutHierarchy, d: ExactTreeDistribution,
                      consts: RuleConstants, root_edge: int,
                      u_id: int, v_id: int, w_id: int) -> dict:
    """2-2-2 happiness for two bundles (u,v), (v,w) sharing endpoint v."""
    for a, b in ((u_id, v_id), (v_id, w_id)):
        if h.nodes[a].parent != h.nodes[b].parent:
            raise ValueError("bundle endpoints are not hierarchy siblings")
    conv = _restricted_index(h, root_edge)
    masks = []
    for node in (u_id, v_id, w_id):
        s = h.nodes[node].vertex_set
        idx = [conv(i) for i, (a, b, _w) in enumerate(h.edges)
               if i != root_edge and (a in s) != (b in s)]
        masks.append(d.count_in(idx) == 2)
        masks.append(d.tree_mask(s) if len(s) > 1
                     else np.ones(len(d.trees), bool))
    total = masks[0]
    for m in masks[1:]:
        total = total & m
    p222 = d.prob(total)
    return {"p222": p222, "good222": bool(p222 >= consts.p_good - 1e-18)}


def _badness_conditions(records, consts: RuleConstants) -> list[dict]:
    """Necessary conditions for a top bundle to be bad: it is a half edge,
    neither endpoint sends more than 1/2 + 9*eps_half upward, and every
    other half bundle sharing an endpoint is good."""
    out = []
    by_endpoint: dict[int, list[dict]] = {}
    for r in records:
        by_endpoint.setdefault(r["u_id"], []).append(r)
        by_endpoint.setdefault(r["v_id"], []).append(r)
    for r in records:
        if r["good22"]:
            continue
        cond_half = r["half"]
        cond_up = (r.get("x_up_u", 0.0) <= 0.5 + 9 * consts.eps_half
                   and r.get("x_up_v", 0.0) <= 0.5 + 9 * consts.eps_half)
        neighbors_good = True
        for end in (r["u_id"], r["v_id"]):
            for other in by_endpoint[end]:
                if other is r:
                    continue
                if other["half"] and not other["good22"]:
                    neighbors_good = False
        out.append({"bundle": (r["u"], r["v"]), "is_half": cond_half,
                    "upward_small": cond_up, "neighbors_good": neighbors_good,
                    "ok": bool(cond_half and cond_up and neighbors_good)})
    return out


# ---------------------------------------------------------------------------
# Distribution-level invariants (negative dependence, rank sequences)
# ---------------------------------------------------------------------------

def negative_association_pairs(d: ExactTreeDistribution,
                               tol: float = 1e-12) -> dict:
    """P[e and f both in T] <= P[e] P[f] for every pair of distinct edges."""
    m = d.matrix
    probs = d.probs
    marg = d.marginals
    joint = (m.T * probs) @ m  # joint[i, j] = P[i and j in T]
    outer = np.outer(marg, marg)
    k = len(d.graph.edges)
    margins = outer - joint + tol
    np.fill_diagonal(margins, np.inf)
    worst = float(margins.min())
    return {"worst_margin": worst, "ok": bool(worst >= 0.0)}


def stochastic_dominance_check(d: ExactTreeDistribution, edge_set,
                               tol: float = 1e-12) -> dict:
    """Conditioning on many set edges cannot lower a member's marginal
    (and symmetrically for few); checked for every threshold."""
    f = list(edge_set)
    cnt = d.count_in(f)
    checks = []
    for e in f:
        col = d.matrix[:, e]
        pe = d.marginals[e]
        for k in range(0, len(f) + 1):
            hi = cnt >= k
            if d.prob(hi) > 0:
                cond = d.prob(hi & col) / d.prob(hi)
                checks.append(cond - pe + tol)
            lo = cnt <= k
            if d.prob(lo) > 0:
                cond = d.prob(lo & col) / d.prob(lo)
                checks.append(pe - cond + tol)
    worst = float(min(checks)) if checks else 0.0
    return {"worst_margin": worst, "ok": bool(worst >= 0.0)}
