"""End-to-end runs: LP, weight fitting, sampling, matching, reporting.

The tour pipeline solves the relaxation, splits the root, fits tree
weights to the fractional solution, samples trees, parity-corrects each
with a matching and keeps the best shortcut tour; the baseline heuristic
runs alongside.  The atlas pipeline averages the solution with a
reference tour and verifies the near-minimum-cut structure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cuts import build_hierarchy, classify_crossings, enumerate_near_min_cuts, \
    polygon_of, tour_positions, verify_polygon_structure
from .heldkarp import check_spanning_tree_polytope, solve_held_karp, split_root
from .instances import MetricInstance, Tour, exact_opt
from .matching import christofides_baseline, eulerian_shortcut, min_matching, \
    odd_vertices, split_instance
from .maxent import fit_lambda
from .sampling import FitSampler


@dataclass
class TourRun:
    instance: MetricInstance
    lp_objective: float
    fit_error: float
    fit_iterations: int
    sample_costs: list[float]
    tree_costs: list[float]
    matching_costs: list[float]
    best_sampled: Tour | None
    baseline: Tour
    best: Tour
    opt_cost: float | None = None
    timings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "instance": self.instance.name,
            "n": self.instance.n,
            "lp_objective": self.lp_objective,
            "fit_error": self.fit_error,
            "fit_iterations": self.fit_iterations,
            "samples": len(self.sample_costs),
            "sample_costs": self.sample_costs,
            "mean_sample_cost": (float(np.mean(self.sample_costs))
                                 if self.sample_costs else None),
            "mean_tree_cost": (float(np.mean(self.tree_costs))
                               if self.tree_costs else None),
            "best_sampled_cost": (self.best_sampled.cost
                                  if self.best_sampled else None),
            "baseline_cost": self.baseline.cost,
            "best_cost": self.best.cost,
            "best_order": list(self.best.order),
            "ratio_best_to_lp": self.best.cost / self.lp_objective,
            "opt_cost": self.opt_cost,
            "ratio_best_to_opt": (self.best.cost / self.opt_cost
                                  if self.opt_cost else None),
        }
        return out


def run_tour(inst: MetricInstance, samples: int = 200, seed: int = 0,
             fit_eps: float = 1e-4, lp_tol: float = 1e-9,
             threads: int = 1, with_opt: bool = False) -> TourRun:
    t0 = time.perf_counter()
    sol = solve_held_karp(inst, tol=lp_tol)
    t_lp = time.perf_counter()
    sp = split_root(sol)
    witness = check_spanning_tree_polytope(sp)
    if witness is not None:
        raise RuntimeError(f"split solution outside the tree polytope: {witness}")

    edges = sp.restricted_edges()
    costs = np.array(sp.restricted_costs())
    fit = fit_lambda(sp.n, edges, [x for _, _, x in edges], eps=fit_eps)
    t_fit = time.perf_counter()

    sampler = FitSampler(fit, seed)
    smetric = split_instance(inst)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(sampler.sample, range(samples)))
    else:
        trees = [sampler.sample(i) for i in range(samples)]

    match_cache: dict[frozenset, tuple[list, float]] = {}
    sample_costs: list[float] = []
    tree_costs: list[float] = []
    matching_costs: list[float] = []
    best_tour: Tour | None = None
    root_pair = (sp.edges[sp.root_edge][0], sp.edges[sp.root_edge][1])
    for tree in trees:
        tree_idx = list(tree)
        tree_pairs = [(edges[j][0], edges[j][1]) for j in tree_idx]
        tree_costs.append(float(costs[tree_idx].sum()))
        multi = tree_pairs + [root_pair]
        odd = frozenset(odd_vertices(smetric.n, multi))
        if odd not in match_cache:
            match_cache[odd] = min_matching(smetric, sorted(odd))
        pairs, mcost = match_cache[odd]
        matching_costs.append(mcost)
        walk = eulerian_shortcut(smetric, multi + pairs)
        order = [v if v < inst.n else 0 for v in walk.order]
        seen: set[int] = set()
        final = [v for v in order if not (v in seen or seen.add(v))]
        tour = Tour(tuple(final), inst.tour_cost(final))
        sample_costs.append(tour.cost)
        if best_tour is None or tour.cost < best_tour.cost:
            best_tour = tour
    t_samp = time.perf_counter()

    baseline = christofides_baseline(inst)
    best = baseline if best_tour is None or baseline.cost <= best_tour.cost \
        else best_tour
    opt_cost = None
    if with_opt and inst.n <= 16:
        opt_cost, _ = exact_opt(inst)
    return TourRun(
        inst, sol.objective, fit.max_rel_err, fit.iterations,
        sample_costs, tree_costs, matching_costs, best_tour, baseline, best,
        opt_cost,
        timings={"lp": t_lp - t0, "fit": t_fit - t_lp,
                 "sampling": t_samp - t_fit,
                 "total": time.perf_counter() - t0},
    )


def reference_tour(inst: MetricInstance) -> tuple[Tour, bool]:
    """Exact optimum when small enough, else the baseline heuristic."""
    if inst.n <= 16:
        _, tour = exact_opt(inst)
        return tour, True
    return christofides_baseline(inst), False


def split_reference_tour(tour: Tour, n: int) -> Tour:
    """Lift a tour of the original instance to the split instance.

    The copy vertex n follows vertex 0 immediately (zero-cost edge), so
    the lifted tour visits the root pair consecutively and has equal cost.
    """
    order = []
    for v in tour.order:
        order.append(v)
        if v == 0:
            order.append(n)
    return Tour(tuple(order), tour.cost)


def run_atlas(inst: MetricInstance, eta: float = 1e-3, seed: int = 0,
              lp_tol: float = 1e-9) -> dict:
    t0 = time.perf_counter()
    sol = solve_held_karp(inst, tol=lp_tol)
    sp = split_root(sol)
    base, opt_exact = reference_tour(inst)
    ref = split_reference_tour(base, inst.n)
    h = build_hierarchy(sp, ref, eta, seed=seed)

    u0, v0 = h.root_pair
    z_edges = _z_edges(sp, ref)
    cuts = enumerate_near_min_cuts(sp.n, z_edges, eta, root_pair=(u0, v0),
                                   seed=seed)
    info = classify_crossings(cuts, ref, (u0, v0))
    pos = tour_positions(ref.order, (u0, v0))
    polygon_reports = []
    polygons = []
    for comp in info.components:
        if len(comp) < 2:
            continue
        poly = polygon_of(info.cuts, comp, pos, sp.n - 2, sp.n)
        polygons.append({"atoms": [sorted(a) for a in poly.atoms],
                         "member_cuts": [sorted(info.cuts[i].vertex_set)
                                         for i in comp],
                         "cut_arcs": poly.cut_arcs})
        polygon_reports.append(verify_polygon_structure(poly, sp.edges, eta))
    violations = sum(len(r["violations"]) for r in polygon_reports)
    return {
        "instance": inst.name,
        "n": inst.n,
        "eta": eta,
        "opt_is_exact": opt_exact,
        "lp_objective": sol.objective,
        "reference_cost": base.cost,
        "cuts": [{"vertices": sorted(c.vertex_set), "weight": c.weight,
                  "crossing": info.tag(i)}
                 for i, c in enumerate(info.cuts)],
        "near_min_cuts": len(cuts),
        "crossed_both_sides": len(info.both_sided),
        "component_members": [[sorted(info.cuts[i].vertex_set) for i in comp]
                              for comp in info.components],
        "components": len(info.components),
        "polygons": polygons,
        "hierarchy": h.to_json(),
        "polygon_reports": polygon_reports,
        "polygon_violations": violations,
        "timing_total": time.perf_counter() - t0,
        "ok": violations == 0,
    }


def _z_edges(sp, ref: Tour):
    acc: dict[tuple[int, int], float] = {}
    for u, v, x in sp.edges:
        key = (min(u, v), max(u, v))
        acc[key] = acc.get(key, 0.0) + x / 2.0
    for u, v in ref.edges():
        key = (min(u, v), max(u, v))
        acc[key] = acc.get(key, 0.0) + 0.5
    return [(u, v, w) for (u, v), w in acc.items()]
