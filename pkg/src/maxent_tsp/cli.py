"""Command-line front end.

Subcommands: tour (full rounding pipeline plus baseline), atlas (cut
structure against a reference tour), probe (exact verification suites over
the fixture library), lp (relaxation only) and fit (weight fitting only).
Reports are JSON with a stable schema; identical configurations produce
identical reports except for the timing fields.  Exit status is nonzero
iff some checked assertion failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time


from . import fixtures as fx
from .constants import RuleConstants
from .cuts import build_hierarchy
from .heldkarp import solve_held_karp, split_root
from .instances import load_tsplib, random_euclidean
from .kernels import active_backend
from .maxent import FitConvergenceError, fit_lambda
from .pipeline import run_atlas, run_tour
from .probes import (bernoulli_facts, classify_edges, construct_maxflow_event,
                     gurvits_bound_check, negative_association_pairs,
                     stochastic_dominance_check, verify_tree_conditioning)
from .sampling import chi_square_check
from .treedist import enumerate_trees, rank_sequence, rank_sequence_report

SCHEMA_VERSION = 1


def _load_instance(args):
    if args.instance:
        with open(args.instance) as fh:
            return load_tsplib(fh.read())
    if args.random:
        return random_euclidean(args.random, args.seed)
    raise SystemExit("either --instance or --random N is required")


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=float)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_tour(args) -> int:
    inst = _load_instance(args)
    run = run_tour(inst, samples=args.samples, seed=args.seed,
                   fit_eps=args.fit_eps, threads=args.threads,
                   with_opt=inst.n <= 16)
    report = {"schema": SCHEMA_VERSION, "command": "tour",
              "kernel_backend": active_backend(), **run.to_json()}
    ok = run.best.cost <= 1.5 * run.lp_objective + 1e-6
    report["within_three_halves_of_lp"] = bool(ok)
    report["timings"] = run.timings
    _emit(report, args.out)
    return 0 if ok else 1


def cmd_lp(args) -> int:
    inst = _load_instance(args)
    t0 = time.perf_counter()
    sol = solve_held_karp(inst)
    report = {"schema": SCHEMA_VERSION, "command": "lp",
              "instance": inst.name, **sol.to_json(),
              "timings": {"total": time.perf_counter() - t0}}
    _emit(report, args.out)
    return 0


def cmd_fit(args) -> int:
    inst = _load_instance(args)
    t0 = time.perf_counter()
    sol = split_root(solve_held_karp(inst))
    edges = sol.restricted_edges()
    ok = True
    try:
        fit = fit_lambda(sol.n, edges, [x for _, _, x in edges],
                         eps=args.fit_eps)
    except FitConvergenceError as exc:
        fit = exc.best_fit
        ok = False
    report = {"schema": SCHEMA_VERSION, "command": "fit",
              "instance": inst.name, "converged": ok, **fit.to_json(),
              "timings": {"total": time.perf_counter() - t0}}
    _emit(report, args.out)
    return 0 if ok else 1


def cmd_atlas(args) -> int:
    inst = _load_instance(args)
    report = run_atlas(inst, eta=args.eta, seed=args.seed)
    report = {"schema": SCHEMA_VERSION, "command": "atlas", **report}
    _emit(report, args.out)
    return 0 if report["ok"] else 1


def cmd_probe(args) -> int:
    t0 = time.perf_counter()
    consts = RuleConstants(eta=args.eta)
    sections = {}
    failures: list[str] = []

    sections["constants"] = consts.to_json()
    if not consts.eps_p_derived() >= consts.eps_p:
        failures.append("constants: derived payment rate below reference")

    rep = bernoulli_facts()
    sections["bernoulli_sums"] = {"checks": rep["checks"],
                                  "per_rule": rep["per_rule"],
                                  "violations": rep["violations"]}
    if not rep["ok"]:
        failures.append("bernoulli sums")

    dists = {
        "triangle-chain": (fx.triangle_chain_distribution(),
                           fx.triangle_chain_solution(),
                           [{0}, {1}, {2}, {3}, {0, 1}, {2, 3}, {0, 1, 2, 3}]),
        "bad-edge": (fx.bad_edge_distribution(), fx.bad_edge_solution(),
                     [{0}, {1}, {2}, {3}, {0, 2}, {1, 3}, {0, 1, 2, 3}]),
        "split-k4": (fx.split_k4_distribution(), fx.split_k4_solution(),
                     [{1}, {2}, {3}, {1, 2, 3}]),
    }
    cond = {}
    for name, (d, sol, cuts) in dists.items():
        x = [e[2] for e in sol.restricted_edges()]
        r = verify_tree_conditioning(d, x, cuts)
        cond[name] = {"checks": r["checks"],
                      "violations": r["violations"]}
        if not r["ok"]:
            failures.append(f"tree conditioning: {name}")
        na = negative_association_pairs(d)
        sd = stochastic_dominance_check(d, list(range(min(4, len(d.graph.edges)))))
        cond[name]["negative_association_margin"] = na["worst_margin"]
        cond[name]["stochastic_dominance_margin"] = sd["worst_margin"]
        if not (na["ok"] and sd["ok"]):
            failures.append(f"negative dependence: {name}")
        ranks = []
        for a in ([0], [0, 1], list(range(len(d.graph.edges)))):
            rr = rank_sequence_report(rank_sequence(d, a))
            ranks.append(rr)
            if not (rr["log_concave"] and rr["no_internal_zeros"]
                    and rr["mode_near_mean"]):
                failures.append(f"rank sequence: {name} {a}")
        cond[name]["rank_sequences"] = ranks
    sections["tree_conditioning"] = cond

    dk4 = enumerate_trees(fx.unit_k4())
    gur = [gurvits_bound_check(dk4, [[0, 1, 2]], [2]),
           gurvits_bound_check(dk4, [[0, 1, 2], [5]], [2, 1]),
           gurvits_bound_check(dk4, [[0], [3], [5]], [1, 0, 1])]
    sections["simultaneous_count_bounds"] = gur
    if not all(g["ok"] for g in gur):
        failures.append("simultaneous count bound")

    events = []
    for name, d, A, B in fx.maxflow_event_fixtures():
        ea = float(d.probs @ d.count_in(A))
        eb = float(d.probs @ d.count_in(B))
        eps = max(abs(ea - 1.0), abs(eb - 1.0))
        for zeta in (consts.eps_m, 0.002):
            try:
                ev = construct_maxflow_event(d, A, B, zeta=zeta, eps=eps)
                events.append({"fixture": name, **ev.report})
            except Exception as exc:  # assertion or degeneracy
                events.append({"fixture": name, "zeta": zeta,
                               "error": str(exc)})
                failures.append(f"marginal-preserving event: {name}")
    sections["marginal_preserving_events"] = events

    cls = {}
    for name, sol, tour, d in (
            ("bad-edge-degree", fx.bad_edge_solution(),
             fx.bad_edge_tour_degree(), fx.bad_edge_distribution()),
            ("triangle-chain", fx.triangle_chain_solution(),
             fx.triangle_chain_tour(), fx.triangle_chain_distribution())):
        h = build_hierarchy(sol, tour, eta=args.eta)
        rep = classify_edges(h, d, consts, sol.root_edge)
        cls[name] = {"bundles": rep["bundles"],
                     "badness_conditions": rep["badness_conditions"]}
        if not rep["ok"]:
            failures.append(f"classification: {name}")
    sections["edge_classification"] = cls

    chi = {}
    for name, g in fx.sampler_fixtures():
        chi[name] = chi_square_check(g, samples=20000, seed=args.seed)
        if chi[name]["p_value"] <= 0.01:
            failures.append(f"sampler fit: {name}")
    sections["sampler_chi_square"] = chi

    report = {
        "schema": SCHEMA_VERSION,
        "command": "probe",
        "kernel_backend": active_backend(),
        "eta": args.eta,
        "sections": sections,
        "failures": failures,
        "ok": not failures,
        "timings": {"total": time.perf_counter() - t0},
    }
    _emit(report, args.out)
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxent-tsp",
        description="Max-entropy tree rounding for metric TSP, with "
                    "structural and probabilistic verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)
    default_threads = int(os.environ.get("MAXENT_TSP_THREADS", "1"))

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", help="TSPLIB file")
            p.add_argument("--random", type=int, metavar="N",
                           help="random Euclidean instance with N points")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--eta", type=float, default=1e-3,
                       help="near-minimum-cut slack")
        p.add_argument("--fit-eps", type=float, default=1e-4,
                       help="relative marginal tolerance of the fit")
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--threads", type=int, default=default_threads)
        p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("tour", help="run the full rounding pipeline")
    common(p)
    p.set_defaults(func=cmd_tour)
    p = sub.add_parser("lp", help="solve the relaxation")
    common(p)
    p.set_defaults(func=cmd_lp)
    p = sub.add_parser("fit", help="fit tree weights to the relaxation")
    common(p)
    p.set_defaults(func=cmd_fit)
    p = sub.add_parser("atlas", help="near-minimum-cut structure report")
    common(p)
    p.set_defaults(func=cmd_atlas)
    p = sub.add_parser("probe", help="exact verification suites")
    common(p, instance=False)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
