import math

import numpy as np
import pytest

from maxent_tsp import fixtures as fx
from maxent_tsp.constants import RuleConstants
from maxent_tsp.cuts import build_hierarchy
from maxent_tsp.probes import (DegenerateEventError, InputMismatchError,
                               bernoulli_facts, bernoulli_pmf, classify_edges,
                               classify_pair_222, construct_maxflow_event,
                               even_prob, gurvits_bound_check,
                               point_prob_lower_bound, tail_prob_lower_bound,
                               verify_tree_conditioning)
from maxent_tsp.treedist import enumerate_trees

CONSTS = RuleConstants()


def test_constants_schedule():
    c = CONSTS
    assert c.eps_eta == 14 * c.eta
    assert c.eps_one_one == c.eps_half / 12
    assert c.p_good == 0.005 * c.eps_half ** 2
    assert c.eps_m == 1 / 4000
    assert c.tau == 0.571 * c.beta and c.beta == c.eta / 8
    assert c.eps_p == 3.9e-17
    assert c.eps_p_derived() >= c.eps_p


def test_even_probability_fair_coin_and_formula():
    for n in (1, 2, 5, 9):
        assert abs(even_prob(bernoulli_pmf([0.5] * n)) - 0.5) < 1e-12
    got = even_prob(bernoulli_pmf([0.3, 0.3]))
    assert abs(got - 0.5 * (1 + 0.4 ** 2)) < 1e-12
    assert abs(got - 0.58) < 1e-12


def test_even_probability_bound_single_certain_trial():
    assert even_prob(bernoulli_pmf([1.0])) == 0.0
    assert 0.0 <= 0.5 * (1 + math.exp(-2.0))


def test_bernoulli_sweep_no_violations():
    rep = bernoulli_facts()
    assert rep["ok"], rep["violations"][:5]
    assert rep["checks"] > 500


def test_point_bound_valid_against_binomials():
    for p, n in ((0.7, 4), (1.4, 9), (2.3, 11)):
        pmf = bernoulli_pmf([p / n] * n)
        for k in range(int(math.floor(p + 1))):
            if k - 1 < p < k + 1:
                assert pmf[k] >= point_prob_lower_bound(p, k) - 1e-12


def test_tail_bound_valid_against_binomials():
    for p, n in ((0.4, 3), (1.2, 8), (2.6, 13)):
        pmf = bernoulli_pmf([p / n] * n)
        k = math.ceil(p)
        assert pmf[k:].sum() >= tail_prob_lower_bound(p) - 1e-12


def test_tree_conditioning_integral_cycle_certain():
    d = fx.integral_cycle_distribution(4)
    sol = fx.integral_cycle_solution(4)
    x = [e[2] for e in sol.restricted_edges()]
    arcs = [set(range(i, j + 1)) for i in range(4) for j in range(i, 4)]
    rep = verify_tree_conditioning(d, x, arcs)
    assert rep["ok"]
    for c in rep["checks"]:
        if c["rule"] == "near_tree_restriction":
            assert c["value"] == 1.0


def test_tree_conditioning_triangle_chain():
    d = fx.triangle_chain_distribution()
    sol = fx.triangle_chain_solution()
    x = [e[2] for e in sol.restricted_edges()]
    rep = verify_tree_conditioning(
        d, x, [{0, 1}, {2, 3}, {0, 1, 2, 3}, {0}, {1}, {2}, {3}],
        extra_edge_sets=[[2], [2, 4]])
    assert rep["ok"]
    by_rule = {}
    for c in rep["checks"]:
        by_rule.setdefault(c["rule"], []).append(c)
    # an edge set of mass 0.5 is avoided with probability exactly 0.5
    single = [c for c in by_rule["avoid_edge_set"] if c["mass"] == 0.5]
    assert single and all(abs(c["value"] - 0.5) < 1e-12 for c in single)
    # one tree edge lands between the two stacked pair cuts almost surely
    ones = [c for c in by_rule["one_edge_between"]]
    assert ones and all(c["margin"] >= 0 for c in ones)


def test_tree_conditioning_rejects_mismatched_marginals():
    d = fx.triangle_chain_distribution()
    x = [0.9] * len(d.graph.edges)
    with pytest.raises(InputMismatchError):
        verify_tree_conditioning(d, x, [{0, 1}])


def test_simultaneous_count_bound_single_edge_trivial():
    d = enumerate_trees(fx.weighted_triangle())
    rep = gurvits_bound_check(d, [[2]], [1])
    assert rep["ok"]
    assert rep["lhs"] == pytest.approx(0.8)


def test_simultaneous_count_bound_independent_sets():
    # the two root-side pairs of the triangle chain are independent
    d = fx.triangle_chain_distribution()
    sol = fx.triangle_chain_solution()
    e = {tuple(x[:2]): i for i, x in enumerate(sol.restricted_edges())}
    A = [e[(0, 4)], e[(1, 4)]]
    B = [e[(2, 5)], e[(3, 5)]]
    rep = gurvits_bound_check(d, [A, B], [1, 1])
    assert rep["ok"] and rep["lhs"] == pytest.approx(1.0)


def test_simultaneous_count_bound_k4():
    d = enumerate_trees(fx.unit_k4())
    boundary = [i for i, (u, v, _w) in enumerate(d.graph.edges) if 0 in (u, v)]
    far = [i for i, (u, v, _w) in enumerate(d.graph.edges) if 0 not in (u, v)][0]
    rep = gurvits_bound_check(d, [boundary, [far]], [2, 1])
    assert rep["ok"] and rep["lhs"] > rep["bound"]
    with pytest.raises(ValueError):
        gurvits_bound_check(d, [boundary, boundary], [2, 2])


def test_maxflow_event_deterministic_pair_distortion_zero():
    d = fx.integral_cycle_distribution(4)
    sol = fx.integral_cycle_solution(4)
    edges = sol.restricted_edges()
    u0, v0 = 4, 5
    A = [i for i, (u, v, _x) in enumerate(edges) if v0 in (u, v)]
    B = [i for i, (u, v, _x) in enumerate(edges) if u0 in (u, v)]
    ev = construct_maxflow_event(d, A, B, zeta=1 / 4000, eps=0.0)
    assert ev.report["tv_a"] == 0.0 and ev.report["tv_b"] == 0.0
    assert ev.report["conditional_support_ok"]
    assert ev.probability >= ev.report["probability_bound"]


def test_maxflow_event_all_fixtures_both_zetas():
    for name, d, A, B in fx.maxflow_event_fixtures():
        ea = float(d.probs @ d.count_in(A))
        eb = float(d.probs @ d.count_in(B))
        eps = max(abs(ea - 1.0), abs(eb - 1.0))
        for zeta in (CONSTS.eps_m, 0.002):
            ev = construct_maxflow_event(d, A, B, zeta=zeta, eps=eps)
            r = ev.report
            assert r["in_window"], (name, zeta)
            assert r["probability"] >= r["probability_bound"] - 1e-12
            assert r["tv_a"] <= zeta and r["tv_b"] <= zeta
            assert np.all(ev.masses <= d.probs + 1e-12)


def test_maxflow_event_degenerate_rejected():
    d = fx.integral_cycle_distribution(4)
    # both chosen edges are always in the tree, so A_T = 1 never happens
    with pytest.raises(DegenerateEventError):
        construct_maxflow_event(d, [0, 1], [2, 3], zeta=1e-3, eps=0.0)


def test_classification_bad_edge_fixture():
    sol = fx.bad_edge_solution()
    h = build_hierarchy(sol, fx.bad_edge_tour_degree(), eta=1e-3)
    d = fx.bad_edge_distribution()
    rep = classify_edges(h, d, CONSTS, sol.root_edge)
    tops = {(tuple(b["u"]), tuple(b["v"])): b for b in rep["bundles"]
            if b["kind"] == "top"}
    halves = {k: b for k, b in tops.items() if b["half"]}
    # the two half bundles fail the simultaneous-even test
    assert halves and all(not b["good22"] for b in halves.values())
    # unit bundles are good and 2-1-1 good either way
    units = [b for b in tops.values() if not b["half"]]
    assert units and all(b["good22"] and b["good211_u"] and b["good211_v"]
                         for b in units)
    # every root-adjacent half bundle clears the threshold comfortably
    ra = [b for b in rep["bundles"] if b["kind"] == "root-adjacent"]
    assert len(ra) == 4
    assert all(b["good22"] and b["bad_by_definition"] for b in ra)
    assert all(abs(b["p22"] - 0.5) < 1e-12 for b in ra)
    # necessary conditions for badness hold for each bad bundle
    assert rep["badness_conditions"] and rep["ok"]


def test_classification_adjacent_half_pairs_have_a_good_member():
    sol = fx.bad_edge_solution()
    h = build_hierarchy(sol, fx.bad_edge_tour_degree(), eta=1e-3)
    d = fx.bad_edge_distribution()
    rep = classify_edges(h, d, CONSTS, sol.root_edge)
    half = [b for b in rep["bundles"] if b.get("half")]
    by_end = {}
    for b in half:
        for end in (tuple(b["u"]) if isinstance(b["u"], list) else b["u"],
                    tuple(b["v"]) if isinstance(b["v"], list) else b["v"]):
            by_end.setdefault(str(end), []).append(b)
    for end, bundles in by_end.items():
        if len(bundles) >= 2:
            assert any(b["good22"] for b in bundles), end


def test_classification_split_k4_all_top_bundles_good():
    from maxent_tsp.instances import Tour
    sol = fx.split_k4_solution()
    h = build_hierarchy(sol, Tour((0, 4, 1, 2, 3), 4.0), eta=1e-3)
    d = fx.split_k4_distribution()
    rep = classify_edges(h, d, CONSTS, sol.root_edge)
    tops = [b for b in rep["bundles"] if b["kind"] == "top"]
    assert len(tops) == 3  # the three 2/3 bundles between singleton atoms
    for b in tops:
        assert not b["half"]
        assert b["good22"] and b["good211_u"] and b["good211_v"]
    ra = [b for b in rep["bundles"] if b["kind"] == "root-adjacent"]
    assert len(ra) == 6 and all(not b["half"] for b in ra)
    assert rep["ok"]


def test_classification_triangle_chain_bottoms_good():
    sol = fx.triangle_chain_solution()
    h = build_hierarchy(sol, fx.triangle_chain_tour(), eta=1e-3)
    d = fx.triangle_chain_distribution()
    rep = classify_edges(h, d, CONSTS, sol.root_edge)
    bottoms = [b for b in rep["bundles"] if b["kind"] == "bottom"]
    assert bottoms and all(b["good22"] for b in bottoms)
    assert rep["ok"]


def test_classification_222_requires_siblings():
    sol = fx.bad_edge_solution()
    h = build_hierarchy(sol, fx.bad_edge_tour_triangles(), eta=1e-3)
    d = fx.bad_edge_distribution()
    leaf = h.node_of({0})
    other = h.node_of({1})
    with pytest.raises(ValueError, match="siblings"):
        classify_pair_222(h, d, CONSTS, sol.root_edge, leaf, other, leaf)


def test_classification_222_probability():
    sol = fx.bad_edge_solution()
    h = build_hierarchy(sol, fx.bad_edge_tour_degree(), eta=1e-3)
    d = fx.bad_edge_distribution()
    a, b, c = h.node_of({0}), h.node_of({2}), h.node_of({3})
    rep = classify_pair_222(h, d, CONSTS, sol.root_edge, a, b, c)
    assert 0.0 <= rep["p222"] <= 1.0


def test_event_masses_recompute_conditional_marginals():
    d = fx.triangle_chain_distribution()
    sol = fx.triangle_chain_solution()
    edges = sol.restricted_edges()
    A = [i for i, (u, v, _x) in enumerate(edges) if 4 in (u, v)]
    B = [i for i, (u, v, _x) in enumerate(edges) if 5 in (u, v)]
    ev = construct_maxflow_event(d, A, B, zeta=0.002, eps=0.0)
    total = ev.masses.sum()
    assert abs(total - ev.probability) < 1e-15
    for e in A + B:
        manual = ev.masses[d.matrix[:, e]].sum() / total
        assert abs(manual - ev.conditional_marginal(e)) < 1e-15
