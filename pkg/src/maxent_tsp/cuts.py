"""Near-minimum-cut structure: crossings, polygons, and the cut hierarchy.

Cuts are taken against a nonnegative edge weighting whose minimum cut is 2
(an LP solution, or its average with a reference tour).  Averaging with a
tour forces every near-minimum cut to be a contiguous interval of that
tour, which is what makes the polygon decomposition and the laminar
hierarchy below well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .heldkarp import LpSolution
from .instances import Tour
from .mincut import cut_weight, enumerate_cuts_below, stoer_wagner


class StructureError(RuntimeError):
    """A structural assumption failed (for example: a near-minimum cut of
    the averaged weighting is not an interval of the reference tour)."""


@dataclass(frozen=True)
class NearMinCut:
    vertex_set: frozenset
    weight: float
    interval: tuple[int, int] | None = None  # (l, r) arc indices, l < r

    def __repr__(self):
        s = ",".join(map(str, sorted(self.vertex_set)))
        return f"NearMinCut({{{s}}}, w={self.weight:.6f})"


def enumerate_near_min_cuts(n: int, edges, eta: float,
                            root_pair=None, seed: int = 0) -> list[NearMinCut]:
    """All cuts of weight <= 2 + eta (sides avoiding the root pair).

    Exact for up to 20 free vertices; randomized contraction with exact
    verification beyond.  The input must have minimum cut 2 up to 1e-9
    over sides avoiding the root pair; a global cut below 2 - 1e-6 is an
    inconsistency in the caller's data.
    """
    total_min, _ = stoer_wagner(n, edges)
    if total_min < 2.0 - 1e-6 and root_pair is None:
        raise ValueError(f"minimum cut {total_min:.6f} below 2; "
                         "input is not cut-feasible")
    found = enumerate_cuts_below(n, edges, 2.0 + eta, root_pair=root_pair,
                                 rng_seed=seed, eta_hint=eta)
    if root_pair is not None:
        low = [w for _, w in found if w < 2.0 - 1e-6]
        if low:
            raise ValueError(f"cut of weight {min(low):.6f} below 2; "
                             "input is not cut-feasible")
    return [NearMinCut(side, w) for side, w in found]


# ---------------------------------------------------------------------------
# Intervals along a reference tour and crossing classification
# ---------------------------------------------------------------------------

def tour_positions(tour_order, root_pair) -> list[int]:
    """Positions along the tour with the root pair pinned to the end.

    Free vertices get positions 0..n-3 in cycle order starting right after
    the pair; the pair takes n-2 and n-1.  A set avoiding the pair is an
    interval of the tour iff its positions are consecutive.
    """
    order = list(tour_order)
    n = len(order)
    u0, v0 = root_pair
    i = order.index(u0)
    if order[(i + 1) % n] == v0:
        start = (i + 2) % n
    elif order[(i - 1) % n] == v0:
        start = (i + 1) % n
    else:
        raise StructureError("reference tour does not visit the root pair "
                             "consecutively")
    pos = [0] * n
    for k in range(n - 2):
        pos[order[(start + k) % n]] = k
    pos[u0] = n - 2
    pos[v0] = n - 1
    return pos


def interval_of(cut: frozenset, pos, n_free: int):
    """(lo, hi) positions covered by the cut, or None if not contiguous."""
    ps = sorted(pos[v] for v in cut)
    if ps[-1] - ps[0] + 1 != len(ps) or ps[-1] >= n_free:
        return None
    return ps[0], ps[-1]


@dataclass
class CrossingInfo:
    cuts: list[NearMinCut]
    crossers_left: list[list[int]]
    crossers_right: list[list[int]]
    components: list[list[int]]        # components among cuts crossed <= 1 side
    both_sided: list[int]

    def tag(self, i: int) -> str:
        left = bool(self.crossers_left[i])
        right = bool(self.crossers_right[i])
        if left and right:
            return "both"
        if left:
            return "left-only"
        if right:
            return "right-only"
        return "uncrossed"


def classify_crossings(cuts: list[NearMinCut], tour: Tour,
                       root_pair) -> CrossingInfo:
    """Interval representation plus per-cut crossing sides and components.

    Cuts crossed on both sides are excluded from component formation; the
    remaining cuts are grouped into maximal connected components of the
    crossing relation (these become polygons).
    """
    n = len(tour.order)
    pos = tour_positions(tour.order, root_pair)
    n_free = n - 2
    iv = []
    for c in cuts:
        r = interval_of(c.vertex_set, pos, n_free)
        if r is None:
            raise StructureError(f"cut {sorted(c.vertex_set)} is not an "
                                 "interval of the reference tour")
        iv.append(r)
    cuts = [NearMinCut(c.vertex_set, c.weight, r) for c, r in zip(cuts, iv)]

    m = len(cuts)
    cl: list[list[int]] = [[] for _ in range(m)]
    cr: list[list[int]] = [[] for _ in range(m)]
    for i in range(m):
        li, ri = iv[i]
        for j in range(m):
            if i == j:
                continue
            lj, rj = iv[j]
            # j crosses i on the left: j sticks out left of i, overlaps
            if lj < li <= rj < ri:
                cl[i].append(j)
            elif li < lj <= ri < rj:
                cr[i].append(j)
    both = [i for i in range(m) if cl[i] and cr[i]]
    eligible = [i for i in range(m) if not (cl[i] and cr[i])]
    parent = {i: i for i in eligible}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    elig = set(eligible)
    for i in eligible:
        for j in cl[i] + cr[i]:
            if j in elig:
                parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for i in eligible:
        comps.setdefault(find(i), []).append(i)
    components = sorted(comps.values(), key=lambda c: min(iv[i] for i in c))
    return CrossingInfo(cuts, cl, cr, components, both)


# ---------------------------------------------------------------------------
# Polygons
# ---------------------------------------------------------------------------

@dataclass
class Polygon:
    """Atoms and member cuts of one connected component of crossing cuts.

    atoms[0] is the root atom (everything no member cut contains); the
    others follow the reference cycle.  Member cuts are re-indexed by the
    arcs between consecutive atoms.  The left (right) family holds the
    cuts not crossed on the left (right); each is laminar.
    """

    atoms: list[frozenset]
    cuts: list[NearMinCut]
    cut_arcs: list[tuple[int, int]]       # (l, r) arc labels per cut
    left_family: list[int]
    right_family: list[int]

    @property
    def m(self) -> int:
        return len(self.atoms)

    def edge_sets(self, edges):
        """A, B, C partition of the polygon boundary, as edge indices."""
        union = frozenset().union(*self.atoms[1:])
        a1, am = self.atoms[1], self.atoms[-1]
        A, B, C = [], [], []
        for i, (u, v, *_rest) in enumerate(edges):
            crosses = (u in union) != (v in union)
            if not crosses:
                continue
            if (u in a1) or (v in a1):
                A.append(i)
            elif (u in am) or (v in am):
                B.append(i)
            else:
                C.append(i)
        return A, B, C

    def strict_parent(self, family: list[int], i: int):
        """Nearest strict ancestor of cut i within its family, or None.

        Strictness compares the left endpoint for the left family and the
        right endpoint for the right family.
        """
        li, ri = self.cut_arcs[i]
        in_left = i in self.left_family
        best = None
        for j in family:
            if j == i:
                continue
            lj, rj = self.cut_arcs[j]
            if not (lj <= li and ri <= rj):
                continue
            strict = (lj != li) if in_left else (rj != ri)
            if strict and (best is None or
                           (self.cut_arcs[best][1] - self.cut_arcs[best][0])
                           > (rj - lj)):
                best = j
        return best


def polygon_of(cuts: list[NearMinCut], component: list[int],
               pos, n_free: int, n: int) -> Polygon:
    """Atoms (coarsest refinement) and arc indexing for one component."""
    member = [cuts[i] for i in component]
    signature: dict[int, tuple] = {}
    for v in range(n):
        signature[v] = tuple(v in c.vertex_set for c in member)
    zero = tuple(False for _ in member)
    root_atom = frozenset(v for v in range(n) if signature[v] == zero)
    groups: dict[tuple, set] = {}
    for v in range(n):
        if signature[v] != zero:
            groups.setdefault(signature[v], set()).add(v)
    atoms_rest = [frozenset(g) for g in groups.values()]
    for a in atoms_rest:
        if interval_of(a, pos, n_free) is None:
            raise StructureError("atom is not contiguous on the reference tour")
    atoms_rest.sort(key=lambda a: min(pos[v] for v in a))
    atoms = [root_atom] + atoms_rest

    arc_of_left = {min(pos[v] for v in a): k
                   for k, a in enumerate(atoms_rest, start=1)}
    cut_arcs = []
    for c in member:
        lo = min(pos[v] for v in c.vertex_set)
        hi = max(pos[v] for v in c.vertex_set)
        l_arc = arc_of_left[lo]
        r_atom = next(k for k, a in enumerate(atoms_rest, start=1)
                      if hi == max(pos[v] for v in a))
        cut_arcs.append((l_arc, r_atom + 1))

    left_family, right_family = [], []
    for li in range(len(member)):
        la, ra = cut_arcs[li]
        crossed_left = any(lb < la < rb < ra
                           for lj, (lb, rb) in enumerate(cut_arcs) if lj != li)
        (left_family if not crossed_left else right_family).append(li)
    return Polygon(atoms, member, cut_arcs, left_family, right_family)


def verify_polygon_structure(p: Polygon, edges, eta: float) -> dict:
    """Check the structural inequalities of a polygon against the weights.

    All bounds are stated with the 14*eta slack for adjacent-atom mass and
    atom degree, 4*eta for the union cut and 2*eta for the root-adjacent
    sets; the report lists each margin (negative margin = violation).
    """
    eps = 14.0 * eta
    w = lambda S: cut_weight(edges, frozenset(S))

    def mass_between(a, b):
        return float(sum(x for u, v, x in edges
                         if (u in a and v in b) or (u in b and v in a)))

    atoms = p.atoms
    m = len(atoms)
    checks = []
    ring = atoms + [atoms[0]]
    for i in range(m):
        got = mass_between(ring[i], ring[i + 1])
        checks.append({"rule": "adjacent_atom_mass", "i": i,
                       "value": got, "bound": 1.0 - eps,
                       "margin": got - (1.0 - eps)})
    for i in range(m):
        got = w(atoms[i])
        checks.append({"rule": "atom_degree", "i": i,
                       "value": got, "bound": 2.0 + eps,
                       "margin": (2.0 + eps) - got})
    if m > 3:
        middle = frozenset().union(*atoms[2:m - 1])
        got = mass_between(atoms[0], middle)
        checks.append({"rule": "root_to_middle_mass", "value": got,
                       "bound": eps, "margin": eps - got})
    union = frozenset().union(*atoms[1:])
    got = w(union)
    checks.append({"rule": "union_near_min", "value": got,
                   "bound": 2.0 + 4.0 * eta, "margin": (2.0 + 4.0 * eta) - got})
    for name, atom in (("leftmost", atoms[1]), ("rightmost", atoms[-1])):
        got = mass_between(atoms[0], atom)
        checks.append({"rule": f"root_adjacent_mass_{name}", "value": got,
                       "bound": 1.0 - 2.0 * eta,
                       "margin": got - (1.0 - 2.0 * eta)})
    violations = [c for c in checks if c["margin"] < -1e-9]
    return {"checks": checks, "violations": violations, "eta": eta,
            "eps_eta": eps, "atom_count": m}


# ---------------------------------------------------------------------------
# Hierarchy
# ---------------------------------------------------------------------------

@dataclass
class HierarchyNode:
    vertex_set: frozenset
    kind: str                     # "degree" or "polygon"
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    ordered_children: list[int] | None = None   # polygon cuts: cycle order
    partition: tuple[list[int], list[int], list[int]] | None = None  # A, B, C


@dataclass
class CutHierarchy:
    """Laminar family of near-minimum cuts with degree/polygon tags.

    Node 0 is the root (everything except the root pair).  Edge indices in
    partitions refer to the LP edge list this hierarchy was built from.
    """

    nodes: list[HierarchyNode]
    edges: list[tuple[int, int, float]]
    root_pair: tuple[int, int]
    both_sided_count: int = 0
    report: dict = field(default_factory=dict)

    @property
    def root(self) -> int:
        return 0

    def node_of(self, vertex_set) -> int | None:
        target = frozenset(vertex_set)
        for i, nd in enumerate(self.nodes):
            if nd.vertex_set == target:
                return i
        return None

    def smallest_containing(self, vertices) -> int:
        """Lowest node whose set contains all given vertices."""
        vs = set(vertices)
        candidates = [i for i, nd in enumerate(self.nodes)
                      if vs <= nd.vertex_set]
        if not candidates:
            raise ValueError("vertices not contained in any hierarchy node")
        return min(candidates, key=lambda i: len(self.nodes[i].vertex_set))

    def leaves(self) -> list[int]:
        return [i for i, nd in enumerate(self.nodes) if not nd.children]

    def to_json(self) -> dict:
        return {
            "nodes": [{
                "vertices": sorted(nd.vertex_set),
                "kind": nd.kind,
                "parent": nd.parent,
                "ordered_children": nd.ordered_children,
                "partition": nd.partition,
            } for nd in self.nodes],
            "both_sided_count": self.both_sided_count,
        }


def build_hierarchy(sol: LpSolution, opt: Tour, eta: float,
                    seed: int = 0) -> CutHierarchy:
    """Laminar hierarchy from the near-minimum cuts of (x + tour)/2.

    Connected components of cuts crossed on at most one side contribute
    either the single cut or the polygon's atoms plus their union; cuts
    crossed on both sides are counted and set aside.  A node is a polygon
    cut if a multi-cut component's union equals it (checked first) or if
    it has exactly two children; triangles carry an empty C set.
    """
    if sol.root_edge is None:
        raise ValueError("hierarchy needs the post-split solution")
    u0, v0 = sol.edges[sol.root_edge][:2]
    n = sol.n
    z_edges = _average_with_tour(sol, opt)
    cuts = enumerate_near_min_cuts(n, z_edges, eta, root_pair=(u0, v0),
                                   seed=seed)
    info = classify_crossings(cuts, opt, (u0, v0))
    pos = tour_positions(opt.order, (u0, v0))

    sets: list[frozenset] = []
    seen: set[frozenset] = set()
    polygons: dict[frozenset, Polygon] = {}

    def add(s: frozenset):
        if s not in seen and 0 < len(s) < n:
            seen.add(s)
            sets.append(s)

    root_set = frozenset(range(n)) - {u0, v0}
    add(root_set)
    for comp in info.components:
        if len(comp) == 1:
            add(info.cuts[comp[0]].vertex_set)
        else:
            poly = polygon_of(info.cuts, comp, pos, n - 2, n)
            for a in poly.atoms[1:]:
                add(a)
            union = frozenset().union(*poly.atoms[1:])
            add(union)
            polygons[union] = poly

    sets.sort(key=lambda s: (-len(s), sorted(s)))
    for i, s in enumerate(sets):
        for t in sets[i + 1:]:
            if s & t and not (t <= s or s <= t):
                raise StructureError(f"hierarchy sets cross: {sorted(s)} / {sorted(t)}")

    nodes = [HierarchyNode(s, "degree") for s in sets]
    index = {s: i for i, s in enumerate(sets)}
    for i, s in enumerate(sets):
        if i == 0:
            continue
        parent = min((j for j in range(len(sets)) if s < sets[j]),
                     key=lambda j: len(sets[j]), default=None)
        nodes[i].parent = parent
        if parent is not None:
            nodes[parent].children.append(i)

    lp_edges = sol.edges
    for i, nd in enumerate(nodes):
        s = nd.vertex_set
        children_sets = [nodes[c].vertex_set for c in nd.children]
        if s in polygons:
            nd.kind = "polygon"
            _attach_polygon_partition(nd, nodes, lp_edges, pos)
        elif len(nd.children) == 2:
            nd.kind = "polygon"
            _attach_triangle_partition(nd, nodes, lp_edges)
        else:
            nd.kind = "degree"

    h = CutHierarchy(nodes, list(lp_edges), (u0, v0),
                     both_sided_count=len(info.both_sided))
    h.report = {
        "near_min_cuts": len(cuts),
        "components": len(info.components),
        "polygons": sorted(len(p.atoms) for p in polygons.values()),
        "both_sided": len(info.both_sided),
    }
    return h


def _average_with_tour(sol: LpSolution, opt: Tour):
    acc: dict[tuple[int, int], float] = {}
    for u, v, x in sol.edges:
        key = (min(u, v), max(u, v))
        acc[key] = acc.get(key, 0.0) + x / 2.0
    for u, v in opt.edges():
        key = (min(u, v), max(u, v))
        acc[key] = acc.get(key, 0.0) + 0.5
    return [(u, v, w) for (u, v), w in acc.items()]


def _ordered_children(nd: HierarchyNode, nodes, pos):
    return sorted(nd.children, key=lambda c: min(pos[v] for v in nodes[c].vertex_set))


def _attach_polygon_partition(nd, nodes, lp_edges, pos):
    order = _ordered_children(nd, nodes, pos)
    nd.ordered_children = order
    first = nodes[order[0]].vertex_set
    last = nodes[order[-1]].vertex_set
    s = nd.vertex_set
    A, B, C = [], [], []
    for i, (u, v, _x) in enumerate(lp_edges):
        if (u in s) == (v in s):
            continue
        inner = u if u in s else v
        if inner in first:
            A.append(i)
        elif inner in last:
            B.append(i)
        else:
            C.append(i)
    nd.partition = (A, B, C)


def _attach_triangle_partition(nd, nodes, lp_edges):
    x_set = nodes[nd.children[0]].vertex_set
    y_set = nodes[nd.children[1]].vertex_set
    s = nd.vertex_set
    A, B, C = [], [], []
    for i, (u, v, _x) in enumerate(lp_edges):
        if (u in s) == (v in s):
            continue
        inner = u if u in s else v
        if inner in x_set:
            A.append(i)
        elif inner in y_set:
            B.append(i)
        else:
            C.append(i)
    nd.ordered_children = list(nd.children)
    nd.partition = (A, B, C)


# ---------------------------------------------------------------------------
# Degree partition of an arbitrary hierarchy node
# ---------------------------------------------------------------------------

def degree_partition(h: CutHierarchy, node: int, eps_one_one: float) -> dict:
    """A, B, C split of the boundary of a hierarchy node.

    A and B come from minimal strict descendants whose boundary overlaps
    the node's boundary by at least 1 - eps_one_one; with one such
    descendant the sibling side is completed through the child containing
    it, and with none the boundary is split greedily into two halves.
    """
    nd = h.nodes[node]
    s = nd.vertex_set
    boundary = [i for i, (u, v, _x) in enumerate(h.edges)
                if (u in s) != (v in s)]
    bset = set(boundary)
    xw = lambda idx: float(sum(h.edges[i][2] for i in idx))

    def shared(j):
        t = h.nodes[j].vertex_set
        return [i for i in boundary
                if (h.edges[i][0] in t) != (h.edges[i][1] in t)]

    descendants = [j for j, other in enumerate(h.nodes)
                   if other.vertex_set < s]
    qualifying = [j for j in descendants if xw(shared(j)) >= 1.0 - eps_one_one]
    minimal = [j for j in qualifying
               if not any(h.nodes[k].vertex_set < h.nodes[j].vertex_set
                          for k in qualifying)]
    minimal.sort(key=lambda j: (len(h.nodes[j].vertex_set),
                                sorted(h.nodes[j].vertex_set)))

    if len(minimal) >= 2:
        a, b = minimal[0], minimal[1]
        A = shared(a)
        B = [i for i in shared(b) if i not in set(A)]
        C = [i for i in boundary if i not in set(A) and i not in set(B)]
        case = "two_minimal"
    elif len(minimal) == 1:
        a = minimal[0]
        A = shared(a)
        child = next(c for c in nd.children
                     if h.nodes[a].vertex_set <= h.nodes[c].vertex_set)
        C = [i for i in shared(child) if i not in set(A)]
        B = [i for i in boundary if i not in set(A) and i not in set(C)]
        case = "one_minimal"
    else:
        order = sorted(boundary, key=lambda i: (-h.edges[i][2], i))
        A, B = [], []
        wa = wb = 0.0
        for i in order:
            if wa <= wb:
                A.append(i)
                wa += h.edges[i][2]
            else:
                B.append(i)
                wb += h.edges[i][2]
        C = []
        case = "fallback_split"
    return {
        "A": sorted(A), "B": sorted(B), "C": sorted(C),
        "xA": xw(A), "xB": xw(B), "xC": xw(C),
        "case": case,
        "bounds_ok": bool(xw(A) >= 1.0 - eps_one_one - 1e-9
                          and xw(B) >= 1.0 - eps_one_one - 1e-9),
    }
