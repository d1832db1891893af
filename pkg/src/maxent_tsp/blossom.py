"""Minimum-cost perfect matching on dense graphs.

Primal-dual blossom algorithm with explicit blossom shrinking and
expansion.  Dual variables are exact dyadic rationals, stored as integers
over a shared power-of-two unit that halves on demand, so tightness tests
are exact integer comparisons and every run ends with a verified
complementary-slackness certificate.  Intended for the dense, desk-scale
graphs this project works with (a few hundred vertices at most).

The core maximizes integer weights; the public entry point converts float
costs to exact scaled integers first (floats are dyadic, so the conversion
is lossless) and flips the sign convention.
"""

from __future__ import annotations

from fractions import Fraction

NO_VERTEX = -1


class MatchingError(RuntimeError):
    pass


class _Blossom:
    __slots__ = ("children", "edges", "base")

    def __init__(self, children, edges, base):
        self.children = children  # child ids (vertex or blossom), cycle order
        self.edges = edges        # edges[i] = (x, y), x in children[i], y in next
        self.base = base          # base vertex


class _Matcher:
    """One matching problem over integer weights.

    True dual values are dual[id] / 2**shift; `shift` grows only when a
    dual adjustment needs a half-unit, so everything stays integral.
    """

    def __init__(self, n: int, weight):
        self.n = n
        self.w2 = [[2 * weight[i][j] for j in range(n)] for i in range(n)]
        self.mate = [NO_VERTEX] * n
        maxw = max(max(row) for row in weight) if n else 0
        self.shift = 0
        self.dual = {v: maxw for v in range(n)}
        self.next_id = n
        self.blossom: dict[int, _Blossom] = {}
        self.parent: dict[int, int] = {v: -1 for v in range(n)}
        self.top: list[int] = list(range(n))  # top[v] = top-level id over v
        self.label: dict[int, int] = {}
        self.labeledge: dict[int, tuple[int, int] | None] = {}
        self.queue: list[int] = []

    # -- structure helpers ------------------------------------------------

    def vertices_of(self, b) -> list[int]:
        if b < self.n:
            return [b]
        out = []
        stack = [b]
        while stack:
            x = stack.pop()
            if x < self.n:
                out.append(x)
            else:
                stack.extend(self.blossom[x].children)
        return out

    def base_of(self, b) -> int:
        return b if b < self.n else self.blossom[b].base

    def slack(self, u, v) -> int:
        return self.dual[u] + self.dual[v] - (self.w2[u][v] << self.shift)

    def child_containing(self, b, v):
        t = v
        while self.parent[t] != b:
            t = self.parent[t]
        return t

    def _double_units(self) -> None:
        self.shift += 1
        for k in self.dual:
            self.dual[k] *= 2

    # -- labels -----------------------------------------------------------

    def assign_label(self, x: int, kind: int, edge) -> None:
        """Label the top blossom of vertex x; S labels enqueue, T labels
        immediately propagate an S label along the matched edge."""
        b = self.top[x]
        assert self.label.get(b, 0) == 0
        self.label[b] = kind
        self.labeledge[b] = edge
        if kind == 1:
            self.queue.extend(self.vertices_of(b))
        else:
            base = self.base_of(b)
            m = self.mate[base]
            assert m != NO_VERTEX, "T label on an unmatched base"
            self.assign_label(m, 1, (base, m))

    def common_root(self, v, w):
        """Nearest common S-ancestor blossom, or None (disjoint trees)."""
        seen = set()
        b = self.top[v]
        while True:
            seen.add(b)
            edge = self.labeledge[b]
            if edge is None:
                break
            b = self.top[self.mate[self.base_of(b)]]  # T parent
            edge = self.labeledge[b]
            assert edge is not None
            b = self.top[edge[0]]                     # S grandparent
        b = self.top[w]
        while True:
            if b in seen:
                return b
            edge = self.labeledge[b]
            if edge is None:
                return None
            b = self.top[self.mate[self.base_of(b)]]
            edge = self.labeledge[b]
            b = self.top[edge[0]]

    # -- blossom operations -------------------------------------------------

    def _path_to(self, b, r):
        """Climb S-ancestors from top blossom b up to blossom r.

        Returns (blossoms, edges) where edges[i] is the tree edge oriented
        from blossoms[i+1] (closer to r) into blossoms[i].
        """
        blossoms = [b]
        edges = []
        while blossoms[-1] != r:
            cur = blossoms[-1]
            base = self.base_of(cur)
            t_blossom = self.top[self.mate[base]]
            edges.append(self.labeledge[cur])          # matched edge into cur
            s_edge = self.labeledge[t_blossom]
            blossoms.append(t_blossom)
            edges.append(s_edge)                       # tree edge into T parent
            blossoms.append(self.top[s_edge[0]])
        return blossoms, edges

    def add_blossom(self, r, v, w) -> None:
        """Shrink the odd cycle through the S-blossom tops of v, w and root r."""
        bv, ev = self._path_to(self.top[v], r)
        bw, ew = self._path_to(self.top[w], r)
        # cycle order: r .. down to top[v], edge (v,w), up from top[w] .. r
        children = list(reversed(bv)) + bw[:-1]
        edges = [(e[0], e[1]) for e in reversed(ev)]
        edges.append((v, w))
        edges.extend((e[1], e[0]) for e in ew)
        b = self.next_id
        self.next_id += 1
        self.blossom[b] = _Blossom(children, edges, self.base_of(r))
        self.parent[b] = -1
        for c in children:
            self.parent[c] = b
        for x in self.vertices_of(b):
            if self.label.get(self.top[x], 0) == 2:
                self.queue.append(x)  # former T vertices must be rescanned
            self.top[x] = b
        self.label[b] = 1
        self.labeledge[b] = self.labeledge[r]
        self.dual[b] = 0

    def expand_blossom(self, b, endstage: bool) -> None:
        bl = self.blossom[b]
        relabel = not endstage and self.label.get(b, 0) == 2
        entry = None
        if relabel:
            entry = self.child_containing(b, self.labeledge[b][1])
        for c in bl.children:
            self.parent[c] = -1
            if c < self.n:
                self.top[c] = c
            elif endstage and self.dual[c] == 0:
                self.expand_blossom(c, endstage)
            else:
                for x in self.vertices_of(c):
                    self.top[x] = c
        if relabel:
            self._relabel_expanded(b, entry)
        del self.blossom[b]
        del self.dual[b]
        self.label.pop(b, None)
        self.labeledge.pop(b, None)
        self.parent.pop(b, None)

    def _relabel_expanded(self, b, entry) -> None:
        """After expanding a T blossom, restore labels along the even
        alternating path from the entry child to the base child; all other
        children become free."""
        bl = self.blossom[b]
        entry_edge = self.labeledge[b]
        k = len(bl.children)
        i = bl.children.index(entry)
        step = -1 if i % 2 == 0 else 1

        for c in bl.children:
            self.label[c] = 0
            self.labeledge[c] = None

        cur, edge_in = i, entry_edge
        while cur % k != 0:
            child = bl.children[cur % k]
            self.label[child] = 0
            self.assign_label(edge_in[1], 2, edge_in)
            # assign_label pushed the S label across the matched cycle edge;
            # the next tree edge continues from that S child
            if step == 1:
                nxt = bl.edges[(cur + 1) % k]
                edge_in = (nxt[0], nxt[1])
            else:
                nxt = bl.edges[(cur - 2) % k]
                edge_in = (nxt[1], nxt[0])
            cur += 2 * step
        # The base child is relabeled directly: its mate (the S child below
        # the old blossom in the tree) already carries its label.
        base_child = bl.children[0]
        self.label[base_child] = 2
        self.labeledge[base_child] = edge_in

    def augment_blossom(self, b, v) -> None:
        """Rebase blossom b at vertex v, rematching the internal cycle."""
        t = self.child_containing(b, v)
        if t >= self.n:
            self.augment_blossom(t, v)
        bl = self.blossom[b]
        i = bl.children.index(t)
        bl.children = bl.children[i:] + bl.children[:i]
        bl.edges = bl.edges[i:] + bl.edges[:i]
        k = len(bl.children)
        for j in range(1, k, 2):
            x, y = bl.edges[j]
            if bl.children[j] >= self.n:
                self.augment_blossom(bl.children[j], x)
            if bl.children[j + 1] >= self.n:
                self.augment_blossom(bl.children[j + 1], y)
            self.mate[x] = y
            self.mate[y] = x
        bl.base = v

    def augment_matching(self, v, w) -> None:
        for s, j in ((v, w), (w, v)):
            while True:
                bs = self.top[s]
                assert self.label.get(bs, 0) == 1
                if bs >= self.n:
                    self.augment_blossom(bs, s)
                self.mate[s] = j
                edge = self.labeledge[bs]
                if edge is None:
                    break
                bt = self.top[edge[0]]
                assert self.label.get(bt, 0) == 2
                p, q = self.labeledge[bt]
                if bt >= self.n:
                    self.augment_blossom(bt, q)
                self.mate[q] = p
                s, j = p, q

    # -- main loop ----------------------------------------------------------

    def run_stage(self) -> bool:
        """Grow trees / adjust duals until one augmentation; False if the
        matching cannot be enlarged."""
        self.label = {}
        self.labeledge = {}
        for b in set(self.top) | set(self.blossom):
            if self.parent.get(b, -1) == -1:
                self.label[b] = 0
                self.labeledge[b] = None
        self.queue = []
        for v in range(self.n):
            if self.mate[v] == NO_VERTEX and self.label.get(self.top[v], 0) == 0:
                self.assign_label(v, 1, None)
        if not self.queue:
            return False

        n, top, label, dual, w2 = self.n, self.top, self.label, self.dual, self.w2
        guard = 0
        while True:
            guard += 1
            if guard > 200 * (n + 5) ** 2:
                raise MatchingError("stage failed to converge")
            while self.queue:
                v = self.queue.pop()
                label = self.label
                top = self.top
                if label.get(top[v], 0) != 1:
                    continue
                dv = self.dual[v]
                row = w2[v]
                sh = self.shift
                tv = top[v]
                for w in range(n):
                    if top[w] == tv:
                        continue
                    if dv + self.dual[w] - (row[w] << sh) != 0:
                        continue
                    lw = label.get(top[w], 0)
                    if lw == 0:
                        self.assign_label(w, 2, (v, w))
                    elif lw == 1:
                        r = self.common_root(v, w)
                        if r is None:
                            self.augment_matching(v, w)
                            return True
                        self.add_blossom(r, v, w)
                        top = self.top
                        tv = top[v]

            # dual adjustment; deltas are tracked in half-units so the
            # S-S case never needs a fractional value
            label, top, dual = self.label, self.top, self.dual
            sh = self.shift
            delta2x = None
            delta_type = None
            delta_edge = None
            delta_blossom = None
            for v in range(n):
                if label.get(top[v], 0) != 1:
                    continue
                dv = dual[v]
                row = w2[v]
                tv = top[v]
                for w in range(n):
                    if top[w] == tv:
                        continue
                    lw = label.get(top[w], 0)
                    if lw == 2:
                        continue
                    s = dv + dual[w] - (row[w] << sh)
                    if lw == 0:
                        sx = 2 * s
                    else:
                        sx = s
                    if delta2x is None or sx < delta2x:
                        delta2x = sx
                        delta_type = 2 if lw == 0 else 3
                        delta_edge = (v, w)
            for b in self.blossom:
                if self.parent[b] == -1 and label.get(b, 0) == 2:
                    zx = 2 * dual[b]
                    if delta2x is None or zx < delta2x:
                        delta2x, delta_type, delta_blossom = zx, 4, b
            if delta2x is None:
                return False  # no way to extend any tree

            if delta2x & 1:
                self._double_units()
                delta = delta2x
            else:
                delta = delta2x >> 1
            dual = self.dual

            for v in range(n):
                l = label.get(top[v], 0)
                if l == 1:
                    dual[v] -= delta
                elif l == 2:
                    dual[v] += delta
            for b in self.blossom:
                if self.parent[b] == -1:
                    l = label.get(b, 0)
                    if l == 1:
                        dual[b] += delta
                    elif l == 2:
                        dual[b] -= delta

            if delta_type == 4:
                self.expand_blossom(delta_blossom, endstage=False)
            else:
                self.queue.append(delta_edge[0])

    def solve(self) -> None:
        while any(m == NO_VERTEX for m in self.mate):
            if not self.run_stage():
                raise MatchingError("graph admits no perfect matching")
        # dissolve zero-dual blossoms so the certificate covers the rest
        for b in [b for b in self.blossom if self.parent[b] == -1]:
            if b in self.blossom and self.dual[b] == 0:
                self.expand_blossom(b, endstage=True)
        self.verify_optimum()

    def verify_optimum(self) -> None:
        """Exact complementary-slackness certificate of optimality."""
        member = {b: set(self.vertices_of(b)) for b in self.blossom}
        sh = self.shift
        for u in range(self.n):
            if self.mate[u] == NO_VERTEX:
                raise MatchingError("matching is not perfect")
            if self.mate[self.mate[u]] != u:
                raise MatchingError("mate array inconsistent")
        for u in range(self.n):
            for v in range(u + 1, self.n):
                pi = self.dual[u] + self.dual[v] - (self.w2[u][v] << sh)
                for b, verts in member.items():
                    if u in verts and v in verts:
                        pi += 2 * self.dual[b]
                if pi < 0:
                    raise MatchingError(f"dual infeasible at ({u},{v})")
                if self.mate[u] == v and pi != 0:
                    raise MatchingError(f"matched edge ({u},{v}) not tight")
        for b, verts in member.items():
            if self.dual[b] < 0:
                raise MatchingError("negative blossom dual")
            if self.dual[b] > 0:
                inside = sum(1 for u in verts if self.mate[u] in verts)
                if inside != len(verts) - 1:
                    raise MatchingError("blossom with positive dual not full")


def max_weight_perfect_matching_int(n: int, weight) -> list[int]:
    """mate array for integer weights; raises if no perfect matching."""
    if n == 0:
        return []
    if n % 2:
        raise MatchingError("odd number of vertices")
    m = _Matcher(n, weight)
    m.solve()
    return m.mate


def _exact_scaled_ints(costs) -> list[list[int]]:
    """Lossless float -> int conversion via a common power-of-two scale."""
    n = len(costs)
    fracs = [[Fraction(float(costs[i][j])) for j in range(n)] for i in range(n)]
    shift = 0
    for row in fracs:
        for f in row:
            shift = max(shift, f.denominator.bit_length() - 1)
    scale = 1 << min(shift, 960)
    return [[int(f * scale) for f in row] for row in fracs]


def min_cost_perfect_matching(n: int, costs) -> list[tuple[int, int]]:
    """Minimum-cost perfect matching of a dense symmetric cost matrix.

    Returns the matched pairs (i < j).  Costs may be floats; they are
    converted exactly, so the result is optimal for the given matrix, not
    for a rounded version of it.
    """
    if n == 0:
        return []
    ints = _exact_scaled_ints(costs)
    big = (n // 2) * max(max(r) for r in ints) + 1
    weight = [[big - ints[i][j] for j in range(n)] for i in range(n)]
    mate = max_weight_perfect_matching_int(n, weight)
    return sorted((i, mate[i]) for i in range(n) if i < mate[i])
