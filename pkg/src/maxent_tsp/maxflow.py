"""Exact maximum flow on small networks with rational capacities."""

from __future__ import annotations

from collections import deque
from fractions import Fraction


def max_flow(num_nodes: int, capacities: dict, source: int, sink: int):
    """Edmonds-Karp with Fraction arithmetic.

    `capacities` maps (u, v) to a Fraction capacity.  Returns the flow
    value and the per-arc flow dict; exact, so comparisons against
    analytic bounds are meaningful.
    """
    cap = {}
    adj: list[list[int]] = [[] for _ in range(num_nodes)]
    for (u, v), c in capacities.items():
        if c < 0:
            raise ValueError("negative capacity")
        cap[(u, v)] = cap.get((u, v), Fraction(0)) + Fraction(c)
        cap.setdefault((v, u), Fraction(0))
        if v not in adj[u]:
            adj[u].append(v)
        if u not in adj[v]:
            adj[v].append(u)
    flow = {k: Fraction(0) for k in cap}

    def residual(u, v):
        return cap[(u, v)] - flow[(u, v)]

    total = Fraction(0)
    while True:
        prev = {source: source}
        q = deque([source])
        while q and sink not in prev:
            u = q.popleft()
            for v in adj[u]:
                if v not in prev and residual(u, v) > 0:
                    prev[v] = u
                    q.append(v)
        if sink not in prev:
            return total, flow
        push = None
        v = sink
        while v != source:
            u = prev[v]
            r = residual(u, v)
            push = r if push is None or r < push else push
            v = u
        v = sink
        while v != source:
            u = prev[v]
            flow[(u, v)] += push
            flow[(v, u)] -= push
            v = u
        total += push
