"""Dense two-phase primal simplex.

Dantzig pricing with an automatic switch to Bland's rule after a run of
degenerate pivots, which rules out cycling.  Solutions are basic, i.e.
extreme points of the constraint polyhedron, which downstream consumers
rely on.
"""

from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-9


class SimplexError(RuntimeError):
    def __init__(self, msg, iterations=0):
        super().__init__(msg)
        self.iterations = iterations


class InfeasibleError(SimplexError):
    pass


def _pivot(T, r, col):
    T[r] /= T[r, col]
    factors = T[:, col].copy()
    factors[r] = 0.0
    T -= np.outer(factors, T[r])


def _iterate(T, basis, allowed, tol, max_iter, start_iter=0,
             guard_artificials=False):
    """Run simplex pivots until optimal.  Bottom row of T is the objective.

    `allowed` is the number of columns permitted to enter the basis.  With
    `guard_artificials` (phase 2) a basic artificial pinned at zero exits
    immediately whenever the entering column touches its row, so it can
    never drift away from zero.  Returns the total iteration count.
    """
    m = T.shape[0] - 1
    iters = start_iter
    degenerate_run = 0
    bland = False
    obj = T[-1]
    while True:
        if bland:
            candidates = np.flatnonzero(obj[:allowed] < -tol)
            if candidates.size == 0:
                return iters
            col = int(candidates[0])
        else:
            col = int(np.argmin(obj[:allowed]))
            if obj[col] >= -tol:
                return iters
        colvals = T[:m, col]
        rhs = T[:m, -1]
        ratios = np.full(m, np.inf)
        pos = colvals > tol
        ratios[pos] = rhs[pos] / colvals[pos]
        if guard_artificials:
            art = np.array([bv >= allowed for bv in basis])
            forced = art & (np.abs(colvals) > tol) & (np.abs(rhs) <= tol)
            ratios[forced] = np.minimum(ratios[forced], 0.0)
        r = int(np.argmin(ratios))
        if not np.isfinite(ratios[r]):
            raise SimplexError("unbounded objective", iters)
        if bland or ratios[r] <= tol:
            # break ties toward the smallest basis index
            tied = np.flatnonzero(ratios <= ratios[r] + tol)
            r = int(min(tied, key=lambda i: basis[i]))
        degenerate_run = degenerate_run + 1 if ratios[r] <= tol else 0
        if degenerate_run > 20 * (m + 10):
            bland = True
        _pivot(T, r, col)
        basis[r] = col
        iters += 1
        if iters >= max_iter:
            raise SimplexError("pivot budget exceeded", iters)


def solve_lp(c, A, b, tol=PIVOT_TOL, max_iter=200_000):
    """min c.x subject to A x = b, x >= 0.

    Returns (x, objective, basis).  Raises InfeasibleError / SimplexError.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # columns: structural (n) | artificial (m) | rhs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))

    # phase 1: minimize the artificial sum
    T[-1, n:n + m] = 1.0
    for i in range(m):
        T[-1] -= T[i]
    iters = _iterate(T, basis, allowed=n, tol=tol, max_iter=max_iter)
    phase1 = -T[-1, -1]
    if phase1 > tol * max(1.0, float(np.abs(b).sum())):
        raise InfeasibleError(f"infeasible (phase-1 value {phase1:.3e})", iters)

    # pivot leftover artificials out where possible; redundant rows keep
    # a zero-valued artificial basic, which _iterate never lets move
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if abs(T[i, j]) > 1e-7), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j

    # phase 2
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i, bv in enumerate(basis):
        if T[-1, bv] != 0.0:
            T[-1] -= T[-1, bv] * T[i]
    iters = _iterate(T, basis, allowed=n, tol=tol, max_iter=max_iter,
                     start_iter=iters, guard_artificials=True)

    x = np.zeros(n)
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i, -1]
    x[np.abs(x) < tol] = 0.0
    return x, float(c @ x), basis
