"""Metric TSP instances: TSPLIB loading, random generation, exact optimum.

Supported TSPLIB subset: EUC_2D, GEO and EXPLICIT (FULL_MATRIX or
LOWER_DIAG_ROW).  Costs are stored as a dense symmetric float matrix; the
TSPLIB integer rounding conventions are applied at load time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

TRIANGLE_TOL = 1e-9

# TSPLIB earth radius for GEO distances.
_GEO_RRR = 6378.388


class InstanceError(ValueError):
    """Malformed or unsupported instance data."""


class SizeLimitError(ValueError):
    """Instance too large for an exact procedure."""


@dataclass(frozen=True)
class Tour:
    """Hamiltonian cycle given as a vertex permutation plus its cost."""

    order: tuple[int, ...]
    cost: float

    def validate(self, inst: "MetricInstance") -> None:
        if sorted(self.order) != list(range(inst.n)):
            raise InstanceError("tour order is not a permutation")
        if abs(self.cost - inst.tour_cost(self.order)) > 1e-9 * max(1.0, abs(self.cost)):
            raise InstanceError("stored tour cost does not match recomputation")

    def edges(self) -> list[tuple[int, int]]:
        n = len(self.order)
        return [(self.order[i], self.order[(i + 1) % n]) for i in range(n)]

    def to_json(self) -> dict:
        return {"order": list(self.order), "cost": self.cost}

    def to_tsplib(self, name: str = "tour") -> str:
        """TOUR_SECTION text (1-based vertex ids, -1 terminator)."""
        body = "\n".join(str(v + 1) for v in self.order)
        return (f"NAME: {name}\nTYPE: TOUR\nDIMENSION: {len(self.order)}\n"
                f"TOUR_SECTION\n{body}\n-1\nEOF\n")


@dataclass(frozen=True)
class MetricInstance:
    """Symmetric metric TSP instance.

    Immutable after construction; safe to share across threads.
    """

    n: int
    cost: np.ndarray
    name: str = "unnamed"
    optimum_hint: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = np.asarray(self.cost, dtype=float)
        if c.shape != (self.n, self.n):
            raise InstanceError(f"cost matrix shape {c.shape} != ({self.n}, {self.n})")
        if not np.allclose(c, c.T, atol=0):
            raise InstanceError("cost matrix is not symmetric")
        if np.any(np.diag(c) != 0.0):
            raise InstanceError("nonzero diagonal in cost matrix")
        if np.any(c < 0):
            raise InstanceError("negative cost")
        object.__setattr__(self, "cost", c)
        c.setflags(write=False)

    def dist(self, u: int, v: int) -> float:
        return float(self.cost[u, v])

    def tour_cost(self, order) -> float:
        order = list(order)
        return float(sum(self.cost[order[i], order[(i + 1) % self.n]]
                         for i in range(self.n)))

    def max_triangle_violation(self) -> float:
        """Largest c(u,w) - c(u,v) - c(v,w) over all triples (<= 0 if metric)."""
        c = self.cost
        worst = -math.inf
        for v in range(self.n):
            via = c[:, v][:, None] + c[v, :][None, :]
            worst = max(worst, float(np.max(c - via)))
        return worst

    def assert_metric(self, tol: float = TRIANGLE_TOL) -> None:
        viol = self.max_triangle_violation()
        if viol > tol:
            raise InstanceError(f"triangle inequality violated by {viol:.3e}")


def metric_completion(cost: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths (Floyd-Warshall) of a symmetric cost matrix."""
    c = cost.copy()
    n = c.shape[0]
    for k in range(n):
        np.minimum(c, c[:, k][:, None] + c[k, :][None, :], out=c)
    return c


# ---------------------------------------------------------------------------
# TSPLIB parsing
# ---------------------------------------------------------------------------

def _nint(x: float) -> int:
    return int(x + 0.5)


def _euc2d(a, b) -> int:
    return _nint(math.hypot(a[0] - b[0], a[1] - b[1]))


def _geo_radians(coord: float) -> float:
    deg = int(coord)
    minutes = coord - deg
    return math.pi * (deg + 5.0 * minutes / 3.0) / 180.0


def _geo(a, b) -> int:
    lat1, lon1 = _geo_radians(a[0]), _geo_radians(a[1])
    lat2, lon2 = _geo_radians(b[0]), _geo_radians(b[1])
    q1 = math.cos(lon1 - lon2)
    q2 = math.cos(lat1 - lat2)
    q3 = math.cos(lat1 + lat2)
    return int(_GEO_RRR * math.acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0)


def load_tsplib(text: str, name: str | None = None) -> MetricInstance:
    """Parse the TSPLIB subset (EUC_2D, GEO, EXPLICIT full/lower-diag).

    EXPLICIT matrices are checked for the triangle inequality: violations up
    to 1e-9 are repaired by metric completion (with a warning), anything
    larger is an error.  EUC_2D / GEO costs follow the TSPLIB rounding
    conventions and are taken as given.
    """
    lines = text.splitlines()
    header: dict[str, str] = {}
    data_start = None
    section = None
    for lineno, raw in enumerate(lines):
        line = raw.strip()
        if not line or line == "EOF":
            continue
        if line in ("NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION"):
            section = line
            data_start = lineno + 1
            break
        if ":" in line:
            key, _, val = line.partition(":")
            header[key.strip()] = val.strip()
        else:
            raise InstanceError(f"line {lineno + 1}: malformed header line {line!r}")
    if section is None:
        raise InstanceError("no NODE_COORD_SECTION or EDGE_WEIGHT_SECTION found")

    try:
        n = int(header["DIMENSION"])
    except KeyError:
        raise InstanceError("missing DIMENSION field") from None
    ewt = header.get("EDGE_WEIGHT_TYPE", "EXPLICIT").upper()
    inst_name = name or header.get("NAME", "tsplib")

    values: list[float] = []
    for lineno in range(data_start, len(lines)):
        line = lines[lineno].strip()
        if not line or line == "EOF":
            continue
        if line.endswith("_SECTION") or line == "DISPLAY_DATA_SECTION":
            break
        try:
            values.extend(float(tok) for tok in line.split())
        except ValueError:
            raise InstanceError(f"line {lineno + 1}: expected numbers, got {line!r}") from None

    if ewt in ("EUC_2D", "GEO"):
        if section != "NODE_COORD_SECTION":
            raise InstanceError(f"{ewt} requires NODE_COORD_SECTION")
        if len(values) != 3 * n:
            raise InstanceError(f"expected {3 * n} coordinate fields, got {len(values)}")
        coords = [(values[3 * i + 1], values[3 * i + 2]) for i in range(n)]
        dist = _euc2d if ewt == "EUC_2D" else _geo
        c = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                c[i, j] = c[j, i] = dist(coords[i], coords[j])
        meta = {"edge_weight_type": ewt, "coords": coords}
        return MetricInstance(n, c, inst_name, meta=meta)

    if ewt == "EXPLICIT":
        fmt = header.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX").upper()
        c = np.zeros((n, n))
        if fmt == "FULL_MATRIX":
            if len(values) != n * n:
                raise InstanceError(f"expected {n * n} matrix entries, got {len(values)}")
            c = np.array(values, dtype=float).reshape(n, n)
            c = (c + c.T) / 2.0
            np.fill_diagonal(c, 0.0)
        elif fmt == "LOWER_DIAG_ROW":
            want = n * (n + 1) // 2
            if len(values) != want:
                raise InstanceError(f"expected {want} matrix entries, got {len(values)}")
            it = iter(values)
            for i in range(n):
                for j in range(i + 1):
                    c[i, j] = c[j, i] = next(it)
            np.fill_diagonal(c, 0.0)
        else:
            raise InstanceError(f"unsupported EDGE_WEIGHT_FORMAT: {fmt}")
        inst = MetricInstance(n, c, inst_name, meta={"edge_weight_type": "EXPLICIT"})
        viol = inst.max_triangle_violation()
        if viol > TRIANGLE_TOL:
            raise InstanceError(f"triangle inequality violated by {viol:.3e}")
        if viol > 0:
            warnings.warn(f"{inst_name}: triangle violation {viol:.2e} repaired "
                          "by metric completion")
            inst = MetricInstance(n, metric_completion(c), inst_name,
                                  meta={"edge_weight_type": "EXPLICIT"})
        return inst

    raise InstanceError(f"unsupported EDGE_WEIGHT_TYPE: {ewt}")


def save_tsplib(inst: MetricInstance) -> str:
    """Serialize as EXPLICIT FULL_MATRIX (preserves float costs exactly)."""
    rows = "\n".join(" ".join(repr(float(x)) for x in row) for row in inst.cost)
    return (f"NAME: {inst.name}\nTYPE: TSP\nDIMENSION: {inst.n}\n"
            "EDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
            f"EDGE_WEIGHT_SECTION\n{rows}\nEOF\n")


# ---------------------------------------------------------------------------
# Generation and exact optimum
# ---------------------------------------------------------------------------

def random_euclidean(n: int, seed: int) -> MetricInstance:
    """Points i.i.d. uniform on the unit square, exact (unrounded) distances."""
    if n < 3:
        raise InstanceError(f"need at least 3 vertices, got {n}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    pts = rng.random((n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    c = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(c, 0.0)
    c = (c + c.T) / 2.0
    return MetricInstance(n, c, f"rand{n}-s{seed}",
                          meta={"edge_weight_type": "EUC_FLOAT",
                                "coords": [tuple(p) for p in pts]})


EXACT_OPT_MAX_N = 16


def exact_opt(inst: MetricInstance) -> tuple[float, Tour]:
    """Optimal Hamiltonian cycle by bitmask dynamic programming (n <= 16)."""
    if inst.n > EXACT_OPT_MAX_N:
        raise SizeLimitError(f"exact_opt limited to n <= {EXACT_OPT_MAX_N}, got {inst.n}")
    from .kernels import kernels
    cost, order = kernels().held_karp_dp(np.array(inst.cost, dtype=np.float64))
    tour = Tour(tuple(int(v) for v in order), inst.tour_cost(order))
    return tour.cost, tour
