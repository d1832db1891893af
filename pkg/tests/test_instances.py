import math

import numpy as np
import pytest

from maxent_tsp import fixtures as fx
from maxent_tsp.instances import (InstanceError, SizeLimitError, exact_opt,
                                  load_tsplib, metric_completion,
                                  random_euclidean, save_tsplib)

EXPLICIT_3 = """NAME: tiny
TYPE: TSP
DIMENSION: 3
EDGE_WEIGHT_TYPE: EXPLICIT
EDGE_WEIGHT_FORMAT: FULL_MATRIX
EDGE_WEIGHT_SECTION
0 1 1
1 0 1
1 1 0
EOF
"""

EUC_345 = """NAME: pyth
TYPE: TSP
DIMENSION: 3
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION
1 0.0 0.0
2 3.0 4.0
3 0.0 4.0
EOF
"""

GEO_2 = """NAME: geo
TYPE: TSP
DIMENSION: 3
EDGE_WEIGHT_TYPE: GEO
NODE_COORD_SECTION
1 0.0 0.0
2 0.0 90.0
3 0.0 45.0
EOF
"""

LOWER_DIAG = """NAME: ld
TYPE: TSP
DIMENSION: 3
EDGE_WEIGHT_TYPE: EXPLICIT
EDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW
EDGE_WEIGHT_SECTION
0
2 0
3 4 0
EOF
"""


def test_explicit_full_matrix():
    inst = load_tsplib(EXPLICIT_3)
    assert inst.n == 3
    assert all(inst.dist(i, j) == 1.0 for i in range(3) for j in range(3) if i != j)


def test_euc2d_rounding_three_four_five():
    inst = load_tsplib(EUC_345)
    assert inst.dist(0, 1) == 5.0
    assert inst.dist(0, 2) == 4.0
    assert inst.dist(1, 2) == 3.0


def test_lower_diag_row():
    inst = load_tsplib(LOWER_DIAG)
    assert inst.dist(0, 1) == 2.0 and inst.dist(0, 2) == 3.0 and inst.dist(1, 2) == 4.0


def test_geo_quarter_circumference():
    # independent recomputation: radius * acos(0) + 1, truncated
    inst = load_tsplib(GEO_2)
    want = int(6378.388 * math.acos(0.0) + 1.0)
    assert inst.dist(0, 1) == float(want) == 10020.0


def test_unsupported_weight_type_names_field():
    bad = EXPLICIT_3.replace("EXPLICIT", "ATT")
    with pytest.raises(InstanceError, match="EDGE_WEIGHT_TYPE"):
        load_tsplib(bad)


def test_malformed_section_reports_line():
    bad = EXPLICIT_3.replace("1 1 0", "1 x 0")
    with pytest.raises(InstanceError, match="line"):
        load_tsplib(bad)


def test_explicit_triangle_violation_rejected():
    text = EXPLICIT_3.replace("0 1 1\n1 0 1\n1 1 0", "0 1 9\n1 0 1\n9 1 0")
    with pytest.raises(InstanceError, match="triangle"):
        load_tsplib(text)


def test_berlin52_loads_and_first_distance_recomputes():
    inst = fx.load_bundled("berlin52")
    assert inst.n == 52
    # independent recomputation from the raw coordinates
    coords = inst.meta["coords"]
    (x0, y0), (x1, y1) = coords[0], coords[1]
    want = int(math.sqrt((x0 - x1) ** 2 + (y0 - y1) ** 2) + 0.5)
    assert inst.dist(0, 1) == float(want) == 666.0


def test_random_euclidean_deterministic():
    a = random_euclidean(3, 7)
    b = random_euclidean(3, 7)
    assert np.array_equal(a.cost, b.cost)


def test_random_euclidean_metric_exactly():
    inst = random_euclidean(10, 1)
    assert inst.max_triangle_violation() <= 1e-12


def test_random_euclidean_mean_distance_band():
    # expectation for uniform points on the unit square is about 0.5214
    inst = random_euclidean(50, 2)
    iu = np.triu_indices(50, k=1)
    assert 0.4 <= float(inst.cost[iu].mean()) <= 0.6


def test_random_euclidean_rejects_tiny():
    with pytest.raises(InstanceError):
        random_euclidean(2, 0)


def test_exact_opt_unit_triangle_and_square():
    tri = fx.unit_triangle()
    import maxent_tsp.instances as mi
    inst = mi.MetricInstance(3, np.ones((3, 3)) - np.eye(3), "tri")
    cost, tour = exact_opt(inst)
    assert cost == 3.0
    tour.validate(inst)

    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    c = np.array([[math.hypot(a[0] - b[0], a[1] - b[1]) for b in pts] for a in pts])
    sq = mi.MetricInstance(4, c, "square")
    cost, tour = exact_opt(sq)
    assert abs(cost - 4.0) < 1e-12


def test_exact_opt_matches_permutation_minimum():
    import itertools
    inst = random_euclidean(8, 3)
    cost, tour = exact_opt(inst)
    brute = min(inst.tour_cost((0,) + p)
                for p in itertools.permutations(range(1, 8)))
    assert abs(cost - brute) < 1e-12
    tour.validate(inst)


def test_exact_opt_size_limit():
    with pytest.raises(SizeLimitError):
        exact_opt(random_euclidean(17, 0))


def test_save_load_round_trip_preserves_costs():
    inst = random_euclidean(6, 9)
    again = load_tsplib(save_tsplib(inst))
    assert np.array_equal(inst.cost, again.cost)


def test_tour_serialization():
    inst = random_euclidean(5, 8)
    _, tour = exact_opt(inst)
    text = tour.to_tsplib("t")
    assert "TOUR_SECTION" in text and text.rstrip().endswith("EOF")
    lines = text.splitlines()
    sec = lines.index("TOUR_SECTION")
    ids = [int(x) for x in lines[sec + 1:sec + 6]]
    assert sorted(ids) == [1, 2, 3, 4, 5]
    assert lines[sec + 6] == "-1"
    assert tour.to_json()["order"] == list(tour.order)


def test_explicit_repair_path_warns_and_fixes():
    # collinear triple with the long edge bumped by half a nanometre
    rows = "0.0 1.0 2.0000000005\n1.0 0.0 1.0\n2.0000000005 1.0 0.0"
    text = ("NAME: viol\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
            "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
            f"{rows}\nEOF\n")
    import warnings
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = load_tsplib(text)
    assert any("repaired" in str(w.message) for w in caught)
    assert inst.dist(0, 2) == 2.0
    assert inst.max_triangle_violation() <= 0.0


def test_metric_completion_shrinks_long_edges():
    c = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
    fixed = metric_completion(c)
    assert fixed[0, 2] == 2.0
