"""Max-entropy spanning-tree rounding for metric TSP.

Pipeline: subtour-elimination LP to an extreme point, root splitting,
tree-weight fitting to the fractional solution, exact tree sampling,
minimum-cost parity correction and shortcutting.  Alongside the pipeline,
the package verifies the supporting structure on exact small
distributions: near-minimum-cut polygons and hierarchies, negative
dependence properties, Bernoulli-sum bounds and marginal-preserving
events.
"""

from .constants import RuleConstants
from .heldkarp import LpSolution, solve_held_karp, split_root
from .instances import MetricInstance, Tour, exact_opt, load_tsplib, \
    random_euclidean
from .kernels import active_backend
from .matching import christofides_baseline, min_matching, odd_vertices
from .maxent import FitResult, fit_lambda
from .pipeline import run_atlas, run_tour
from .sampling import FitSampler, TreeSampler
from .treedist import ExactTreeDistribution, WeightedGraph, enumerate_trees, \
    marginals

__version__ = "0.1.0"

__all__ = [
    "ExactTreeDistribution", "FitResult", "FitSampler", "LpSolution",
    "MetricInstance", "RuleConstants", "Tour", "TreeSampler",
    "WeightedGraph", "active_backend", "christofides_baseline",
    "enumerate_trees", "exact_opt", "fit_lambda", "load_tsplib",
    "marginals", "min_matching", "odd_vertices", "random_euclidean",
    "run_atlas", "run_tour", "solve_held_karp", "split_root",
]
