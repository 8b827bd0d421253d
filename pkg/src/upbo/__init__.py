"""UPBO: certainty-driven convex-hull optimization with a comparison harness.

The optimizer balances exploration against exploitation by scoring randomly
placed convex regions (spheres or ellipsoids) of the search space with a
certainty metric over the solutions they contain, then spending each
iteration's proposal budget on the most certain regions in proportion to
their scores.
"""

from .baselines import BASELINE_KINDS, BaselineConfig, run_baseline
from .benchmarks import evaluate, list_benchmarks, make_benchmark, make_rotation
from .certainty import CERTAINTY_METRICS, EliteRule, certainty, select_elites
from .core import (
    EvalBudget,
    Individual,
    Population,
    RunResult,
    SearchDomain,
    compute_fitnesses,
    make_rng,
)
from .hulls import HULL_KINDS, EllipsoidHull, SphereHull, generate_hulls, sample_in_hull
from .optimizer import AllocationPlan, UpboConfig, allocate, run
from .stats import TrialResult, aggregate, paired_t_test
from .update import UPDATE_METHODS, propose

__version__ = "0.1.0"

__all__ = [
    "AllocationPlan",
    "BASELINE_KINDS",
    "BaselineConfig",
    "CERTAINTY_METRICS",
    "EliteRule",
    "EllipsoidHull",
    "EvalBudget",
    "HULL_KINDS",
    "Individual",
    "Population",
    "RunResult",
    "SearchDomain",
    "SphereHull",
    "TrialResult",
    "UPDATE_METHODS",
    "UpboConfig",
    "aggregate",
    "allocate",
    "certainty",
    "compute_fitnesses",
    "evaluate",
    "generate_hulls",
    "list_benchmarks",
    "make_benchmark",
    "make_rng",
    "make_rotation",
    "paired_t_test",
    "propose",
    "run",
    "run_baseline",
    "sample_in_hull",
    "select_elites",
]
