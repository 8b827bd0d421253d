"""Search-space foundations: domains, individuals, populations, budgets, seeding.

Every optimizer in this package shares the same contracts: positions live in
an axis-aligned box, costs are minimized, fitnesses are nonnegative "higher
is better" values derived per population, and all randomness flows through a
single seeded generator per run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BudgetExhaustedError",
    "BudgetedObjective",
    "ConfigurationError",
    "EvalBudget",
    "Individual",
    "Population",
    "RandomSource",
    "RunResult",
    "SearchDomain",
    "clamp_to_domain",
    "compute_fitnesses",
    "make_rng",
    "refresh_fitnesses",
    "sample_uniform",
    "trim_population",
]

RandomSource = np.random.Generator


class ConfigurationError(ValueError):
    """A structurally invalid configuration value."""


class BudgetExhaustedError(RuntimeError):
    """An evaluation was requested beyond the budget limit."""


def make_rng(seed: int) -> RandomSource:
    """Seeded generator; identical seeds yield identical draw sequences."""
    return np.random.default_rng(int(seed))


@dataclass(frozen=True)
class SearchDomain:
    """Axis-aligned box bounds; the space every optimizer searches."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size < 1:
            raise ConfigurationError("bounds must be equal-length 1-d arrays with at least one axis")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ConfigurationError("bounds must be finite")
        if not (lower < upper).all():
            raise ConfigurationError("each lower bound must lie strictly below its upper bound")

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @classmethod
    def cube(cls, dimension: int, lower: float, upper: float) -> "SearchDomain":
        """Box with the same bounds on every axis."""
        if dimension < 1:
            raise ConfigurationError("dimension must be >= 1")
        return cls(np.full(dimension, float(lower)), np.full(dimension, float(upper)))

    def normalize(self, positions: np.ndarray) -> np.ndarray:
        """Map domain coordinates onto the unit hypercube."""
        return (np.asarray(positions, dtype=float) - self.lower) / self.width

    def denormalize(self, unit_positions: np.ndarray) -> np.ndarray:
        """Map unit-hypercube coordinates back into domain coordinates."""
        return self.lower + np.asarray(unit_positions, dtype=float) * self.width


@dataclass(frozen=True)
class Individual:
    """One candidate solution: position in domain coordinates, cost, derived fitness."""

    position: np.ndarray
    cost: float
    fitness: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "cost", float(self.cost))
        object.__setattr__(self, "fitness", float(self.fitness))


@dataclass
class Population:
    """Bounded pool of individuals; trimming keeps the lowest-cost members."""

    members: list[Individual]
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ConfigurationError("population capacity must be >= 1")

    def __len__(self) -> int:
        return len(self.members)

    def positions(self) -> np.ndarray:
        return np.array([m.position for m in self.members], dtype=float)

    def costs(self) -> np.ndarray:
        return np.array([m.cost for m in self.members], dtype=float)

    @property
    def best(self) -> Individual:
        return min(self.members, key=lambda m: m.cost)


def compute_fitnesses(costs: Sequence[float] | np.ndarray) -> np.ndarray:
    """Translate costs into nonnegative fitnesses: fitness[i] = max(costs) - costs[i].

    The minimum-cost entry receives the maximum fitness, and adding a constant
    to every cost leaves the result unchanged; the rule holds for any cost sign.
    """
    arr = np.asarray(costs, dtype=float)
    if arr.size == 0:
        raise ValueError("costs must be nonempty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValueError(f"non-finite cost at index {int(bad[0])}")
    return arr.max() - arr


def refresh_fitnesses(members: Sequence[Individual]) -> list[Individual]:
    """Recompute every member's fitness from the current member costs."""
    if not members:
        return []
    fitnesses = compute_fitnesses([m.cost for m in members])
    return [replace(m, fitness=float(f)) for m, f in zip(members, fitnesses)]


def sample_uniform(domain: SearchDomain, rng: RandomSource) -> np.ndarray:
    """One position with each coordinate independently uniform in its bounds."""
    return rng.uniform(domain.lower, domain.upper)


def clamp_to_domain(position: np.ndarray, domain: SearchDomain) -> np.ndarray:
    """Clip each coordinate into its box bounds."""
    return np.clip(np.asarray(position, dtype=float), domain.lower, domain.upper)


def trim_population(pop: Population) -> Population:
    """Keep the `capacity` lowest-cost members, sorted ascending by cost.

    Cost ties are broken by insertion order (stable sort), so the result is
    reproducible and seed-independent; the best member is never removed.
    """
    kept = sorted(pop.members, key=lambda m: m.cost)[: pop.capacity]
    return Population(kept, pop.capacity)


@dataclass
class EvalBudget:
    """Hard cap on objective evaluations; `used` can never exceed `limit`."""

    limit: int
    used: int = 0

    def __post_init__(self) -> None:
        if self.limit < 1:
            raise ConfigurationError("budget limit must be >= 1")
        if not 0 <= self.used <= self.limit:
            raise ConfigurationError("budget used must lie in [0, limit]")

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def charge(self, count: int = 1) -> None:
        if count < 0:
            raise ValueError("count must be nonnegative")
        if self.used + count > self.limit:
            raise BudgetExhaustedError(
                f"requested {count} evaluations with only {self.remaining} remaining"
            )
        self.used += count


class BudgetedObjective:
    """Objective wrapper that bills every call and absorbs non-finite results.

    A non-finite cost still counts against the budget (the evaluation was
    spent) but the proposal is discarded: `evaluate` returns None and
    `evaluate_cost` returns +inf so it can never be selected.
    """

    def __init__(self, objective: Callable[[np.ndarray], float], budget: EvalBudget):
        self.objective = objective
        self.budget = budget
        self.evaluations = 0
        self.discarded = 0

    def evaluate(self, position: np.ndarray) -> Individual | None:
        self.budget.charge(1)
        self.evaluations += 1
        cost = float(self.objective(position))
        if not math.isfinite(cost):
            self.discarded += 1
            return None
        return Individual(position, cost)

    def evaluate_cost(self, position: np.ndarray) -> float:
        self.budget.charge(1)
        self.evaluations += 1
        cost = float(self.objective(position))
        if not math.isfinite(cost):
            self.discarded += 1
            return math.inf
        return cost


@dataclass(frozen=True)
class RunResult:
    """Outcome of one seeded optimizer run.

    `trace` holds the best-so-far cost recorded after initialization and after
    each subsequent iteration, so it is non-increasing by construction.
    """

    best_position: np.ndarray
    best_cost: float
    trace: tuple[float, ...]
    evaluations: int
    seed: int
    discarded: int = 0
    final_population: tuple[Individual, ...] = field(default=(), repr=False)
