"""The certainty-driven optimization loop.

Each iteration generates random convex hulls over the population, scores
them with the configured certainty metric, keeps the highest-scoring
non-empty hulls, apportions the iteration's proposal budget across them in
proportion to certainty, evaluates the proposals, and trims the merged
population back to capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .certainty import CERTAINTY_METRICS, EliteRule, certainty
from .core import (
    BudgetedObjective,
    ConfigurationError,
    EvalBudget,
    Individual,
    Population,
    RunResult,
    SearchDomain,
    clamp_to_domain,
    make_rng,
    refresh_fitnesses,
    sample_uniform,
    trim_population,
)
from .hulls import HULL_KINDS, generate_hulls, members_of
from .update import canonical_update_method, propose

__all__ = ["AllocationPlan", "NoHullsSelectedError", "UpboConfig", "allocate", "run"]

# Attempts to produce at least one populated hull before an iteration falls
# back to uniform domain sampling.
HULL_REGENERATION_LIMIT = 10


class NoHullsSelectedError(ValueError):
    """Allocation was asked to split proposals across zero hulls."""


@dataclass
class UpboConfig:
    """Strategy selection plus the numeric knobs of the optimizer.

    Defaults follow the preferred configuration: sphere hulls with radii in
    [0.2, 0.7], the mean-fitness certainty metric, the mixed
    random-or-through-best update with p = 0.5, seven hulls per iteration,
    and an elite cost threshold of 0.3.
    """

    max_iter: int = 1_000_000_000
    hull_kind: str = "sphere"
    metric: str = "MeanFitnessPerVolume"
    update_method: str = "EitherRandomlyOrThroughBest"
    update_p: float = 0.5
    p_schedule: Callable[[int], float] | None = None
    num_hulls: int = 7
    hulls_selected: int | None = None
    max_updates_per_iter: int = 20
    solutions_cnt: int = 200
    radius_min: float = 0.2
    radius_max: float = 0.7
    elite_rule: EliteRule = field(default_factory=EliteRule)
    init_pop: int = 50

    def __post_init__(self) -> None:
        if self.hulls_selected is None:
            self.hulls_selected = math.ceil(self.num_hulls / 2)
        if self.max_iter < 1 or self.num_hulls < 1 or self.max_updates_per_iter < 1:
            raise ConfigurationError("iteration, hull, and update counts must be >= 1")
        if self.solutions_cnt < 1 or self.init_pop < 1:
            raise ConfigurationError("population sizes must be >= 1")
        if not 1 <= self.hulls_selected <= self.num_hulls:
            raise ConfigurationError("hulls_selected must lie in [1, num_hulls]")
        if not 0.0 < self.radius_min <= self.radius_max <= 1.0:
            raise ConfigurationError("radii must satisfy 0 < radius_min <= radius_max <= 1")
        if self.hull_kind not in HULL_KINDS:
            raise ConfigurationError(f"unknown hull kind {self.hull_kind!r}")
        if self.metric not in CERTAINTY_METRICS:
            raise ConfigurationError(f"unknown certainty metric {self.metric!r}")
        if not 0.0 < self.update_p < 1.0:
            raise ConfigurationError("update_p must lie in (0, 1)")
        self.update_method = canonical_update_method(self.update_method)


@dataclass(frozen=True)
class AllocationPlan:
    """How many proposals each selected hull receives; counts sum to total."""

    per_hull: tuple[tuple[int, int], ...]
    total: int


def allocate(certainties: Sequence[float], n_s: int) -> AllocationPlan:
    """Largest-remainder apportionment of n_s proposals proportional to certainty.

    Quotas are floored and the leftover units go to the largest fractional
    remainders, ties resolved toward the lower index. A zero certainty total
    apportions uniformly by the same rule, so the counts always sum to n_s.
    """
    scores = np.asarray(certainties, dtype=float)
    if scores.size == 0:
        raise NoHullsSelectedError("cannot allocate proposals across zero hulls")
    if n_s < 1:
        raise ConfigurationError("n_s must be >= 1")
    total = float(scores.sum())
    if total > 0.0:
        quotas = n_s * scores / total
    else:
        quotas = np.full(scores.size, n_s / scores.size)
    counts = np.floor(quotas).astype(int)
    remainders = quotas - counts
    leftover = int(n_s - counts.sum())
    for index in sorted(range(scores.size), key=lambda i: (-remainders[i], i))[:leftover]:
        counts[index] += 1
    return AllocationPlan(tuple(enumerate(counts.tolist())), int(n_s))


def _populated_hulls(config, dimension, norm_positions, rng):
    """Hulls with at least one member, regenerating a bounded number of times."""
    for _ in range(1 + HULL_REGENERATION_LIMIT):
        hulls = generate_hulls(
            config.num_hulls, config.hull_kind, dimension,
            config.radius_min, config.radius_max, rng,
        )
        index_sets = [members_of(h, norm_positions) for h in hulls]
        if any(len(ix) > 0 for ix in index_sets):
            return hulls, index_sets
    return None


def run(
    objective: Callable[[np.ndarray], float],
    domain: SearchDomain,
    config: UpboConfig,
    budget: EvalBudget,
    seed: int,
    observer: Callable[[int, Population, EvalBudget], None] | None = None,
) -> RunResult:
    """Run the loop until max_iter or budget exhaustion; returns the best found.

    An objective returning a non-finite value costs an evaluation but its
    proposal is dropped. `observer`, when given, is called after every
    iteration with (iteration, population, budget) for instrumentation; it
    must not consume randomness.
    """
    rng = make_rng(seed)
    tracker = BudgetedObjective(objective, budget)

    members: list[Individual] = []
    for _ in range(min(config.init_pop, budget.remaining)):
        individual = tracker.evaluate(sample_uniform(domain, rng))
        if individual is not None:
            members.append(individual)
    pop = trim_population(Population(members, config.solutions_cnt))
    pop = Population(refresh_fitnesses(pop.members), config.solutions_cnt)

    best: Individual | None = pop.members[0] if pop.members else None
    trace: list[float] = [best.cost] if best is not None else []

    iteration = 0
    while iteration < config.max_iter and budget.remaining > 0:
        iteration += 1
        new_members: list[Individual] = []

        populated = None
        if pop.members:
            norm_positions = domain.normalize(pop.positions())
            populated = _populated_hulls(config, domain.dimension, norm_positions, rng)

        if populated is None:
            # No populated hull to exploit: spend this iteration's proposals
            # on uniform domain samples.
            for _ in range(min(config.max_updates_per_iter, budget.remaining)):
                individual = tracker.evaluate(sample_uniform(domain, rng))
                if individual is not None:
                    new_members.append(individual)
        else:
            hulls, index_sets = populated
            norm_members = [
                replace(m, position=norm_positions[i]) for i, m in enumerate(pop.members)
            ]
            memberships = [[norm_members[j] for j in ix] for ix in index_sets]
            scores = [
                certainty(config.metric, memberships[i], hulls[i], domain.dimension, config.elite_rule)
                for i in range(len(hulls))
            ]
            nonempty = [i for i in range(len(hulls)) if memberships[i]]
            selected = sorted(nonempty, key=lambda i: (-scores[i], i))[: config.hulls_selected]
            plan = allocate([scores[i] for i in selected], config.max_updates_per_iter)
            p_value = config.p_schedule(iteration) if config.p_schedule else config.update_p

            for slot, count in plan.per_hull:
                hull = hulls[selected[slot]]
                hull_members = memberships[selected[slot]]
                for _ in range(count):
                    if budget.remaining == 0:
                        break
                    unit = propose(config.update_method, hull, hull_members, config.elite_rule, rng, p=p_value)
                    position = clamp_to_domain(domain.denormalize(unit), domain)
                    individual = tracker.evaluate(position)
                    if individual is not None:
                        new_members.append(individual)
                if budget.remaining == 0:
                    break

        # Merge skips bit-identical positions: duplicate copies of the best
        # member would otherwise crowd out the cluster diversity that the
        # segment-based updates need to keep contracting.
        existing = {m.position.tobytes() for m in pop.members}
        fresh = []
        for individual in new_members:
            key = individual.position.tobytes()
            if key not in existing:
                existing.add(key)
                fresh.append(individual)
        pop = trim_population(Population(pop.members + fresh, config.solutions_cnt))
        pop = Population(refresh_fitnesses(pop.members), config.solutions_cnt)
        if pop.members and (best is None or pop.members[0].cost < best.cost):
            best = pop.members[0]
        if best is not None:
            trace.append(best.cost)
        if observer is not None:
            observer(iteration, pop, budget)

    if best is None:
        raise RuntimeError("every objective evaluation returned a non-finite cost")
    return RunResult(
        best_position=best.position,
        best_cost=best.cost,
        trace=tuple(trace),
        evaluations=tracker.evaluations,
        seed=int(seed),
        discarded=tracker.discarded,
        final_population=tuple(pop.members),
    )
