"""Reference optimizers for head-to-head comparison: PSO variants, GA, SA.

These are standard textbook forms wired to the same budget, seeding, and
result contracts as the hull optimizer. They exist to exercise the
comparison harness and provide directional sanity checks, not to reproduce
any particular implementation. Published mean/std errors for optimizers not
reimplemented here (CLPSO, ICA, CICA, BA) ship as a data file for report
rendering.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

import numpy as np

from .core import (
    BudgetedObjective,
    ConfigurationError,
    EvalBudget,
    Individual,
    RunResult,
    SearchDomain,
    make_rng,
    sample_uniform,
)

__all__ = [
    "BASELINE_KINDS",
    "BaselineConfig",
    "GaParams",
    "PsoParams",
    "REFERENCE_OPTIMIZERS",
    "SaParams",
    "load_reference_results",
    "run_baseline",
]

BASELINE_KINDS = ("PSO", "PSO-W", "PSO-w-local", "GA", "SA")

# Optimizers whose results are shipped as published values only.
REFERENCE_OPTIMIZERS = ("CLPSO", "ICA", "CICA", "BA")


@dataclass(frozen=True)
class PsoParams:
    inertia_min: float = 0.7
    inertia_max: float = 0.9
    cognitive: float = 2.0
    social: float = 2.0
    velocity_fraction: float = 0.1 / 8  # of the per-axis domain width
    neighborhood: int = 2  # ring neighbors for the local variant


@dataclass(frozen=True)
class GaParams:
    mutation_rate: float = 0.01
    crossover_rate: float = 0.8
    replacement_fraction: float = 0.5
    tournament: int = 2


@dataclass(frozen=True)
class SaParams:
    t_max: float = 1.0
    t_min: float = 1e-4
    max_repeats: int = 4096  # repeats per state double 1, 2, 4, ... up to this cap
    step_fraction: float = 0.1


@dataclass(frozen=True)
class BaselineConfig:
    kind: str
    population: int = 50
    pso: PsoParams = field(default_factory=PsoParams)
    ga: GaParams = field(default_factory=GaParams)
    sa: SaParams = field(default_factory=SaParams)

    def __post_init__(self) -> None:
        if self.kind not in BASELINE_KINDS:
            raise ConfigurationError(f"unknown baseline {self.kind!r}; expected one of {BASELINE_KINDS}")
        if self.population < 1:
            raise ConfigurationError("population must be >= 1")
        for rate in (self.ga.mutation_rate, self.ga.crossover_rate, self.ga.replacement_fraction):
            if not 0.0 <= rate <= 1.0:
                raise ConfigurationError("GA rates must lie in [0, 1]")
        if self.pso.velocity_fraction <= 0.0:
            raise ConfigurationError("velocity fraction must be positive")


def run_baseline(
    config: BaselineConfig,
    objective: Callable[[np.ndarray], float],
    domain: SearchDomain,
    budget: EvalBudget,
    seed: int,
    observer: Callable[[int, dict], None] | None = None,
) -> RunResult:
    """Run the configured baseline under the shared budget/result contracts.

    `observer`, when given, receives (iteration, state dict) once per
    generation/state for instrumentation; it must not consume randomness.
    """
    rng = make_rng(seed)
    tracker = BudgetedObjective(objective, budget)
    if config.kind in ("PSO", "PSO-W", "PSO-w-local"):
        best_pos, best_cost, trace, population = _run_pso(config, domain, tracker, rng, observer)
    elif config.kind == "GA":
        best_pos, best_cost, trace, population = _run_ga(config, domain, tracker, rng, observer)
    else:
        best_pos, best_cost, trace, population = _run_sa(config, domain, tracker, rng, observer)
    if best_pos is None:
        raise RuntimeError("every objective evaluation returned a non-finite cost")
    return RunResult(
        best_position=best_pos,
        best_cost=best_cost,
        trace=tuple(trace),
        evaluations=tracker.evaluations,
        seed=int(seed),
        discarded=tracker.discarded,
        final_population=population,
    )


def _evaluate_rows(tracker, positions, costs, limit=None):
    """Evaluate rows in order until the budget empties; returns rows touched."""
    n = positions.shape[0] if limit is None else min(limit, positions.shape[0])
    evaluated = 0
    for i in range(n):
        if tracker.budget.remaining == 0:
            break
        costs[i] = tracker.evaluate_cost(positions[i])
        evaluated += 1
    return evaluated


def _run_pso(config, domain, tracker, rng, observer=None):
    params = config.pso
    n, d = config.population, domain.dimension
    v_max = params.velocity_fraction * domain.width

    positions = rng.uniform(domain.lower, domain.upper, size=(n, d))
    velocities = rng.uniform(-v_max, v_max, size=(n, d))
    costs = np.full(n, np.inf)
    _evaluate_rows(tracker, positions, costs)

    pbest = positions.copy()
    pbest_costs = costs.copy()
    g = int(np.argmin(pbest_costs))
    best_pos = pbest[g].copy() if math.isfinite(pbest_costs[g]) else None
    best_cost = float(pbest_costs[g])
    trace = [best_cost] if best_pos is not None else []

    generation = 0
    while tracker.budget.remaining > 0:
        generation += 1
        progress = tracker.budget.used / tracker.budget.limit
        if config.kind == "PSO":
            inertia = params.inertia_max - (params.inertia_max - params.inertia_min) * progress
        else:
            # PSO-W and PSO-w-local redraw the weight from the configured range.
            inertia = rng.uniform(params.inertia_min, params.inertia_max)

        if config.kind == "PSO-w-local":
            neighbor_costs = np.stack(
                [np.roll(pbest_costs, s) for s in range(-(params.neighborhood // 2), params.neighborhood // 2 + 1)]
            )
            choice = np.argmin(neighbor_costs, axis=0)
            shifts = np.arange(-(params.neighborhood // 2), params.neighborhood // 2 + 1)
            attractor = pbest[(np.arange(n) - shifts[choice]) % n]
        else:
            attractor = pbest[int(np.argmin(pbest_costs))]

        r1 = rng.random((n, d))
        r2 = rng.random((n, d))
        velocities = (
            inertia * velocities
            + params.cognitive * r1 * (pbest - positions)
            + params.social * r2 * (attractor - positions)
        )
        np.clip(velocities, -v_max, v_max, out=velocities)
        positions = np.clip(positions + velocities, domain.lower, domain.upper)

        fresh = np.full(n, np.inf)
        evaluated = _evaluate_rows(tracker, positions, fresh)
        improved = fresh[:evaluated] < pbest_costs[:evaluated]
        pbest_costs[:evaluated][improved] = fresh[:evaluated][improved]
        pbest[:evaluated][improved] = positions[:evaluated][improved]

        g = int(np.argmin(pbest_costs))
        if pbest_costs[g] < best_cost or best_pos is None:
            best_cost = float(pbest_costs[g])
            best_pos = pbest[g].copy()
        if best_pos is not None:
            trace.append(best_cost)
        if observer is not None:
            observer(generation, {"velocities": velocities, "positions": positions, "v_max": v_max})

    population = tuple(
        Individual(pbest[i], float(pbest_costs[i]))
        for i in range(n)
        if math.isfinite(pbest_costs[i])
    )
    return best_pos, best_cost, trace, population


def _tournament(positions, costs, size, rng):
    picks = rng.integers(0, positions.shape[0], size=size)
    winner = picks[int(np.argmin(costs[picks]))]
    return positions[int(winner)]


def _run_ga(config, domain, tracker, rng, observer=None):
    params = config.ga
    n, d = config.population, domain.dimension
    positions = rng.uniform(domain.lower, domain.upper, size=(n, d))
    costs = np.full(n, np.inf)
    _evaluate_rows(tracker, positions, costs)

    g = int(np.argmin(costs))
    best_pos = positions[g].copy() if math.isfinite(costs[g]) else None
    best_cost = float(costs[g])
    trace = [best_cost] if best_pos is not None else []

    offspring_count = max(1, round(params.replacement_fraction * n))
    generation = 0
    while tracker.budget.remaining > 0:
        generation += 1
        children = np.empty((offspring_count, d))
        for c in range(offspring_count):
            parent_a = _tournament(positions, costs, params.tournament, rng)
            parent_b = _tournament(positions, costs, params.tournament, rng)
            if rng.random() < params.crossover_rate:
                mix = rng.random()
                child = mix * parent_a + (1.0 - mix) * parent_b
            else:
                child = parent_a.copy()
            mutate = rng.random(d) < params.mutation_rate
            if mutate.any():
                child = child.copy()
                child[mutate] = rng.uniform(domain.lower[mutate], domain.upper[mutate])
            children[c] = child

        child_costs = np.full(offspring_count, np.inf)
        evaluated = _evaluate_rows(tracker, children, child_costs)
        if evaluated == 0:
            break
        # Generational replacement: the worst `evaluated` members make way.
        worst = np.argsort(costs, kind="stable")[n - evaluated:]
        positions[worst] = children[:evaluated]
        costs[worst] = child_costs[:evaluated]

        g = int(np.argmin(costs))
        if costs[g] < best_cost or best_pos is None:
            best_cost = float(costs[g])
            best_pos = positions[g].copy()
        if best_pos is not None:
            trace.append(best_cost)
        if observer is not None:
            observer(generation, {"positions": positions, "costs": costs})

    population = tuple(
        Individual(positions[i], float(costs[i])) for i in range(n) if math.isfinite(costs[i])
    )
    return best_pos, best_cost, trace, population


def _run_sa(config, domain, tracker, rng, observer=None):
    params = config.sa
    d = domain.dimension
    state = sample_uniform(domain, rng)
    cost = tracker.evaluate_cost(state)
    best_pos = state.copy() if math.isfinite(cost) else None
    best_cost = float(cost)
    trace = [best_cost] if best_pos is not None else []

    doubling_states = int(math.log2(params.max_repeats)) + 1
    cooling = (params.t_min / params.t_max) ** (1.0 / max(1, doubling_states - 1))
    temperature = params.t_max
    stage = 0
    while tracker.budget.remaining > 0:
        repeats = min(2**stage, params.max_repeats)
        sigma = params.step_fraction * domain.width * math.sqrt(temperature / params.t_max)
        for _ in range(min(repeats, tracker.budget.remaining)):
            candidate = np.clip(state + rng.normal(0.0, 1.0, d) * sigma, domain.lower, domain.upper)
            candidate_cost = tracker.evaluate_cost(candidate)
            delta = candidate_cost - cost
            if delta <= 0.0 or rng.random() < math.exp(-delta / temperature):
                state, cost = candidate, candidate_cost
                if cost < best_cost or best_pos is None:
                    best_cost = float(cost)
                    best_pos = state.copy()
        if best_pos is not None:
            trace.append(best_cost)
        if observer is not None:
            observer(stage, {"temperature": temperature, "state": state})
        stage += 1
        temperature = max(params.t_min, temperature * cooling)

    population = (Individual(state, float(cost)),) if math.isfinite(cost) else ()
    return best_pos, best_cost, trace, population


def load_reference_results() -> dict[tuple[str, str], tuple[float, float, int]]:
    """Published (mean, std, nfe) per (function id, optimizer) for CLPSO/ICA/CICA/BA."""
    table: dict[tuple[str, str], tuple[float, float, int]] = {}
    data = resources.files("upbo").joinpath("data/reference_results.csv")
    with data.open("r", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            key = (row["function"], row["optimizer"])
            table[key] = (float(row["mean"]), float(row["std"]), int(row["nfe"]))
    return table
