"""Certainty metrics: score a hull's promise from its members' fitnesses.

All five metrics return nonnegative scores comparable across hulls of the
same kind within one iteration. An empty hull always scores 0 and is never
selected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ConfigurationError, Individual
from .hulls import Hull, volume_proxy

__all__ = ["CERTAINTY_METRICS", "EliteRule", "certainty", "select_elites"]

CERTAINTY_METRICS = (
    "SumFitnessPerVolume",
    "SumEliteFitnessPerVolume",
    "MeanFitnessPerVolume",
    "BestFitnessPerVolume",
    "VarFitnessPerVolume",
)


@dataclass(frozen=True)
class EliteRule:
    """Threshold rule picking a hull's elite members.

    Members whose cost is below cost_thresh x (hull mean cost) qualify. When
    no member qualifies, or the mean cost is not positive (where the
    threshold comparison loses its meaning), the top fallback_fraction of
    members by fitness is taken instead, never fewer than one.
    """

    cost_thresh: float = 0.3
    fallback_fraction: float = 0.3

    def __post_init__(self) -> None:
        if not 0.0 < self.cost_thresh < 1.0:
            raise ConfigurationError("cost_thresh must lie in (0, 1)")
        if not 0.0 < self.fallback_fraction <= 1.0:
            raise ConfigurationError("fallback_fraction must lie in (0, 1]")


def select_elites(members: Sequence[Individual], rule: EliteRule) -> list[Individual]:
    """Elite subset of `members`; never empty for nonempty input."""
    if not members:
        raise ValueError("members must be nonempty")
    costs = np.array([m.cost for m in members], dtype=float)
    mean_cost = float(costs.mean())
    if mean_cost > 0.0:
        cutoff = rule.cost_thresh * mean_cost
        elites = [m for m in members if m.cost < cutoff]
        if elites:
            return elites
    keep = max(1, math.ceil(rule.fallback_fraction * len(members)))
    # Stable sort: fitness ties fall back to insertion order.
    ranked = sorted(members, key=lambda m: -m.fitness)
    return ranked[:keep]


def certainty(
    kind: str,
    members: Sequence[Individual],
    hull: Hull,
    dimension: int,
    rule: EliteRule,
) -> float:
    """Score `hull` under the chosen metric; 0 for an empty member set.

    Fitnesses must already be computed (nonnegative). The mean metric is a
    plain average with no volume division: averaging already removes the
    volume-size effect the division would reintroduce. Variance is the
    population variance, defined as 0 for a single member.
    """
    if kind not in CERTAINTY_METRICS:
        raise ConfigurationError(f"unknown certainty metric {kind!r}; expected one of {CERTAINTY_METRICS}")
    if not members:
        return 0.0
    fitness = np.array([m.fitness for m in members], dtype=float)
    if kind == "MeanFitnessPerVolume":
        return float(fitness.mean())
    volume = volume_proxy(hull, dimension)
    if kind == "SumFitnessPerVolume":
        return float(fitness.sum() / volume)
    if kind == "SumEliteFitnessPerVolume":
        elite_total = sum(m.fitness for m in select_elites(members, rule))
        return float(elite_total / volume)
    if kind == "BestFitnessPerVolume":
        return float(fitness.max() / volume)
    return float(fitness.var() / volume)  # VarFitnessPerVolume
