"""Solution-update methods: propose a new position inside a selected hull.

All proposals work in normalized unit-cube coordinates. Convex-combination
methods stay inside the members' convex closure; whenever a method needs
more members than the hull holds, it falls back to uniform hull sampling,
the only recipe that needs none.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .certainty import EliteRule, select_elites
from .core import ConfigurationError, Individual, RandomSource
from .hulls import Hull, sample_in_hull

__all__ = ["UPDATE_METHODS", "canonical_update_method", "propose"]

UPDATE_METHODS = (
    "EitherRandomlyOrThroughBest",
    "MoveThroughBest",
    "Select2SolsChooseOneBetween",
    "ClusterMean",
    "MeanOfElites",
    "GetWeightedMeanOfSols",
    "GetWeightedMeanOfElites",
)

# Accepted spelling variants for configuration files.
_ALIASES = {"Select2Sols&ChooseOneBetween": "Select2SolsChooseOneBetween"}


def canonical_update_method(tag: str) -> str:
    tag = _ALIASES.get(tag, tag)
    if tag not in UPDATE_METHODS:
        raise ConfigurationError(f"unknown update method {tag!r}; expected one of {UPDATE_METHODS}")
    return tag


def _move_through_best(members: Sequence[Individual], rng: RandomSource) -> np.ndarray:
    start = members[int(rng.integers(len(members)))].position
    best = max(members, key=lambda m: m.fitness).position
    u = rng.random()
    return start + u * (best - start)


def _weighted_mean(group: Sequence[Individual]) -> np.ndarray:
    positions = np.array([m.position for m in group], dtype=float)
    weights = np.array([m.fitness for m in group], dtype=float)
    total = weights.sum()
    if total <= 0.0:
        return positions.mean(axis=0)
    return weights @ positions / total


def propose(
    kind: str,
    hull: Hull,
    members: Sequence[Individual],
    rule: EliteRule,
    rng: RandomSource,
    p: float = 0.5,
) -> np.ndarray:
    """One new normalized position proposed inside `hull`.

    `members` are the hull's member individuals with normalized positions;
    `p` is the random-versus-directed mixing probability used only by
    EitherRandomlyOrThroughBest.
    """
    kind = canonical_update_method(kind)

    if kind == "EitherRandomlyOrThroughBest":
        if not 0.0 < p < 1.0:
            raise ConfigurationError("mixing probability p must lie in (0, 1)")
        if rng.random() < p:
            return sample_in_hull(hull, rng)
        kind = "MoveThroughBest"

    if kind == "MoveThroughBest":
        if not members:
            return sample_in_hull(hull, rng)
        return _move_through_best(members, rng)

    if kind == "Select2SolsChooseOneBetween":
        if len(members) < 2:
            return sample_in_hull(hull, rng)
        i, j = rng.choice(len(members), size=2, replace=False)
        a = rng.random()
        return a * members[int(i)].position + (1.0 - a) * members[int(j)].position

    if not members:
        return sample_in_hull(hull, rng)

    if kind == "ClusterMean":
        return np.array([m.position for m in members], dtype=float).mean(axis=0)
    if kind == "MeanOfElites":
        elites = select_elites(members, rule)
        return np.array([m.position for m in elites], dtype=float).mean(axis=0)
    if kind == "GetWeightedMeanOfSols":
        return _weighted_mean(members)
    return _weighted_mean(select_elites(members, rule))  # GetWeightedMeanOfElites
