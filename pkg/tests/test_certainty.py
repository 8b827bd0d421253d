import math

import numpy as np
import pytest

from conftest import make_members

from upbo.certainty import CERTAINTY_METRICS, EliteRule, certainty, select_elites
from upbo.core import ConfigurationError, Individual, make_rng
from upbo.hulls import SphereHull, generate_hulls, volume_proxy


RULE = EliteRule()


class TestSelectElites:
    def test_threshold_rule(self):
        # mean 4, cutoff 0.3 * 4 = 1.2: only the cost-1 member passes.
        members = make_members([(0,), (1,), (2,)], [1, 2, 9])
        elites = select_elites(members, RULE)
        assert [m.cost for m in elites] == [1]

    def test_empty_threshold_falls_back(self):
        # cutoff 1.5, nobody passes: top ceil(0.3 * 3) = 1 member by fitness.
        members = make_members([(0,), (1,), (2,)], [5, 5, 5])
        assert len(select_elites(members, RULE)) == 1

    def test_nonpositive_mean_falls_back(self):
        members = make_members([(0,), (1,), (2,)], [-3, -1, 2])
        elites = select_elites(members, RULE)
        assert [m.cost for m in elites] == [-3]

    def test_never_empty(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 30))
            members = make_members(rng.random((n, 2)), rng.normal(size=n) * 10)
            assert len(select_elites(members, RULE)) >= 1

    def test_needs_members(self):
        with pytest.raises(ValueError):
            select_elites([], RULE)

    def test_rule_validation(self):
        with pytest.raises(ConfigurationError):
            EliteRule(cost_thresh=1.5)


class TestCertainty:
    def test_hand_arithmetic(self):
        # fitness {4, 6} in a hull of volume proxy 0.25: Sum 10/.25, Best
        # 6/.25, Var 1/.25, Mean (10/2, no volume division).
        members = [
            Individual(np.array([0.0, 0.0]), 2.0, fitness=4.0),
            Individual(np.array([1.0, 1.0]), 0.0, fitness=6.0),
        ]
        hull = SphereHull(np.zeros(2), 0.5)
        assert certainty("SumFitnessPerVolume", members, hull, 2, RULE) == pytest.approx(40.0)
        assert certainty("BestFitnessPerVolume", members, hull, 2, RULE) == pytest.approx(24.0)
        assert certainty("VarFitnessPerVolume", members, hull, 2, RULE) == pytest.approx(4.0)
        assert certainty("MeanFitnessPerVolume", members, hull, 2, RULE) == pytest.approx(5.0)

    def test_single_member_variance_zero(self):
        members = make_members([(0, 0)], [3.0])
        hull = SphereHull(np.zeros(2), 0.5)
        assert certainty("VarFitnessPerVolume", members, hull, 2, RULE) == 0.0

    def test_empty_members_zero_for_all_kinds(self):
        hull = SphereHull(np.zeros(2), 0.5)
        for kind in CERTAINTY_METRICS:
            assert certainty(kind, [], hull, 2, RULE) == 0.0

    def test_unknown_metric(self):
        with pytest.raises(ConfigurationError):
            certainty("Bogus", [], SphereHull(np.zeros(2), 0.5), 2, RULE)

    def test_nonnegative_outputs(self, rng):
        for _ in range(100):
            n = int(rng.integers(0, 20))
            members = make_members(rng.random((n, 2)), rng.normal(size=n)) if n else []
            hull = SphereHull(rng.random(2), float(rng.uniform(0.2, 0.7)))
            for kind in CERTAINTY_METRICS:
                assert certainty(kind, members, hull, 2, RULE) >= 0.0

    def test_radius_monotonicity(self):
        members = make_members([(0,)] * 4, [1, 2, 3, 4])
        small = SphereHull(np.zeros(1), 0.3)
        large = SphereHull(np.zeros(1), 0.6)
        for kind in ("SumFitnessPerVolume", "SumEliteFitnessPerVolume",
                     "BestFitnessPerVolume", "VarFitnessPerVolume"):
            assert certainty(kind, members, small, 1, RULE) > certainty(kind, members, large, 1, RULE)
        assert certainty("MeanFitnessPerVolume", members, small, 1, RULE) == pytest.approx(
            certainty("MeanFitnessPerVolume", members, large, 1, RULE)
        )

    def test_duplication_scaling(self):
        members = make_members([(0,), (1,)], [1, 4])
        doubled = members + members
        hull = SphereHull(np.zeros(1), 0.5)
        assert certainty("SumFitnessPerVolume", doubled, hull, 1, RULE) == pytest.approx(
            2 * certainty("SumFitnessPerVolume", members, hull, 1, RULE)
        )
        assert certainty("MeanFitnessPerVolume", doubled, hull, 1, RULE) == pytest.approx(
            certainty("MeanFitnessPerVolume", members, hull, 1, RULE)
        )


def brute_force_certainty(kind, members, hull, dimension, rule):
    """Independent reimplementation with plain python loops."""
    if not members:
        return 0.0
    fitnesses = [m.fitness for m in members]
    volume = volume_proxy(hull, dimension)
    if kind == "SumFitnessPerVolume":
        return sum(fitnesses) / volume
    if kind == "MeanFitnessPerVolume":
        return sum(fitnesses) / len(fitnesses)
    if kind == "BestFitnessPerVolume":
        return max(fitnesses) / volume
    if kind == "VarFitnessPerVolume":
        mean = sum(fitnesses) / len(fitnesses)
        return sum((f - mean) ** 2 for f in fitnesses) / len(fitnesses) / volume
    # SumEliteFitnessPerVolume: rebuild the elite rule by hand.
    costs = [m.cost for m in members]
    mean_cost = sum(costs) / len(costs)
    elites = []
    if mean_cost > 0:
        elites = [m for m in members if m.cost < rule.cost_thresh * mean_cost]
    if not elites:
        keep = max(1, math.ceil(rule.fallback_fraction * len(members)))
        elites = sorted(members, key=lambda m: -m.fitness)[:keep]
    return sum(m.fitness for m in elites) / volume


def test_oracle_equivalence():
    rng = make_rng(99)
    for trial in range(1000):
        d = int(rng.integers(1, 11))
        n = int(rng.integers(0, 51))
        members = make_members(rng.random((n, d)), rng.normal(size=n) * 10) if n else []
        kind_name = "sphere" if trial % 2 == 0 else "ellipsoid"
        hull = generate_hulls(1, kind_name, d, 0.2, 0.7, rng)[0]
        for kind in CERTAINTY_METRICS:
            got = certainty(kind, members, hull, d, RULE)
            want = brute_force_certainty(kind, members, hull, d, RULE)
            assert math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12)
