import math

import numpy as np
import pytest

from upbo.core import ConfigurationError, EvalBudget, SearchDomain, make_rng
from upbo.optimizer import AllocationPlan, NoHullsSelectedError, UpboConfig, allocate, run


def counts_of(plan: AllocationPlan) -> list[int]:
    return [count for _, count in plan.per_hull]


class TestAllocate:
    def test_exact_quotas(self):
        assert counts_of(allocate([3, 1, 1], 10)) == [6, 2, 2]

    def test_remainder_tie_to_lower_index(self):
        assert counts_of(allocate([1, 1, 1], 10)) == [4, 3, 3]

    def test_zero_certainty_uniform_fallback(self):
        assert counts_of(allocate([0, 0], 4)) == [2, 2]

    def test_empty_rejected(self):
        with pytest.raises(NoHullsSelectedError):
            allocate([], 5)

    def test_sum_and_quota_deviation(self):
        rng = make_rng(4)
        for _ in range(1000):
            k = int(rng.integers(1, 9))
            n_s = int(rng.integers(1, 60))
            scores = rng.random(k) * (0.0 if rng.random() < 0.05 else 10.0)
            plan = allocate(scores, n_s)
            counts = counts_of(plan)
            assert sum(counts) == n_s
            total = scores.sum()
            quotas = n_s * scores / total if total > 0 else np.full(k, n_s / k)
            assert all(abs(c - q) < 1.0 for c, q in zip(counts, quotas))
            assert all(c >= 0 for c in counts)


class TestConfig:
    def test_default_hulls_selected(self):
        assert UpboConfig().hulls_selected == 4  # ceil(7 / 2)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            UpboConfig(radius_min=0.9, radius_max=0.5)
        with pytest.raises(ConfigurationError):
            UpboConfig(hulls_selected=9)
        with pytest.raises(ConfigurationError):
            UpboConfig(metric="Bogus")
        with pytest.raises(ConfigurationError):
            UpboConfig(update_p=0.0)


def sphere(x):
    return float(np.sum(x * x))


DOMAIN = SearchDomain.cube(3, -5.12, 5.12)
FAST = dict(init_pop=20, solutions_cnt=40, max_updates_per_iter=10)


class TestRun:
    def test_budget_exactly_init_pop(self):
        config = UpboConfig(init_pop=30, **{k: v for k, v in FAST.items() if k != "init_pop"})
        result = run(sphere, DOMAIN, config, EvalBudget(30), seed=0)
        assert result.evaluations == 30
        assert len(result.trace) == 1  # zero iterations ran

    def test_constant_objective(self):
        result = run(lambda x: 7.25, DOMAIN, UpboConfig(**FAST), EvalBudget(200), seed=1)
        assert result.best_cost == 7.25
        assert all(value == 7.25 for value in result.trace)

    def test_degenerate_single_hull_smoke(self):
        domain = SearchDomain.cube(1, 0.0, 1.0)
        config = UpboConfig(num_hulls=1, hulls_selected=1, radius_min=1.0, radius_max=1.0,
                            init_pop=5, solutions_cnt=10, max_updates_per_iter=5)
        result = run(sphere, domain, config, EvalBudget(100), seed=2)
        assert result.evaluations == 100

    def test_nonfinite_costs_billed_and_discarded(self):
        calls = {"n": 0}

        def flaky(x):
            calls["n"] += 1
            return float("nan") if calls["n"] % 3 == 0 else sphere(x)

        result = run(flaky, DOMAIN, UpboConfig(**FAST), EvalBudget(300), seed=3)
        assert result.evaluations == 300
        assert calls["n"] == 300  # every call billed, including discarded ones
        assert result.discarded == 100
        assert math.isfinite(result.best_cost)

    def test_max_iter_stops_loop(self):
        config = UpboConfig(max_iter=3, **FAST)
        result = run(sphere, DOMAIN, config, EvalBudget(10_000), seed=4)
        assert result.evaluations <= FAST["init_pop"] + 3 * FAST["max_updates_per_iter"]
        assert len(result.trace) == 4  # initial entry plus three iterations

    def test_all_nonfinite_raises(self):
        with pytest.raises(RuntimeError):
            run(lambda x: float("inf"), DOMAIN, UpboConfig(init_pop=5, max_iter=2, **{k: v for k, v in FAST.items() if k != "init_pop"}), EvalBudget(30), seed=5)

    def test_loop_invariants_across_seeds(self):
        config = UpboConfig(**FAST)
        for seed in range(5):
            checks = []

            def observer(iteration, pop, budget):
                checks.append((len(pop.members), pop.positions()))

            result = run(sphere, DOMAIN, config, EvalBudget(1500), seed=seed, observer=observer)
            assert all(b <= a for a, b in zip(result.trace, result.trace[1:]))
            assert result.evaluations <= 1500
            for size, positions in checks:
                assert size <= config.solutions_cnt
                assert ((positions >= DOMAIN.lower) & (positions <= DOMAIN.upper)).all()

    def test_budget_fully_consumed_with_large_max_iter(self):
        result = run(sphere, DOMAIN, UpboConfig(**FAST), EvalBudget(777), seed=6)
        assert result.evaluations == 777

    def test_seed_determinism(self):
        a = run(sphere, DOMAIN, UpboConfig(**FAST), EvalBudget(800), seed=11)
        b = run(sphere, DOMAIN, UpboConfig(**FAST), EvalBudget(800), seed=11)
        assert a.trace == b.trace
        assert a.best_cost == b.best_cost
        np.testing.assert_array_equal(a.best_position, b.best_position)
        assert a.evaluations == b.evaluations

    def test_tiny_population_uniform_fallback(self):
        # One-member populations often leave every hull empty; the loop must
        # keep running on uniform samples.
        config = UpboConfig(init_pop=1, solutions_cnt=1, max_updates_per_iter=4,
                            num_hulls=2, hulls_selected=1, radius_min=0.01, radius_max=0.02)
        result = run(sphere, DOMAIN, config, EvalBudget(60), seed=7)
        assert result.evaluations == 60

    def test_p_schedule_hook(self):
        seen = []

        def schedule(iteration):
            seen.append(iteration)
            return 0.5

        config = UpboConfig(p_schedule=schedule, **FAST)
        run(sphere, DOMAIN, config, EvalBudget(120), seed=8)
        assert seen and seen[0] == 1
