import numpy as np
import pytest

from upbo.core import Individual, refresh_fitnesses


def make_members(positions, costs):
    """Individuals with fitnesses already refreshed from the given costs."""
    members = [Individual(np.asarray(p, dtype=float), c) for p, c in zip(positions, costs)]
    return refresh_fitnesses(members)


class FakeRng:
    """Scripted stand-in for a numpy Generator (deterministic unit tests)."""

    def __init__(self, randoms=(), integers=(), choices=(), normals=()):
        self._randoms = list(randoms)
        self._integers = list(integers)
        self._choices = list(choices)
        self._normals = list(normals)

    def random(self, size=None):
        value = self._randoms.pop(0)
        if size is None:
            return value
        return np.full(size, value, dtype=float)

    def integers(self, low, high=None, size=None):
        value = self._integers.pop(0)
        if size is None:
            return value
        return np.full(size, value, dtype=int)

    def choice(self, n, size=None, replace=True):
        return np.asarray(self._choices.pop(0))

    def standard_normal(self, size=None):
        return np.asarray(self._normals.pop(0), dtype=float)

    def uniform(self, low, high, size=None):
        span = np.asarray(high) - np.asarray(low)
        return np.asarray(low) + self.random(size) * span


@pytest.fixture
def rng():
    return np.random.default_rng(42)
