"""Randomly placed convex search regions (spheres, ellipsoids).

Hull geometry lives in normalized unit-hypercube coordinates so radii are
dimensionless and comparable across domains of different widths; callers
normalize positions on entry. Membership is boundary-inclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, RandomSource

__all__ = [
    "DegenerateHullError",
    "EllipsoidHull",
    "HULL_KINDS",
    "Hull",
    "SphereHull",
    "contains",
    "generate_hulls",
    "members_of",
    "sample_in_hull",
    "volume_proxy",
]

HULL_KINDS = ("sphere", "ellipsoid")

# Rejection retries before giving up on a hull whose cube intersection is
# too thin to hit; also caps ellipsoid foci redraws at generation time.
SAMPLE_RETRY_LIMIT = 10_000


class DegenerateHullError(RuntimeError):
    """Uniform sampling inside the hull kept rejecting."""


@dataclass(frozen=True)
class SphereHull:
    """Ball around `center` with `radius`, both in unit-cube coordinates."""

    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "radius", float(self.radius))
        if not 0.0 < self.radius <= 1.0:
            raise ConfigurationError("sphere radius must lie in (0, 1]")

    @property
    def dimension(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class EllipsoidHull:
    """Points whose summed distance to both foci stays within `threshold`."""

    focus_a: np.ndarray
    focus_b: np.ndarray
    threshold: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "focus_a", np.asarray(self.focus_a, dtype=float))
        object.__setattr__(self, "focus_b", np.asarray(self.focus_b, dtype=float))
        object.__setattr__(self, "threshold", float(self.threshold))
        if self.focus_a.shape != self.focus_b.shape:
            raise ConfigurationError("ellipsoid foci must share a dimension")
        if self.threshold <= float(np.linalg.norm(self.focus_a - self.focus_b)):
            raise ConfigurationError("ellipsoid threshold must exceed the focus separation")

    @property
    def dimension(self) -> int:
        return self.focus_a.size


Hull = SphereHull | EllipsoidHull


def generate_hulls(
    count: int,
    kind: str,
    dimension: int,
    radius_min: float,
    radius_max: float,
    rng: RandomSource,
) -> list[Hull]:
    """Generate `count` random hulls in the unit cube.

    Sphere centers are uniform in the cube with radii uniform in
    [radius_min, radius_max]. Ellipsoid foci are uniform pairs redrawn until
    their separation drops below radius_max, with the threshold uniform in
    (separation, separation + radius_max].
    """
    if count < 1:
        raise ConfigurationError("hull count must be >= 1")
    if kind not in HULL_KINDS:
        raise ConfigurationError(f"unknown hull kind {kind!r}; expected one of {HULL_KINDS}")
    if not 0.0 < radius_min <= radius_max <= 1.0:
        raise ConfigurationError("radius range must satisfy 0 < radius_min <= radius_max <= 1")

    hulls: list[Hull] = []
    for _ in range(count):
        if kind == "sphere":
            center = rng.random(dimension)
            radius = rng.uniform(radius_min, radius_max)
            hulls.append(SphereHull(center, radius))
        else:
            for _ in range(SAMPLE_RETRY_LIMIT):
                focus_a = rng.random(dimension)
                focus_b = rng.random(dimension)
                separation = float(np.linalg.norm(focus_a - focus_b))
                if separation < radius_max:
                    break
            else:
                raise DegenerateHullError(
                    f"could not draw foci closer than {radius_max} in dimension {dimension}"
                )
            # (1 - random()) lands in (0, 1], keeping threshold > separation.
            threshold = separation + radius_max * (1.0 - rng.random())
            hulls.append(EllipsoidHull(focus_a, focus_b, threshold))
    return hulls


def contains(hull: Hull, position: np.ndarray) -> bool:
    """Boundary-inclusive membership test in normalized coordinates."""
    position = np.asarray(position, dtype=float)
    if position.shape != (hull.dimension,):
        raise ValueError(
            f"position has length {position.size}, hull lives in dimension {hull.dimension}"
        )
    if isinstance(hull, SphereHull):
        return float(np.linalg.norm(position - hull.center)) <= hull.radius
    total = float(np.linalg.norm(position - hull.focus_a)) + float(
        np.linalg.norm(position - hull.focus_b)
    )
    return total <= hull.threshold


def members_of(hull: Hull, positions: np.ndarray) -> np.ndarray:
    """Indices of the normalized position rows inside the hull, order preserved."""
    positions = np.asarray(positions, dtype=float)
    if positions.size == 0:
        return np.empty(0, dtype=int)
    if positions.ndim != 2 or positions.shape[1] != hull.dimension:
        raise ValueError("positions must be a (n, dimension) matrix in normalized coordinates")
    if isinstance(hull, SphereHull):
        inside = np.linalg.norm(positions - hull.center, axis=1) <= hull.radius
    else:
        inside = (
            np.linalg.norm(positions - hull.focus_a, axis=1)
            + np.linalg.norm(positions - hull.focus_b, axis=1)
        ) <= hull.threshold
    return np.flatnonzero(inside)


def _uniform_ball_point(dimension: int, rng: RandomSource) -> np.ndarray:
    """Uniform draw from the unit ball (polar method)."""
    while True:
        direction = rng.standard_normal(dimension)
        norm = float(np.linalg.norm(direction))
        if norm > 0.0:
            break
    return (rng.random() ** (1.0 / dimension)) * direction / norm


def sample_in_hull(hull: Hull, rng: RandomSource) -> np.ndarray:
    """Uniform sample from the hull intersected with the unit cube.

    Proposals are exact uniform draws from the hull interior; only the cube
    clipping is handled by rejection. After SAMPLE_RETRY_LIMIT rejections the
    hull is declared degenerate.
    """
    dimension = hull.dimension
    if isinstance(hull, SphereHull):
        for _ in range(SAMPLE_RETRY_LIMIT):
            point = hull.center + hull.radius * _uniform_ball_point(dimension, rng)
            if ((point >= 0.0) & (point <= 1.0)).all():
                return point
        raise DegenerateHullError("sphere-cube intersection too thin to sample")

    midpoint = (hull.focus_a + hull.focus_b) / 2.0
    half_sep = float(np.linalg.norm(hull.focus_b - hull.focus_a)) / 2.0
    semi_major = hull.threshold / 2.0
    if half_sep == 0.0:
        # Coincident foci degenerate to a ball of radius threshold / 2.
        ball = SphereHull(midpoint, semi_major)
        return sample_in_hull(ball, rng)
    semi_minor = float(np.sqrt(semi_major**2 - half_sep**2))
    axis = (hull.focus_b - hull.focus_a) / (2.0 * half_sep)

    # Householder reflection mapping e1 onto the focal axis.
    e1 = np.zeros(dimension)
    e1[0] = 1.0
    v = e1 - axis
    v_norm = float(np.linalg.norm(v))
    for _ in range(SAMPLE_RETRY_LIMIT):
        ball = _uniform_ball_point(dimension, rng)
        scaled = ball * semi_minor
        scaled[0] = ball[0] * semi_major
        if v_norm > 1e-12:
            scaled = scaled - 2.0 * v * (v @ scaled) / (v_norm**2)
        point = midpoint + scaled
        if ((point >= 0.0) & (point <= 1.0)).all():
            return point
    raise DegenerateHullError("ellipsoid-cube intersection too thin to sample")


def volume_proxy(hull: Hull, dimension: int) -> float:
    """Comparable stand-in for hull volume: radius^d, or (threshold/2)^d.

    The dimension-dependent unit-ball constant is dropped on purpose: one
    iteration only ever compares same-kind hulls, and the bare power avoids
    underflow of true ball volumes in high dimension.
    """
    if isinstance(hull, SphereHull):
        return float(hull.radius**dimension)
    return float((hull.threshold / 2.0) ** dimension)
