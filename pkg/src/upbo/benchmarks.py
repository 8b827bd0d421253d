"""Benchmark objective suite: F1-F20 with rotation and shift machinery.

Functions are grouped as unimodal (F1-F6), multimodal (F7-F11), rotated
(F12-F16), and shifted-rotated (F17-F20). Transformed variants evaluate the
base function at z = R(scale * (x - shift)) plus an optional bias. Rotation
matrices and shift vectors form a "landscape" keyed by (function id,
dimension, seed); landscapes can be persisted as plain-text files so every
trial and every optimizer sees the identical terrain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .core import ConfigurationError, SearchDomain

__all__ = [
    "Benchmark",
    "BenchmarkSpec",
    "DEFAULT_LANDSCAPE_SEED",
    "Landscape",
    "evaluate",
    "get_spec",
    "list_benchmarks",
    "make_benchmark",
    "make_rotation",
]

DEFAULT_LANDSCAPE_SEED = 1729

# ---------------------------------------------------------------------------
# Base functions (minimization; optima as stated in the registry below).


def _rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def _sphere(x: np.ndarray) -> float:
    return float(np.sum(x * x))


def _dixon_price(x: np.ndarray) -> float:
    i = np.arange(2, x.size + 1)
    return float((x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] ** 2 - x[:-1]) ** 2))


def _beale(x: np.ndarray) -> float:
    a, b = x
    return float(
        (1.5 - a + a * b) ** 2
        + (2.25 - a + a * b**2) ** 2
        + (2.625 - a + a * b**3) ** 2
    )


def _easom(x: np.ndarray) -> float:
    a, b = x
    return float(-math.cos(a) * math.cos(b) * math.exp(-((a - math.pi) ** 2) - (b - math.pi) ** 2))


def _quartic(x: np.ndarray) -> float:
    i = np.arange(1, x.size + 1)
    return float(np.sum(i * x**4))


def _schwefel(x: np.ndarray) -> float:
    return float(418.9829 * x.size - np.sum(x * np.sin(np.sqrt(np.abs(x)))))


def _weierstrass(x: np.ndarray) -> float:
    a, b, k_max = 0.5, 3.0, 20
    k = np.arange(k_max + 1)
    ak = a**k
    bk = b**k
    inner = np.cos(2.0 * math.pi * np.outer(x + 0.5, bk)) @ ak
    constant = float(np.sum(ak * np.cos(math.pi * bk)))  # cos(2*pi*b^k*0.5)
    return float(np.sum(inner) - x.size * constant)


def _rastrigin(x: np.ndarray) -> float:
    return float(np.sum(x * x - 10.0 * np.cos(2.0 * math.pi * x) + 10.0))


def _ackley(x: np.ndarray) -> float:
    a, b, c = 20.0, 0.2, 2.0 * math.pi
    mean_sq = float(np.mean(x * x))
    mean_cos = float(np.mean(np.cos(c * x)))
    return float(-a * math.exp(-b * math.sqrt(mean_sq)) - math.exp(mean_cos) + a + math.e)


def _griewank(x: np.ndarray) -> float:
    i = np.arange(1, x.size + 1)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def _expanded_schaffer(x: np.ndarray) -> float:
    def pair(u: float, v: float) -> float:
        ss = u * u + v * v
        return 0.5 + (math.sin(math.sqrt(ss)) ** 2 - 0.5) / (1.0 + 0.001 * ss) ** 2

    total = sum(pair(x[i], x[i + 1]) for i in range(x.size - 1))
    return float(total + pair(x[-1], x[0]))


# ---------------------------------------------------------------------------
# Registry.


@dataclass(frozen=True)
class BenchmarkSpec:
    """Static description of one benchmark function."""

    fid: str
    name: str
    group: str
    lower: float
    upper: float
    base: Callable[[np.ndarray], float]
    fixed_dimension: int | None = None
    min_dimension: int = 1
    rotated: bool = False
    shifted: bool = False
    scale: float = 1.0
    base_optimum: float = 0.0
    optimum_point: str = "zeros"  # zeros | ones | dixon | schwefel | schwefel_rotated | beale | easom | shift


_SPECS: dict[str, BenchmarkSpec] = {
    spec.fid: spec
    for spec in [
        BenchmarkSpec("F1", "Rosenbrock", "unimodal", -100.0, 100.0, _rosenbrock,
                      min_dimension=2, optimum_point="ones"),
        BenchmarkSpec("F2", "Sphere", "unimodal", -5.12, 5.12, _sphere),
        BenchmarkSpec("F3", "DixonPrice", "unimodal", -10.0, 10.0, _dixon_price,
                      min_dimension=2, optimum_point="dixon"),
        BenchmarkSpec("F4", "Beale", "unimodal", -4.5, 4.5, _beale,
                      fixed_dimension=2, optimum_point="beale"),
        BenchmarkSpec("F5", "Easom", "unimodal", -100.0, 100.0, _easom,
                      fixed_dimension=2, base_optimum=-1.0, optimum_point="easom"),
        BenchmarkSpec("F6", "Quartic", "unimodal", -1.28, 1.28, _quartic),
        BenchmarkSpec("F7", "Schwefel", "multimodal", -500.0, 500.0, _schwefel,
                      optimum_point="schwefel"),
        BenchmarkSpec("F8", "Weierstrass", "multimodal", -0.5, 0.5, _weierstrass),
        BenchmarkSpec("F9", "Rastrigin", "multimodal", -5.12, 5.12, _rastrigin),
        BenchmarkSpec("F10", "Ackley", "multimodal", -32.768, 32.768, _ackley),
        BenchmarkSpec("F11", "Griewank", "multimodal", -600.0, 600.0, _griewank),
        BenchmarkSpec("F12", "RotatedAckley", "rotated", -32.768, 32.768, _ackley,
                      rotated=True),
        BenchmarkSpec("F13", "RotatedRastrigin", "rotated", -5.12, 5.12, _rastrigin,
                      rotated=True, shifted=True, scale=0.0512, optimum_point="shift"),
        BenchmarkSpec("F14", "RotatedSchwefel", "rotated", -500.0, 500.0, _schwefel,
                      rotated=True, scale=6.0, optimum_point="schwefel_rotated"),
        BenchmarkSpec("F15", "RotatedGriewank", "rotated", -600.0, 600.0, _griewank,
                      rotated=True, scale=6.0),
        BenchmarkSpec("F16", "RotatedWeierstrass", "rotated", -0.5, 0.5, _weierstrass,
                      rotated=True, scale=0.005),
        BenchmarkSpec("F17", "RotateShiftExpandScaffer", "shifted-rotated", -100.0, 100.0,
                      _expanded_schaffer, min_dimension=2, rotated=True, shifted=True,
                      optimum_point="shift"),
        BenchmarkSpec("F18", "RotateShiftGriewank", "shifted-rotated", -600.0, 600.0,
                      _griewank, rotated=True, shifted=True, scale=6.0, optimum_point="shift"),
        BenchmarkSpec("F19", "RotateShiftRastrigin", "shifted-rotated", -5.12, 5.12,
                      _rastrigin, rotated=True, shifted=True, scale=0.0512, optimum_point="shift"),
        BenchmarkSpec("F20", "RotateShiftAckley", "shifted-rotated", -32.768, 32.768,
                      _ackley, rotated=True, shifted=True, optimum_point="shift"),
    ]
}


def list_benchmarks() -> list[BenchmarkSpec]:
    return [_SPECS[f"F{i}"] for i in range(1, 21)]


def get_spec(fid: str) -> BenchmarkSpec:
    spec = _SPECS.get(fid)
    if spec is None:
        raise ConfigurationError(f"unknown benchmark id {fid!r}; expected F1..F20")
    return spec


# ---------------------------------------------------------------------------
# Landscapes: rotation matrices and shift vectors.


@dataclass(frozen=True)
class Landscape:
    rotation: np.ndarray | None = None
    shift: np.ndarray | None = None


def make_rotation(dimension: int, seed: int) -> np.ndarray:
    """Random orthogonal matrix from QR-orthonormalizing a seeded normal matrix."""
    if dimension < 1:
        raise ConfigurationError("dimension must be >= 1")
    rng = np.random.default_rng(int(seed))
    q, r = np.linalg.qr(rng.standard_normal((dimension, dimension)))
    return q * np.sign(np.diag(r))  # sign fix keeps the factorization unique


def _child_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1, dtype=np.uint64)[0])


def _landscape_paths(directory: Path, fid: str, dimension: int, seed: int) -> tuple[Path, Path]:
    stem = f"{fid}_d{dimension}_s{seed}"
    return directory / f"{stem}_rotation.txt", directory / f"{stem}_shift.txt"


def _save_matrix(path: Path, matrix: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(matrix), fmt="%.17g")


def _load_matrix(path: Path, rows: int, cols: int) -> np.ndarray:
    data = np.loadtxt(path, dtype=float)
    return data.reshape(rows, cols)


_LANDSCAPE_CACHE: dict[tuple[str, int, int, str | None], Landscape] = {}


def get_landscape(
    fid: str,
    dimension: int,
    seed: int = DEFAULT_LANDSCAPE_SEED,
    directory: str | Path | None = None,
) -> Landscape:
    """Load or deterministically create the (rotation, shift) pair for a function.

    With `directory` set, existing files are authoritative and fresh draws
    are persisted there (one row per line, whitespace-separated, full double
    precision). Without it the landscape is generated in memory; the same
    key always yields the same landscape either way.
    """
    spec = get_spec(fid)
    key = (fid, dimension, seed, str(directory) if directory is not None else None)
    cached = _LANDSCAPE_CACHE.get(key)
    if cached is not None:
        return cached

    rotation: np.ndarray | None = None
    shift: np.ndarray | None = None
    fid_number = int(fid[1:])
    rot_path = shift_path = None
    if directory is not None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        rot_path, shift_path = _landscape_paths(directory, fid, dimension, seed)

    if spec.rotated:
        if rot_path is not None and rot_path.exists():
            rotation = _load_matrix(rot_path, dimension, dimension)
        else:
            rotation = make_rotation(dimension, _child_seed(seed, dimension, fid_number, 1))
            if rot_path is not None:
                _save_matrix(rot_path, rotation)
    if spec.shifted:
        if shift_path is not None and shift_path.exists():
            shift = _load_matrix(shift_path, 1, dimension).ravel()
        else:
            # Central 80% of the range keeps the optimum away from the walls.
            rng = np.random.default_rng(_child_seed(seed, dimension, fid_number, 2))
            margin = 0.1 * (spec.upper - spec.lower)
            shift = rng.uniform(spec.lower + margin, spec.upper - margin, size=dimension)
            if shift_path is not None:
                _save_matrix(shift_path, shift)

    landscape = Landscape(rotation=rotation, shift=shift)
    _LANDSCAPE_CACHE[key] = landscape
    return landscape


# ---------------------------------------------------------------------------
# Bound benchmark objects.


@dataclass(frozen=True)
class Benchmark:
    """A benchmark function bound to a dimension and landscape; callable on x."""

    spec: BenchmarkSpec
    dimension: int
    landscape: Landscape
    f_opt: float = 0.0

    @property
    def fid(self) -> str:
        return self.spec.fid

    @property
    def domain(self) -> SearchDomain:
        return SearchDomain.cube(self.dimension, self.spec.lower, self.spec.upper)

    @property
    def optimum_value(self) -> float:
        return self.spec.base_optimum + self.f_opt

    def optimum_point(self) -> np.ndarray:
        kind = self.spec.optimum_point
        d = self.dimension
        if kind == "zeros":
            return np.zeros(d)
        if kind == "ones":
            return np.ones(d)
        if kind == "dixon":
            i = np.arange(1, d + 1, dtype=float)
            return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)
        if kind == "beale":
            return np.array([3.0, 0.5])
        if kind == "easom":
            return np.array([math.pi, math.pi])
        if kind == "schwefel":
            return np.full(d, 420.9687)
        if kind == "schwefel_rotated":
            assert self.landscape.rotation is not None
            return self.landscape.rotation.T @ np.full(d, 420.9687) / self.spec.scale
        assert self.landscape.shift is not None  # kind == "shift"
        return self.landscape.shift.copy()

    def __call__(self, x: np.ndarray) -> float:
        z = np.asarray(x, dtype=float)
        if z.shape != (self.dimension,):
            raise ValueError(f"{self.fid} expects a length-{self.dimension} vector, got shape {z.shape}")
        if self.landscape.shift is not None:
            z = z - self.landscape.shift
        if self.spec.scale != 1.0:
            z = self.spec.scale * z
        if self.landscape.rotation is not None:
            z = self.landscape.rotation @ z
        return self.spec.base(z) + self.f_opt


def make_benchmark(
    fid: str,
    dimension: int,
    landscape_seed: int = DEFAULT_LANDSCAPE_SEED,
    landscapes_dir: str | Path | None = None,
    f_opt: float = 0.0,
) -> Benchmark:
    """Bind a benchmark to a dimension (fixed-dimension functions override it)."""
    spec = get_spec(fid)
    if spec.fixed_dimension is not None:
        dimension = spec.fixed_dimension
    if dimension < spec.min_dimension:
        raise ConfigurationError(f"{fid} needs dimension >= {spec.min_dimension}")
    if spec.rotated or spec.shifted:
        landscape = get_landscape(fid, dimension, landscape_seed, landscapes_dir)
    else:
        landscape = Landscape()
    return Benchmark(spec=spec, dimension=dimension, landscape=landscape, f_opt=f_opt)


def evaluate(fid: str, x: np.ndarray, landscape_seed: int = DEFAULT_LANDSCAPE_SEED) -> float:
    """Evaluate a benchmark at x, inferring the dimension from the vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return make_benchmark(fid, x.size, landscape_seed)(x)
