"""Cross-trial statistics: error tables, outperformance ranks, paired t-tests.

The not-applicable marker for degenerate t-tests is NaN in both fields;
report rendering prints it as "NA".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import stdtr

__all__ = [
    "CellStats",
    "ComparisonTable",
    "PairedTTest",
    "TrialResult",
    "aggregate",
    "paired_t_test",
]


@dataclass(frozen=True)
class TrialResult:
    """One seeded optimizer run on one function at one budget."""

    optimizer: str
    function: str
    seed: int
    final_error: float
    evaluations_used: int
    dimension: int = 0
    nfe: int = 0
    trace: tuple[float, ...] = field(default=(), repr=False)


class CellStats(NamedTuple):
    mean: float
    std: float
    count: int


@dataclass
class ComparisonTable:
    """Aggregated view over trials: per-cell stats, per-function rank counts."""

    rows: dict[tuple[str, str], CellStats]
    ranks: dict[str, dict[str, int]]
    total_scores: dict[str, int]
    functions: list[str]
    optimizers: list[str]


def _function_order(fids: set[str]) -> list[str]:
    def key(fid: str):
        try:
            return (0, int(fid.lstrip("F")))
        except ValueError:
            return (1, fid)

    return sorted(fids, key=key)


def rank_counts(means: dict[str, float]) -> dict[str, int]:
    """Outperformance count per optimizer: how many others score strictly worse.

    Ties share the lower count, so equal means outperform nothing extra.
    """
    counts = {}
    for name, mean in means.items():
        counts[name] = sum(1 for other in means.values() if other > mean)
    return counts


def aggregate(results: Sequence[TrialResult]) -> ComparisonTable:
    """Mean/std of final error per (function, optimizer) cell plus rank scores.

    Standard deviation is the sample (n-1) deviation, NaN for single-trial
    cells. Trial order never matters.
    """
    by_cell: dict[tuple[str, str], list[float]] = {}
    optimizers: list[str] = []
    for result in results:
        key = (result.function, result.optimizer)
        by_cell.setdefault(key, []).append(result.final_error)
        if result.optimizer not in optimizers:
            optimizers.append(result.optimizer)

    rows = {}
    for key, errors in by_cell.items():
        arr = np.asarray(errors, dtype=float)
        std = float(arr.std(ddof=1)) if arr.size >= 2 else math.nan
        rows[key] = CellStats(float(arr.mean()), std, int(arr.size))

    functions = _function_order({fid for fid, _ in rows})
    ranks: dict[str, dict[str, int]] = {}
    total_scores = {name: 0 for name in optimizers}
    for fid in functions:
        means = {name: rows[(fid, name)].mean for name in optimizers if (fid, name) in rows}
        counts = rank_counts(means)
        ranks[fid] = counts
        for name, count in counts.items():
            total_scores[name] += count
    return ComparisonTable(rows, ranks, total_scores, functions, optimizers)


class PairedTTest(NamedTuple):
    t: float
    p: float

    @property
    def is_na(self) -> bool:
        return math.isnan(self.t)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> PairedTTest:
    """Two-sided paired t-test on per-seed differences d = a - b.

    Returns the NA marker (NaN, NaN) when the differences have zero spread,
    including the trivially identical-sample case.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be equal-length 1-d sequences")
    n = a.size
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    d = a - b
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        return PairedTTest(math.nan, math.nan)
    t = float(d.mean()) / (sd / math.sqrt(n))
    p = 2.0 * float(stdtr(n - 1, -abs(t)))
    return PairedTTest(t, p)
