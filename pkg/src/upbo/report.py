"""Report rendering: error tables, rank tables, t-test grids, and figures.

Each table is written twice (comma-separated and aligned plain text), and a
mean-error bar chart plus per-function convergence figures (when traces were
kept) land next to them as PNG files. Published values for optimizers that
are not reimplemented here appear in the error and rank tables marked with
an asterisk; they never enter the t-test grid.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .baselines import BASELINE_KINDS, REFERENCE_OPTIMIZERS, load_reference_results
from .core import ConfigurationError
from .stats import TrialResult, aggregate, paired_t_test, rank_counts

__all__ = ["load_results", "load_traces", "render_report"]

_CANONICAL_ORDER = ("UPBO", *BASELINE_KINDS, *REFERENCE_OPTIMIZERS)


def _optimizer_order(names: set[str]) -> list[str]:
    ordered = [name for name in _CANONICAL_ORDER if name in names]
    ordered.extend(sorted(names - set(ordered)))
    return ordered


def load_results(results_dir: str | Path) -> list[TrialResult]:
    path = Path(results_dir) / "results.csv"
    if not path.exists():
        raise ConfigurationError(f"no results.csv under {results_dir}")
    rows = []
    with path.open(newline="") as handle:
        for row in csv.DictReader(handle):
            rows.append(
                TrialResult(
                    optimizer=row["optimizer"],
                    function=row["function"],
                    seed=int(row["seed"]),
                    final_error=float(row["final_error"]),
                    evaluations_used=int(row["evaluations"]),
                    dimension=int(row["dimension"]),
                    nfe=int(row["nfe"]),
                )
            )
    return rows


def load_traces(results_dir: str | Path) -> dict[tuple[str, str, int], list[tuple[int, float]]]:
    """Traces keyed by (optimizer, function, seed) when traces.csv exists."""
    path = Path(results_dir) / "traces.csv"
    traces: dict[tuple[str, str, int], list[tuple[int, float]]] = {}
    if not path.exists():
        return traces
    with path.open(newline="") as handle:
        for row in csv.DictReader(handle):
            key = (row["optimizer"], row["function"], int(row["seed"]))
            traces.setdefault(key, []).append((int(row["iteration"]), float(row["best_cost"])))
    for series in traces.values():
        series.sort()
    return traces


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "NA"
    return f"{value:.2E}"


def _write_text_table(path: Path, header: list[str], rows: list[list[str]]) -> None:
    widths = [max(len(str(cell)) for cell in column) for column in zip(header, *rows)]
    lines = ["  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in [header, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    path.write_text("\n".join(lines) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def render_report(results_dir: str | Path, out_dir: str | Path | None = None,
                  include_reference: bool = True) -> dict[str, Path]:
    """Render all tables and figures from persisted rows; returns output paths."""
    results_dir = Path(results_dir)
    out = Path(out_dir) if out_dir is not None else results_dir / "report"
    out.mkdir(parents=True, exist_ok=True)

    results = load_results(results_dir)
    if not results:
        raise ConfigurationError(f"results.csv under {results_dir} holds no rows")
    table = aggregate(results)
    measured = _optimizer_order(set(table.optimizers))
    reference = load_reference_results() if include_reference else {}
    reference_names = [
        name for name in REFERENCE_OPTIMIZERS
        if include_reference and any((fid, name) in reference for fid in table.functions)
    ]
    columns = measured + reference_names
    meta = {
        (r.function, r.optimizer): (r.nfe, r.dimension) for r in results
    }

    paths: dict[str, Path] = {}

    # Errors table (mean +/- std per cell).
    err_rows_csv: list[list[str]] = []
    err_rows_txt: list[list[str]] = []
    for fid in table.functions:
        txt_row = [fid]
        for name in columns:
            if name in measured and (fid, name) in table.rows:
                cell = table.rows[(fid, name)]
                nfe, dim = meta[(fid, name)]
                err_rows_csv.append([fid, name, str(dim), str(nfe), str(cell.count),
                                     f"{cell.mean:.17g}", _na_or(cell.std), "measured"])
                txt_row.append(f"{_fmt(cell.mean)} ± {_fmt(cell.std)}")
            elif name in reference_names and (fid, name) in reference:
                mean, std, nfe = reference[(fid, name)]
                err_rows_csv.append([fid, name, "", str(nfe), "", f"{mean:.17g}",
                                     f"{std:.17g}", "published"])
                txt_row.append(f"{_fmt(mean)} ± {_fmt(std)} *")
            else:
                txt_row.append("missing")
        err_rows_txt.append(txt_row)
    _write_csv(out / "errors.csv",
               ["function", "optimizer", "dimension", "nfe", "trials", "mean_error", "std_error", "source"],
               err_rows_csv)
    header = ["function"] + [f"{n} *" if n in reference_names else n for n in columns]
    _write_text_table(out / "errors.txt", header, err_rows_txt)
    with (out / "errors.txt").open("a") as handle:
        if reference_names:
            handle.write("\n* published values at their original budgets, not reproduced here\n")
    paths["errors_csv"] = out / "errors.csv"
    paths["errors_txt"] = out / "errors.txt"

    # Rank table: outperformance counts per function plus total scores.
    rank_rows_csv: list[list[str]] = []
    rank_rows_txt: list[list[str]] = []
    totals = {name: 0 for name in columns}
    for fid in table.functions:
        means = {name: table.rows[(fid, name)].mean
                 for name in measured if (fid, name) in table.rows}
        for name in reference_names:
            if (fid, name) in reference:
                means[name] = reference[(fid, name)][0]
        counts = rank_counts(means)
        txt_row = [fid]
        for name in columns:
            if name in counts:
                totals[name] += counts[name]
                rank_rows_csv.append([fid, name, str(counts[name])])
                txt_row.append(str(counts[name]))
            else:
                txt_row.append("missing")
        rank_rows_txt.append(txt_row)
    rank_rows_txt.append(["TotalScore"] + [str(totals[name]) for name in columns])
    for name in columns:
        rank_rows_csv.append(["TotalScore", name, str(totals[name])])
    _write_csv(out / "ranks.csv", ["function", "optimizer", "score"], rank_rows_csv)
    _write_text_table(out / "ranks.txt", header, rank_rows_txt)
    paths["ranks_csv"] = out / "ranks.csv"
    paths["ranks_txt"] = out / "ranks.txt"

    # Paired t-tests: UPBO against every implemented optimizer present.
    opponents = [name for name in measured if name != "UPBO"]
    ttest_rows_csv: list[list[str]] = []
    ttest_rows_txt: list[list[str]] = []
    if "UPBO" in measured and opponents:
        by_cell: dict[tuple[str, str], dict[int, float]] = {}
        for r in results:
            by_cell.setdefault((r.function, r.optimizer), {})[r.seed] = r.final_error
        for fid in table.functions:
            txt_row = [fid]
            ours = by_cell.get((fid, "UPBO"), {})
            for name in opponents:
                theirs = by_cell.get((fid, name), {})
                shared = sorted(set(ours) & set(theirs))
                if len(shared) < 2:
                    ttest_rows_csv.append([fid, name, "NA", "NA"])
                    txt_row.append("NA")
                    continue
                test = paired_t_test([ours[s] for s in shared], [theirs[s] for s in shared])
                if test.is_na:
                    ttest_rows_csv.append([fid, name, "NA", "NA"])
                    txt_row.append("NA")
                else:
                    ttest_rows_csv.append([fid, name, f"{test.t:.17g}", f"{test.p:.17g}"])
                    txt_row.append(f"{test.p:.4f}")
            ttest_rows_txt.append(txt_row)
    _write_csv(out / "ttest.csv", ["function", "optimizer", "t", "p"], ttest_rows_csv)
    _write_text_table(out / "ttest.txt", ["function"] + opponents, ttest_rows_txt)
    paths["ttest_csv"] = out / "ttest.csv"
    paths["ttest_txt"] = out / "ttest.txt"

    paths.update(_render_figures(out, table, measured, meta, load_traces(results_dir)))
    return paths


def _na_or(value: float) -> str:
    return "NA" if math.isnan(value) else f"{value:.17g}"


_FLOOR = 1e-30  # log-scale floor for zero errors


def _render_figures(out, table, measured, meta, traces) -> dict[str, Path]:
    figures_dir = out / "figures"
    figures_dir.mkdir(exist_ok=True)
    paths: dict[str, Path] = {}

    functions = table.functions
    width = 0.8 / max(1, len(measured))
    x = np.arange(len(functions))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(functions)), 4.0))
    for k, name in enumerate(measured):
        means = [max(table.rows[(fid, name)].mean, _FLOOR) if (fid, name) in table.rows else np.nan
                 for fid in functions]
        ax.bar(x + (k - (len(measured) - 1) / 2) * width, means, width, label=name)
    ax.set_yscale("log")
    ax.set_xticks(x)
    ax.set_xticklabels(functions, rotation=45, ha="right")
    ax.set_ylabel("mean final error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    mean_png = figures_dir / "mean_errors.png"
    fig.savefig(mean_png, dpi=150)
    plt.close(fig)
    paths["figure_mean_errors"] = mean_png

    if traces:
        from .benchmarks import get_spec

        keys = {(opt, fid) for opt, fid, _ in traces}
        for fid in functions:
            present = [name for name in measured if (name, fid) in keys]
            if not present:
                continue
            optimum = get_spec(fid).base_optimum
            fig, ax = plt.subplots(figsize=(6.0, 4.0))
            for name in present:
                series = [dict(traces[k]) for k in traces if k[0] == name and k[1] == fid]
                horizon = min(max(s) for s in series)
                grid = np.arange(horizon + 1)
                # Short traces carry their final (minimal) value forward.
                stacked = np.array([[s.get(i, min(s.values())) for i in grid] for s in series])
                errors = np.maximum(np.median(stacked, axis=0) - optimum, _FLOOR)
                ax.plot(grid, errors, label=name)
            ax.set_yscale("log")
            ax.set_xlabel("iteration")
            ax.set_ylabel("median best error")
            ax.set_title(fid)
            ax.legend(fontsize=8)
            fig.tight_layout()
            png = figures_dir / f"convergence_{fid}.png"
            fig.savefig(png, dpi=150)
            plt.close(fig)
            paths[f"figure_convergence_{fid}"] = png
    return paths
