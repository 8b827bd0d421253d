"""Experiment engine: plan parsing, seeded multi-trial execution, persistence.

A plan is an INI-style file whose [campaign] section names the functions,
optimizers, budgets, and seeding, and whose per-optimizer sections carry the
strategy keys (NumOfHulls, SpheresRadiusMin, ...). Campaigns are resumable:
completed (cell, seed) pairs found in results.csv are never re-run, and
result rows are written by a single writer regardless of parallelism.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from .baselines import BASELINE_KINDS, BaselineConfig, GaParams, PsoParams, SaParams, run_baseline
from .benchmarks import DEFAULT_LANDSCAPE_SEED, get_spec, make_benchmark
from .certainty import EliteRule
from .core import ConfigurationError, EvalBudget
from .optimizer import UpboConfig, run

__all__ = [
    "CampaignSummary",
    "Cell",
    "ExperimentPlan",
    "NFE_DIMENSIONS",
    "config_text",
    "load_plan",
    "run_campaign",
]

# Budget-to-dimension convention for cells that do not name a dimension.
NFE_DIMENSIONS = {30_000: 3, 180_000: 10, 500_000: 30}
DEFAULT_DIMENSION = 3

RESULT_FIELDS = ("optimizer", "function", "dimension", "nfe", "seed", "final_error", "evaluations", "fingerprint")
TRACE_FIELDS = ("optimizer", "function", "dimension", "nfe", "seed", "iteration", "best_cost")


@dataclass(frozen=True)
class Cell:
    """One (optimizer, function, dimension, NFE) experiment cell."""

    optimizer: str
    function: str
    dimension: int
    nfe: int
    trials: int
    base_seed: int


@dataclass
class ExperimentPlan:
    cells: list[Cell]
    upbo: UpboConfig
    baselines: dict[str, BaselineConfig]
    output_dir: Path
    parallelism: int = 1
    keep_traces: bool = False
    landscape_seed: int = DEFAULT_LANDSCAPE_SEED


@dataclass
class CampaignSummary:
    results_path: Path
    executed: int
    skipped: int
    failures: list[tuple[str, str]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Plan parsing; keys mirror the published preference tables verbatim.

_UPBO_KEYS = {
    "NumOfHulls": ("num_hulls", int),
    "HullType": ("hull_kind", str),
    "CertaintyMetricType": ("metric", str),
    "UpdateClusterSolutionMethod": ("update_method", str),
    "SpheresRadiusMin": ("radius_min", float),
    "SpheresRadiusMax": ("radius_max", float),
    "SolutionsCnt": ("solutions_cnt", int),
    "InitPop": ("init_pop", int),
    "MaxUpdatesPerIter": ("max_updates_per_iter", int),
    "HullsSelected": ("hulls_selected", int),
    "MaxIter": ("max_iter", int),
    "UpdateP": ("update_p", float),
}
_UPBO_ELITE_KEYS = {
    "EliteCostsThresh": ("cost_thresh", float),
    "EliteFallbackFraction": ("fallback_fraction", float),
}
_PSO_KEYS = {
    "InertiaMin": ("inertia_min", float),
    "InertiaMax": ("inertia_max", float),
    "Cognitive": ("cognitive", float),
    "Social": ("social", float),
    "SpeedLimit": ("velocity_fraction", float),
    "Neighborhood": ("neighborhood", int),
}
_GA_KEYS = {
    "Mutation": ("mutation_rate", float),
    "Crossover": ("crossover_rate", float),
    "Replacement": ("replacement_fraction", float),
    "Tournament": ("tournament", int),
}
_SA_KEYS = {
    "Tmax": ("t_max", float),
    "Tmin": ("t_min", float),
    "RepeatsPerState": ("max_repeats", int),
    "StepFraction": ("step_fraction", float),
}


def _collect(section: dict[str, str], table: dict, label: str) -> dict:
    kwargs = {}
    for key, value in section.items():
        if key == "Population":
            continue
        if key not in table:
            raise ConfigurationError(f"unknown key {key!r} in [{label}] section")
        name, cast = table[key]
        kwargs[name] = cast(value)
    return kwargs


def upbo_config_from_section(section: dict[str, str]) -> UpboConfig:
    kwargs = {}
    elite_kwargs = {}
    for key, value in section.items():
        if key in _UPBO_KEYS:
            name, cast = _UPBO_KEYS[key]
            kwargs[name] = cast(value)
        elif key in _UPBO_ELITE_KEYS:
            name, cast = _UPBO_ELITE_KEYS[key]
            elite_kwargs[name] = cast(value)
        else:
            raise ConfigurationError(f"unknown key {key!r} in [UPBO] section")
    if elite_kwargs:
        kwargs["elite_rule"] = EliteRule(**elite_kwargs)
    return UpboConfig(**kwargs)


def baseline_config_from_section(kind: str, section: dict[str, str]) -> BaselineConfig:
    population = int(section.get("Population", 50))
    if kind in ("PSO", "PSO-W", "PSO-w-local"):
        params = PsoParams(**_collect(section, _PSO_KEYS, kind))
        return BaselineConfig(kind, population=population, pso=params)
    if kind == "GA":
        params = GaParams(**_collect(section, _GA_KEYS, kind))
        return BaselineConfig(kind, population=population, ga=params)
    params = SaParams(**_collect(section, _SA_KEYS, kind))
    return BaselineConfig(kind, population=population, sa=params)


def config_text(optimizer: str, config: UpboConfig | BaselineConfig) -> str:
    """Canonical key=value rendering of a configuration, one line per key."""
    lines = [f"Optimizer={optimizer}"]
    if isinstance(config, UpboConfig):
        for key, (name, _) in _UPBO_KEYS.items():
            lines.append(f"{key}={getattr(config, name)}")
        for key, (name, _) in _UPBO_ELITE_KEYS.items():
            lines.append(f"{key}={getattr(config.elite_rule, name)}")
    else:
        lines.append(f"Population={config.population}")
        table, params = {
            "GA": (_GA_KEYS, config.ga),
            "SA": (_SA_KEYS, config.sa),
        }.get(config.kind, (_PSO_KEYS, config.pso))
        for key, (name, _) in table.items():
            lines.append(f"{key}={getattr(params, name)}")
    return "\n".join(sorted(lines))


def _fingerprint(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def dimension_for_nfe(nfe: int) -> int:
    return NFE_DIMENSIONS.get(nfe, DEFAULT_DIMENSION)


def load_plan(path: str | Path, **overrides) -> ExperimentPlan:
    """Parse a plan file; keyword overrides mirror the CLI flags.

    Recognized overrides: base_seed, trials, nfe, dimension, parallelism,
    keep_traces, output_dir.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"plan file {path} does not exist")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep key case: SpheresRadiusMin etc.
    parser.read(path)
    if "campaign" not in parser:
        raise ConfigurationError("plan file needs a [campaign] section")
    campaign = parser["campaign"]

    def _split(raw: str) -> list[str]:
        return [token.strip() for token in raw.split(",") if token.strip()]

    functions = _split(campaign.get("functions", ""))
    optimizers = _split(campaign.get("optimizers", ""))
    if not functions or not optimizers:
        raise ConfigurationError("[campaign] must name functions and optimizers")
    for fid in functions:
        get_spec(fid)  # validate ids early

    def _pick(name: str, fallback):
        value = overrides.get(name)
        return value if value is not None else campaign.get(name, fallback)

    trials = int(_pick("trials", 5))
    nfe = int(_pick("nfe", 30_000))
    base_seed = int(overrides["base_seed"] if overrides.get("base_seed") is not None
                    else campaign.get("base_seed", 0))
    parallelism = int(_pick("parallelism", 1))
    if overrides.get("keep_traces") is not None:
        keep_traces = bool(overrides["keep_traces"])
    else:
        keep_traces = campaign.getboolean("trace", fallback=False)
    out = Path(overrides["output_dir"] if overrides.get("output_dir") is not None
               else campaign.get("out", "results"))
    landscape_seed = int(campaign.get("landscape_seed", DEFAULT_LANDSCAPE_SEED))

    dim_override = overrides.get("dimension")
    if dim_override is None:
        dim_override = campaign.get("dim")
    nfe_overrides = {fid: int(value) for fid, value in parser["nfe"].items()} if "nfe" in parser else {}

    upbo = upbo_config_from_section(dict(parser["UPBO"])) if "UPBO" in parser else UpboConfig()
    baselines = {}
    for kind in BASELINE_KINDS:
        section = dict(parser[kind]) if kind in parser else {}
        baselines[kind] = baseline_config_from_section(kind, section)

    cells = []
    for optimizer in optimizers:
        if optimizer != "UPBO" and optimizer not in BASELINE_KINDS:
            raise ConfigurationError(f"unknown optimizer {optimizer!r} in plan")
        for fid in functions:
            cell_nfe = nfe_overrides.get(fid, nfe)
            dimension = int(dim_override) if dim_override else dimension_for_nfe(cell_nfe)
            spec = get_spec(fid)
            if spec.fixed_dimension is not None:
                dimension = spec.fixed_dimension
            cells.append(Cell(optimizer, fid, dimension, cell_nfe, trials, base_seed))

    if trials < 1 or nfe < 1 or parallelism < 1:
        raise ConfigurationError("trials, nfe, and parallelism must all be >= 1")
    return ExperimentPlan(
        cells=cells,
        upbo=upbo,
        baselines=baselines,
        output_dir=out,
        parallelism=parallelism,
        keep_traces=keep_traces,
        landscape_seed=landscape_seed,
    )


# ---------------------------------------------------------------------------
# Execution.


@dataclass(frozen=True)
class _TrialItem:
    optimizer: str
    function: str
    dimension: int
    nfe: int
    seed: int
    config: UpboConfig | BaselineConfig
    fingerprint: str
    landscape_seed: int
    landscapes_dir: str
    keep_trace: bool

    @property
    def key(self) -> tuple[str, str, str, str, str]:
        return (self.optimizer, self.function, str(self.dimension), str(self.nfe), str(self.seed))


@dataclass
class _TrialOutcome:
    item: _TrialItem
    final_error: float
    evaluations: int
    trace: tuple[float, ...]


def _execute_trial(item: _TrialItem) -> _TrialOutcome:
    bench = make_benchmark(item.function, item.dimension, item.landscape_seed, item.landscapes_dir)
    budget = EvalBudget(item.nfe)
    if item.optimizer == "UPBO":
        result = run(bench, bench.domain, item.config, budget, item.seed)
    else:
        result = run_baseline(item.config, bench, bench.domain, budget, item.seed)
    return _TrialOutcome(
        item=item,
        final_error=abs(result.best_cost - bench.optimum_value),
        evaluations=result.evaluations,
        trace=result.trace if item.keep_trace else (),
    )


def _load_completed(results_path: Path) -> set[tuple[str, ...]]:
    if not results_path.exists():
        return set()
    with results_path.open(newline="") as handle:
        return {
            (row["optimizer"], row["function"], row["dimension"], row["nfe"], row["seed"])
            for row in csv.DictReader(handle)
        }


def _result_row(outcome: _TrialOutcome) -> list[str]:
    item = outcome.item
    return [
        item.optimizer,
        item.function,
        str(item.dimension),
        str(item.nfe),
        str(item.seed),
        f"{outcome.final_error:.17g}",
        str(outcome.evaluations),
        item.fingerprint,
    ]


def run_campaign(plan: ExperimentPlan) -> CampaignSummary:
    """Execute every missing (cell, seed) trial, then render the report tables.

    Trials run independently (optionally in a process pool); rows append to
    results.csv through this single writer. A trial that raises is recorded
    in failures.log and the campaign continues.
    """
    from .report import render_report  # local import: matplotlib stays optional at runtime

    out = plan.output_dir
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigurationError(f"output directory {out} is not writable: {exc}") from exc

    landscapes_dir = out / "landscapes"
    for fid, dim in {(cell.function, cell.dimension) for cell in plan.cells}:
        make_benchmark(fid, dim, plan.landscape_seed, landscapes_dir)

    results_path = out / "results.csv"
    traces_path = out / "traces.csv"
    completed = _load_completed(results_path)

    items: list[_TrialItem] = []
    skipped = 0
    for cell in plan.cells:
        config = plan.upbo if cell.optimizer == "UPBO" else plan.baselines[cell.optimizer]
        fingerprint = _fingerprint(config_text(cell.optimizer, config))
        for trial in range(cell.trials):
            item = _TrialItem(
                optimizer=cell.optimizer,
                function=cell.function,
                dimension=cell.dimension,
                nfe=cell.nfe,
                seed=cell.base_seed + trial,
                config=config,
                fingerprint=fingerprint,
                landscape_seed=plan.landscape_seed,
                landscapes_dir=str(landscapes_dir),
                keep_trace=plan.keep_traces,
            )
            if item.key in completed:
                skipped += 1
            else:
                items.append(item)

    failures: list[tuple[str, str]] = []
    executed = 0
    new_results = not results_path.exists()
    new_traces = plan.keep_traces and not traces_path.exists()
    with results_path.open("a", newline="") as results_file:
        results_writer = csv.writer(results_file)
        if new_results:
            results_writer.writerow(RESULT_FIELDS)
        traces_file = traces_writer = None
        if plan.keep_traces:
            traces_file = traces_path.open("a", newline="")
            traces_writer = csv.writer(traces_file)
            if new_traces:
                traces_writer.writerow(TRACE_FIELDS)

        def _record(outcome: _TrialOutcome) -> None:
            nonlocal executed
            results_writer.writerow(_result_row(outcome))
            results_file.flush()
            if traces_writer is not None:
                item = outcome.item
                for iteration, cost in enumerate(outcome.trace):
                    traces_writer.writerow(
                        [item.optimizer, item.function, item.dimension, item.nfe, item.seed,
                         iteration, f"{cost:.17g}"]
                    )
                traces_file.flush()
            executed += 1

        try:
            if plan.parallelism <= 1:
                for item in items:
                    try:
                        _record(_execute_trial(item))
                    except Exception as exc:  # noqa: BLE001 - isolate per-trial failures
                        failures.append(("/".join(item.key), f"{type(exc).__name__}: {exc}"))
            else:
                with ProcessPoolExecutor(max_workers=plan.parallelism) as pool:
                    futures = {pool.submit(_execute_trial, item): item for item in items}
                    for future in as_completed(futures):
                        item = futures[future]
                        exc = future.exception()
                        if exc is not None:
                            failures.append(("/".join(item.key), f"{type(exc).__name__}: {exc}"))
                        else:
                            _record(future.result())
        finally:
            if traces_file is not None:
                traces_file.close()

    if failures:
        with (out / "failures.log").open("a") as handle:
            for key, message in failures:
                handle.write(f"{key}\t{message}\n")

    render_report(out)
    return CampaignSummary(results_path=results_path, executed=executed, skipped=skipped, failures=failures)
