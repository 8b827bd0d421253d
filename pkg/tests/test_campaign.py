import csv
from pathlib import Path

import pytest

from upbo.campaign import (
    Cell,
    dimension_for_nfe,
    config_text,
    load_plan,
    run_campaign,
    upbo_config_from_section,
)
from upbo.cli import main
from upbo.core import ConfigurationError
from upbo.report import load_results, render_report

PLAN_TEMPLATE = """\
[campaign]
functions = F2, F9
optimizers = UPBO, SA
trials = {trials}
nfe = {nfe}
base_seed = 100
parallelism = 1
out = {out}

[UPBO]
NumOfHulls = 7
HullType = sphere
CertaintyMetricType = MeanFitnessPerVolume
UpdateClusterSolutionMethod = EitherRandomlyOrThroughBest
SpheresRadiusMin = 0.2
SpheresRadiusMax = 0.7
EliteCostsThresh = 0.3
SolutionsCnt = 40
InitPop = 20
MaxUpdatesPerIter = 10

[SA]
Tmax = 1.0
Tmin = 0.0001
RepeatsPerState = 4096
"""


def write_plan(tmp_path, trials=2, nfe=300, name="plan.ini"):
    out = tmp_path / "results"
    plan_path = tmp_path / name
    plan_path.write_text(PLAN_TEMPLATE.format(trials=trials, nfe=nfe, out=out))
    return plan_path, out


def read_rows(results_path):
    with open(results_path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestPlanParsing:
    def test_table_keys_map_onto_config(self, tmp_path):
        plan_path, _ = write_plan(tmp_path)
        plan = load_plan(plan_path)
        assert plan.upbo.num_hulls == 7
        assert plan.upbo.hull_kind == "sphere"
        assert plan.upbo.metric == "MeanFitnessPerVolume"
        assert plan.upbo.update_method == "EitherRandomlyOrThroughBest"
        assert plan.upbo.radius_min == 0.2
        assert plan.upbo.radius_max == 0.7
        assert plan.upbo.elite_rule.cost_thresh == 0.3
        assert plan.baselines["SA"].sa.t_max == 1.0
        assert len(plan.cells) == 4  # 2 functions x 2 optimizers

    def test_unknown_section_key_rejected(self):
        with pytest.raises(ConfigurationError, match="SphereRadius"):
            upbo_config_from_section({"SphereRadius": "0.2"})

    def test_unknown_function_rejected(self, tmp_path):
        plan_path = tmp_path / "bad.ini"
        plan_path.write_text("[campaign]\nfunctions = F99\noptimizers = UPBO\n")
        with pytest.raises(ConfigurationError):
            load_plan(plan_path)

    def test_unknown_optimizer_rejected(self, tmp_path):
        plan_path = tmp_path / "bad.ini"
        plan_path.write_text("[campaign]\nfunctions = F2\noptimizers = CMAES\n")
        with pytest.raises(ConfigurationError):
            load_plan(plan_path)

    def test_missing_plan(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_plan(tmp_path / "nope.ini")

    def test_nfe_dimension_map(self):
        assert dimension_for_nfe(30_000) == 3
        assert dimension_for_nfe(180_000) == 10
        assert dimension_for_nfe(500_000) == 30
        assert dimension_for_nfe(999) == 3

    def test_fixed_dimension_functions_resolve(self, tmp_path):
        plan_path = tmp_path / "beale.ini"
        plan_path.write_text(
            f"[campaign]\nfunctions = F4\noptimizers = SA\nnfe = 100\nout = {tmp_path/'r'}\n"
        )
        plan = load_plan(plan_path)
        assert plan.cells[0].dimension == 2

    def test_overrides(self, tmp_path):
        plan_path, _ = write_plan(tmp_path)
        plan = load_plan(plan_path, trials=7, base_seed=0, nfe=555, parallelism=3)
        assert plan.cells[0].trials == 7
        assert plan.cells[0].base_seed == 0
        assert plan.cells[0].nfe == 555
        assert plan.parallelism == 3

    def test_fingerprint_stability(self, tmp_path):
        plan_path, _ = write_plan(tmp_path)
        plan = load_plan(plan_path)
        assert config_text("UPBO", plan.upbo) == config_text("UPBO", plan.upbo)


class TestRunCampaign:
    def test_rows_and_seeds(self, tmp_path):
        plan_path, out = write_plan(tmp_path, trials=3)
        summary = run_campaign(load_plan(plan_path))
        assert summary.executed == 12 and not summary.failures
        rows = read_rows(out / "results.csv")
        assert len(rows) == 12
        upbo_f2 = [r for r in rows if r["optimizer"] == "UPBO" and r["function"] == "F2"]
        assert sorted(r["seed"] for r in upbo_f2) == ["100", "101", "102"]
        assert all(int(r["evaluations"]) <= 300 for r in rows)

    def test_resume_skips_completed(self, tmp_path):
        plan_path, out = write_plan(tmp_path)
        run_campaign(load_plan(plan_path))
        before = (out / "results.csv").read_bytes()
        summary = run_campaign(load_plan(plan_path))
        assert summary.executed == 0
        assert summary.skipped == 8
        assert (out / "results.csv").read_bytes() == before

    def test_report_regenerated_after_deletion(self, tmp_path):
        plan_path, out = write_plan(tmp_path)
        run_campaign(load_plan(plan_path))
        errors_txt = out / "report" / "errors.txt"
        original = errors_txt.read_text()
        for path in (out / "report").rglob("*"):
            if path.is_file():
                path.unlink()
        summary = run_campaign(load_plan(plan_path))
        assert summary.executed == 0
        assert errors_txt.read_text() == original

    def test_extra_trials_append_only_new_seeds(self, tmp_path):
        plan_path, out = write_plan(tmp_path, trials=2)
        run_campaign(load_plan(plan_path))
        summary = run_campaign(load_plan(plan_path, trials=4))
        assert summary.executed == 8  # two new seeds x four cells
        rows = read_rows(out / "results.csv")
        keys = [(r["optimizer"], r["function"], r["seed"]) for r in rows]
        assert len(keys) == len(set(keys))

    def test_parallel_matches_serial_row_set(self, tmp_path):
        plan_path, out_serial = write_plan(tmp_path, name="serial.ini")
        run_campaign(load_plan(plan_path))
        out_parallel = tmp_path / "parallel"
        run_campaign(load_plan(plan_path, parallelism=2, output_dir=out_parallel))
        serial_rows = {tuple(sorted(r.items())) for r in read_rows(out_serial / "results.csv")}
        parallel_rows = {tuple(sorted(r.items())) for r in read_rows(out_parallel / "results.csv")}
        assert serial_rows == parallel_rows

    def test_traces_persisted_when_requested(self, tmp_path):
        plan_path, out = write_plan(tmp_path)
        run_campaign(load_plan(plan_path, keep_traces=True))
        traces = read_rows(out / "traces.csv")
        assert traces
        assert {"optimizer", "function", "seed", "iteration", "best_cost"} <= set(traces[0])
        assert (out / "report" / "figures" / "convergence_F2.png").exists()

    def test_failures_isolated(self, tmp_path, monkeypatch):
        plan_path, out = write_plan(tmp_path)
        import upbo.campaign as campaign_module

        original = campaign_module._execute_trial

        def sometimes_broken(item):
            if item.optimizer == "SA" and item.seed == 100:
                raise RuntimeError("synthetic failure")
            return original(item)

        monkeypatch.setattr(campaign_module, "_execute_trial", sometimes_broken)
        summary = run_campaign(load_plan(plan_path))
        assert len(summary.failures) == 2  # SA seed 100 on both functions
        assert summary.executed == 6
        assert (out / "failures.log").exists()

    def test_landscape_files_created(self, tmp_path):
        plan_path = tmp_path / "rot.ini"
        out = tmp_path / "rot_results"
        plan_path.write_text(
            f"[campaign]\nfunctions = F13\noptimizers = SA\ntrials = 1\nnfe = 120\nout = {out}\n"
        )
        run_campaign(load_plan(plan_path))
        assert list((out / "landscapes").glob("F13_d3_*_rotation.txt"))


class TestReportShapes:
    @pytest.fixture()
    def campaign_out(self, tmp_path):
        plan_path, out = write_plan(tmp_path)
        run_campaign(load_plan(plan_path))
        return out

    def test_three_tables_rendered(self, campaign_out):
        report = campaign_out / "report"
        for stem in ("errors", "ranks", "ttest"):
            assert (report / f"{stem}.csv").exists()
            assert (report / f"{stem}.txt").exists()
        assert (report / "figures" / "mean_errors.png").exists()

    def test_errors_table_complete(self, campaign_out):
        rows = read_rows(campaign_out / "report" / "errors.csv")
        measured = [r for r in rows if r["source"] == "measured"]
        assert {(r["function"], r["optimizer"]) for r in measured} == {
            (fid, opt) for fid in ("F2", "F9") for opt in ("UPBO", "SA")
        }
        published = [r for r in rows if r["source"] == "published"]
        assert {r["optimizer"] for r in published} == {"CLPSO", "ICA", "CICA", "BA"}

    def test_rank_totals_present(self, campaign_out):
        rows = read_rows(campaign_out / "report" / "ranks.csv")
        totals = [r for r in rows if r["function"] == "TotalScore"]
        assert {r["optimizer"] for r in totals} >= {"UPBO", "SA"}

    def test_ttest_grid(self, campaign_out):
        rows = read_rows(campaign_out / "report" / "ttest.csv")
        assert {(r["function"], r["optimizer"]) for r in rows} == {
            (fid, "SA") for fid in ("F2", "F9")
        }

    def test_no_reference_flag(self, campaign_out):
        render_report(campaign_out, campaign_out / "bare", include_reference=False)
        rows = read_rows(campaign_out / "bare" / "errors.csv")
        assert all(r["source"] == "measured" for r in rows)

    def test_report_matches_aggregate(self, campaign_out):
        from upbo.stats import aggregate

        results = load_results(campaign_out)
        table = aggregate(results)
        rows = read_rows(campaign_out / "report" / "errors.csv")
        for row in rows:
            if row["source"] != "measured":
                continue
            cell = table.rows[(row["function"], row["optimizer"])]
            assert float(row["mean_error"]) == cell.mean


class TestCli:
    def test_eval_prints_cost(self, capsys):
        assert main(["eval", "F2", "1", "2"]) == 0
        assert capsys.readouterr().out.strip() == "5"

    def test_eval_unknown_function(self, capsys):
        assert main(["eval", "F99", "1"]) == 1

    def test_list_shows_tags(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        for token in ("MeanFitnessPerVolume", "EitherRandomlyOrThroughBest", "F13",
                      "sphere", "PSO-w-local", "CLPSO (published values only)"):
            assert token in out

    def test_run_and_report(self, tmp_path, capsys):
        plan_path, out = write_plan(tmp_path, trials=1, nfe=150)
        assert main(["run", str(plan_path)]) == 0
        assert main(["report", str(out)]) == 0
        assert (out / "report" / "errors.txt").exists()

    def test_missing_plan_is_config_error(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.ini")]) == 1

    def test_report_without_results_is_config_error(self, tmp_path):
        assert main(["report", str(tmp_path)]) == 1

    def test_run_flag_overrides(self, tmp_path):
        plan_path, _ = write_plan(tmp_path, trials=3)
        custom_out = tmp_path / "custom"
        assert main(["run", str(plan_path), "--trials", "1", "--out", str(custom_out),
                     "--seed", "7"]) == 0
        rows = read_rows(custom_out / "results.csv")
        assert len(rows) == 4
        assert {r["seed"] for r in rows} == {"7"}
