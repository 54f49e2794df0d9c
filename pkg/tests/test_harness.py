"""Experiment runners, artifact determinism, and the CLI."""
import json

import numpy as np
import pytest

from maxminbf.cli import main
from maxminbf.harness import ExperimentSpec, run_experiment
from maxminbf.scenario import load_scenario

TINY = "[network]\ncells = 2\nusers_per_cell = 1\nantennas = 2\n"


@pytest.fixture
def tiny_scenario(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY)
    return load_scenario(path)


class TestExperimentSpec:
    def test_unknown_kind(self, tiny_scenario, tmp_path):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario=tiny_scenario, kind="mystery",
                           out_dir=tmp_path)

    def test_zero_trials_rejected(self, tiny_scenario, tmp_path):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario=tiny_scenario, kind="finite-convergence",
                           out_dir=tmp_path, trials=0)

    def test_sweep_required_and_sorted(self, tiny_scenario, tmp_path):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario=tiny_scenario, kind="power-sweep",
                           out_dir=tmp_path)
        with pytest.raises(ValueError):
            ExperimentSpec(scenario=tiny_scenario, kind="power-sweep",
                           out_dir=tmp_path, sweep=(5.0, 1.0))


class TestRunners:
    def test_finite_convergence_artifacts(self, tiny_scenario, tmp_path):
        spec = ExperimentSpec(scenario=tiny_scenario,
                              kind="finite-convergence",
                              out_dir=tmp_path / "out", trials=2, seed=3)
        summary = run_experiment(spec)
        assert summary["all_converged"]
        assert len(summary["trials"]) == 2
        for t in range(2):
            assert (tmp_path / "out" / f"finite_trace_trial{t}.csv").exists()
        saved = json.loads(
            (tmp_path / "out" / "finite_summary.json").read_text())
        assert saved["config"]["J"] == 2
        assert all(max(tr["gaps"].values()) < 1e-6
                   for tr in saved["trials"])

    def test_rerun_is_bit_identical(self, tiny_scenario, tmp_path):
        outs = []
        for name in ("a", "b"):
            spec = ExperimentSpec(scenario=tiny_scenario,
                                  kind="finite-convergence",
                                  out_dir=tmp_path / name, trials=1, seed=7)
            run_experiment(spec)
            outs.append((tmp_path / name / "finite_trace_trial0.csv")
                        .read_bytes())
        assert outs[0] == outs[1]

    def test_large_convergence(self, tiny_scenario, tmp_path):
        spec = ExperimentSpec(scenario=tiny_scenario,
                              kind="large-convergence",
                              out_dir=tmp_path / "out", trials=1, seed=1)
        summary = run_experiment(spec)
        assert summary["all_converged"]
        assert (tmp_path / "out" / "large_trace_trial0.csv").exists()

    def test_asymptotic_vs_optimal(self, tiny_scenario, tmp_path):
        spec = ExperimentSpec(scenario=tiny_scenario,
                              kind="asymptotic-vs-optimal",
                              out_dir=tmp_path / "out", trials=2, seed=5)
        summary = run_experiment(spec)
        assert summary["excluded"] == 0
        assert summary["mean_rel_gap"] is not None
        rows = (tmp_path / "out" / "asymptotic_vs_optimal.csv") \
            .read_text().strip().splitlines()
        assert rows[0].startswith("trial,user,")
        assert len(rows) == 1 + 2 * 2  # header + trials * users

    def test_concentration_single_trial(self, tiny_scenario, tmp_path):
        spec = ExperimentSpec(scenario=tiny_scenario,
                              kind="concentration-sweep",
                              out_dir=tmp_path / "out", trials=1, seed=2,
                              sweep=(4, 8), kn_ratio=0.5)
        summary = run_experiment(spec)
        assert [r["N"] for r in summary["rows"]] == [4, 8]
        assert [r["K"] for r in summary["rows"]] == [2, 4]

    def test_power_sweep(self, tiny_scenario, tmp_path):
        spec = ExperimentSpec(scenario=tiny_scenario, kind="power-sweep",
                              out_dir=tmp_path / "out", trials=1, seed=4,
                              sweep=(1.0, 10.0), geometries=2, draws=2)
        summary = run_experiment(spec)
        rows = summary["rows"]
        assert rows[0]["p_bar"] == 1.0 and rows[1]["p_bar"] == 10.0
        # more power cannot hurt the optimum
        assert rows[1]["optimal_mean_sinr"] > rows[0]["optimal_mean_sinr"]


class TestCli:
    def test_finite_convergence_exit_code(self, tmp_path):
        scenario = tmp_path / "tiny.toml"
        scenario.write_text(TINY)
        code = main(["finite-convergence", "--scenario", str(scenario),
                     "--out", str(tmp_path / "out"), "--trials", "1",
                     "--seed", "3"])
        assert code == 0
        assert (tmp_path / "out" / "finite_summary.json").exists()

    def test_sweep_parsing(self, tmp_path):
        scenario = tmp_path / "tiny.toml"
        scenario.write_text(TINY)
        code = main(["power-sweep", "--scenario", str(scenario),
                     "--out", str(tmp_path / "out"), "--sweep", "1,10",
                     "--geometries", "1", "--draws", "1", "--seed", "2"])
        assert code == 0

    def test_missing_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            main([])
