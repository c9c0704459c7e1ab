"""Tests for the replication harness and sweeps."""

import math

import pytest

from dpcausal.core.exceptions import ConfigError
from dpcausal.core.models import (
    CIMethod,
    EstimationSettings,
    EstimatorKind,
    GeneratorKind,
    GeneratorSpec,
    LearnerSpec,
    ReplicationRow,
)
from dpcausal.experiments.harness import (
    REPLICATION_COLUMNS,
    SUMMARY_COLUMNS,
    expand_grid,
    generator_spec_for,
    run_replications,
    run_sweep,
    summarize,
    write_replication_csv,
    write_summary_csv,
)

SPEC = GeneratorSpec(GeneratorKind.LOW_OVERLAP, 60)
SETTINGS = EstimationSettings(
    kind=EstimatorKind.AIPW,
    k=3,
    learner_pi=LearnerSpec("logistic"),
    learner_mu=LearnerSpec("linear"),
    mu_total=1.0,
)


class TestReplications:
    """Test repeated pipeline runs."""

    def test_single_replication(self) -> None:
        table = run_replications(SPEC, SETTINGS, reps=1, seed=0)
        assert len(table.rows) == 1
        assert table.summary.reps == 1
        assert table.summary.sd == 0.0
        assert table.summary.true_ate == pytest.approx(0.1)

    def test_deterministic(self) -> None:
        first = run_replications(SPEC, SETTINGS, reps=3, seed=7)
        second = run_replications(SPEC, SETTINGS, reps=3, seed=7)
        assert [r.tau_dp for r in first.rows] == [r.tau_dp for r in second.rows]
        assert len({r.seed for r in first.rows}) == 3

    def test_generator_seed_draws_datasets(self) -> None:
        """Test the generator seed picks the datasets independently of the run seed."""
        settings = EstimationSettings(k=3, non_private=True)
        other = GeneratorSpec(GeneratorKind.LOW_OVERLAP, 60, seed=1)
        first = run_replications(SPEC, settings, reps=2, seed=4)
        again = run_replications(GeneratorSpec(GeneratorKind.LOW_OVERLAP, 60), settings, 2, seed=4)
        moved = run_replications(other, settings, reps=2, seed=4)
        assert [r.tau_dp for r in first.rows] == [r.tau_dp for r in again.rows]
        assert [r.tau_dp for r in first.rows] != [r.tau_dp for r in moved.rows]
        assert [r.seed for r in first.rows] == [r.seed for r in moved.rows]

    def test_parallel_matches_serial(self) -> None:
        serial = run_replications(SPEC, SETTINGS, reps=2, seed=1, n_jobs=1)
        parallel = run_replications(SPEC, SETTINGS, reps=2, seed=1, n_jobs=2)
        assert [r.tau_dp for r in serial.rows] == [r.tau_dp for r in parallel.rows]

    def test_baseline_rows(self) -> None:
        table = run_replications(SPEC, SETTINGS, reps=2, seed=0, baseline=True)
        assert all(math.isnan(r.v_dp) for r in table.rows)
        assert math.isnan(table.summary.coverage)

    def test_no_interval(self) -> None:
        settings = EstimationSettings(k=3, ci_method=CIMethod.NONE)
        table = run_replications(SPEC, settings, reps=1)
        assert math.isnan(table.rows[0].ci_lo)
        assert not table.rows[0].covered

    def test_reps_positive(self) -> None:
        with pytest.raises(ConfigError):
            run_replications(SPEC, SETTINGS, reps=0)


class TestSummary:
    """Test replication summaries."""

    def test_statistics(self) -> None:
        rows = [
            ReplicationRow(0, 1.0, 2.0, 0.0, 2.0, True, 0),
            ReplicationRow(1, 3.0, 4.0, 3.5, 4.0, False, 1),
        ]
        summary = summarize(rows, true_ate=1.0)
        assert summary.mean == 2.0
        assert summary.bias == 1.0
        assert summary.rmse == pytest.approx(math.sqrt(2.0))
        assert summary.sd == pytest.approx(math.sqrt(2.0))
        assert summary.coverage == 0.5
        assert summary.mean_v_dp == 3.0
        assert summary.standard_error == pytest.approx(1.0)


class TestGrid:
    """Test sweep grids."""

    def test_expand_order(self) -> None:
        cells = expand_grid({"mu": [1.0, 2.0], "k": [2, 5]})
        assert cells == [
            {"k": 2, "mu": 1.0},
            {"k": 2, "mu": 2.0},
            {"k": 5, "mu": 1.0},
            {"k": 5, "mu": 2.0},
        ]

    @pytest.mark.parametrize("grid", [{}, {"depth": [1]}, {"k": []}])
    def test_invalid_grid(self, grid: dict) -> None:
        with pytest.raises(ConfigError):
            expand_grid(grid)

    def test_sweep_cells(self, tmp_path) -> None:
        grid = {"k": [2, 3], "mu": [0.0, 1.0]}
        results = run_sweep(SPEC, SETTINGS, grid, reps=1, seed=0)
        assert len(results) == 4
        assert results[0][1].label == "k=2,mu=0.0"

        summary_path = tmp_path / "summary.csv"
        write_summary_csv(results, summary_path)
        lines = summary_path.read_text(encoding="utf-8").splitlines()
        assert lines[0].split(",") == ["k", "mu"] + SUMMARY_COLUMNS
        assert len(lines) == 5

    def test_replication_csv(self, tmp_path) -> None:
        table = run_replications(SPEC, SETTINGS, reps=2, seed=0)
        path = tmp_path / "reps.csv"
        write_replication_csv(table, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].split(",") == REPLICATION_COLUMNS
        assert len(lines) == 3
        assert lines[1].split(",")[5] in ("0", "1")

    def test_generator_spec_for(self) -> None:
        assert generator_spec_for("effect_of_k", 10).kind is GeneratorKind.EFFECT_OF_K
        with pytest.raises(ConfigError):
            generator_spec_for("nope", 10)
