"""End-to-end command line workflow on files in a temporary directory."""

import csv
import json

import pytest

from dpcausal.cli import main
from dpcausal.utils.config import SEED_ENV_VAR


@pytest.fixture(autouse=True)
def _clean_seed(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


class TestWorkflow:
    """generate, estimate per site, then combine the released reports."""

    def test_sites_to_meta_analysis(self, tmp_path, capsys: pytest.CaptureFixture) -> None:
        config = tmp_path / "run.cfg"
        config.write_text(
            "# shared analysis plan\n"
            "estimator = aipw\n"
            "k = 4\n"
            "mu_total = 2.0\n"
            "learner_pi.max_iter = 50\n",
            encoding="utf-8",
        )
        reports = tmp_path / "reports"
        reports.mkdir()
        sizes = {"north": 120, "south": 80}
        for seed, (site, n) in enumerate(sizes.items(), start=1):
            data = tmp_path / f"{site}.csv"
            source = ["--generator", "misspecified_trees", "-n", str(n), "--seed", str(seed)]
            main(["generate", *source, "-o", str(data)])
            analysis = ["--config", str(config), "--data", str(data), "--seed", str(seed)]
            main(["estimate", *analysis, "-o", str(reports / f"{site}.json")])
        capsys.readouterr()

        north = json.loads((reports / "north.json").read_text(encoding="utf-8"))
        assert north["kind"] == "AIPW"
        assert north["K"] == 4
        assert north["budget"]["mu_total"] == pytest.approx(2.0)

        main(["--output-format", "json", "meta", str(reports), "--inverse-variance"])
        combined = json.loads(capsys.readouterr().out)
        assert combined["n_total"] == sum(sizes.values())
        assert combined["weighting"] == "inverse_variance"
        assert len(combined["studies"]) == 2

    def test_sweep_summary_table(self, tmp_path) -> None:
        out_dir = tmp_path / "tables"
        grid = ["--set", "grid.k=2,3", "--set", "grid.mu=0.5,1"]
        source = ["--generator", "low_overlap", "-n", "60", "--reps", "3", "--estimator", "G"]
        main(["sweep", *source, *grid, "--output-dir", str(out_dir)])
        with open(out_dir / "summary.csv", newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 4
        assert {row["reps"] for row in rows} == {"3"}
        assert len(list(out_dir.glob("k=*.csv"))) == 4
