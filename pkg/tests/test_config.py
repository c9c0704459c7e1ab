"""Tests for configuration layering."""

import pytest

from dpcausal.core.exceptions import ConfigError
from dpcausal.core.models import AggregationScheme, CIMethod, EstimatorKind, GeneratorKind
from dpcausal.utils.config import (
    SEED_ENV_VAR,
    RunConfig,
    build_config,
    parse_config_text,
    parse_set_overrides,
)


class TestParsing:
    """Test text parsing."""

    def test_comments_and_blanks(self) -> None:
        text = "# run\nk = 5\n\nestimator = ipw  # inline\n"
        assert parse_config_text(text) == {"k": "5", "estimator": "ipw"}

    def test_missing_equals(self) -> None:
        with pytest.raises(ConfigError, match="run.cfg:2"):
            parse_config_text("k = 5\nbroken line\n", "run.cfg")

    def test_set_overrides(self) -> None:
        assert parse_set_overrides(["mu_total=2", "grid.k=2,5"]) == {
            "mu_total": "2",
            "grid.k": "2,5",
        }
        with pytest.raises(ConfigError):
            parse_set_overrides(["k"])


class TestRunConfig:
    """Test typed settings."""

    def test_defaults(self) -> None:
        settings = RunConfig().to_settings()
        assert settings.kind is EstimatorKind.AIPW
        assert settings.k == 10
        assert settings.bounds.b_pi == 10.0
        assert settings.scheme is AggregationScheme.COMPLETE_MEANS
        assert settings.ci_method is CIMethod.ASYMPTOTIC

    def test_typed_values(self) -> None:
        config = RunConfig()
        config.set("non_private", "yes")
        config.set("alpha", "0.1")
        config.set("mu_ate", "none")
        config.set("learner_mu.n_trees", "50")
        config.set("learner_mu", "forest")
        assert config.non_private is True
        assert config.alpha == 0.1
        assert config.mu_ate is None
        assert config.learner_spec("mu").n_trees == 50

    @pytest.mark.parametrize(
        "key,value",
        [
            ("depth", "3"),
            ("k", "many"),
            ("non_private", "maybe"),
            ("learner_pi.depth", "3"),
            ("grid.alpha", "0.1"),
        ],
    )
    def test_bad_settings(self, key: str, value: str) -> None:
        with pytest.raises(ConfigError):
            RunConfig().set(key, value)

    @pytest.mark.parametrize(
        "key,value", [("estimator", "DML"), ("aggregation", "median"), ("k", "1")]
    )
    def test_bad_settings_on_resolution(self, key: str, value: str) -> None:
        config = RunConfig()
        config.set(key, value)
        with pytest.raises(ConfigError):
            config.to_settings()

    def test_grid_values(self) -> None:
        config = RunConfig()
        config.set("grid.k", "2, 5,10")
        config.set("grid.estimator", "g,aipw")
        assert config.grid_values() == {"k": [2, 5, 10], "estimator": ["G", "AIPW"]}
        config.set("grid.mu", "x")
        with pytest.raises(ConfigError):
            config.grid_values()

    def test_generator_spec(self) -> None:
        config = RunConfig(generator="effect_of_k", n=30, seed=4)
        spec = config.generator_spec()
        assert spec.kind is GeneratorKind.EFFECT_OF_K
        assert (spec.n, spec.seed) == (30, 4)
        with pytest.raises(ConfigError):
            RunConfig().generator_spec()

    def test_to_dict_round_trip(self) -> None:
        config = RunConfig(k=4, estimator="G")
        config.set("learner_pi.max_iter", "20")
        config.set("grid.mu", "0.5,1")
        flat = config.to_dict()
        assert flat["learner_pi.max_iter"] == 20
        assert flat["grid.mu"] == "0.5,1"
        rebuilt = RunConfig()
        rebuilt.update(flat)
        assert rebuilt == config


class TestBuildConfig:
    """Test layer precedence."""

    def test_precedence(self, tmp_path) -> None:
        path = tmp_path / "run.cfg"
        path.write_text("k = 3\nalpha = 0.2\nmu_total = 4\nseed = 1\n", encoding="utf-8")
        config = build_config(
            path,
            overrides=["alpha=0.3", "mu_total=5"],
            flags={"mu_total": 6.0, "beta": None},
            environ={},
        )
        assert config.k == 3
        assert config.alpha == 0.3
        assert config.mu_total == 6.0
        assert config.beta == 0.05
        assert config.seed == 1

    def test_environment_seed_wins(self) -> None:
        config = build_config(flags={"seed": 3}, environ={SEED_ENV_VAR: "11"})
        assert config.seed == 11

    def test_negative_seed(self) -> None:
        with pytest.raises(ConfigError):
            build_config(flags={"seed": -2}, environ={})

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(ConfigError):
            build_config(tmp_path / "nope.cfg", environ={})

    def test_unknown_flag(self) -> None:
        with pytest.raises(ConfigError):
            build_config(flags={"colour": 1}, environ={})
