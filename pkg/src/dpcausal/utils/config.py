"""Flat key-value run configuration.

Precedence, lowest first: defaults, ``--config`` file, ``--set key=value``
overrides, dedicated command-line flags, the DPCAUSAL_SEED environment variable.

File format: one ``key = value`` per line; ``#`` starts a comment; blank lines
are ignored. Grid keys take comma-separated lists.
"""

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from ..core.exceptions import ConfigError
from ..core.models import (
    AggregationScheme,
    Bounds,
    CIMethod,
    EstimationSettings,
    EstimatorKind,
    GeneratorKind,
    GeneratorSpec,
    LearnerSpec,
)

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "DPCAUSAL_SEED"

LEARNER_HYPERPARAMETERS = {
    "max_iter": int,
    "tolerance": float,
    "max_depth": int,
    "min_leaf": int,
    "n_trees": int,
    "subsample_fraction": float,
}
GRID_DIMENSIONS = ("k", "mu", "n", "estimator")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_bool(key: str, value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got '{value}'")


def _parse_grid(key: str, value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def parse_estimator(value: str) -> EstimatorKind:
    try:
        return EstimatorKind(value.strip().upper())
    except ValueError:
        raise ConfigError(f"unknown estimator '{value}'; expected G, IPW or AIPW") from None


def _parse_enum(enum: Any, key: str, value: str) -> Any:
    try:
        return enum(value.strip().lower())
    except ValueError:
        names = ", ".join(member.value for member in enum)
        raise ConfigError(f"{key}: unknown value '{value}'; expected one of {names}") from None


@dataclass
class RunConfig:
    """Resolved configuration of one command."""

    data: Optional[str] = None
    generator: Optional[str] = None
    n: int = 1000
    estimator: str = "AIPW"
    k: int = 10
    b_mu: float = 1.0
    b_pi: float = 10.0
    learner_pi: str = "logistic"
    learner_mu: str = "linear"
    learner_pi_params: Dict[str, Union[int, float]] = field(default_factory=dict)
    learner_mu_params: Dict[str, Union[int, float]] = field(default_factory=dict)
    aggregation: str = "complete_means"
    mu_total: float = 1.0
    mu_ate: Optional[float] = None
    mu_var: Optional[float] = None
    non_private: bool = False
    ci_method: str = "asymptotic"
    alpha: float = 0.05
    alpha1: float = 0.02
    beta: float = 0.05
    bootstrap_reps: int = 200
    seed: int = 0
    n_jobs: int = 1
    output: Optional[str] = None
    output_dir: Optional[str] = None
    reps: int = 100
    baseline: bool = False
    grid: Dict[str, List[str]] = field(default_factory=dict)

    def set(self, key: str, value: str) -> None:
        """Apply one textual ``key=value`` setting."""
        key = key.strip()
        if key.startswith(("learner_pi.", "learner_mu.")):
            prefix, hyper = key.split(".", 1)
            if hyper not in LEARNER_HYPERPARAMETERS:
                raise ConfigError(f"unknown learner hyperparameter '{hyper}'")
            try:
                parsed = LEARNER_HYPERPARAMETERS[hyper](value.strip())
            except ValueError:
                raise ConfigError(f"{key}: cannot parse '{value}'") from None
            getattr(self, f"{prefix}_params")[hyper] = parsed
            return
        if key.startswith("grid."):
            dimension = key[len("grid.") :]
            if dimension not in GRID_DIMENSIONS:
                raise ConfigError(f"unknown grid dimension '{dimension}'")
            self.grid[dimension] = _parse_grid(key, value)
            return

        fields = {f.name: f for f in dataclasses.fields(self)}
        if key not in fields or key in ("learner_pi_params", "learner_mu_params", "grid"):
            raise ConfigError(f"unknown configuration key '{key}'")
        setattr(self, key, self._coerce(key, value))

    def _coerce(self, key: str, value: str) -> Any:
        value = value.strip()
        default = getattr(RunConfig(), key)
        if key in ("mu_ate", "mu_var"):
            return None if value.lower() in ("", "none") else self._number(key, value, float)
        if key in ("data", "generator", "output", "output_dir"):
            return value or None
        if isinstance(default, bool):
            return _parse_bool(key, value)
        if isinstance(default, int):
            return self._number(key, value, int)
        if isinstance(default, float):
            return self._number(key, value, float)
        return value

    @staticmethod
    def _number(key: str, value: str, kind: type) -> Any:
        try:
            return kind(value)
        except ValueError:
            raise ConfigError(f"{key}: expected {kind.__name__}, got '{value}'") from None

    def update(self, values: Mapping[str, Any]) -> None:
        """Apply already-typed values, skipping None."""
        for key, value in values.items():
            if value is None:
                continue
            if isinstance(value, str) or "." in key:
                self.set(key, str(value))
            elif key in {f.name for f in dataclasses.fields(self)}:
                setattr(self, key, value)
            else:
                raise ConfigError(f"unknown configuration key '{key}'")

    def learner_spec(self, which: str) -> LearnerSpec:
        kind = getattr(self, f"learner_{which}")
        params = getattr(self, f"learner_{which}_params")
        return LearnerSpec(kind, **params)

    def to_settings(self) -> EstimationSettings:
        """Typed pipeline settings; raises ConfigError for invalid values."""
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be nonzero")
        return EstimationSettings(
            kind=parse_estimator(self.estimator),
            k=self.k,
            bounds=Bounds(self.b_mu, self.b_pi),
            learner_pi=self.learner_spec("pi"),
            learner_mu=self.learner_spec("mu"),
            scheme=_parse_enum(AggregationScheme, "aggregation", self.aggregation),
            mu_total=self.mu_total,
            mu_ate=self.mu_ate,
            mu_var=self.mu_var,
            non_private=self.non_private,
            ci_method=_parse_enum(CIMethod, "ci_method", self.ci_method),
            alpha=self.alpha,
            alpha1=self.alpha1,
            beta=self.beta,
            bootstrap_reps=self.bootstrap_reps,
            n_jobs=self.n_jobs,
        )

    def generator_spec(self) -> GeneratorSpec:
        if not self.generator:
            raise ConfigError("no generator configured")
        kind = _parse_enum(GeneratorKind, "generator", self.generator)
        return GeneratorSpec(kind, self.n, self.seed)

    def grid_values(self) -> Dict[str, List[Any]]:
        """Typed sweep grid."""
        parsers = {"k": int, "mu": float, "n": int, "estimator": lambda v: parse_estimator(v).value}
        typed: Dict[str, List[Any]] = {}
        for dimension, values in self.grid.items():
            try:
                typed[dimension] = [parsers[dimension](v) for v in values]  # type: ignore[operator]
            except ValueError:
                raise ConfigError(f"grid.{dimension}: cannot parse {values}") from None
        return typed

    def to_dict(self) -> Dict[str, Any]:
        """Flat mapping using the documented key names; re-applying it reproduces the config."""
        flat: Dict[str, Any] = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name in ("learner_pi_params", "learner_mu_params"):
                prefix = f.name[: -len("_params")]
                for hyper, hyper_value in sorted(value.items()):
                    flat[f"{prefix}.{hyper}"] = hyper_value
            elif f.name == "grid":
                for dimension, values in value.items():
                    flat[f"grid.{dimension}"] = ",".join(values)
            else:
                flat[f.name] = value
        return flat


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """Parse ``key = value`` lines."""
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{raw.strip()}'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Error reading config {path}: {e}") from e
    return parse_config_text(text, str(path))


def parse_set_overrides(items: Sequence[str]) -> Dict[str, str]:
    """``--set key=value`` items."""
    values: Dict[str, str] = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got '{item}'")
        key, value = item.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def build_config(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Sequence[str] = (),
    flags: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Resolve a RunConfig from every configuration layer."""
    config = RunConfig()
    if config_path is not None:
        for key, value in load_config_file(config_path).items():
            config.set(key, value)
    for key, value in parse_set_overrides(overrides).items():
        config.set(key, value)
    if flags:
        config.update(flags)

    env = os.environ if environ is None else environ
    if env.get(SEED_ENV_VAR):
        config.set("seed", env[SEED_ENV_VAR])
        logger.debug("seed overridden from %s: %d", SEED_ENV_VAR, config.seed)
    if config.seed < 0:
        raise ConfigError(f"seed must be nonnegative, got {config.seed}")
    return config
