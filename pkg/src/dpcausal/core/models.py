"""Core data models for private treatment effect estimation."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exceptions import ConfigError, DataError, EstimationError
from .predictor import Predictor


def _frozen_array(values: object, dtype: type = float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


class EstimatorKind(Enum):
    """Score families supported by the private ATE release."""

    G = "G"
    IPW = "IPW"
    AIPW = "AIPW"


class AggregationScheme(Enum):
    """Cross-fold aggregation of nuisance predictions."""

    COMPLETE_MEANS = "complete_means"
    SAMPLING = "sampling"


class Arm(Enum):
    """Treatment arm."""

    TREATED = "treated"
    CONTROL = "control"


class CIMethod(Enum):
    """Confidence interval procedure."""

    NONE = "none"
    ASYMPTOTIC = "asymptotic"
    BOOTSTRAP = "bootstrap"
    POINTWISE = "pointwise"


class GeneratorKind(Enum):
    """Synthetic data generating processes."""

    LOW_OVERLAP = "low_overlap"
    MISSPECIFIED_TREES = "misspecified_trees"
    GOOD_OVERLAP_BINARY = "good_overlap_binary"
    EFFECT_OF_K = "effect_of_k"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Observational data: covariates X (n x d), binary treatment A, real outcome Y."""

    covariates: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray

    def __post_init__(self) -> None:
        covariates = np.array(self.covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates.reshape(-1, 1)
        if covariates.ndim != 2:
            raise DataError(f"covariates must be a 2-d matrix, got {covariates.ndim} dims")
        covariates.setflags(write=False)
        treatment = _frozen_array(self.treatment)
        outcome = _frozen_array(self.outcome)
        if treatment.ndim != 1 or outcome.ndim != 1:
            raise DataError("treatment and outcome must be vectors")
        if not (covariates.shape[0] == treatment.shape[0] == outcome.shape[0]):
            raise DataError(
                f"length mismatch: covariates {covariates.shape[0]}, "
                f"treatment {treatment.shape[0]}, outcome {outcome.shape[0]}"
            )
        object.__setattr__(self, "covariates", covariates)
        object.__setattr__(self, "treatment", treatment)
        object.__setattr__(self, "outcome", outcome)

    @property
    def n(self) -> int:
        return int(self.outcome.shape[0])

    @property
    def d(self) -> int:
        return int(self.covariates.shape[1])

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Rows selected by an index array (repeats allowed)."""
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            self.covariates[indices], self.treatment[indices], self.outcome[indices]
        )

    def with_outcome(self, outcome: np.ndarray) -> "Dataset":
        return Dataset(self.covariates, self.treatment, outcome)

    def with_covariates(self, covariates: np.ndarray) -> "Dataset":
        return Dataset(covariates, self.treatment, self.outcome)


@dataclass(frozen=True)
class Bounds:
    """Outcome bound B_mu and inverse-propensity bound B_pi."""

    b_mu: float
    b_pi: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.b_mu) or self.b_mu <= 0:
            raise ConfigError(f"b_mu must be positive, got {self.b_mu}")
        if not np.isfinite(self.b_pi) or self.b_pi <= 1:
            raise ConfigError(f"b_pi must be greater than 1, got {self.b_pi}")

    @property
    def eta(self) -> float:
        """Propensity clip threshold 1/B_pi."""
        return 1.0 / self.b_pi

    @property
    def propensity_range(self) -> Tuple[float, float]:
        return self.eta, 1.0 - self.eta


@dataclass(frozen=True, eq=False)
class FoldAssignment:
    """Partition of record indices 0..n-1 into k disjoint folds."""

    fold_of: np.ndarray
    k: int
    members: Tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return int(self.fold_of.shape[0])

    @property
    def sizes(self) -> List[int]:
        return [int(m.shape[0]) for m in self.members]


@dataclass
class ValidationReport:
    """Outcome of dataset validation."""

    n: int
    n_requiring_clipping: int
    n_non_binary: int
    n_non_finite: int
    passed: bool
    messages: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class LearnerSpec:
    """Learner family and hyperparameters for one nuisance function."""

    kind: str = "linear"
    max_iter: int = 100
    tolerance: float = 1e-8
    max_depth: int = 8
    min_leaf: int = 5
    n_trees: int = 300
    subsample_fraction: float = 0.4

    def __post_init__(self) -> None:
        for name in ("max_iter", "max_depth", "min_leaf", "n_trees"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.tolerance <= 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if not 0 < self.subsample_fraction <= 1:
            raise ConfigError(
                f"subsample_fraction must lie in (0, 1], got {self.subsample_fraction}"
            )


@dataclass(frozen=True, eq=False)
class NuisanceTriple:
    """Propensity and arm-wise outcome predictors trained on one fold."""

    propensity: Predictor
    outcome0: Predictor
    outcome1: Predictor
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class NuisanceMatrix:
    """Predictions of every fold model at every record, each n x K."""

    pi_pred: np.ndarray
    mu0_pred: np.ndarray
    mu1_pred: np.ndarray

    def __post_init__(self) -> None:
        shapes = {self.pi_pred.shape, self.mu0_pred.shape, self.mu1_pred.shape}
        if len(shapes) != 1 or self.pi_pred.ndim != 2:
            raise EstimationError(f"prediction matrices must share one n x K shape, got {shapes}")

    @property
    def n(self) -> int:
        return int(self.pi_pred.shape[0])

    @property
    def k(self) -> int:
        return int(self.pi_pred.shape[1])


@dataclass(frozen=True, eq=False)
class AggregatedNuisance:
    """Leave-own-fold-out nuisance values for each record."""

    pi1: np.ndarray
    one_minus_pi0: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray
    scheme: AggregationScheme = AggregationScheme.COMPLETE_MEANS
    sampling_map: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PrivacyBudget:
    """Gaussian differential privacy parameter mu."""

    mu: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ConfigError(f"privacy budget mu must be nonnegative, got {self.mu}")

    @property
    def is_private(self) -> bool:
        return self.mu > 0


@dataclass(frozen=True)
class SensitivityPair:
    """Same-fold and cross-fold sensitivities plus the score bound M."""

    delta_eq: float
    delta_neq: float
    score_bound: float

    def __post_init__(self) -> None:
        if self.delta_eq < 0 or self.delta_neq < 0 or self.score_bound < 0:
            raise ConfigError("sensitivities and score bound must be nonnegative")


@dataclass(frozen=True)
class EstimatorConstant:
    """Estimator-specific constant C of the noise calibration."""

    c: float

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ConfigError(f"estimator constant must be positive, got {self.c}")


@dataclass(frozen=True)
class NoiseCalibration:
    """Noise variances for the ATE (sigma1^2) and standard deviation (sigma2^2) releases."""

    sigma1_sq: float
    sigma2_sq: float
    sensitivity: Optional[float] = None
    constant: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Per-record scores Gamma_i whose mean is the ATE estimate."""

    scores: np.ndarray
    kind: EstimatorKind

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])


@dataclass(frozen=True, eq=False)
class BoundScores:
    """Per-record lower and upper CATE bounds used by fold-based intervals."""

    gamma_minus: np.ndarray
    gamma_plus: np.ndarray

    def __post_init__(self) -> None:
        if self.gamma_minus.shape != self.gamma_plus.shape:
            raise EstimationError("lower and upper bound vectors differ in length")
        if np.any(self.gamma_minus > self.gamma_plus):
            raise EstimationError("lower bound exceeds upper bound")

    @property
    def n(self) -> int:
        return int(self.gamma_minus.shape[0])


@dataclass
class PrivateEstimate:
    """Released private ATE, private scaled variance and optional interval."""

    kind: EstimatorKind
    tau_dp: float
    v_dp: float
    n: int
    k: int
    budget: PrivacyBudget
    components: Dict[str, float]
    ci: Optional[Tuple[float, float]] = None
    ci_method: CIMethod = CIMethod.NONE
    sigma1_sq: float = 0.0
    sigma2_sq: float = 0.0
    seed: int = 0
    non_private: bool = False
    tau_nonprivate: Optional[float] = None
    warnings: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class StudyRecord:
    """One released study result entering a meta-analysis."""

    tau_dp: float
    v_dp: float
    n: int
    budget: PrivacyBudget = PrivacyBudget(0.0)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DataError(f"study size must be at least 1, got {self.n}")


@dataclass(frozen=True)
class MetaResult:
    """Combined meta-analysis estimate."""

    tau_meta: float
    v_meta_over_n: float
    weights: Tuple[float, ...]
    n_total: int
    inverse_variance: bool = False


@dataclass(frozen=True)
class GeneratorSpec:
    """Synthetic dataset request: generator kind, sample size and seed."""

    kind: GeneratorKind
    n: int
    seed: int = 0


@dataclass(frozen=True)
class EstimationSettings:
    """Pipeline settings for one private ATE release."""

    kind: EstimatorKind = EstimatorKind.AIPW
    k: int = 10
    bounds: Bounds = Bounds(1.0, 10.0)
    learner_pi: LearnerSpec = LearnerSpec("logistic")
    learner_mu: LearnerSpec = LearnerSpec("linear")
    scheme: AggregationScheme = AggregationScheme.COMPLETE_MEANS
    mu_total: float = 1.0
    mu_ate: Optional[float] = None
    mu_var: Optional[float] = None
    non_private: bool = False
    ci_method: CIMethod = CIMethod.ASYMPTOTIC
    alpha: float = 0.05
    alpha1: float = 0.02
    beta: float = 0.05
    bootstrap_reps: int = 200
    n_jobs: int = 1


@dataclass(frozen=True)
class ReplicationRow:
    """One Monte-Carlo replication of the private pipeline."""

    rep: int
    tau_dp: float
    v_dp: float
    ci_lo: float
    ci_hi: float
    covered: bool
    seed: int


@dataclass(frozen=True)
class ReplicationSummary:
    """Aggregate statistics over replications."""

    reps: int
    true_ate: float
    mean: float
    sd: float
    bias: float
    rmse: float
    coverage: float
    mean_v_dp: float

    @property
    def standard_error(self) -> float:
        return self.sd / float(np.sqrt(self.reps)) if self.reps > 0 else float("nan")


@dataclass
class ReplicationTable:
    """Per-replication rows plus their summary."""

    rows: List[ReplicationRow]
    summary: ReplicationSummary
    label: str = ""
