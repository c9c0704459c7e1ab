"""Synthetic data generating processes with known propensity and outcome models."""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, Union

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import expit
from scipy.stats import norm

from ..core.exceptions import ConfigError
from ..core.models import Dataset, GeneratorKind, GeneratorSpec
from ..utils.seeding import STREAM_DATA, make_rng

logger = logging.getLogger(__name__)

QUADRATURE_POINTS = 80

GOOD_OVERLAP_BETA_PI = np.array([-0.15, 0.225, -0.15, -0.2, 0.1, 0.05, -0.075, 0.225, -0.15, -0.2])
GOOD_OVERLAP_BETA_MU = np.array([0.175, 0.1, -0.125, 0.075, -0.1, 0.2, -0.2, 0.175, -0.1, 0.2])
GOOD_OVERLAP_TREATMENT_COEF = 0.42585

# fmt: off
EFFECT_OF_K_BETA_PI = np.array(
    [
        -0.17, -0.06, 0.05, 0.14, 0.12, -0.195, -0.205, 0.07, 0.18, 0.14,
        -0.14, 0.05, 0.01, -0.16, -0.18, -0.1, 0.2, 0.03, -0.16, -0.1,
    ]
)
EFFECT_OF_K_BETA_Y = np.array(
    [
        -0.0385, -0.0111, -0.105, -0.0344, 0.1405, 0.0550, 0.0344, -0.0908, -0.0023, -0.0243,
        -0.0076, -0.0416, 0.0193, -0.0846, 0.0582, 0.0824, 0.0184, 0.0064, -0.0895, 0.0241,
    ]
)
# fmt: on


def _gaussian_expectation(func: Callable[[np.ndarray], np.ndarray], scale: float) -> float:
    """E[func(scale * Z)] for standard normal Z by Gauss-Hermite quadrature."""
    nodes, weights = hermegauss(QUADRATURE_POINTS)
    return float(np.sum(weights * func(scale * nodes)) / np.sqrt(2.0 * np.pi))


class SyntheticGenerator(ABC):
    """Data generating process with standard normal covariates.

    Subclasses define the propensity and the arm-wise outcome mean and variance;
    sampling, oracle variances and the analytic treated fraction follow from them.
    """

    kind: GeneratorKind
    d: int
    true_ate: float

    def sample_covariates(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal((n, self.d))

    @abstractmethod
    def propensity(self, x: np.ndarray) -> np.ndarray:
        """P(A = 1 | X = x)."""
        pass

    @abstractmethod
    def mean_outcome(self, x: np.ndarray, arm: int) -> np.ndarray:
        """E[Y(arm) | X = x]."""
        pass

    @abstractmethod
    def outcome_variance(self, x: np.ndarray, arm: int) -> np.ndarray:
        """Var(Y(arm) | X = x)."""
        pass

    @abstractmethod
    def mean_propensity(self) -> float:
        """E[pi(X)], computed without sampling."""
        pass

    def reference_ate(self) -> float:
        """ATE used as ground truth when scoring replications."""
        return self.true_ate

    def sample_outcome(self, x: np.ndarray, a: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mean = np.where(a == 1, self.mean_outcome(x, 1), self.mean_outcome(x, 0))
        sd = np.sqrt(np.where(a == 1, self.outcome_variance(x, 1), self.outcome_variance(x, 0)))
        return mean + sd * rng.standard_normal(x.shape[0])

    def generate(self, n: int, seed: int = 0) -> Dataset:
        """Draw n records; identical (n, seed) give identical datasets."""
        if n < 1:
            raise ConfigError(f"generator needs n >= 1, got {n}")
        rng = make_rng(seed, STREAM_DATA)
        x = self.sample_covariates(n, rng)
        a = (rng.random(n) < self.propensity(x)).astype(float)
        y = self.sample_outcome(x, a, rng)
        logger.debug("generated %d records from %s (seed %d)", n, self.kind.value, seed)
        return Dataset(x, a, y)


class LowOverlapGenerator(SyntheticGenerator):
    """One covariate, propensities reaching 0.004 and 0.996."""

    kind = GeneratorKind.LOW_OVERLAP
    d = 1
    true_ate = 0.1
    clip = (0.004, 0.996)
    noise_variance = 0.01

    def _pi(self, linear: np.ndarray) -> np.ndarray:
        return np.clip(expit(-0.2 + 6.0 * linear), *self.clip)

    def propensity(self, x: np.ndarray) -> np.ndarray:
        return self._pi(x[:, 0])

    def mean_outcome(self, x: np.ndarray, arm: int) -> np.ndarray:
        return -0.05 + 0.225 * x[:, 0] + 0.1 * arm

    def outcome_variance(self, x: np.ndarray, arm: int) -> np.ndarray:
        return np.full(x.shape[0], self.noise_variance)

    def mean_propensity(self) -> float:
        return _gaussian_expectation(self._pi, 1.0)


class MisspecifiedTreesGenerator(SyntheticGenerator):
    """Two covariates with piecewise-constant propensity and baseline outcome."""

    kind = GeneratorKind.MISSPECIFIED_TREES
    d = 2
    true_ate = 0.2
    noise_variance = 0.025

    def propensity(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[:, 0], x[:, 1]
        return np.select(
            [(x1 > 0.1) & (x2 > 0), (x1 <= 0.1) & (x2 > 0), (x1 < -0.05) & (x2 <= 0)],
            [0.75, 0.6, 0.25],
            default=0.5,
        )

    def baseline(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[:, 0], x[:, 1]
        return np.select(
            [(x1 > 0) & (x2 > 0), (x1 > 0) & (x2 <= 0), (x1 <= 0) & (x2 > 0.05)],
            [-0.7, 0.1, -0.4],
            default=0.6,
        )

    def mean_outcome(self, x: np.ndarray, arm: int) -> np.ndarray:
        return self.baseline(x) + 0.2 * arm

    def outcome_variance(self, x: np.ndarray, arm: int) -> np.ndarray:
        return np.full(x.shape[0], self.noise_variance)

    def mean_propensity(self) -> float:
        upper, lower = norm.sf(0.0), norm.cdf(0.0)
        return float(
            0.75 * norm.sf(0.1) * upper
            + 0.6 * norm.cdf(0.1) * upper
            + 0.25 * norm.cdf(-0.05) * lower
            + 0.5 * norm.sf(-0.05) * lower
        )


class GoodOverlapBinaryGenerator(SyntheticGenerator):
    """Ten covariates, propensities in [0.1, 0.9], Bernoulli outcomes."""

    kind = GeneratorKind.GOOD_OVERLAP_BINARY
    d = 10
    true_ate = 0.1
    clip = (0.1, 0.9)

    def _pi(self, linear: np.ndarray) -> np.ndarray:
        return np.clip(expit(0.1 + linear), *self.clip)

    def propensity(self, x: np.ndarray) -> np.ndarray:
        return self._pi(x @ GOOD_OVERLAP_BETA_PI)

    def mean_outcome(self, x: np.ndarray, arm: int) -> np.ndarray:
        return expit(-0.05 + x @ GOOD_OVERLAP_BETA_MU + GOOD_OVERLAP_TREATMENT_COEF * arm)

    def outcome_variance(self, x: np.ndarray, arm: int) -> np.ndarray:
        mean = self.mean_outcome(x, arm)
        return mean * (1.0 - mean)

    def sample_outcome(self, x: np.ndarray, a: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mean = np.where(a == 1, self.mean_outcome(x, 1), self.mean_outcome(x, 0))
        return (rng.random(x.shape[0]) < mean).astype(float)

    def mean_propensity(self) -> float:
        return _gaussian_expectation(self._pi, float(np.linalg.norm(GOOD_OVERLAP_BETA_PI)))

    def integrated_ate(self) -> float:
        """E[mu1(X) - mu0(X)] by quadrature over the outcome index."""
        scale = float(np.linalg.norm(GOOD_OVERLAP_BETA_MU))
        return _gaussian_expectation(
            lambda z: expit(-0.05 + z + GOOD_OVERLAP_TREATMENT_COEF) - expit(-0.05 + z), scale
        )

    def reference_ate(self) -> float:
        # the nominal 0.1 is only approximate for this model
        return self.integrated_ate()


class EffectOfKGenerator(SyntheticGenerator):
    """Twenty covariates, linear outcome with a 0.15 treatment effect."""

    kind = GeneratorKind.EFFECT_OF_K
    d = 20
    true_ate = 0.15
    clip = (0.1, 0.9)
    noise_variance = 0.0025

    def _pi(self, linear: np.ndarray) -> np.ndarray:
        return np.clip(expit(0.1 + linear), *self.clip)

    def propensity(self, x: np.ndarray) -> np.ndarray:
        return self._pi(x @ EFFECT_OF_K_BETA_PI)

    def mean_outcome(self, x: np.ndarray, arm: int) -> np.ndarray:
        return -0.08 + x @ EFFECT_OF_K_BETA_Y + 0.15 * arm

    def outcome_variance(self, x: np.ndarray, arm: int) -> np.ndarray:
        return np.full(x.shape[0], self.noise_variance)

    def mean_propensity(self) -> float:
        return _gaussian_expectation(self._pi, float(np.linalg.norm(EFFECT_OF_K_BETA_PI)))


_GENERATORS: Dict[GeneratorKind, SyntheticGenerator] = {
    g.kind: g
    for g in (
        LowOverlapGenerator(),
        MisspecifiedTreesGenerator(),
        GoodOverlapBinaryGenerator(),
        EffectOfKGenerator(),
    )
}


def get_generator(kind: Union[str, GeneratorKind]) -> SyntheticGenerator:
    """Look up a generator by kind or name."""
    if not isinstance(kind, GeneratorKind):
        try:
            kind = GeneratorKind(kind)
        except ValueError:
            names = ", ".join(k.value for k in GeneratorKind)
            raise ConfigError(f"unknown generator '{kind}'; available: {names}") from None
    return _GENERATORS[kind]


def generate(spec: GeneratorSpec) -> Dataset:
    return get_generator(spec.kind).generate(spec.n, spec.seed)


def gen_low_overlap(n: int, seed: int = 0) -> Dataset:
    return _GENERATORS[GeneratorKind.LOW_OVERLAP].generate(n, seed)


def gen_misspecified(n: int, seed: int = 0) -> Dataset:
    return _GENERATORS[GeneratorKind.MISSPECIFIED_TREES].generate(n, seed)


def gen_good_overlap_binary(n: int, seed: int = 0) -> Dataset:
    return _GENERATORS[GeneratorKind.GOOD_OVERLAP_BINARY].generate(n, seed)


def gen_effect_of_k(n: int, seed: int = 0) -> Dataset:
    return _GENERATORS[GeneratorKind.EFFECT_OF_K].generate(n, seed)
