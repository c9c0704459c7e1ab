"""G-Formula, IPW and AIPW scores and their private releases."""

import logging
import math
from typing import TYPE_CHECKING, Tuple, Union

import numpy as np
from scipy.stats import norm

from ..core.exceptions import ConfigError, EstimationError
from ..core.models import AggregatedNuisance, Dataset, EstimatorKind, GeneratorSpec, ScoreVector
from ..core.privacy import add_gaussian_noise
from ..utils.seeding import SeedLike, make_rng

if TYPE_CHECKING:
    from ..experiments.generators import SyntheticGenerator

logger = logging.getLogger(__name__)


def compute_scores(data: Dataset, agg: AggregatedNuisance, kind: EstimatorKind) -> ScoreVector:
    """Per-record scores whose mean is the ATE estimate."""
    if agg.mu1.shape[0] != data.n:
        raise EstimationError(
            f"aggregated nuisances cover {agg.mu1.shape[0]} rows, data has {data.n}"
        )
    a, y = data.treatment, data.outcome
    plug_in = agg.mu1 - agg.mu0

    if kind is EstimatorKind.G:
        scores = plug_in
    elif kind is EstimatorKind.IPW:
        scores = a * y / agg.pi1 - (1.0 - a) * y / agg.one_minus_pi0
    else:
        scores = (
            plug_in
            + a * (y - agg.mu1) / agg.pi1
            - (1.0 - a) * (y - agg.mu0) / agg.one_minus_pi0
        )
    scores = np.array(scores, dtype=float)
    scores.setflags(write=False)
    return ScoreVector(scores, kind)


def private_ate(scores: ScoreVector, sigma1_sq: float, seed: SeedLike) -> Tuple[float, float]:
    """Release mean(scores) + N(0, sigma1^2); also returns the non-private mean."""
    if scores.n == 0:
        raise EstimationError("cannot release the mean of zero scores")
    tau_hat = float(np.mean(scores.scores))
    return float(add_gaussian_noise(tau_hat, sigma1_sq, seed)), tau_hat


def sample_variance(scores: ScoreVector, tau_hat: float) -> float:
    """(1/(n-1)) sum (Gamma_i - tau_hat)^2."""
    if scores.n < 2:
        raise EstimationError(f"variance release needs n >= 2, got {scores.n}")
    return float(np.sum((scores.scores - tau_hat) ** 2) / (scores.n - 1))


def private_variance(
    scores: ScoreVector, tau_hat: float, sigma1_sq: float, sigma2_sq: float, seed: SeedLike
) -> float:
    """Release (sqrt(V_hat) + N(0, sigma2^2))^2 + n sigma1^2.

    The result estimates the variance of sqrt(n) (tau_dp - tau), so Var(tau_dp) is
    about v_dp / n.
    """
    v_hat = sample_variance(scores, tau_hat)
    floor = scores.n * sigma1_sq
    if sigma2_sq == 0:
        return v_hat + floor
    noisy_sd = float(add_gaussian_noise(math.sqrt(v_hat), sigma2_sq, seed))
    return noisy_sd**2 + floor


def asymptotic_ci(
    tau_dp: float, v_dp: float, n: int, alpha: float, alpha1: float, sigma2_sq: float
) -> Tuple[float, float]:
    """Private asymptotic interval centred at tau_dp.

    Half-width is Phi^-1(1 - alpha/2 + alpha1/2) sqrt((v_dp + Phi^-1(1 - alpha1/2) sigma2^2) / n);
    alpha1 is the share of the miscoverage spent on the noisy standard deviation.
    """
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 < alpha1 < alpha:
        raise ConfigError(f"alpha1 must lie in (0, alpha), got alpha1={alpha1}, alpha={alpha}")
    if n < 1:
        raise ConfigError(f"n must be positive, got {n}")
    inflated = max(v_dp + float(norm.ppf(1.0 - alpha1 / 2.0)) * sigma2_sq, 0.0)
    half_width = float(norm.ppf(1.0 - alpha / 2.0 + alpha1 / 2.0)) * math.sqrt(inflated / n)
    return tau_dp - half_width, tau_dp + half_width


def oracle_variance_reference(
    kind: EstimatorKind,
    generator: Union[GeneratorSpec, "SyntheticGenerator"],
    n_draws: int = 1_000_000,
    seed: int = 0,
) -> float:
    """Monte-Carlo value of the asymptotic variance V* of the chosen score.

    Uses the generator's known propensity, arm means and conditional outcome
    variances; intended as a reference for acceptance checks only.
    """
    if isinstance(generator, GeneratorSpec):
        from ..experiments.generators import get_generator

        generator = get_generator(generator.kind)

    x = generator.sample_covariates(n_draws, make_rng(seed))
    pi = generator.propensity(x)
    mu0, mu1 = generator.mean_outcome(x, 0), generator.mean_outcome(x, 1)
    var0, var1 = generator.outcome_variance(x, 0), generator.outcome_variance(x, 1)
    effect = mu1 - mu0

    if kind is EstimatorKind.G:
        value = float(np.var(effect))
    elif kind is EstimatorKind.IPW:
        second_moment = (mu1**2 + var1) / pi + (mu0**2 + var0) / (1.0 - pi)
        value = float(np.mean(second_moment) - np.mean(effect) ** 2)
    else:
        value = float(np.mean(var1 / pi + var0 / (1.0 - pi)) + np.var(effect))
    return max(value, 0.0)
