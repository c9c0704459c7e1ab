"""Gaussian differential privacy accounting.

Covers the Gaussian mechanism, per-estimator noise calibration, the
sensitivity tables of the fold-ensemble estimators, composition of GDP
releases and conversion from mu-GDP to (epsilon, delta)-DP.
"""

import logging
import math
from typing import Dict, Iterable, Optional, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import log_ndtr

from ..utils.seeding import SeedLike, as_rng
from .exceptions import ConfigError, NonPrivateModeError, PrivacyContractError
from .models import (
    AggregationScheme,
    Bounds,
    EstimatorConstant,
    EstimatorKind,
    NoiseCalibration,
    PrivacyBudget,
    SensitivityPair,
)

logger = logging.getLogger(__name__)

BudgetLike = Union[PrivacyBudget, float]
Numeric = Union[float, np.ndarray]

DEFAULT_DELTA = 1e-5


def _mu(budget: BudgetLike) -> float:
    if isinstance(budget, PrivacyBudget):
        return budget.mu
    return PrivacyBudget(float(budget)).mu


def _require_private(mu: float) -> None:
    if mu == 0:
        raise NonPrivateModeError("mu = 0 gives no guarantee; use non-private mode")


def _check_folds(n: int, k: int, min_n: int = 1) -> None:
    if k < 2:
        raise ConfigError(f"noise calibration needs k >= 2, got k={k}")
    if n < min_n:
        raise ConfigError(f"noise calibration needs n >= {min_n}, got n={n}")


def estimator_constant(kind: EstimatorKind, bounds: Bounds) -> EstimatorConstant:
    """Closed-form constant C for the G-Formula, IPW and AIPW releases."""
    b_mu, b_pi = bounds.b_mu, bounds.b_pi
    if kind is EstimatorKind.G:
        return EstimatorConstant(16.0 * b_mu**2)
    if kind is EstimatorKind.IPW:
        return EstimatorConstant(4.0 * b_mu**2 * b_pi**2)
    return EstimatorConstant(16.0 * b_mu**2 * (1.0 + b_pi) ** 2)


def score_bound(kind: EstimatorKind, bounds: Bounds) -> float:
    """Uniform bound M on |Gamma_i| for clipped nuisances."""
    b_mu, b_pi = bounds.b_mu, bounds.b_pi
    if kind is EstimatorKind.G:
        return 2.0 * b_mu
    if kind is EstimatorKind.IPW:
        return b_mu * b_pi
    return 2.0 * b_mu * (1.0 + b_pi)


def sigma1_squared(c: EstimatorConstant, mu1: BudgetLike, n: int, k: int) -> float:
    """Noise variance for the ATE release: (C / mu1^2) (1/n + 1/(K-1))^2."""
    mu = _mu(mu1)
    _require_private(mu)
    _check_folds(n, k)
    return c.c / mu**2 * (1.0 / n + 1.0 / (k - 1)) ** 2


def sigma2_squared(c: EstimatorConstant, mu2: BudgetLike, n: int, k: int) -> float:
    """Noise variance for the standard-deviation release."""
    mu = _mu(mu2)
    _require_private(mu)
    _check_folds(n, k, min_n=2)
    u = 1.0 / n + 1.0 / (k - 1)
    return 2.0 * c.c * n / (mu**2 * (n - 1)) * (u + math.sqrt(u)) ** 2


def sensitivity_pair(
    kind: EstimatorKind,
    bounds: Bounds,
    k: int,
    scheme: AggregationScheme = AggregationScheme.COMPLETE_MEANS,
    n: Optional[int] = None,
    sampling_map: Optional[np.ndarray] = None,
) -> SensitivityPair:
    """Same-fold and cross-fold sensitivities of the built-in estimators.

    The sampling aggregator's cross-fold term scales with the largest number of
    records that borrow their nuisances from a single fold.
    """
    if k < 2:
        raise ConfigError(f"sensitivity tables need k >= 2, got k={k}")
    b_mu, b_pi = bounds.b_mu, bounds.b_pi
    m = score_bound(kind, bounds)

    if scheme is AggregationScheme.COMPLETE_MEANS:
        ratio = k / (k - 1)
        if kind is EstimatorKind.G:
            return SensitivityPair(4.0 * b_mu, 4.0 * b_mu * ratio, m)
        if kind is EstimatorKind.IPW:
            return SensitivityPair(2.0 * b_mu * b_pi, b_mu * b_pi * ratio, m)
        return SensitivityPair(4.0 * b_mu * (1.0 + b_pi), 4.0 * b_mu * ratio * (1.0 + b_pi), m)

    if sampling_map is None or n is None:
        raise ConfigError("the sampling aggregator needs n and the realised sampling map")
    largest = int(np.bincount(np.asarray(sampling_map, dtype=int), minlength=k).max())
    ratio = k * largest / n
    if kind is EstimatorKind.G:
        return SensitivityPair(4.0 * b_mu, 4.0 * b_mu * ratio, m)
    if kind is EstimatorKind.IPW:
        return SensitivityPair(2.0 * b_mu * b_pi, b_mu * b_pi * ratio, m)
    return SensitivityPair(2.0 * b_mu * (2.0 + b_pi), (4.0 * b_mu + 3.0 * b_mu * b_pi) * ratio, m)


def unified_sensitivity(s: SensitivityPair, n: int, k: int) -> float:
    """Sensitivity of the mean score: delta_eq / n + delta_neq / K."""
    if n < 1 or k < 1:
        raise ConfigError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    return s.delta_eq / n + s.delta_neq / k


def sqrt_variance_sensitivity(s: SensitivityPair, n: int, k: int) -> float:
    """Sensitivity of the score standard deviation sqrt(V_hat)."""
    if n < 2:
        raise ConfigError(f"variance sensitivity needs n >= 2, got n={n}")
    u = unified_sensitivity(s, n, k)
    return math.sqrt(2.0 * n / (n - 1)) * (u + 2.0 * math.sqrt(s.score_bound * u))


def calibrate_from_sensitivity(
    s: SensitivityPair, mu1: BudgetLike, mu2: BudgetLike, n: int, k: int
) -> NoiseCalibration:
    """Gaussian mechanism calibration from a user-supplied sensitivity pair."""
    m1, m2 = _mu(mu1), _mu(mu2)
    _require_private(m1)
    _require_private(m2)
    ate_sensitivity = unified_sensitivity(s, n, k)
    sd_sensitivity = sqrt_variance_sensitivity(s, n, k)
    return NoiseCalibration(
        sigma1_sq=(ate_sensitivity / m1) ** 2,
        sigma2_sq=(sd_sensitivity / m2) ** 2,
        sensitivity=ate_sensitivity,
    )


def calibrate_noise(
    kind: EstimatorKind,
    bounds: Bounds,
    n: int,
    k: int,
    mu1: BudgetLike,
    mu2: BudgetLike,
    scheme: AggregationScheme = AggregationScheme.COMPLETE_MEANS,
    sampling_map: Optional[np.ndarray] = None,
) -> NoiseCalibration:
    """Noise variances for one ATE + variance release.

    Complete means use the closed forms in C; the sampling aggregator goes through
    its realised sensitivity pair.
    """
    if scheme is AggregationScheme.COMPLETE_MEANS:
        c = estimator_constant(kind, bounds)
        return NoiseCalibration(
            sigma1_sq=sigma1_squared(c, mu1, n, k),
            sigma2_sq=sigma2_squared(c, mu2, n, k),
            sensitivity=math.sqrt(c.c) * (1.0 / n + 1.0 / (k - 1)),
            constant=c.c,
        )
    pair = sensitivity_pair(kind, bounds, k, scheme, n=n, sampling_map=sampling_map)
    return calibrate_from_sensitivity(pair, mu1, mu2, n, k)


def add_gaussian_noise(value: Numeric, variance: float, seed: SeedLike) -> Numeric:
    """Gaussian mechanism: value + N(0, variance), reproducible for a fixed seed.

    Array values receive one independent draw per entry. Zero variance returns the
    value unchanged.
    """
    if not np.isfinite(variance) or variance < 0:
        raise PrivacyContractError(f"noise variance must be nonnegative, got {variance}")
    if variance == 0:
        return value
    rng = as_rng(seed)
    scale = math.sqrt(variance)
    if np.ndim(value) == 0:
        return float(value) + float(rng.normal(0.0, scale))
    array = np.asarray(value, dtype=float)
    return array + rng.normal(0.0, scale, size=array.shape)


def compose(budgets: Iterable[BudgetLike]) -> PrivacyBudget:
    """Compose GDP releases: sqrt(sum mu_j^2)."""
    return PrivacyBudget(math.hypot(*(_mu(b) for b in budgets)))


def gdp_to_approx_dp(mu: BudgetLike, epsilon: float) -> float:
    """Smallest delta such that mu-GDP implies (epsilon, delta)-DP.

    delta = Phi(-eps/mu + mu/2) - exp(eps) Phi(-eps/mu - mu/2), with the second term
    evaluated in log space so the difference stays accurate at large epsilon.
    """
    m = _mu(mu)
    _require_private(m)
    if epsilon < 0:
        raise ConfigError(f"epsilon must be nonnegative, got {epsilon}")
    log_first = float(log_ndtr(-epsilon / m + m / 2.0))
    log_second = epsilon + float(log_ndtr(-epsilon / m - m / 2.0))
    delta = math.exp(log_first) * -math.expm1(min(log_second - log_first, 0.0))
    return min(max(delta, 0.0), 1.0)


def epsilon_at_delta(mu: BudgetLike, delta: float = DEFAULT_DELTA) -> float:
    """Smallest epsilon with gdp_to_approx_dp(mu, epsilon) <= delta."""
    m = _mu(mu)
    _require_private(m)
    if not 0 < delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    if gdp_to_approx_dp(m, 0.0) <= delta:
        return 0.0

    upper = max(1.0, m * m)
    while gdp_to_approx_dp(m, upper) > delta:
        upper *= 2.0
    return float(brentq(lambda eps: gdp_to_approx_dp(m, eps) - delta, 0.0, upper, xtol=1e-12))


def mu_at_epsilon_delta(epsilon: float, delta: float) -> float:
    """Largest mu whose GDP guarantee implies (epsilon, delta)-DP."""
    if epsilon < 0:
        raise ConfigError(f"epsilon must be nonnegative, got {epsilon}")
    if not 0 < delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")

    lower, upper = 1e-12, 1.0
    while gdp_to_approx_dp(upper, epsilon) < delta:
        lower, upper = upper, upper * 2.0
    return float(
        brentq(lambda m: gdp_to_approx_dp(m, epsilon) - delta, lower, upper, xtol=1e-12)
    )


def split_budget(mu_total: float, with_interval: bool = False) -> Dict[str, float]:
    """Default split of a total budget across releases.

    ATE and variance get mu/sqrt(2) each. With a fold-based interval (two releases)
    every component gets mu/2, so that mu_ate^2 + mu_var^2 + 2 mu_ci^2 = mu_total^2.
    """
    total = PrivacyBudget(mu_total).mu
    if with_interval:
        share = total / 2.0
        return {"mu_ate": share, "mu_var": share, "mu_ci": share}
    share = total / math.sqrt(2.0)
    return {"mu_ate": share, "mu_var": share}


def budget_report(components: Dict[str, float], delta: float = DEFAULT_DELTA) -> Dict[str, object]:
    """Budget report: total mu, per-release components and epsilon at the given delta."""
    mus = [components.get("mu_ate", 0.0), components.get("mu_var", 0.0)]
    if "mu_ci" in components:
        mus += [components["mu_ci"], components["mu_ci"]]
    total = compose(mus)
    report: Dict[str, object] = {"mu_total": total.mu}
    report.update(components)
    report["delta"] = delta
    report["epsilon_at_delta"] = epsilon_at_delta(total, delta) if total.is_private else None
    return report
