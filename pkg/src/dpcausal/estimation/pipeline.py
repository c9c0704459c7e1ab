"""End-to-end private ATE release.

validate -> clip -> split -> fit -> aggregate -> score -> release -> interval
"""

import logging
from typing import Dict, List, Optional

import numpy as np

from ..core.dataset import clip_outcomes, split_folds, validate
from ..core.exceptions import PrivacyContractError
from ..core.models import (
    CIMethod,
    Dataset,
    EstimationSettings,
    EstimatorKind,
    NoiseCalibration,
    PrivateEstimate,
)
from ..core.privacy import (
    calibrate_noise,
    compose,
    estimator_constant,
    sigma1_squared,
    split_budget,
)
from ..utils.seeding import (
    RELEASE_ATE,
    RELEASE_VARIANCE,
    STREAM_FOLDS,
    STREAM_NOISE,
    derive_seed,
    make_rng,
)
from .aggregate import build_aggregated
from .estimators import asymptotic_ci, compute_scores, private_ate, private_variance
from .intervals import (
    bootstrap_bounds,
    fit_cate_models,
    pointwise_variance_bounds,
    private_interval,
)
from .nuisance import fit_ensemble

logger = logging.getLogger(__name__)

FOLD_BASED = (CIMethod.BOOTSTRAP, CIMethod.POINTWISE)


class DPATEPipeline:
    """Runs one private ATE release for fixed settings and seed.

    Every random step draws from its own stream keyed by the run seed, so the same
    dataset, settings and seed reproduce the same estimate.
    """

    def __init__(self, settings: Optional[EstimationSettings] = None, seed: int = 0):
        self.settings = settings or EstimationSettings()
        self.seed = int(seed)

    def budget_components(self) -> Dict[str, float]:
        """Per-release GDP parameters; all zero in non-private mode."""
        s = self.settings
        with_interval = s.ci_method in FOLD_BASED
        if s.non_private:
            components = {"mu_ate": 0.0, "mu_var": 0.0}
            if with_interval:
                components["mu_ci"] = 0.0
            return components
        if s.mu_total <= 0 and (s.mu_ate is None or s.mu_var is None):
            raise PrivacyContractError(
                "privacy budget is 0; refusing to release without the non-private flag"
            )
        components = split_budget(max(s.mu_total, 0.0), with_interval)
        if s.mu_ate is not None:
            components["mu_ate"] = s.mu_ate
        if s.mu_var is not None:
            components["mu_var"] = s.mu_var
        return components

    def _calibrate(
        self, n: int, sampling_map: Optional[np.ndarray], components: Dict[str, float]
    ) -> NoiseCalibration:
        s = self.settings
        if s.non_private:
            return NoiseCalibration(0.0, 0.0)
        return calibrate_noise(
            s.kind,
            s.bounds,
            n,
            s.k,
            components["mu_ate"],
            components["mu_var"],
            s.scheme,
            sampling_map,
        )

    def run(self, dataset: Dataset) -> PrivateEstimate:
        s = self.settings
        warnings: List[str] = []
        components = self.budget_components()

        # diagnostics depend on individual records; only non-private runs report them
        report = validate(dataset, s.bounds)
        for message in report.messages:
            logger.warning(message)
        diagnostics = list(report.messages)
        data = clip_outcomes(dataset, s.bounds) if report.n_requiring_clipping else dataset
        n = data.n

        folds = split_folds(n, s.k, derive_seed(self.seed, STREAM_FOLDS))
        ensemble = fit_ensemble(
            data, folds, s.learner_pi, s.learner_mu, s.bounds, self.seed, n_jobs=s.n_jobs
        )
        diagnostics.extend(ensemble.warnings)
        if s.non_private:
            warnings.extend(diagnostics)
        matrix = ensemble.predict_matrix(data.covariates)
        agg = build_aggregated(matrix, folds, s.scheme, seed=self.seed)
        scores = compute_scores(data, agg, s.kind)

        calibration = self._calibrate(n, agg.sampling_map, components)
        tau_dp, tau_hat = private_ate(
            scores, calibration.sigma1_sq, make_rng(self.seed, STREAM_NOISE, RELEASE_ATE)
        )
        v_dp = private_variance(
            scores,
            tau_hat,
            calibration.sigma1_sq,
            calibration.sigma2_sq,
            make_rng(self.seed, STREAM_NOISE, RELEASE_VARIANCE),
        )

        ci = None
        if s.ci_method is CIMethod.ASYMPTOTIC:
            ci = asymptotic_ci(tau_dp, v_dp, n, s.alpha, s.alpha1, calibration.sigma2_sq)
        elif s.ci_method in FOLD_BASED:
            if s.ci_method is CIMethod.BOOTSTRAP:
                bound_scores = bootstrap_bounds(
                    data,
                    folds,
                    s.learner_mu,
                    s.bounds,
                    s.bootstrap_reps,
                    s.alpha,
                    self.seed,
                    n_jobs=s.n_jobs,
                    warnings=warnings,
                )
            else:
                models = fit_cate_models(
                    data, folds, s.learner_mu, s.bounds, self.seed, n_jobs=s.n_jobs
                )
                bound_scores = pointwise_variance_bounds(
                    data, folds, models, s.alpha, s.bounds.b_mu
                )
            sigma_ci = 0.0
            if not s.non_private:
                g_constant = estimator_constant(EstimatorKind.G, s.bounds)
                sigma_ci = sigma1_squared(g_constant, components["mu_ci"], n, s.k)
            ci = private_interval(
                bound_scores, sigma_ci, s.beta, s.bounds.b_mu, n, self.seed, warnings=warnings
            )

        releases = [components["mu_ate"], components["mu_var"]]
        if "mu_ci" in components:
            releases += [components["mu_ci"], components["mu_ci"]]

        logger.info("released %s estimate on n=%d with K=%d", s.kind.value, n, s.k)
        return PrivateEstimate(
            kind=s.kind,
            tau_dp=tau_dp,
            v_dp=v_dp,
            n=n,
            k=s.k,
            budget=compose(releases),
            components=components,
            ci=ci,
            ci_method=s.ci_method,
            sigma1_sq=calibration.sigma1_sq,
            sigma2_sq=calibration.sigma2_sq,
            seed=self.seed,
            non_private=s.non_private,
            tau_nonprivate=tau_hat if s.non_private else None,
            warnings=warnings,
        )


def estimate_ate(
    dataset: Dataset, settings: Optional[EstimationSettings] = None, seed: int = 0
) -> PrivateEstimate:
    """Convenience wrapper around DPATEPipeline."""
    return DPATEPipeline(settings, seed).run(dataset)
