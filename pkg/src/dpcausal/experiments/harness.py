"""Monte-Carlo replication harness and parameter sweeps."""

import csv
import dataclasses
import itertools
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from ..core.dataset import split_folds
from ..core.exceptions import ConfigError, DataError
from ..core.models import (
    EstimationSettings,
    EstimatorKind,
    GeneratorSpec,
    ReplicationRow,
    ReplicationSummary,
    ReplicationTable,
)
from ..estimation.pipeline import estimate_ate
from ..utils.seeding import STREAM_FOLDS, STREAM_REPLICATION, derive_seed
from .baseline import private_subsample_aggregate
from .generators import get_generator

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

REPLICATION_COLUMNS = ["rep", "tau_dp", "v_dp", "ci_lo", "ci_hi", "covered", "seed"]
SUMMARY_COLUMNS = ["reps", "true_ate", "mean", "sd", "bias", "rmse", "coverage", "mean_v_dp"]
GRID_KEYS = ("k", "mu", "n", "estimator")


def _replicate(
    generator_spec: GeneratorSpec,
    settings: EstimationSettings,
    rep: int,
    seed: int,
    baseline: bool,
    true_ate: float,
) -> ReplicationRow:
    # datasets follow the generator seed; everything downstream follows the run seed
    data_seed = derive_seed(generator_spec.seed, STREAM_REPLICATION, rep)
    data = get_generator(generator_spec.kind).generate(generator_spec.n, data_seed)
    rep_seed = derive_seed(seed, STREAM_REPLICATION, rep)

    if baseline:
        folds = split_folds(data.n, settings.k, derive_seed(rep_seed, STREAM_FOLDS))
        mu = 0.0 if settings.non_private else settings.mu_total
        tau_dp, _ = private_subsample_aggregate(
            data,
            folds,
            settings.learner_pi,
            settings.learner_mu,
            settings.bounds,
            settings.kind,
            mu,
            rep_seed,
        )
        return ReplicationRow(rep, tau_dp, math.nan, math.nan, math.nan, False, rep_seed)

    estimate = estimate_ate(data, dataclasses.replace(settings, n_jobs=1), rep_seed)
    lo, hi = estimate.ci if estimate.ci is not None else (math.nan, math.nan)
    covered = bool(lo <= true_ate <= hi)
    return ReplicationRow(rep, estimate.tau_dp, estimate.v_dp, lo, hi, covered, rep_seed)


def summarize(rows: Sequence[ReplicationRow], true_ate: float) -> ReplicationSummary:
    """Mean, standard deviation, bias, RMSE and coverage over replications."""
    taus = np.array([r.tau_dp for r in rows], dtype=float)
    with_ci = [r for r in rows if not math.isnan(r.ci_lo)]
    v_dps = np.array([r.v_dp for r in rows if not math.isnan(r.v_dp)], dtype=float)
    return ReplicationSummary(
        reps=len(rows),
        true_ate=true_ate,
        mean=float(np.mean(taus)),
        sd=float(np.std(taus, ddof=1)) if len(rows) > 1 else 0.0,
        bias=float(np.mean(taus) - true_ate),
        rmse=float(np.sqrt(np.mean((taus - true_ate) ** 2))),
        coverage=float(np.mean([r.covered for r in with_ci])) if with_ci else math.nan,
        mean_v_dp=float(np.mean(v_dps)) if v_dps.size else math.nan,
    )


def run_replications(
    generator_spec: GeneratorSpec,
    settings: EstimationSettings,
    reps: int,
    seed: int = 0,
    baseline: bool = False,
    n_jobs: int = 1,
    label: str = "",
) -> ReplicationTable:
    """Independent dataset, folds, fits and noise for every replication.

    Replication datasets are drawn from ``generator_spec.seed``; the run ``seed``
    drives the pipeline on top of them.

    With ``baseline`` the subsample-and-aggregate estimator replaces the
    cross-fold pipeline.
    """
    if reps < 1:
        raise ConfigError(f"reps must be at least 1, got {reps}")
    generator = get_generator(generator_spec.kind)
    true_ate = generator.reference_ate()

    logger.info(
        "running %d replications of %s (n=%d, K=%d)",
        reps,
        generator_spec.kind.value,
        generator_spec.n,
        settings.k,
    )
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_replicate)(generator_spec, settings, rep, seed, baseline, true_ate)
        for rep in range(reps)
    )
    return ReplicationTable(list(rows), summarize(rows, true_ate), label)


def expand_grid(grid: Dict[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """Cartesian product of the grid dimensions, in key order k, mu, n, estimator."""
    unknown = set(grid) - set(GRID_KEYS)
    if unknown:
        raise ConfigError(f"unknown grid dimensions: {', '.join(sorted(unknown))}")
    if not grid:
        raise ConfigError("sweep grid has no dimensions")
    keys = [key for key in GRID_KEYS if key in grid]
    for key in keys:
        if len(grid[key]) == 0:
            raise ConfigError(f"sweep grid dimension '{key}' is empty")
    return [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]


def _cell_settings(
    base: EstimationSettings, generator_spec: GeneratorSpec, cell: Dict[str, Any]
) -> Tuple[EstimationSettings, GeneratorSpec]:
    settings, spec = base, generator_spec
    if "k" in cell:
        settings = dataclasses.replace(settings, k=int(cell["k"]))
    if "mu" in cell:
        mu = float(cell["mu"])
        settings = dataclasses.replace(
            settings, mu_total=mu, mu_ate=None, mu_var=None, non_private=mu == 0
        )
    if "estimator" in cell:
        settings = dataclasses.replace(settings, kind=EstimatorKind(cell["estimator"]))
    if "n" in cell:
        spec = dataclasses.replace(spec, n=int(cell["n"]))
    return settings, spec


def run_sweep(
    generator_spec: GeneratorSpec,
    settings: EstimationSettings,
    grid: Dict[str, Sequence[Any]],
    reps: int,
    seed: int = 0,
    baseline: bool = False,
    n_jobs: int = 1,
) -> List[Tuple[Dict[str, Any], ReplicationTable]]:
    """One replication table per grid cell; mu = 0 cells run in non-private mode."""
    results = []
    for cell in expand_grid(grid):
        cell_settings, cell_spec = _cell_settings(settings, generator_spec, cell)
        label = ",".join(f"{key}={value}" for key, value in cell.items())
        table = run_replications(
            cell_spec, cell_settings, reps, seed, baseline=baseline, n_jobs=n_jobs, label=label
        )
        results.append((cell, table))
    return results


def _format(value: object) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_replication_csv(table: ReplicationTable, path: PathLike) -> None:
    """Per-replication rows with the fixed column order rep, tau_dp, v_dp, ci_lo, ci_hi,
    covered, seed."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(REPLICATION_COLUMNS)
            for row in table.rows:
                writer.writerow([_format(getattr(row, c)) for c in REPLICATION_COLUMNS])
    except OSError as e:
        raise DataError(f"Error writing {path}: {e}") from e


def write_summary_csv(
    results: Sequence[Tuple[Dict[str, Any], ReplicationTable]],
    path: PathLike,
    cell_keys: Optional[Sequence[str]] = None,
) -> None:
    """One summary row per sweep cell."""
    if cell_keys is None:
        cell_keys = [k for k in GRID_KEYS if results and k in results[0][0]]
    keys = list(cell_keys)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(keys + SUMMARY_COLUMNS)
            for cell, table in results:
                summary = table.summary
                writer.writerow(
                    [_format(cell.get(k, "")) for k in keys]
                    + [_format(getattr(summary, c)) for c in SUMMARY_COLUMNS]
                )
    except OSError as e:
        raise DataError(f"Error writing {path}: {e}") from e


def generator_spec_for(name: str, n: int, seed: int = 0) -> GeneratorSpec:
    """GeneratorSpec from a generator name, validating the name."""
    return GeneratorSpec(get_generator(name).kind, n, seed)
