"""Meta-analysis of independently released private ATE estimates.

Combining released values is post-processing: no raw data is touched and no
privacy budget is consumed.
"""

import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from ..core.exceptions import DataError, EstimationError
from ..core.models import MetaResult, PrivacyBudget, StudyRecord

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _scaled_variances(studies: Sequence[StudyRecord]) -> np.ndarray:
    v = np.array([s.v_dp for s in studies], dtype=float)
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise DataError("every study needs a positive released variance v_dp")
    return v / np.array([s.n for s in studies], dtype=float)


def optimal_weights(studies: Sequence[StudyRecord], inverse_variance: bool = False) -> np.ndarray:
    """Simplex weights proportional to (V_j/n_j)^(-1/2).

    With ``inverse_variance`` the classical (V_j/n_j)^(-1) weights are returned
    instead; those minimise sum lambda_j^2 V_j/n_j over the simplex.
    """
    if len(studies) < 2:
        raise EstimationError(f"meta-analysis needs at least 2 studies, got {len(studies)}")
    scaled = _scaled_variances(studies)
    raw = 1.0 / scaled if inverse_variance else scaled**-0.5
    return raw / raw.sum()


def meta_combine(
    studies: Sequence[StudyRecord],
    weights: Optional[Sequence[float]] = None,
    inverse_variance: bool = False,
) -> MetaResult:
    """Weighted combination: tau = sum lambda_j tau_j, variance sum lambda_j^2 V_j/n_j."""
    if weights is None:
        lam = optimal_weights(studies, inverse_variance)
    else:
        lam = np.asarray(weights, dtype=float)
    if lam.shape != (len(studies),):
        raise EstimationError(f"{lam.size} weights for {len(studies)} studies")
    if np.any(lam < 0) or not np.isclose(lam.sum(), 1.0, rtol=0.0, atol=1e-9):
        raise EstimationError("weights must be nonnegative and sum to 1")

    scaled = _scaled_variances(studies)
    taus = np.array([s.tau_dp for s in studies], dtype=float)
    return MetaResult(
        tau_meta=float(np.dot(lam, taus)),
        v_meta_over_n=float(np.sum(lam**2 * scaled)),
        weights=tuple(float(w) for w in lam),
        n_total=int(sum(s.n for s in studies)),
        inverse_variance=inverse_variance and weights is None,
    )


def expand_report_paths(paths: Iterable[PathLike]) -> List[Path]:
    """Report files named directly, plus every *.json inside named directories."""
    files: List[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.glob("*.json")))
        elif path.exists():
            files.append(path)
        else:
            raise DataError(f"Study report not found: {path}")
    return files


def study_from_report(report: dict, source: str = "<report>") -> StudyRecord:
    """StudyRecord from an estimate report dictionary."""
    try:
        return StudyRecord(
            tau_dp=float(report["tau_dp"]),
            v_dp=float(report["v_dp"]),
            n=int(report["n"]),
            budget=PrivacyBudget(float(report.get("mu_total", 0.0))),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{source}: not an estimate report ({e})") from e


def load_study_records(paths: Iterable[PathLike]) -> List[StudyRecord]:
    """Read estimate-report JSON files; directories contribute every *.json inside."""
    records = []
    for path in expand_report_paths(paths):
        try:
            with open(path, encoding="utf-8") as f:
                report = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise DataError(f"Error reading {path}: {e}") from e
        if not isinstance(report, dict):
            raise DataError(f"{path}: expected a JSON object")
        records.append(study_from_report(report, str(path)))
    logger.debug("loaded %d study records", len(records))
    return records
