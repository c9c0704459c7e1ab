"""Dataset validation, outcome clipping, fold partitioning and file ingestion."""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from ..utils.seeding import make_rng
from .exceptions import DataError, DatasetValidationError, InvalidFoldCountError
from .models import Bounds, Dataset, FoldAssignment, ValidationReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def validate(dataset: Dataset, bounds: Bounds, clip_policy: bool = True) -> ValidationReport:
    """Check the dataset against the estimation contract.

    Non-binary treatments and non-finite entries are hard errors. Outcomes outside
    [-B_mu, B_mu] are counted; with ``clip_policy`` they will be clipped at ingestion
    and the report still passes.
    """
    n_non_finite = int(
        np.count_nonzero(~np.isfinite(dataset.covariates))
        + np.count_nonzero(~np.isfinite(dataset.treatment))
        + np.count_nonzero(~np.isfinite(dataset.outcome))
    )
    if n_non_finite:
        raise DatasetValidationError(f"{n_non_finite} NaN/infinite entries in dataset")

    n_non_binary = int(np.count_nonzero((dataset.treatment != 0) & (dataset.treatment != 1)))
    if n_non_binary:
        raise DatasetValidationError(f"non-binary treatment in {n_non_binary} rows")

    if dataset.n < 2:
        raise DatasetValidationError(f"dataset needs at least 2 rows, got {dataset.n}")

    n_clip = int(np.count_nonzero(np.abs(dataset.outcome) > bounds.b_mu))
    messages = []
    if n_clip:
        noun = "outcome requires" if n_clip == 1 else "outcomes require"
        messages.append(f"{n_clip} {noun} clipping")

    return ValidationReport(
        n=dataset.n,
        n_requiring_clipping=n_clip,
        n_non_binary=n_non_binary,
        n_non_finite=n_non_finite,
        passed=clip_policy or n_clip == 0,
        messages=messages,
    )


def clip_outcomes(dataset: Dataset, bounds: Bounds) -> Dataset:
    """Project every outcome onto [-B_mu, B_mu]."""
    return dataset.with_outcome(np.clip(dataset.outcome, -bounds.b_mu, bounds.b_mu))


def split_folds(n: int, k: int, seed: int) -> FoldAssignment:
    """Seeded uniform partition of 0..n-1 into k folds of near-equal size.

    The first n mod k folds hold ceil(n/k) records, the rest floor(n/k).
    """
    if k < 2 or k > n:
        raise InvalidFoldCountError(f"invalid fold count: k={k} with n={n} (need 2 <= k <= n)")

    permutation = make_rng(seed).permutation(n)
    members = tuple(np.sort(chunk) for chunk in np.array_split(permutation, k))
    fold_of = np.empty(n, dtype=int)
    for index, chunk in enumerate(members):
        fold_of[chunk] = index
        chunk.setflags(write=False)
    fold_of.setflags(write=False)
    return FoldAssignment(fold_of=fold_of, k=k, members=members)


def rescale_covariates(dataset: Dataset, quantile: float = 0.99) -> Dataset:
    """Rescale covariates so that the given quantile of row norms is 1, clipping the rest.

    Used when comparing against methods that assume bounded-norm covariates.
    """
    norms = np.linalg.norm(dataset.covariates, axis=1)
    scale = float(np.quantile(norms, quantile))
    if scale <= 0:
        return dataset
    scaled = dataset.covariates / scale
    scaled_norms = norms / scale
    over = scaled_norms > 1
    scaled[over] = scaled[over] / scaled_norms[over, None]
    return dataset.with_covariates(scaled)


def prepare_dataset(dataset: Dataset, bounds: Bounds) -> Dataset:
    """Validate and clip once at ingestion, before any model fitting."""
    report = validate(dataset, bounds)
    for message in report.messages:
        logger.info(message)
    if report.n_requiring_clipping:
        return clip_outcomes(dataset, bounds)
    return dataset


def _columns(d: int) -> List[str]:
    return [f"x{j}" for j in range(d)] + ["a", "y"]


def _rows_to_dataset(rows: List[Dict[str, str]], source: PathLike) -> Dataset:
    if not rows:
        raise DataError(f"{source}: no data rows")
    header = list(rows[0].keys())
    x_cols = sorted(
        (c for c in header if c.startswith("x") and c[1:].isdigit()), key=lambda c: int(c[1:])
    )
    if x_cols != [f"x{j}" for j in range(len(x_cols))] or "a" not in header or "y" not in header:
        raise DataError(f"{source}: expected columns x0..x{{d-1}}, a, y; got {header}")
    try:
        covariates = [[float(row[c]) for c in x_cols] for row in rows]
        treatment = [float(row["a"]) for row in rows]
        outcome = [float(row["y"]) for row in rows]
    except (TypeError, ValueError) as e:
        raise DataError(f"{source}: unparseable value: {e}") from e
    return Dataset(np.array(covariates).reshape(len(rows), len(x_cols)), treatment, outcome)


def read_csv(path: PathLike) -> Dataset:
    """Read a dataset with header x0..x{d-1}, a, y."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
    except OSError as e:
        raise DataError(f"Error reading {path}: {e}") from e
    return _rows_to_dataset(rows, path)


def read_json(path: PathLike) -> Dataset:
    """Read a dataset stored as a list of {x0.., a, y} records."""
    try:
        with open(path, encoding="utf-8") as f:
            records = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"Error reading {path}: {e}") from e
    if not isinstance(records, list):
        raise DataError(f"{path}: expected a JSON list of records")
    return _rows_to_dataset(records, path)


def load_dataset(path: PathLike) -> Dataset:
    """Load CSV or JSON depending on the file suffix."""
    if Path(path).suffix.lower() == ".json":
        return read_json(path)
    return read_csv(path)


def _format_value(value: float) -> str:
    return repr(float(value))


def write_csv(dataset: Dataset, path: PathLike) -> None:
    """Write the dataset as UTF-8 CSV; output is byte-identical for identical data."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(_columns(dataset.d))
            for x, a, y in zip(dataset.covariates, dataset.treatment, dataset.outcome):
                writer.writerow([_format_value(v) for v in x] + [int(a), _format_value(y)])
    except OSError as e:
        raise DataError(f"Error writing {path}: {e}") from e


def write_json(dataset: Dataset, path: PathLike) -> None:
    """Write the dataset as a JSON list of records mirroring the CSV columns."""
    records = []
    for x, a, y in zip(dataset.covariates, dataset.treatment, dataset.outcome):
        record: Dict[str, float] = {f"x{j}": float(v) for j, v in enumerate(x)}
        record["a"] = int(a)
        record["y"] = float(y)
        records.append(record)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(records, f, indent=2)
    except OSError as e:
        raise DataError(f"Error writing {path}: {e}") from e
