"""Formatting utilities for output display and report building."""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..core.models import CIMethod, MetaResult, PrivateEstimate, ReplicationTable
from ..core.privacy import DEFAULT_DELTA, budget_report
from ..estimation.pipeline import FOLD_BASED


def format_number(value: Optional[float], digits: int = 6) -> str:
    """Format a float for display; None and NaN render as N/A."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "N/A"
    if value != 0 and (abs(value) >= 1e6 or abs(value) < 10 ** (-digits)):
        return f"{value:.{digits - 2}e}"
    return f"{value:.{digits}f}"


def _json_float(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def ci_report(
    estimate: PrivateEstimate,
    alpha: float,
    beta: float,
    bootstrap_reps: int,
) -> Optional[Dict[str, Any]]:
    """Interval report for the fold-based procedures; None otherwise."""
    if estimate.ci is None or estimate.ci_method not in FOLD_BASED:
        return None
    return {
        "method": estimate.ci_method.value,
        "alpha": alpha,
        "beta": beta,
        "r": bootstrap_reps if estimate.ci_method is CIMethod.BOOTSTRAP else None,
        "tau_minus": estimate.ci[0],
        "tau_plus": estimate.ci[1],
        "mu_total": estimate.budget.mu,
    }


def estimate_report(
    estimate: PrivateEstimate, config: Dict[str, Any], delta: float = DEFAULT_DELTA
) -> Dict[str, Any]:
    """Estimate report with the released values, the budget and the resolved config."""
    budget = budget_report(estimate.components, delta)
    report: Dict[str, Any] = {
        "kind": estimate.kind.value,
        "n": estimate.n,
        "K": estimate.k,
        "tau_dp": estimate.tau_dp,
        "v_dp": estimate.v_dp,
        "ci": list(estimate.ci) if estimate.ci is not None else None,
        "ci_method": estimate.ci_method.value,
        "mu_total": estimate.budget.mu,
        "epsilon_at_1e-5": budget["epsilon_at_delta"],
        "seed": estimate.seed,
        "non_private": estimate.non_private,
        "budget": budget,
        "sigma1_sq": estimate.sigma1_sq,
        "sigma2_sq": estimate.sigma2_sq,
        "warnings": list(estimate.warnings),
        "config": config,
    }
    interval = ci_report(
        estimate,
        config.get("alpha", 0.05),
        config.get("beta", 0.05),
        config.get("bootstrap_reps", 0),
    )
    if interval is not None:
        report["ci_report"] = interval
    if estimate.tau_nonprivate is not None:
        report["tau_nonprivate"] = estimate.tau_nonprivate
    return report


def meta_report(
    result: MetaResult, sources: Sequence[str], config: Dict[str, Any]
) -> Dict[str, Any]:
    """Combined report of a meta-analysis."""
    return {
        "tau_meta": result.tau_meta,
        "v_meta_over_n": result.v_meta_over_n,
        "weights": list(result.weights),
        "n_total": result.n_total,
        "weighting": "inverse_variance" if result.inverse_variance else "inverse_standard_error",
        "studies": list(sources),
        "config": config,
    }


def summary_record(cell: Dict[str, Any], table: ReplicationTable) -> Dict[str, Any]:
    s = table.summary
    record = dict(cell)
    record.update(
        {
            "reps": s.reps,
            "true_ate": s.true_ate,
            "mean": s.mean,
            "sd": s.sd,
            "bias": s.bias,
            "rmse": s.rmse,
            "coverage": _json_float(s.coverage),
            "mean_v_dp": _json_float(s.mean_v_dp),
        }
    )
    return record


def sweep_report(
    results: Sequence[Tuple[Dict[str, Any], ReplicationTable]],
    config: Dict[str, Any],
    files: Sequence[str] = (),
) -> Dict[str, Any]:
    return {
        "cells": [summary_record(cell, table) for cell, table in results],
        "files": list(files),
        "config": config,
    }


def format_budget(report: Dict[str, Any]) -> str:
    """Render a budget report as text."""
    output = ["Privacy budget:", "-" * 40]
    output.append(f"{'mu_total':<18} {format_number(report['mu_total'])}")
    for key in ("mu_ate", "mu_var", "mu_ci"):
        if key in report:
            output.append(f"{key:<18} {format_number(report[key])}")
    epsilon = report.get("epsilon_at_delta")
    output.append(f"{'delta':<18} {report['delta']:g}")
    output.append(f"{'epsilon at delta':<18} {format_number(epsilon)}")
    return "\n".join(output)


def format_estimate(report: Dict[str, Any]) -> str:
    """Render an estimate report for display."""
    output = []
    mode = "non-private" if report["non_private"] else "private"
    output.append(f"{report['kind']} estimate ({mode}), n={report['n']}, K={report['K']}")
    output.append("-" * 60)

    if report["warnings"]:
        for warning in report["warnings"]:
            output.append(f"Warning: {warning}")
        output.append("-" * 60)

    output.append(f"{'tau_dp':<18} {format_number(report['tau_dp'])}")
    output.append(f"{'v_dp':<18} {format_number(report['v_dp'])}")
    if "tau_nonprivate" in report:
        output.append(f"{'tau (no noise)':<18} {format_number(report['tau_nonprivate'])}")
    if report["ci"] is not None:
        lo, hi = report["ci"]
        output.append(
            f"{'CI (' + report['ci_method'] + ')':<18} "
            f"[{format_number(lo)}, {format_number(hi)}]"
        )
    output.append(f"{'seed':<18} {report['seed']}")
    output.append("")
    output.append(format_budget(report["budget"]))
    return "\n".join(output)


def format_meta(report: Dict[str, Any]) -> str:
    """Render a meta-analysis report."""
    output = [f"Meta-analysis of {len(report['studies'])} studies ({report['weighting']})"]
    output.append("-" * 60)
    output.append(f"{'Study':<40} {'Weight':>10}")
    for source, weight in zip(report["studies"], report["weights"]):
        output.append(f"{source:<40} {weight:>10.4f}")
    output.append("-" * 60)
    output.append(f"{'tau_meta':<18} {format_number(report['tau_meta'])}")
    output.append(f"{'v_meta / n':<18} {format_number(report['v_meta_over_n'])}")
    output.append(f"{'total n':<18} {report['n_total']}")
    return "\n".join(output)


def format_sweep(report: Dict[str, Any]) -> str:
    """Render the per-cell summaries of a sweep as a table."""
    cells: List[Dict[str, Any]] = report["cells"]
    if not cells:
        return "No cells."
    keys = [k for k in ("k", "mu", "n", "estimator") if k in cells[0]]
    header = " ".join(f"{k:<10}" for k in keys)
    output = [
        f"{header} {'reps':>6} {'mean':>10} {'sd':>10} {'bias':>10} {'rmse':>10} {'coverage':>9}"
    ]
    output.append("-" * len(output[0]))
    for cell in cells:
        prefix = " ".join(f"{str(cell[k]):<10}" for k in keys)
        coverage = "N/A" if cell["coverage"] is None else f"{cell['coverage']:.3f}"
        output.append(
            f"{prefix} {cell['reps']:>6} {cell['mean']:>10.4f} {cell['sd']:>10.4f} "
            f"{cell['bias']:>10.4f} {cell['rmse']:>10.4f} "
            f"{coverage:>9}"
        )
    if report["files"]:
        output.append("")
        output.extend(f"Wrote {path}" for path in report["files"])
    return "\n".join(output)
