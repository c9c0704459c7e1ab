"""Command-line interface for dpcausal private ATE estimation."""

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from .core.dataset import load_dataset, write_csv, write_json
from .core.exceptions import ConfigError, DataError, DPCausalError
from .core.models import Dataset
from .core.privacy import (
    DEFAULT_DELTA,
    budget_report,
    gdp_to_approx_dp,
    mu_at_epsilon_delta,
    split_budget,
)
from .estimation.meta import expand_report_paths, load_study_records, meta_combine
from .estimation.pipeline import estimate_ate
from .experiments.generators import generate
from .experiments.harness import (
    run_replications,
    run_sweep,
    write_replication_csv,
    write_summary_csv,
)
from .utils.config import RunConfig, build_config
from .utils.formatting import (
    estimate_report,
    format_budget,
    format_estimate,
    format_meta,
    format_number,
    format_sweep,
    meta_report,
    sweep_report,
)

logger = logging.getLogger(__name__)


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Run configuration file (key = value lines)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one configuration key (repeatable)",
    )
    parser.add_argument("--seed", type=int, help="Run seed (DPCAUSAL_SEED overrides it)")


def _add_source_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--generator", help="Synthetic generator name")
    parser.add_argument("-n", type=int, dest="n", help="Number of records to generate")


def _add_estimation_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--estimator", choices=["G", "IPW", "AIPW"], help="Score family")
    parser.add_argument("-k", type=int, dest="k", help="Number of folds K")
    parser.add_argument("--b-mu", type=float, dest="b_mu", help="Outcome bound B_mu")
    parser.add_argument("--b-pi", type=float, dest="b_pi", help="Inverse-propensity bound B_pi")
    parser.add_argument("--learner-pi", dest="learner_pi", help="Propensity learner")
    parser.add_argument("--learner-mu", dest="learner_mu", help="Outcome learner")
    parser.add_argument(
        "--aggregation", choices=["complete_means", "sampling"], help="Aggregation scheme"
    )
    parser.add_argument("--mu", type=float, dest="mu_total", help="Total GDP budget mu")
    parser.add_argument(
        "--non-private",
        dest="non_private",
        action="store_const",
        const=True,
        help="Release without noise (no privacy guarantee)",
    )
    parser.add_argument(
        "--ci-method",
        dest="ci_method",
        choices=["none", "asymptotic", "bootstrap", "pointwise"],
        help="Confidence interval procedure",
    )
    parser.add_argument("--alpha", type=float, help="Interval miscoverage level")
    parser.add_argument("--beta", type=float, help="Widening level of fold-based intervals")
    parser.add_argument(
        "--bootstrap-reps", type=int, dest="bootstrap_reps", help="Bootstrap replications r"
    )
    parser.add_argument("--n-jobs", type=int, dest="n_jobs", help="Parallel jobs")


def create_parser() -> argparse.ArgumentParser:
    """Create command-line argument parser."""
    parser = argparse.ArgumentParser(
        description="Differentially private average treatment effect estimation",
        prog="dpcausal",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Verbose output")
    parser.add_argument(
        "--output-format",
        choices=["text", "json"],
        default="text",
        help="Output format for results",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    gen = commands.add_parser("generate", help="Write a synthetic dataset to CSV or JSON")
    _add_config_options(gen)
    _add_source_options(gen)
    gen.add_argument("-o", "--output", help="Output file (.csv or .json)")

    est = commands.add_parser("estimate", help="Release a private ATE estimate")
    _add_config_options(est)
    est.add_argument("--data", help="Dataset file (.csv or .json)")
    _add_source_options(est)
    _add_estimation_options(est)
    est.add_argument("-o", "--output", help="Write the JSON report to this file")

    sweep = commands.add_parser("sweep", help="Monte-Carlo replications over a parameter grid")
    _add_config_options(sweep)
    _add_source_options(sweep)
    _add_estimation_options(sweep)
    sweep.add_argument("--reps", type=int, help="Replications per grid cell")
    sweep.add_argument(
        "--baseline",
        action="store_const",
        const=True,
        help="Use the subsample-and-aggregate baseline",
    )
    sweep.add_argument("--output-dir", dest="output_dir", help="Directory for CSV tables")

    meta = commands.add_parser("meta", help="Combine released estimates across studies")
    meta.add_argument("paths", nargs="+", help="Estimate report files or directories")
    meta.add_argument(
        "--inverse-variance",
        action="store_true",
        help="Weight by inverse variance instead of inverse standard error",
    )
    meta.add_argument("-o", "--output", help="Write the JSON report to this file")

    privacy = commands.add_parser("convert-privacy", help="Convert between mu and (eps, delta)")
    group = privacy.add_mutually_exclusive_group(required=True)
    group.add_argument("--mu", type=float, help="GDP parameter to convert")
    group.add_argument("--epsilon", type=float, help="Epsilon of the target (eps, delta)-DP")
    privacy.add_argument(
        "--delta", type=float, default=DEFAULT_DELTA, help="Target delta (default: 1e-5)"
    )
    privacy.add_argument(
        "--with-interval",
        action="store_true",
        help="Split the budget for a fold-based interval as well",
    )

    return parser


FLAG_KEYS = (
    "seed",
    "generator",
    "n",
    "data",
    "estimator",
    "k",
    "b_mu",
    "b_pi",
    "learner_pi",
    "learner_mu",
    "aggregation",
    "mu_total",
    "non_private",
    "ci_method",
    "alpha",
    "beta",
    "bootstrap_reps",
    "n_jobs",
    "output",
    "output_dir",
    "reps",
    "baseline",
)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig from the config file, --set overrides, flags and environment."""
    flags = {key: getattr(args, key) for key in FLAG_KEYS if getattr(args, key, None) is not None}
    return build_config(args.config, args.overrides, flags)


def load_source(config: RunConfig) -> Dataset:
    """Dataset named by ``data``, or generated from ``generator``."""
    if config.data:
        if not Path(config.data).exists():
            raise DataError(f"Dataset file '{config.data}' not found")
        return load_dataset(config.data)
    if config.generator:
        return generate(config.generator_spec())
    raise ConfigError("no data source: set 'data' or 'generator'")


def write_report(report: Dict[str, Any], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
    except OSError as e:
        raise DataError(f"Error writing {path}: {e}") from e


def output_results(
    report: Dict[str, Any], output_format: str, render: Callable[[Dict[str, Any]], str]
) -> None:
    """Output a report in the specified format."""
    if output_format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(render(report))


def cmd_generate(config: RunConfig) -> Dict[str, Any]:
    if not config.output:
        raise ConfigError("generate needs an output file (-o/--output)")
    dataset = generate(config.generator_spec())
    if Path(config.output).suffix.lower() == ".json":
        write_json(dataset, config.output)
    else:
        write_csv(dataset, config.output)
    logger.info("wrote %d records to %s", dataset.n, config.output)
    return {"output": config.output, "n": dataset.n, "d": dataset.d, "config": config.to_dict()}


def cmd_estimate(config: RunConfig) -> Dict[str, Any]:
    settings = config.to_settings()
    dataset = load_source(config)
    estimate = estimate_ate(dataset, settings, config.seed)
    report = estimate_report(estimate, config.to_dict())
    if config.output:
        write_report(report, config.output)
    return report


def _cell_filename(cell: Dict[str, Any]) -> str:
    label = "_".join(f"{key}={value}" for key, value in cell.items()) or "replications"
    return re.sub(r"[^A-Za-z0-9=._-]", "-", label) + ".csv"


def cmd_sweep(config: RunConfig) -> Dict[str, Any]:
    settings = config.to_settings()
    spec = config.generator_spec()
    grid = config.grid_values()
    if grid:
        results = run_sweep(
            spec, settings, grid, config.reps, config.seed, config.baseline, config.n_jobs
        )
    else:
        table = run_replications(
            spec, settings, config.reps, config.seed, config.baseline, config.n_jobs
        )
        results = [({}, table)]

    files: List[str] = []
    if config.output_dir:
        out = Path(config.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DataError(f"Error creating {out}: {e}") from e
        for cell, table in results:
            path = out / _cell_filename(cell)
            write_replication_csv(table, path)
            files.append(str(path))
        summary_path = out / "summary.csv"
        write_summary_csv(results, summary_path)
        files.append(str(summary_path))
    return sweep_report(results, config.to_dict(), files)


def cmd_meta(paths: List[str], inverse_variance: bool, output: Optional[str]) -> Dict[str, Any]:
    sources = [str(p) for p in expand_report_paths(paths)]
    studies = load_study_records(paths)
    result = meta_combine(studies, inverse_variance=inverse_variance)
    config = {"paths": list(paths), "inverse_variance": inverse_variance, "output": output}
    report = meta_report(result, sources, config)
    if output:
        write_report(report, output)
    return report


def cmd_convert_privacy(
    mu: Optional[float], epsilon: Optional[float], delta: float, with_interval: bool
) -> Dict[str, Any]:
    if mu is None:
        if epsilon is None:
            raise ConfigError("convert-privacy needs --mu or --epsilon")
        mu = mu_at_epsilon_delta(epsilon, delta)
    report = budget_report(split_budget(mu, with_interval), delta)
    if epsilon is not None:
        report["epsilon"] = epsilon
        report["delta_at_epsilon"] = gdp_to_approx_dp(mu, epsilon)
    return report


def _render_conversion(report: Dict[str, Any]) -> str:
    text = format_budget(report)
    if "epsilon" in report:
        text += f"\n{'mu for (eps, delta)':<18} {format_number(report['mu_total'])}"
    return text


def _render_generate(report: Dict[str, Any]) -> str:
    return f"Wrote {report['n']} records ({report['d']} covariates) to {report['output']}"


def run_command(args: argparse.Namespace) -> None:
    if args.command == "meta":
        report = cmd_meta(args.paths, args.inverse_variance, args.output)
        output_results(report, args.output_format, format_meta)
    elif args.command == "convert-privacy":
        report = cmd_convert_privacy(args.mu, args.epsilon, args.delta, args.with_interval)
        output_results(report, args.output_format, _render_conversion)
    else:
        config = resolve_config(args)
        if args.command == "generate":
            output_results(cmd_generate(config), args.output_format, _render_generate)
        elif args.command == "estimate":
            report = cmd_estimate(config)
            output_results(report, args.output_format, format_estimate)
        else:
            output_results(cmd_sweep(config), args.output_format, format_sweep)


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        run_command(args)
    except DPCausalError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(1)
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
