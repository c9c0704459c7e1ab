#!/usr/bin/env python3
"""Check the true ATE and treated fraction of each synthetic generator by Monte Carlo."""

import argparse
import sys
from typing import Tuple

import numpy as np

from dpcausal.core.models import GeneratorKind
from dpcausal.experiments.generators import get_generator
from dpcausal.utils.seeding import make_rng


def monte_carlo_effect(
    kind: GeneratorKind, draws: int, seed: int, chunk: int
) -> Tuple[float, float, float]:
    """Mean and standard error of mu1(X) - mu0(X), plus the mean propensity."""
    generator = get_generator(kind)
    rng = make_rng(seed)
    total = total_sq = total_pi = 0.0
    done = 0
    while done < draws:
        size = min(chunk, draws - done)
        x = generator.sample_covariates(size, rng)
        effect = generator.mean_outcome(x, 1) - generator.mean_outcome(x, 0)
        total += float(np.sum(effect))
        total_sq += float(np.sum(effect**2))
        total_pi += float(np.sum(generator.propensity(x)))
        done += size
    mean = total / draws
    variance = max(total_sq / draws - mean**2, 0.0)
    return mean, float(np.sqrt(variance / draws)), total_pi / draws


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Verify generator ATEs by Monte-Carlo integration")
    parser.add_argument(
        "--generator",
        choices=[k.value for k in GeneratorKind] + ["all"],
        default="all",
        help="Generator to check (default: all)",
    )
    parser.add_argument("--draws", type=int, default=10_000_000, help="Covariate draws")
    parser.add_argument("--chunk", type=int, default=1_000_000, help="Draws per batch")
    parser.add_argument("--seed", type=int, default=0, help="Seed")
    parser.add_argument(
        "--tolerance", type=float, default=4.0, help="Allowed deviation in standard errors"
    )
    return parser


def main() -> None:
    args = create_parser().parse_args()
    kinds = list(GeneratorKind) if args.generator == "all" else [GeneratorKind(args.generator)]

    failed = False
    print(f"{'Generator':<22} {'nominal':>9} {'reference':>10} {'monte carlo':>12} {'se':>9}")
    print("-" * 66)
    for kind in kinds:
        generator = get_generator(kind)
        mean, se, pi_bar = monte_carlo_effect(kind, args.draws, args.seed, args.chunk)
        reference = generator.reference_ate()
        ok = abs(mean - reference) <= args.tolerance * se + 1e-12
        failed |= not ok
        print(
            f"{kind.value:<22} {generator.true_ate:>9.5f} {reference:>10.5f} "
            f"{mean:>12.5f} {se:>9.2e} {'ok' if ok else 'MISMATCH'}"
        )
        pi_ref = generator.mean_propensity()
        print(f"{'':<22} mean propensity {pi_bar:.5f} (quadrature {pi_ref:.5f})")

    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
