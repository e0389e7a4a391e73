#!/usr/bin/env python3
"""
Parameter recovery on one simulated survey.

Simulates a dataset from the study geometry, fits the exposure model and
checks that the 80% posterior intervals of lambda_b, rho and gamma contain
the generating values, that the mean absolute error of the household
exposures is small, and that the chains converged.

Usage:
    python scripts/validation/validate_parameter_recovery.py
    python scripts/validation/validate_parameter_recovery.py --households 400 --cells 20 --threads 4
"""

import argparse
import logging
import sys
import time
import traceback
from pathlib import Path

import numpy as np

# Add repository root and this folder to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
sys.path.insert(0, str(Path(__file__).parent))

from src.diagnostics.summary import summarize  # noqa: E402
from src.model.posterior import HazardPosterior  # noqa: E402
from src.model.spec import ModelSpec  # noqa: E402
from src.sampler.config import SamplerConfig  # noqa: E402
from src.sampler.runner import run_chains  # noqa: E402
from src.simstudy.estimators import replication_errors  # noqa: E402
from src.simstudy.generate import generate_dataset  # noqa: E402
from src.simstudy.landscape import study_cell_counts, study_geometry  # noqa: E402
from src.simstudy.scenario import StudyScenario  # noqa: E402
from src.utils.logger_config import setup_logging  # noqa: E402
from validation_result import ValidationResult  # noqa: E402


def run_recovery(args) -> ValidationResult:
    result = ValidationResult()
    network = study_geometry(split_y=True)
    scenario = StudyScenario(
        households=args.households,
        observations=args.observations,
        distribution=args.distribution,
        cells=args.cells,
        seed=args.seed,
        population_size=max(args.households, 20_000),
    )
    dataset, truth = generate_dataset(scenario, 0, network)
    print(f"   {dataset.n_households} households, infection rate {dataset.outcomes.mean():.3f}")

    spec = ModelSpec(cells=args.cells, cell_overrides=study_cell_counts(args.cells))
    config = SamplerConfig(
        chains=args.chains, warmup=args.warmup, samples=args.samples, seed=args.seed
    )
    chain_threads = max(1, min(args.threads, config.chains))
    with HazardPosterior(spec, network, dataset, threads=max(1, args.threads // chain_threads)) as posterior:
        draws = run_chains(posterior, config, threads=chain_threads)
        names = posterior.parameter_names

    report = summarize(draws, names, config.max_tree_depth, threads=args.threads)
    errors = replication_errors(draws.to_frame(), truth)
    for name, value in truth.parameters().items():
        summary = report[name]
        print(f"   {name}: truth {value:.4f}, posterior mean {summary.mean:.4f} "
              f"[{summary.q10:.4f}, {summary.q90:.4f}]")
        result.check(
            f"{name} inside 80% interval",
            errors.coverage[0.8][name][0] == 1.0,
            f"truth {value:.4f} outside [{summary.q10:.4f}, {summary.q90:.4f}]",
        )

    theta_mae = float(np.mean(np.abs(errors.errors["theta"])))
    theta_coverage = float(np.nanmean(errors.coverage[0.8]["theta"]))
    print(f"   theta: mean absolute error {theta_mae:.4f}, 80% coverage {theta_coverage:.3f}")
    result.check(
        "theta mean absolute error below 25% of mean exposure",
        theta_mae < 0.25 * float(truth.exposures.mean()),
        f"{theta_mae:.4f}",
    )
    result.check("theta 80% coverage at least 0.6", theta_coverage >= 0.6, f"{theta_coverage:.3f}")
    result.check("max R-hat below 1.05", (report.max_rhat() or 0.0) < 1.05, f"{report.max_rhat()}")
    result.check(
        "divergences below 1% of draws",
        report.n_divergent < 0.01 * config.chains * config.samples,
        f"{report.n_divergent} divergent",
    )
    return result


def main():
    """Run the recovery check."""
    parser = argparse.ArgumentParser(description="Parameter recovery on a simulated survey")
    parser.add_argument("--households", type=int, default=200)
    parser.add_argument("--observations", type=int, default=10)
    parser.add_argument("--distribution", choices=["uniform", "clustered"], default="clustered")
    parser.add_argument("--cells", type=int, default=20)
    parser.add_argument("--chains", type=int, default=4)
    parser.add_argument("--warmup", type=int, default=500)
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    setup_logging(log_level=logging.WARNING, file_output=False)

    start_time = time.time()
    print("🔍 Validating parameter recovery")
    print("=" * 60)
    try:
        result = run_recovery(args)
    except Exception as e:
        result = ValidationResult()
        result.add_failure("Parameter recovery", str(e))
        traceback.print_exc()
    result.print_summary("PARAMETER RECOVERY SUMMARY", time.time() - start_time)
    return 0 if result.failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
