#!/usr/bin/env python3
"""
Sampler calibration checks.

Runs the no-U-turn sampler on targets with known answers:
- an axis-scaled Gaussian (means, standard deviations, R-hat, ESS)
- a strongly correlated bivariate Gaussian
- rank calibration on a conjugate normal model: the rank of the prior draw
  among posterior draws must be uniform over repeated simulations

Usage:
    python scripts/validation/validate_sampler_calibration.py
    python scripts/validation/validate_sampler_calibration.py --simulations 200 --threads 4
"""

import argparse
import logging
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy import stats

# Add repository root and this folder to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
sys.path.insert(0, str(Path(__file__).parent))

from src.diagnostics.summary import summarize  # noqa: E402
from src.sampler.config import SamplerConfig  # noqa: E402
from src.sampler.runner import FunctionTarget, run_chain, run_chains  # noqa: E402
from src.utils.logger_config import setup_logging  # noqa: E402
from validation_result import ValidationResult  # noqa: E402

RANK_BINS = 10


def validate_scaled_gaussian(threads: int) -> ValidationResult:
    """Independent Gaussian with scales spanning two orders of magnitude."""
    result = ValidationResult()
    scales = np.array([0.1, 1.0, 10.0, 3.0, 0.5])

    def target(q):
        z = q / scales
        return -0.5 * float(z @ z), -z / scales

    config = SamplerConfig(chains=4, warmup=500, samples=1000, seed=1, target_accept=0.8)
    draws = run_chains(FunctionTarget(target, len(scales)), config, threads=threads)
    report = summarize(draws)
    for i, name in enumerate(draws.names):
        summary = report[name]
        result.check(
            f"{name} mean within 0.1 sd",
            abs(summary.mean) < 0.1 * scales[i],
            f"mean {summary.mean:.4f} for scale {scales[i]}",
        )
        result.check(
            f"{name} sd within 10%",
            abs(summary.sd / scales[i] - 1.0) < 0.1,
            f"sd {summary.sd:.4f} for scale {scales[i]}",
        )
    result.check("max R-hat below 1.01", (report.max_rhat() or 0.0) < 1.01, f"{report.max_rhat()}")
    result.check("min bulk ESS above 400", (report.min_ess_bulk() or 0.0) > 400, f"{report.min_ess_bulk()}")
    result.check("no divergences", report.n_divergent == 0, f"{report.n_divergent} divergent")
    return result


def validate_correlated_gaussian(threads: int) -> ValidationResult:
    """Bivariate Gaussian with correlation 0.95."""
    result = ValidationResult()
    cov = np.array([[1.0, 0.95], [0.95, 1.0]])
    precision = np.linalg.inv(cov)

    def target(q):
        grad = -precision @ q
        return 0.5 * float(q @ grad), grad

    config = SamplerConfig(chains=4, warmup=500, samples=1000, seed=2, target_accept=0.8)
    draws = run_chains(FunctionTarget(target, 2), config, threads=threads)
    pooled = np.column_stack([draws.array(name).ravel() for name in draws.names])
    correlation = float(np.corrcoef(pooled.T)[0, 1])
    result.check("correlation recovered", abs(correlation - 0.95) < 0.02, f"{correlation:.4f}")
    result.check("R-hat below 1.01", (summarize(draws).max_rhat() or 0.0) < 1.01)
    return result


def _rank_of_prior_draw(simulation: int, draws_per_fit: int) -> int:
    rng = np.random.default_rng([99, simulation])
    theta = rng.standard_normal()
    y = theta + rng.standard_normal()

    # theta ~ N(0, 1), y | theta ~ N(theta, 1)
    def target(q):
        return -0.5 * (q[0] ** 2 + (y - q[0]) ** 2), np.array([y - 2.0 * q[0]])

    config = SamplerConfig(chains=1, warmup=200, samples=draws_per_fit * 5, seed=simulation, target_accept=0.8)
    chain = run_chain(FunctionTarget(target, 1), config, 0)
    thinned = chain.draws[::5, 0]
    return int(np.sum(thinned < theta))


def validate_rank_calibration(simulations: int, threads: int) -> ValidationResult:
    """Rank uniformity of prior draws among thinned posterior draws."""
    result = ValidationResult()
    draws_per_fit = 99
    with ThreadPoolExecutor(max_workers=threads) as pool:
        ranks = np.array(list(pool.map(lambda s: _rank_of_prior_draw(s, draws_per_fit), range(simulations))))
    counts, _ = np.histogram(ranks, bins=RANK_BINS, range=(0, draws_per_fit + 1))
    p_value = float(stats.chisquare(counts).pvalue)
    print(f"   rank histogram: {counts.tolist()}")
    result.check("rank histogram uniform (chi-square p > 0.01)", p_value > 0.01, f"p = {p_value:.4f}")
    return result


def main():
    """Run all calibration checks."""
    parser = argparse.ArgumentParser(description="Sampler calibration checks")
    parser.add_argument("--simulations", type=int, default=100, help="Rank calibration simulations")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads")
    args = parser.parse_args()
    setup_logging(log_level=logging.WARNING, file_output=False)

    start_time = time.time()
    print("🔍 Validating sampler calibration")
    print("=" * 60)

    validators = [
        ("Scaled Gaussian", lambda: validate_scaled_gaussian(args.threads)),
        ("Correlated Gaussian", lambda: validate_correlated_gaussian(args.threads)),
        ("Rank calibration", lambda: validate_rank_calibration(args.simulations, args.threads)),
    ]
    total = ValidationResult()
    for name, validator in validators:
        print(f"\n📋 {name}...")
        try:
            result = validator()
            print(f"   ✅ {result.passed} passed, ❌ {result.failed} failed")
            total.merge(result)
        except Exception as e:
            total.add_failure(name, str(e))
            traceback.print_exc()

    total.print_summary("SAMPLER CALIBRATION SUMMARY", time.time() - start_time)
    return 0 if total.failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
