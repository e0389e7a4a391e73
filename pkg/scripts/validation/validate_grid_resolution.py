#!/usr/bin/env python3
"""
Grid resolution check of the discretized exposure.

Runs the refinement ladder and checks that the discretization error shrinks
at close to second order in M, that the computable bound is never below the
observed error once cells are narrower than the kernel bandwidth, and that
the bound shrinks with M.

Usage:
    python scripts/validation/validate_grid_resolution.py
    python scripts/validation/validate_grid_resolution.py --kernel gaussian --rho 0.3 --random-households 20
"""

import argparse
import logging
import sys
import time
import traceback
from pathlib import Path

# Add repository root and this folder to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
sys.path.insert(0, str(Path(__file__).parent))

from src.simstudy.refinement import ValidationConfig, run_validation  # noqa: E402
from src.utils.logger_config import setup_logging  # noqa: E402
from validation_result import ValidationResult  # noqa: E402

MIN_ORDER = 1.5


def run_ladder(args) -> ValidationResult:
    result = ValidationResult()
    config = ValidationConfig(
        cells=args.cells,
        rho=args.rho,
        kernel=args.kernel,
        random_households=args.random_households,
        seed=args.seed,
    )
    frame = run_validation(config)
    print(frame[["cells", "household", "error", "bound", "slope"]].to_string(index=False))

    for household, part in frame.groupby("household"):
        part = part.sort_values("cells")
        slope = float(part["slope"].iloc[0])
        result.check(
            f"household {household}: error order at least {MIN_ORDER}",
            slope <= -MIN_ORDER,
            f"slope {slope:.3f}",
        )
        bounds = part["bound"].to_numpy()
        result.check(
            f"household {household}: bound shrinks with M",
            bool(bounds[-1] < bounds[0]),
            f"bound {bounds[0]:.3e} -> {bounds[-1]:.3e}",
        )

    fine = frame[frame["cells"] >= frame["cells"].max() // 4]
    violations = int((fine["bound"] < fine["error"]).sum())
    result.check("bound covers the error on the finer grids", violations == 0, f"{violations} row(s)")
    return result


def main():
    """Run the grid resolution check."""
    parser = argparse.ArgumentParser(description="Grid resolution check")
    parser.add_argument("--cells", type=int, nargs="+", default=[20, 40, 80, 160, 320])
    parser.add_argument("--rho", type=float, default=0.5)
    parser.add_argument("--kernel", choices=["exponential", "gaussian"], default="exponential")
    parser.add_argument("--random-households", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    setup_logging(log_level=logging.WARNING, file_output=False)

    start_time = time.time()
    print("🔍 Validating grid resolution")
    print("=" * 60)
    try:
        result = run_ladder(args)
    except Exception as e:
        result = ValidationResult()
        result.add_failure("Grid resolution", str(e))
        traceback.print_exc()
    result.print_summary("GRID RESOLUTION SUMMARY", time.time() - start_time)
    return 0 if result.failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
