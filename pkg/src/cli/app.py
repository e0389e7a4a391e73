"""Command-line entry point for hazardfield."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.cli import commands
from src.config import load_config
from src.utils.exceptions import (
    ConfigurationError,
    DatasetError,
    DimensionMismatchError,
    EstimatorError,
    GeometryError,
    InputOutputError,
    NumericalError,
    QuadratureError,
    SamplerError,
)
from src.utils.load_env import load_env
from src.utils.logger_config import get_logger, parse_log_level, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_IO = 4

VALIDATION_ERRORS = (
    ConfigurationError, ValidationError, DatasetError, DimensionMismatchError, GeometryError,
)
RUNTIME_ERRORS = (NumericalError, QuadratureError, SamplerError, EstimatorError)
IO_ERRORS = (InputOutputError, OSError)


def exit_code_for(error: BaseException) -> int:
    """Exit code of a failure."""
    if isinstance(error, VALIDATION_ERRORS):
        return EXIT_VALIDATION
    if isinstance(error, RUNTIME_ERRORS):
        return EXIT_RUNTIME
    if isinstance(error, IO_ERRORS):
        return EXIT_IO
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hazardfield",
        description="Bayesian exposure modelling for spatially extensive hazards",
    )
    parser.add_argument("--config", help="Flat key = value config file")
    parser.add_argument("--seed", type=int, help="Master seed (unsigned 64-bit)")
    parser.add_argument("--threads", type=int, help="Worker threads (HAZARDFIELD_THREADS)")
    parser.add_argument("--out", default="out", help="Output directory (default: out)")
    parser.add_argument("--dry-run", action="store_true", help="Show what would run and exit")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", help="Simulate a survey with its truth record")

    fit = sub.add_parser("fit", help="Fit the model to a dataset")
    fit.add_argument("--data", required=True, help="Directory with households.csv and observations.csv")
    fit.add_argument("--chains", type=int, help="Number of chains")
    fit.add_argument("--warmup", type=int, help="Warmup iterations per chain")
    fit.add_argument("--samples", type=int, help="Kept draws per chain")

    diagnose = sub.add_parser("diagnose", help="Recompute the fit report from draws")
    diagnose.add_argument("--draws", nargs="+", required=True, help="Draws CSV files")

    sub.add_parser("validate", help="Discretization error over the M ladder")
    sub.add_parser("study", help="Run the replicated simulation study")

    functional = sub.add_parser("functional", help="Change in odds along a ray")
    functional.add_argument("--draws", nargs="+", required=True, help="Draws CSV files")
    functional.add_argument("--data", help="Dataset directory for the min-distance predictor")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    overrides = {
        "seed": args.seed,
        "threads": args.threads,
        "log_level": args.log_level,
    }
    for key in ("chains", "warmup", "samples"):
        overrides[key] = getattr(args, key, None)
    return overrides


def run(args: argparse.Namespace) -> int:
    config = load_config(args.config, _overrides(args))
    out_dir = Path(args.out)
    setup_logging(
        log_level=parse_log_level(config.log_level),
        log_dir=str(out_dir / "logs"),
        file_output=not args.dry_run,
        run_label=args.command,
    )
    logger.info(f"Command {args.command}, seed {config.seed}, {config.threads} thread(s)")

    if args.command == "simulate":
        return commands.cmd_simulate(config, out_dir, args.config, args.dry_run)
    if args.command == "fit":
        return commands.cmd_fit(config, Path(args.data), out_dir, args.config, args.dry_run)
    if args.command == "diagnose":
        paths = [Path(p) for p in args.draws]
        return commands.cmd_diagnose(config, paths, out_dir, args.config, args.dry_run)
    if args.command == "validate":
        return commands.cmd_validate(config, out_dir, args.config, args.dry_run)
    if args.command == "study":
        return commands.cmd_study(config, out_dir, args.config, args.dry_run)
    if args.command == "functional":
        paths = [Path(p) for p in args.draws]
        data = Path(args.data) if args.data else None
        return commands.cmd_functional(config, paths, out_dir, data, args.config, args.dry_run)
    raise ConfigurationError(f"unknown command '{args.command}'")


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    load_env()
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return 130
    except Exception as e:
        code = exit_code_for(e)
        if not logging.getLogger().handlers:
            logging.basicConfig(level=logging.ERROR)
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        if code == 1:
            logger.exception("Unexpected failure")
        return code
