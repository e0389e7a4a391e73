"""
Subcommand implementations.

Each command takes a resolved RunConfig plus its own inputs, writes CSV
outputs and a manifest into the output directory, and returns 0. Failures
surface as HazardFieldError subclasses; app.py maps them to exit codes.
"""

from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from src.cli.manifest import RunManifest
from src.config import RunConfig
from src.diagnostics.summary import summarize, write_report
from src.geometry.partition import build_partition
from src.model.dataset import load_dataset, save_dataset
from src.model.functionals import min_distance_predictor, odds_change_curve
from src.model.posterior import HazardPosterior
from src.sampler.runner import read_draws, run_chains, write_draws
from src.simstudy.generate import generate_dataset, prior_predictive
from src.simstudy.refinement import run_validation
from src.simstudy.study import run_study
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

REPORT_FILE = "report.csv"
PRIOR_PREDICTIVE_FILE = "prior_predictive.csv"
VALIDATION_FILE = "validation.csv"
ODDS_CHANGE_FILE = "odds_change.csv"
MIN_DISTANCE_FILE = "min_distance.csv"


def _manifest(
    command: str,
    config: RunConfig,
    out_dir: Path,
    config_path: Optional[str],
    inputs: Sequence = (),
) -> RunManifest:
    manifest = RunManifest(
        command=command,
        output_dir=str(out_dir),
        seed=config.seed,
        config_path=config_path,
        settings=config.model_dump(mode="json"),
    )
    manifest.add_inputs(inputs)
    if config.geometry_dir:
        manifest.add_inputs([config.geometry_dir])
    return manifest


def cmd_simulate(
    config: RunConfig, out_dir: Path, config_path: Optional[str] = None, dry_run: bool = False
) -> int:
    """Simulated survey, its truth record and a prior-predictive report."""
    scenario = config.scenario()
    if dry_run:
        print(f"simulate {scenario.label}: J={scenario.households}, I={scenario.observations}")
        return 0
    _manifest("simulate", config, out_dir, config_path).write()

    network = config.network()
    dataset, truth = generate_dataset(scenario, 0, network)
    save_dataset(dataset, out_dir)
    truth.save(out_dir)

    spec = config.model_spec().model_copy(update={"n_covariates": dataset.n_covariates})
    frame = prior_predictive(
        spec,
        network,
        dataset.locations,
        dataset.covariates,
        config.prior_predictive_draws,
        config.seed,
        observations=scenario.observations,
    )
    frame.to_csv(out_dir / PRIOR_PREDICTIVE_FILE, index=False, float_format="%.17g")
    logger.info(f"Simulated {dataset.n_households} households into {out_dir}")
    return 0


def cmd_fit(
    config: RunConfig,
    data_dir: Path,
    out_dir: Path,
    config_path: Optional[str] = None,
    dry_run: bool = False,
) -> int:
    """Posterior draws per chain and the fit report for one dataset."""
    dataset = load_dataset(data_dir)
    network = config.network()
    spec = config.model_spec().model_copy(update={"n_covariates": dataset.n_covariates})
    sampler_config = config.sampler_config()
    chain_threads = max(1, min(config.threads, sampler_config.chains))
    likelihood_threads = max(1, config.threads // chain_threads)

    with HazardPosterior(spec, network, dataset, threads=likelihood_threads) as posterior:
        if dry_run:
            print(
                f"fit: {dataset.n_households} households, {posterior.partition.n_cells} cells, "
                f"dimension {posterior.dim}, {sampler_config.chains} chain(s)"
            )
            return 0
        _manifest("fit", config, out_dir, config_path, inputs=[data_dir]).write()
        draws = run_chains(posterior, sampler_config, threads=chain_threads)
        names = posterior.parameter_names

    write_draws(draws, out_dir)
    report = summarize(draws, names, sampler_config.max_tree_depth, threads=config.threads)
    write_report(report, out_dir / REPORT_FILE)
    logger.info(
        f"Fit done: max R-hat {report.max_rhat()}, {report.n_divergent} divergent, "
        f"{report.treedepth_saturation} at max tree depth"
    )
    return 0


def cmd_diagnose(
    config: RunConfig,
    draws_paths: List[Path],
    out_dir: Path,
    config_path: Optional[str] = None,
    dry_run: bool = False,
) -> int:
    """Recompute the fit report from draws CSVs."""
    if dry_run:
        print(f"diagnose: {len(draws_paths)} draws file(s)")
        return 0
    _manifest("diagnose", config, out_dir, config_path, inputs=draws_paths).write()
    draws = read_draws(draws_paths)
    report = summarize(draws, max_tree_depth=config.max_tree_depth, threads=config.threads)
    write_report(report, out_dir / REPORT_FILE)
    print(report.to_frame().head(10).to_string(index=False))
    return 0


def cmd_validate(
    config: RunConfig, out_dir: Path, config_path: Optional[str] = None, dry_run: bool = False
) -> int:
    """Discretization error and bound over the M ladder."""
    validation = config.validation_config()
    if dry_run:
        print(f"validate: M ladder {validation.cells}, {len(validation.locations())} household(s)")
        return 0
    _manifest("validate", config, out_dir, config_path).write()
    frame = run_validation(validation)
    frame.to_csv(out_dir / VALIDATION_FILE, index=False, float_format="%.17g", na_rep="NA")
    slopes = frame.groupby("household")["slope"].first()
    logger.info(f"Refinement slopes per household: {slopes.round(3).to_dict()}")
    return 0


def cmd_study(
    config: RunConfig, out_dir: Path, config_path: Optional[str] = None, dry_run: bool = False
) -> int:
    """Replicated simulation study over the configured grid."""
    study_config = config.study_config()
    if dry_run:
        grid = run_study(
            study_config, config.model_spec(), config.sampler_config(), out_dir, dry_run=True
        )
        print(grid.to_string(index=False))
        return 0
    _manifest("study", config, out_dir, config_path).write()
    result = run_study(
        study_config,
        config.model_spec(),
        config.sampler_config(),
        out_dir,
        threads=config.threads,
        network=config.network(),
    )
    logger.info(
        f"Study done: {len(result.replications)} replication(s) completed, "
        f"{len(result.failures)} failed"
    )
    return 0


def cmd_functional(
    config: RunConfig,
    draws_paths: List[Path],
    out_dir: Path,
    data_dir: Optional[Path] = None,
    config_path: Optional[str] = None,
    dry_run: bool = False,
) -> int:
    """Change in infection odds along a ray and, with a dataset, the min-distance predictor."""
    if dry_run:
        print(
            f"functional: {config.functional_points} distances from "
            f"{config.functional_reference_km} to {config.functional_max_km} km"
        )
        return 0
    inputs = list(draws_paths) + ([data_dir] if data_dir else [])
    _manifest("functional", config, out_dir, config_path, inputs=inputs).write()

    network = config.network()
    partition = build_partition(network, config.model_spec().cell_counts(network))
    draws = read_draws(draws_paths).to_frame()
    curve = odds_change_curve(
        draws,
        partition,
        config.kernel,
        config.functional_origin,
        config.functional_direction,
        config.functional_reference_km,
        config.functional_max_km,
        config.functional_points,
        config.functional_group,
    )
    curve.to_csv(out_dir / ODDS_CHANGE_FILE, index=False, float_format="%.17g")

    if data_dir is not None:
        dataset = load_dataset(data_dir)
        log_distance = min_distance_predictor(network, dataset)
        pd.DataFrame({
            "household_id": list(dataset.household_ids),
            "log_min_distance_km": log_distance,
        }).to_csv(out_dir / MIN_DISTANCE_FILE, index=False, float_format="%.17g")
    return 0
