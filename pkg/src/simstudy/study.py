"""Replicated simulation study: generate, fit, diagnose and estimate per scenario."""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from pydantic import ValidationError

from src.diagnostics.summary import RHAT_THRESHOLD, summarize, write_report
from src.geometry.network import CanalNetwork
from src.geometry.partition import build_partition
from src.model.dataset import save_dataset
from src.model.posterior import HazardPosterior
from src.model.spec import ModelSpec
from src.sampler.config import SamplerConfig
from src.sampler.runner import read_draws, run_chains, write_draws
from src.simstudy.estimators import (
    ESTIMATE_COLUMNS,
    ReplicationErrors,
    estimate,
    estimate_imae,
    replication_errors,
)
from src.simstudy.generate import generate_dataset
from src.simstudy.landscape import study_cell_counts, study_geometry, true_intensities
from src.simstudy.scenario import StudyConfig, StudyScenario, TruthRecord, derive_seed
from src.utils.exceptions import HazardFieldError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

DONE_MARKER = "replication.json"
REPORT_FILE = "report.csv"
REPLICATION_COLUMNS = [
    "scenario", "replication", "max_rhat", "rhat_flag", "n_divergent",
    "min_ess_bulk", "min_ess_tail", "runtime_seconds", "sampler_seed",
]
FAILURE_COLUMNS = ["scenario", "replication", "error_type", "message"]


@dataclass
class StudyResult:
    """Combined outputs of a study run."""

    estimates: pd.DataFrame
    imae: pd.DataFrame
    replications: pd.DataFrame
    failures: pd.DataFrame = field(
        default_factory=lambda: pd.DataFrame(columns=FAILURE_COLUMNS)
    )


def scenario_grid(study_config: StudyConfig) -> pd.DataFrame:
    """The scenario grid as a table, one row per scenario."""
    rows = []
    for scenario in study_config.scenarios():
        rows.append({
            "scenario": scenario.label,
            "households": scenario.households,
            "observations": scenario.observations,
            "distribution": scenario.distribution,
            "cells": scenario.cells,
            "replications": scenario.replications,
        })
    return pd.DataFrame(rows)


def replication_dir(out_dir: Path, scenario: StudyScenario, replication: int) -> Path:
    return out_dir / scenario.label / f"rep{replication:03d}"


class StudyRunner:
    """Runs every replication of every scenario, resuming completed ones."""

    def __init__(
        self,
        spec: ModelSpec,
        sampler_config: SamplerConfig,
        out_dir: Union[str, Path],
        threads: int = 1,
        network: Optional[CanalNetwork] = None,
    ):
        """
        Initialize the study runner

        Args:
            spec: Model settings; cell counts are replaced per scenario
            sampler_config: Sampler settings; the seed is re-derived per replication
            out_dir: Root of the study outputs
            threads: Replications fitted concurrently
            network: Study geometry (three-canal layout with y split by default)
        """
        if threads < 1:
            raise ValueError("threads must be at least 1")
        self.spec = spec
        self.sampler_config = sampler_config
        self.out_dir = Path(out_dir)
        self.threads = threads
        self.network = network or study_geometry(split_y=True)
        self.intensities = true_intensities(split_y="y" not in self.network.segment_ids)

        # Runtime state
        self.failures: List[Dict[str, Any]] = []

    def spec_for(self, scenario: StudyScenario) -> ModelSpec:
        """Model settings at the scenario's grid resolution.

        On the split study geometry the y pieces get half the cells of x1 and x2.
        """
        overrides = study_cell_counts(scenario.cells)
        if not set(overrides) <= set(self.network.segment_ids):
            overrides = {}
        return self.spec.model_copy(update={"cells": scenario.cells, "cell_overrides": overrides})

    def run_replication(
        self, scenario: StudyScenario, replication: int
    ) -> Optional[tuple]:
        """
        Fit one replication, or reload it when its done marker exists

        Returns:
            (metadata row, ReplicationErrors), or None if the replication failed
        """
        directory = replication_dir(self.out_dir, scenario, replication)
        spec = self.spec_for(scenario)
        try:
            if (directory / DONE_MARKER).exists():
                return self._reload(scenario, replication, spec, directory)
            return self._fit(scenario, replication, spec, directory)
        except (HazardFieldError, ValidationError, ValueError, OSError) as e:
            logger.error(
                f"{scenario.label} replication {replication} failed: {type(e).__name__}: {e}"
            )
            self.failures.append({
                "scenario": scenario.label,
                "replication": replication,
                "error_type": type(e).__name__,
                "message": str(e),
            })
            return None

    def _fit(self, scenario, replication, spec, directory):
        started = time.perf_counter()
        dataset, truth = generate_dataset(scenario, replication, self.network)
        save_dataset(dataset, directory)
        truth.save(directory)

        seed = derive_seed(self.sampler_config.seed, scenario.seed, replication)
        config = self.sampler_config.model_copy(update={"seed": seed})
        with HazardPosterior(spec, self.network, dataset) as posterior:
            draws = run_chains(posterior, config)
            partition = posterior.partition
        write_draws(draws, directory)
        report = summarize(draws, max_tree_depth=config.max_tree_depth)
        write_report(report, directory / REPORT_FILE)

        errors = replication_errors(
            draws.to_frame(), truth, replication, partition, self.intensities
        )
        max_rhat = report.max_rhat()
        meta = {
            "scenario": scenario.label,
            "replication": replication,
            "max_rhat": max_rhat,
            "rhat_flag": bool(max_rhat is None or max_rhat > RHAT_THRESHOLD),
            "n_divergent": int(report.n_divergent),
            "min_ess_bulk": report.min_ess_bulk(),
            "min_ess_tail": report.min_ess_tail(),
            "runtime_seconds": time.perf_counter() - started,
            "sampler_seed": seed,
        }
        if meta["rhat_flag"]:
            logger.warning(
                f"{scenario.label} replication {replication}: max R-hat {max_rhat} "
                f"exceeds {RHAT_THRESHOLD}"
            )
        # Written last; its presence marks the replication complete.
        with open(directory / DONE_MARKER, "w") as f:
            json.dump(meta, f, indent=2)
        logger.info(
            f"{scenario.label} replication {replication} done in {meta['runtime_seconds']:.1f}s"
        )
        return meta, errors

    def _reload(self, scenario, replication, spec, directory):
        with open(directory / DONE_MARKER) as f:
            meta = json.load(f)
        paths = sorted(directory.glob("draws_chain*.csv"))
        draws = read_draws(paths)
        truth = TruthRecord.load(directory)
        partition = build_partition(self.network, spec.cell_counts(self.network))
        errors = replication_errors(
            draws.to_frame(), truth, replication, partition, self.intensities
        )
        logger.info(f"{scenario.label} replication {replication} already complete, reloaded")
        return meta, errors

    def run_scenario(self, scenario: StudyScenario) -> Optional[StudyResult]:
        """All replications of one scenario plus its report files."""
        logger.info(f"Scenario {scenario.label}: {scenario.replications} replication(s)")
        indices = list(range(scenario.replications))
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                outcomes = list(pool.map(lambda r: self.run_replication(scenario, r), indices))
        else:
            outcomes = [self.run_replication(scenario, r) for r in indices]

        completed = [o for o in outcomes if o is not None]
        if not completed:
            logger.error(f"Scenario {scenario.label}: no replication completed")
            return None
        metas = [m for m, _ in completed]
        errors: List[ReplicationErrors] = [e for _, e in completed]

        scenario_dir = self.out_dir / scenario.label
        replications = pd.DataFrame(metas, columns=REPLICATION_COLUMNS)
        estimates = estimate(errors, scenario.label)
        imae = estimate_imae(errors, scenario.label)
        replications.to_csv(scenario_dir / "replications.csv", index=False, na_rep="NA")
        estimates.to_csv(scenario_dir / "estimates.csv", index=False, na_rep="NA")
        imae.to_csv(scenario_dir / "imae.csv", index=False, na_rep="NA")
        return StudyResult(estimates, imae, replications)

    def run(self, study_config: StudyConfig) -> StudyResult:
        results = [self.run_scenario(s) for s in study_config.scenarios()]
        results = [r for r in results if r is not None]
        failures = pd.DataFrame(self.failures, columns=FAILURE_COLUMNS)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if not failures.empty:
            failures.to_csv(self.out_dir / "failures.csv", index=False)
            logger.error(f"{len(failures)} replication(s) failed; see failures.csv")

        def combine(attr, columns):
            frames = [getattr(r, attr) for r in results]
            return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=columns)

        result = StudyResult(
            estimates=combine("estimates", ESTIMATE_COLUMNS),
            imae=combine("imae", ["scenario", "segment", "imae", "se_imae"]),
            replications=combine("replications", REPLICATION_COLUMNS),
            failures=failures,
        )
        result.estimates.to_csv(self.out_dir / "estimates.csv", index=False, na_rep="NA")
        result.imae.to_csv(self.out_dir / "imae.csv", index=False, na_rep="NA")
        return result


def run_study(
    study_config: StudyConfig,
    spec: ModelSpec,
    sampler_config: SamplerConfig,
    out_dir: Union[str, Path],
    threads: int = 1,
    dry_run: bool = False,
    network: Optional[CanalNetwork] = None,
) -> Union[StudyResult, pd.DataFrame]:
    """Run the study grid; with dry_run only the grid table is returned."""
    grid = scenario_grid(study_config)
    if dry_run:
        logger.info(f"Dry run: {len(grid)} scenario(s)\n{grid.to_string(index=False)}")
        return grid
    runner = StudyRunner(spec, sampler_config, out_dir, threads, network)
    return runner.run(study_config)
