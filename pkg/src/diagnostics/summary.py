"""Posterior summaries and the fit report."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.diagnostics.convergence import ess_bulk, ess_tail, split_rhat_rank_normalized
from src.sampler.runner import PosteriorDraws
from src.utils.exceptions import InputOutputError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

QUANTILE_PROBS = (0.01, 0.10, 0.50, 0.90, 0.99)
RHAT_THRESHOLD = 1.01
REPORT_COLUMNS = ["name", "mean", "sd", "q1", "q10", "q50", "q90", "q99", "rhat", "ess_bulk", "ess_tail"]


def posterior_quantiles(values, probs: Sequence[float] = QUANTILE_PROBS) -> np.ndarray:
    """Quantiles by linear interpolation of order statistics."""
    return np.quantile(np.asarray(values, dtype=float).ravel(), probs, method="linear")


@dataclass(frozen=True)
class ParameterSummary:
    name: str
    mean: float
    sd: float
    q1: float
    q10: float
    q50: float
    q90: float
    q99: float
    rhat: Optional[float]
    ess_bulk: Optional[float]
    ess_tail: Optional[float]


@dataclass
class FitReport:
    """Per-parameter summaries plus global sampler counts."""

    parameters: List[ParameterSummary]
    n_divergent: int = 0
    treedepth_saturation: int = 0
    n_chains: int = 0
    n_draws: int = 0
    _index: Dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self._index = {p.name: i for i, p in enumerate(self.parameters)}

    def __getitem__(self, name: str) -> ParameterSummary:
        return self.parameters[self._index[name]]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def names(self) -> List[str]:
        return [p.name for p in self.parameters]

    def max_rhat(self) -> Optional[float]:
        values = [p.rhat for p in self.parameters if p.rhat is not None]
        return max(values) if values else None

    def min_ess_bulk(self) -> Optional[float]:
        values = [p.ess_bulk for p in self.parameters if p.ess_bulk is not None]
        return min(values) if values else None

    def min_ess_tail(self) -> Optional[float]:
        values = [p.ess_tail for p in self.parameters if p.ess_tail is not None]
        return min(values) if values else None

    def flagged(self, threshold: float = RHAT_THRESHOLD) -> List[str]:
        """Parameters whose R-hat exceeds the threshold."""
        return [p.name for p in self.parameters if p.rhat is not None and p.rhat > threshold]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(p) for p in self.parameters], columns=REPORT_COLUMNS)

    def to_dict(self) -> dict:
        return {
            "n_divergent": self.n_divergent,
            "treedepth_saturation": self.treedepth_saturation,
            "n_chains": self.n_chains,
            "n_draws": self.n_draws,
            "max_rhat": self.max_rhat(),
            "min_ess_bulk": self.min_ess_bulk(),
            "min_ess_tail": self.min_ess_tail(),
        }


def summarize_parameter(name: str, ary) -> ParameterSummary:
    """Summary of one parameter from its (chains, draws) array."""
    ary = np.asarray(ary, dtype=float)
    if ary.ndim == 1:
        ary = ary[None, :]
    flat = ary.ravel()
    q = posterior_quantiles(flat)
    sd = float(np.std(flat, ddof=1)) if flat.size > 1 else 0.0
    return ParameterSummary(
        name=name,
        mean=float(np.mean(flat)),
        sd=sd,
        q1=float(q[0]),
        q10=float(q[1]),
        q50=float(q[2]),
        q90=float(q[3]),
        q99=float(q[4]),
        rhat=split_rhat_rank_normalized(ary),
        ess_bulk=ess_bulk(ary),
        ess_tail=ess_tail(ary),
    )


def summarize(
    draws: PosteriorDraws,
    names: Optional[Sequence[str]] = None,
    max_tree_depth: int = 10,
    threads: int = 1,
) -> FitReport:
    """FitReport over the named parameters (all by default)."""
    names = list(names) if names is not None else draws.names

    def one(name: str) -> ParameterSummary:
        return summarize_parameter(name, draws.array(name))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parameters = list(pool.map(one, names))
    else:
        parameters = [one(name) for name in names]

    report = FitReport(
        parameters=parameters,
        n_divergent=draws.n_divergent,
        treedepth_saturation=draws.treedepth_saturation(max_tree_depth),
        n_chains=len(draws),
        n_draws=draws[0].n_draws if len(draws) else 0,
    )
    flagged = report.flagged()
    if flagged:
        logger.warning(
            f"{len(flagged)} parameter(s) have R-hat above {RHAT_THRESHOLD}: {flagged[:5]}"
        )
    return report


def write_report(report: FitReport, path: Union[str, Path]) -> None:
    """Report CSV; undefined diagnostics are written as NA."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report.to_frame().to_csv(path, index=False, na_rep="NA", float_format="%.17g")


def read_report(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise InputOutputError(f"missing report file {path}")
    return pd.read_csv(path, na_values=["NA"])
