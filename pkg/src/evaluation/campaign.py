"""
Benchmark campaigns: tune each method once per scenario, then evaluate it over fresh realizations
"""

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from config import settings
from .. import __version__
from ..admm import solve
from ..errors import NumericalError
from ..models import Regularizer
from ..synthetic import ScenarioSpec, derive_seed, make_instance
from ..utils.parallel import parallel_map
from .metrics import relative_error
from .tuning import (
    GridSearchResult,
    TuningContext,
    TuningGrid,
    TuningObjective,
    grid_search,
    observed_scale,
    synthetic_zeta,
)

logger = logging.getLogger(__name__)

TUNING_TRIAL = 0
TIMING_COLUMNS = ["seconds"]


class CampaignConfig(BaseModel):
    """Scenarios, methods, trial count and tuning grid of one benchmark run"""
    model_config = ConfigDict(frozen=True)

    scenarios: List[ScenarioSpec] = Field(min_length=1)
    methods: List[Regularizer] = Field(
        default_factory=lambda: [Regularizer.TL1, Regularizer.NUCLEAR], min_length=1
    )
    trials: int = Field(default=settings.DEFAULT_TRIALS, ge=1)
    grid: TuningGrid = Field(default_factory=TuningGrid)


@dataclass(frozen=True)
class TrialRecord:
    """One evaluated realization of one (scenario, method) cell"""
    scenario: str
    m1: int
    m2: int
    r: int
    scheme: int
    sampling_ratio: float
    snr_db: Optional[float]
    method: str
    trial: int
    seed: int
    lambda_multiplier: float
    lam: float
    a: float
    relative_error: float
    estimated_rank: Optional[int]
    iterations: Optional[int]
    converged: bool
    seconds: float
    error: Optional[str] = None

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CellAggregate:
    """Mean and standard deviation over the trials of one (scenario, method) cell"""
    scenario: str
    method: str
    trials: int
    mean_relative_error: float
    std_relative_error: float
    mean_estimated_rank: float
    mean_seconds: float
    lambda_multiplier: float
    a: float
    tuning_score: float

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CampaignResult:
    records: List[TrialRecord]
    aggregates: List[CellAggregate]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def records_frame(self, include_timing: bool = False) -> pd.DataFrame:
        """Per-trial table; wall time is left out by default so reruns compare byte-for-byte"""
        frame = pd.DataFrame([record.as_row() for record in self.records])
        if not include_timing:
            frame = frame.drop(columns=TIMING_COLUMNS, errors="ignore")
        return frame

    def aggregates_frame(self) -> pd.DataFrame:
        return pd.DataFrame([aggregate.as_row() for aggregate in self.aggregates])

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "metadata": self.metadata,
            "aggregates": [aggregate.as_row() for aggregate in self.aggregates],
            "records": [record.as_row() for record in self.records],
        }


def aggregate_records(
    records: List[TrialRecord], tuning: Dict[tuple, GridSearchResult]
) -> List[CellAggregate]:
    """Group records by (scenario, method) in first-seen order and summarize each group"""
    groups: Dict[tuple, List[TrialRecord]] = {}
    for record in records:
        groups.setdefault((record.scenario, record.method), []).append(record)

    aggregates = []
    for key, group in groups.items():
        errors = np.array([r.relative_error for r in group], dtype=np.float64)
        ranks = np.array(
            [np.nan if r.estimated_rank is None else r.estimated_rank for r in group],
            dtype=np.float64,
        )
        seconds = np.array([r.seconds for r in group], dtype=np.float64)
        tuned = tuning.get(key)
        aggregates.append(
            CellAggregate(
                scenario=key[0],
                method=key[1],
                trials=len(group),
                mean_relative_error=float(np.mean(errors)),
                std_relative_error=float(np.std(errors)),
                mean_estimated_rank=float(np.mean(ranks)),
                mean_seconds=float(np.mean(seconds)),
                lambda_multiplier=group[0].lambda_multiplier,
                a=group[0].a,
                tuning_score=tuned.best_score if tuned is not None else float("nan"),
            )
        )
    return aggregates


def tune_method(
    scenario: ScenarioSpec, method: Regularizer, grid: TuningGrid, workers: int = 1
) -> GridSearchResult:
    """Grid search on the dedicated tuning realization of a scenario"""
    instance = make_instance(scenario.with_seed(derive_seed(scenario.seed, TUNING_TRIAL)))
    method_grid = grid.with_fixed(regularizer=method, zeta=synthetic_zeta(instance.truth))
    return grid_search(
        instance.observations, method_grid, TuningObjective.RE_VS_TRUTH,
        TuningContext(truth=instance.truth), workers,
    )


def _run_trial(task) -> TrialRecord:
    scenario, method, trial, tuned = task
    seed = derive_seed(scenario.seed, trial)
    instance = make_instance(scenario.with_seed(seed))
    multiplier = tuned.best_point.lambda_multiplier
    config = tuned.best_config.with_updates(
        lam=multiplier * observed_scale(instance.observations),
        zeta=synthetic_zeta(instance.truth),
    )

    common = dict(
        scenario=scenario.label, m1=scenario.m1, m2=scenario.m2, r=scenario.r,
        scheme=int(scenario.scheme), sampling_ratio=scenario.sampling_ratio,
        snr_db=scenario.snr_db, method=Regularizer(method).value, trial=trial, seed=seed,
        lambda_multiplier=multiplier, lam=config.lam, a=config.a,
    )

    started = time.perf_counter()
    try:
        report = solve(instance.observations, config)
    except NumericalError as exc:
        logger.warning("%s / %s trial %d failed: %s", scenario.label, common["method"], trial, exc)
        return TrialRecord(
            **common, relative_error=float("inf"), estimated_rank=None, iterations=None,
            converged=False, seconds=time.perf_counter() - started, error=str(exc),
        )

    error = relative_error(report.estimate, instance.truth)
    logger.info(
        "%s / %s trial %d: RE %.4f, rank %d", scenario.label, common["method"], trial, error,
        report.estimated_rank,
    )
    return TrialRecord(
        **common, relative_error=error, estimated_rank=report.estimated_rank,
        iterations=report.iterations, converged=report.converged,
        seconds=report.elapsed_seconds,
    )


def run_campaign(
    scenarios: List[ScenarioSpec],
    methods: List[Regularizer],
    trials: int,
    grid: TuningGrid,
    workers: int = 1,
) -> CampaignResult:
    """Tune on trial 0 of each scenario, then evaluate the frozen config on trials 1..trials"""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    methods = [Regularizer(m) for m in methods]

    tuning: Dict[tuple, GridSearchResult] = {}
    tasks = []
    for scenario in scenarios:
        for method in methods:
            logger.info("Tuning %s on %s", method.value, scenario.label)
            tuned = tune_method(scenario, method, grid, workers)
            tuning[(scenario.label, method.value)] = tuned
            tasks.extend(
                (scenario, method, trial, tuned) for trial in range(TUNING_TRIAL + 1, trials + 1)
            )

    records = parallel_map(_run_trial, tasks, workers)

    metadata = {
        "version": __version__,
        "protocol": "tune once on a dedicated realization, evaluate on fresh seeds",
        "trials": trials,
        "methods": [m.value for m in methods],
        "scenarios": [s.model_dump(mode="json") for s in scenarios],
        "grid": grid.model_dump(mode="json", by_alias=True),
        "zeta_rule": f"{settings.ZETA_INFLATION} * max|A0|",
        "tuning": {
            f"{label}/{method}": {
                "best_score": result.best_score,
                "lambda_multiplier": result.best_point.lambda_multiplier,
                "a": result.best_point.a,
                "surface": [point.as_row() for point in result.surface],
            }
            for (label, method), result in tuning.items()
        },
    }
    return CampaignResult(
        records=records, aggregates=aggregate_records(records, tuning), metadata=metadata
    )


def run_campaign_config(campaign: CampaignConfig, workers: int = 1) -> CampaignResult:
    return run_campaign(
        campaign.scenarios, campaign.methods, campaign.trials, campaign.grid, workers
    )
