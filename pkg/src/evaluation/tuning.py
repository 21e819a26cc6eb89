"""
Hyperparameter tuning: (lambda, a) grid search and the a-sweep experiment

Lambda candidates are multipliers of ||Y||_F, Y being the observed values
filled into a zero matrix.
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config import settings
from ..admm import solve
from ..errors import NumericalError
from ..models import DenseMatrix, Entries, ObservationSet, Regularizer, SolveReport, SolverConfig
from ..synthetic import ScenarioSpec, make_instance
from ..utils.parallel import parallel_map
from .metrics import relative_error, trmse

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_MULTIPLIERS = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
DEFAULT_A_VALUES = [0.1, 1.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 600.0, 900.0, 1500.0, 3000.0]


class TuningObjective(str, Enum):
    RE_VS_TRUTH = "re"
    TRMSE_ON_VALIDATION = "trmse"


class TuningGrid(BaseModel):
    """Lambda multipliers and a values to search, plus the template for all other solver settings"""
    model_config = ConfigDict(frozen=True)

    lambda_multipliers: List[float] = Field(
        default_factory=lambda: list(DEFAULT_LAMBDA_MULTIPLIERS), min_length=1
    )
    a_values: List[float] = Field(default_factory=lambda: list(DEFAULT_A_VALUES), min_length=1)
    fixed: SolverConfig = Field(default_factory=lambda: SolverConfig(lam=1.0))

    @field_validator("fixed", mode="before")
    @classmethod
    def _template_lambda(cls, value: Any) -> Any:
        # lambda is always overwritten per cell, so templates may leave it out
        if isinstance(value, dict) and "lambda" not in value and "lam" not in value:
            return {**value, "lambda": 1.0}
        return value

    @field_validator("lambda_multipliers", "a_values")
    @classmethod
    def _positive(cls, values: List[float]) -> List[float]:
        if any(not (v > 0 and np.isfinite(v)) for v in values):
            raise ValueError("grid values must be positive and finite")
        return values

    def effective_a_values(self) -> List[float]:
        """a is irrelevant for the nuclear norm, so that grid collapses to the template's a"""
        if self.fixed.regularizer is Regularizer.NUCLEAR:
            return [self.fixed.a]
        return list(self.a_values)

    def cells(self) -> List[Tuple[float, float]]:
        """(a, lambda multiplier) pairs in evaluation order"""
        return [(a, mult) for a in self.effective_a_values() for mult in self.lambda_multipliers]

    def with_fixed(self, **changes: Any) -> "TuningGrid":
        return self.model_copy(update={"fixed": self.fixed.with_updates(**changes)})

    def restricted_to(self, a: float) -> "TuningGrid":
        return self.model_copy(update={"a_values": [a]})


@dataclass(frozen=True, eq=False)
class TuningContext:
    """What a grid cell is scored against"""
    truth: Optional[DenseMatrix] = None
    validation: Optional[Entries] = None
    prediction_bounds: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class SurfacePoint:
    """Score of one grid cell"""
    a: float
    lambda_multiplier: float
    lam: float
    score: float
    estimated_rank: Optional[int]
    iterations: Optional[int]
    converged: bool

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class GridSearchResult:
    best_config: SolverConfig
    best_score: float
    best_point: SurfacePoint
    surface: List[SurfacePoint]


def observed_scale(obs: ObservationSet) -> float:
    """||Y||_F, the unit lambda multipliers are expressed in"""
    return float(np.linalg.norm(obs.entries.values))


def _check_context(objective: TuningObjective, context: TuningContext) -> None:
    if objective is TuningObjective.RE_VS_TRUTH and context.truth is None:
        raise ValueError("RE tuning needs the ground truth in the context")
    if objective is TuningObjective.TRMSE_ON_VALIDATION and (
        context.validation is None or len(context.validation) == 0
    ):
        raise ValueError("TRMSE tuning needs non-empty validation entries in the context")


def prediction_matrix(report: SolveReport, context: TuningContext) -> DenseMatrix:
    """Clamped estimate, additionally clipped to the rating range when one is set"""
    if context.prediction_bounds is None:
        return report.estimate
    low, high = context.prediction_bounds
    return np.clip(report.estimate, low, high)


def score_report(report: SolveReport, objective: TuningObjective, context: TuningContext) -> float:
    prediction = prediction_matrix(report, context)
    if objective is TuningObjective.RE_VS_TRUTH:
        return relative_error(prediction, context.truth)
    return trmse(prediction, context.validation)


def _evaluate_cell(task) -> SurfacePoint:
    obs, config, multiplier, objective, context = task
    try:
        report = solve(obs, config)
    except NumericalError as exc:
        logger.warning("Cell a=%g, lambda=%g x ||Y||_F diverged: %s", config.a, multiplier, exc)
        return SurfacePoint(config.a, multiplier, config.lam, float("inf"), None, None, False)

    score = score_report(report, objective, context)
    logger.info(
        "Cell a=%g, lambda=%g x ||Y||_F: score %.6f, rank %d", config.a, multiplier, score,
        report.estimated_rank,
    )
    return SurfacePoint(
        config.a, multiplier, config.lam, score, report.estimated_rank, report.iterations,
        report.converged,
    )


def grid_search(
    obs: ObservationSet,
    grid: TuningGrid,
    objective: TuningObjective,
    context: TuningContext,
    workers: int = 1,
) -> GridSearchResult:
    """Solve every grid cell and return the best configuration, its score and the full surface"""
    objective = TuningObjective(objective)
    _check_context(objective, context)
    scale = observed_scale(obs)

    tasks = []
    for a, multiplier in grid.cells():
        config = grid.fixed.with_updates(a=a, lam=multiplier * scale)
        tasks.append((obs, config, multiplier, objective, context))

    surface = parallel_map(_evaluate_cell, tasks, workers)

    # smallest score, then smaller a, then smaller lambda
    best_index = min(
        range(len(surface)),
        key=lambda i: (surface[i].score, surface[i].a, surface[i].lam),
    )
    best_point = surface[best_index]
    return GridSearchResult(
        best_config=tasks[best_index][1],
        best_score=best_point.score,
        best_point=best_point,
        surface=surface,
    )


@dataclass(frozen=True)
class ASweepRow:
    """Best relative error over lambda for one value of a"""
    a: float
    best_lambda_multiplier: float
    best_lambda: float
    best_relative_error: float
    estimated_rank: Optional[int]

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


def synthetic_zeta(truth: DenseMatrix) -> float:
    """Entrywise bound for synthetic data, a fixed inflation of ||A0||_inf"""
    return settings.ZETA_INFLATION * float(np.max(np.abs(truth)))


def a_sweep(
    scenario: ScenarioSpec,
    a_values: List[float],
    grid: TuningGrid,
    workers: int = 1,
) -> List[ASweepRow]:
    """For each a, tune lambda only and record the best RE with the rank of that estimate"""
    if not a_values:
        raise ValueError("a_sweep needs at least one value of a")

    instance = make_instance(scenario)
    context = TuningContext(truth=instance.truth)
    base = grid.with_fixed(regularizer=Regularizer.TL1, zeta=synthetic_zeta(instance.truth))

    rows = []
    for a in a_values:
        result = grid_search(
            instance.observations, base.restricted_to(a), TuningObjective.RE_VS_TRUTH, context,
            workers,
        )
        point = result.best_point
        rows.append(
            ASweepRow(
                a=a,
                best_lambda_multiplier=point.lambda_multiplier,
                best_lambda=point.lam,
                best_relative_error=point.score,
                estimated_rank=point.estimated_rank,
            )
        )
        logger.info("a=%g: best RE %.6f, rank %s", a, point.score, point.estimated_rank)
    return rows
