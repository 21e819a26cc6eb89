"""
Real-data rating prediction: tune on half of the test ratings, report TRMSE on the other half
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from config import settings
from ..admm import solve
from ..datasets import RatingDataset, parse_coat, parse_movielens, split_test
from ..models import Entries, Regularizer
from ..evaluation.metrics import trmse
from ..evaluation.tuning import (
    GridSearchResult,
    TuningContext,
    TuningGrid,
    TuningObjective,
    grid_search,
    prediction_matrix,
)

logger = logging.getLogger(__name__)

DATASET_PARSERS = {
    "movielens": parse_movielens,
    "coat": parse_coat,
}


@dataclass(frozen=True)
class MethodOutcome:
    """Tuned configuration and held-out error of one method"""
    method: str
    lambda_multiplier: float
    lam: float
    a: float
    validation_trmse: float
    evaluation_trmse: float
    estimated_rank: int
    iterations: int
    converged: bool

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class RealDataResult:
    dataset: str
    n_users: int
    n_items: int
    n_train: int
    n_validation: int
    n_evaluation: int
    seed: int
    outcomes: List[MethodOutcome] = field(default_factory=list)
    surfaces: Dict[str, list] = field(default_factory=dict)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "n_users": self.n_users,
            "n_items": self.n_items,
            "n_train": self.n_train,
            "n_validation": self.n_validation,
            "n_evaluation": self.n_evaluation,
            "seed": self.seed,
            "outcomes": [outcome.as_row() for outcome in self.outcomes],
            "surfaces": self.surfaces,
        }


class RealDataService:
    def __init__(
        self,
        grid: Optional[TuningGrid] = None,
        validation_fraction: float = settings.VALIDATION_FRACTION,
        workers: int = 1,
    ):
        self.grid = grid if grid is not None else TuningGrid()
        self.validation_fraction = validation_fraction
        self.workers = workers
        self.prediction_bounds = tuple(settings.RATING_CLIP)

    @staticmethod
    def load(dataset: str, train_path: Union[str, Path], test_path: Union[str, Path]) -> RatingDataset:
        """Parse a supported dataset from user-supplied paths"""
        if dataset not in DATASET_PARSERS:
            raise ValueError(f"Unknown dataset '{dataset}', expected one of {sorted(DATASET_PARSERS)}")
        for path in (train_path, test_path):
            if not Path(path).is_file():
                raise FileNotFoundError(f"Dataset file not found: {path}")
        return DATASET_PARSERS[dataset](train_path, test_path)

    def tune(self, dataset: RatingDataset, method: Regularizer, validation: Entries) -> GridSearchResult:
        """Grid search scored by TRMSE of clipped predictions on the validation half"""
        grid = self.grid.with_fixed(regularizer=Regularizer(method), zeta=settings.RATING_ZETA)
        context = TuningContext(validation=validation, prediction_bounds=self.prediction_bounds)
        return grid_search(
            dataset.train_observations(), grid, TuningObjective.TRMSE_ON_VALIDATION, context,
            self.workers,
        )

    def evaluate(
        self,
        dataset: RatingDataset,
        seed: int,
        methods: Sequence[Regularizer] = (Regularizer.TL1, Regularizer.NUCLEAR),
    ) -> RealDataResult:
        if len(dataset.train) == 0:
            raise ValueError(f"{dataset.name} has no training ratings")

        validation, evaluation = split_test(dataset, self.validation_fraction, seed)
        if len(validation) == 0 or len(evaluation) == 0:
            raise ValueError("Test set too small to split into validation and evaluation halves")

        result = RealDataResult(
            dataset=dataset.name,
            n_users=dataset.n_users,
            n_items=dataset.n_items,
            n_train=len(dataset.train),
            n_validation=len(validation),
            n_evaluation=len(evaluation),
            seed=seed,
        )
        context = TuningContext(prediction_bounds=self.prediction_bounds)

        for method in methods:
            method = Regularizer(method)
            logger.info("Tuning %s on %s", method.value, dataset.name)
            tuned = self.tune(dataset, method, validation)

            report = solve(dataset.train_observations(), tuned.best_config)
            score = trmse(prediction_matrix(report, context), evaluation)
            logger.info(
                "%s on %s: validation TRMSE %.4f, evaluation TRMSE %.4f, rank %d",
                method.value, dataset.name, tuned.best_score, score, report.estimated_rank,
            )

            result.outcomes.append(
                MethodOutcome(
                    method=method.value,
                    lambda_multiplier=tuned.best_point.lambda_multiplier,
                    lam=tuned.best_config.lam,
                    a=tuned.best_config.a,
                    validation_trmse=tuned.best_score,
                    evaluation_trmse=score,
                    estimated_rank=report.estimated_rank,
                    iterations=report.iterations,
                    converged=report.converged,
                )
            )
            result.surfaces[method.value] = [point.as_row() for point in tuned.surface]
        return result
