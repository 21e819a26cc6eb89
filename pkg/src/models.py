"""
Core data types for matrix completion: matrices, observations, sampling and solver configuration
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from config import settings
from .errors import NonFiniteMatrixError

# Real m1 x m2 array; houses A0, the estimate, Y, Z, W and masks
DenseMatrix = NDArray[np.float64]

GOLDEN_RATIO = (1 + 5 ** 0.5) / 2
SUM_TOLERANCE = 1e-12


def as_matrix(
    values: ArrayLike, rows: Optional[int] = None, cols: Optional[int] = None
) -> DenseMatrix:
    """Build a read-only float64 matrix, reshaping row-major entries when dimensions are given"""
    matrix = np.array(values, dtype=np.float64)

    if rows is not None or cols is not None:
        if rows is None or cols is None:
            raise ValueError("rows and cols must be given together")
        if matrix.size != rows * cols:
            raise ValueError(f"Expected {rows * cols} entries, got {matrix.size}")
        matrix = matrix.reshape(rows, cols)

    if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise ValueError(f"Expected a non-empty 2-D matrix, got shape {matrix.shape}")

    if not np.all(np.isfinite(matrix)):
        raise NonFiniteMatrixError("Matrix has NaN or Inf entries")

    matrix.setflags(write=False)
    return matrix


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Entries:
    """Matrix entries addressed by (row, col) together with their values"""
    rows: NDArray[np.int64]
    cols: NDArray[np.int64]
    values: NDArray[np.float64]

    def __post_init__(self):
        rows = _readonly(np.array(self.rows, dtype=np.int64).ravel())
        cols = _readonly(np.array(self.cols, dtype=np.int64).ravel())
        values = _readonly(np.array(self.values, dtype=np.float64).ravel())

        if not rows.size == cols.size == values.size:
            raise ValueError(
                f"Index and value arrays differ in length: {rows.size}, {cols.size}, {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteMatrixError("Entry values must be finite")

        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_triples(cls, triples: Iterable[Tuple[int, int, float]]) -> "Entries":
        """Build from (row, col, value) triples"""
        triples = list(triples)
        if not triples:
            return cls.empty()
        rows, cols, values = zip(*triples)
        return cls(np.asarray(rows), np.asarray(cols), np.asarray(values))

    @classmethod
    def empty(cls) -> "Entries":
        return cls(np.empty(0), np.empty(0), np.empty(0))

    def __len__(self) -> int:
        return int(self.values.size)

    def triples(self) -> List[Tuple[int, int, float]]:
        """Entries as a list of (row, col, value) triples"""
        return [
            (int(k), int(l), float(v))
            for k, l, v in zip(self.rows, self.cols, self.values)
        ]

    def subset(self, index: ArrayLike) -> "Entries":
        """Entries selected by an integer or boolean index"""
        index = np.asarray(index)
        return Entries(self.rows[index], self.cols[index], self.values[index])

    def check_bounds(self, rows: int, cols: int) -> None:
        """Raise if any index falls outside a rows x cols matrix"""
        if len(self) == 0:
            return
        if self.rows.min() < 0 or self.rows.max() >= rows:
            raise ValueError(f"Row index out of bounds for {rows} rows")
        if self.cols.min() < 0 or self.cols.max() >= cols:
            raise ValueError(f"Column index out of bounds for {cols} columns")

    def has_duplicates(self, cols: int) -> bool:
        linear = self.rows * cols + self.cols
        return np.unique(linear).size != linear.size


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """The n observed pairs (T_i, Y_i) of the trace regression model, sampled without replacement"""
    rows: int
    cols: int
    entries: Entries

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"Dimensions must be positive, got {self.rows}x{self.cols}")
        if len(self.entries) == 0:
            raise ValueError("An observation set needs at least one sample")
        self.entries.check_bounds(self.rows, self.cols)
        if self.entries.has_duplicates(self.cols):
            raise ValueError("Duplicate index pairs: observations must be sampled without replacement")

    @classmethod
    def from_samples(
        cls, rows: int, cols: int, samples: Iterable[Tuple[int, int, float]]
    ) -> "ObservationSet":
        return cls(rows, cols, Entries.from_triples(samples))

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> "ObservationSet":
        """Fully observed set covering every entry of a matrix"""
        matrix = as_matrix(matrix)
        rows, cols = np.indices(matrix.shape)
        return cls(matrix.shape[0], matrix.shape[1], Entries(rows, cols, matrix))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def samples(self) -> List[Tuple[int, int, float]]:
        return self.entries.triples()

    @cached_property
    def mask(self) -> DenseMatrix:
        """Binary matrix T = sum_i T_i"""
        mask = np.zeros(self.shape)
        mask[self.entries.rows, self.entries.cols] = 1.0
        return _readonly(mask)

    @cached_property
    def filled(self) -> DenseMatrix:
        """Y as a matrix, zero at unobserved entries"""
        filled = np.zeros(self.shape)
        filled[self.entries.rows, self.entries.cols] = self.entries.values
        return _readonly(filled)

    def values_at(self, matrix: DenseMatrix) -> np.ndarray:
        """Entries of a matrix at the observed positions, in sample order"""
        return np.asarray(matrix)[self.entries.rows, self.entries.cols]


@dataclass(frozen=True, eq=False)
class SamplingDistribution:
    """Row/column marginals p_k, p_l of the product sampling distribution pi_kl = p_k * p_l"""
    row_probs: NDArray[np.float64]
    col_probs: NDArray[np.float64]

    def __post_init__(self):
        for name in ("row_probs", "col_probs"):
            probs = _readonly(np.array(getattr(self, name), dtype=np.float64).ravel())
            if probs.size == 0:
                raise ValueError(f"{name} must not be empty")
            if np.any(probs < 0) or not np.all(np.isfinite(probs)):
                raise ValueError(f"{name} must be finite and non-negative")
            if abs(probs.sum() - 1.0) > SUM_TOLERANCE:
                raise ValueError(f"{name} sums to {probs.sum()!r}, expected 1")
            object.__setattr__(self, name, probs)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.row_probs.size, self.col_probs.size)

    def entry_probabilities(self) -> DenseMatrix:
        """The m1 x m2 matrix of pi_kl"""
        return np.outer(self.row_probs, self.col_probs)


class Regularizer(str, Enum):
    TL1 = "tl1"
    NUCLEAR = "nuclear"


class SolverConfig(BaseModel):
    """Parameters of the TL1 / nuclear-norm ADMM estimator"""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0, allow_inf_nan=False)
    a: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    zeta: float = Field(default=settings.RATING_ZETA, gt=0, allow_inf_nan=False)
    rho: float = Field(default=settings.DEFAULT_RHO, gt=0, allow_inf_nan=False)
    tau: float = Field(default=settings.DEFAULT_TAU, gt=0, lt=GOLDEN_RATIO)
    max_iters: int = Field(default=settings.DEFAULT_MAX_ITERS, ge=1)
    tol: float = Field(default=settings.DEFAULT_TOL, gt=0, allow_inf_nan=False)
    regularizer: Regularizer = Regularizer.TL1
    rank_threshold: float = Field(default=settings.RANK_THRESHOLD, gt=0, lt=1)

    @property
    def mu(self) -> float:
        """Prox weight lambda / rho of the Z-update"""
        return self.lam / self.rho

    def with_updates(self, **changes: Any) -> "SolverConfig":
        """Validated copy with some fields replaced"""
        return SolverConfig.model_validate({**self.model_dump(), **changes})

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of one ADMM run"""
    estimate: DenseMatrix  # clamp(Z_final, zeta)
    raw_estimate: DenseMatrix  # Z_final
    final_a: DenseMatrix
    iterations: int
    primal_residuals: NDArray[np.float64]
    objective_trace: NDArray[np.float64]
    converged: bool
    estimated_rank: int
    elapsed_seconds: float
    config: SolverConfig

    def summary(self) -> Dict[str, Any]:
        """JSON-ready description without the matrices"""
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "estimated_rank": self.estimated_rank,
            "elapsed_seconds": self.elapsed_seconds,
            "final_primal_residual": (
                float(self.primal_residuals[-1]) if self.iterations else None
            ),
            "final_objective": (
                float(self.objective_trace[-1]) if self.iterations else None
            ),
            "primal_residuals": [float(r) for r in self.primal_residuals],
            "objective_trace": [float(v) for v in self.objective_trace],
            "config": self.config.to_json_dict(),
        }
