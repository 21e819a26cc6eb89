"""
Recovery metrics
"""

from typing import Iterable, Tuple, Union

import numpy as np

from ..models import DenseMatrix, Entries

EntryInput = Union[Entries, Iterable[Tuple[int, int, float]]]


def relative_error(estimate: DenseMatrix, truth: DenseMatrix) -> float:
    """||estimate - truth||_F / ||truth||_F"""
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ValueError(f"Shape mismatch: {estimate.shape} vs {truth.shape}")

    scale = float(np.linalg.norm(truth))
    if scale == 0.0:
        raise ZeroDivisionError("Relative error is undefined for a zero truth matrix")
    return float(np.linalg.norm(estimate - truth)) / scale


def trmse(estimate: DenseMatrix, eval_entries: EntryInput) -> float:
    """Root mean squared error over held-out entries"""
    if not isinstance(eval_entries, Entries):
        eval_entries = Entries.from_triples(eval_entries)
    if len(eval_entries) == 0:
        raise ValueError("TRMSE needs at least one evaluation entry")

    estimate = np.asarray(estimate)
    eval_entries.check_bounds(*estimate.shape)
    residual = estimate[eval_entries.rows, eval_entries.cols] - eval_entries.values
    return float(np.sqrt(np.mean(residual ** 2)))
