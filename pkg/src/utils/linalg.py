"""
Dense linear algebra helpers: thin SVD and entrywise projection
"""

import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg

from ..errors import NonFiniteMatrixError
from ..models import DenseMatrix

logger = logging.getLogger(__name__)


class SingularValueDecomposition(NamedTuple):
    """Thin SVD M = U diag(s) Vt with s descending"""
    U: DenseMatrix
    s: np.ndarray
    Vt: DenseMatrix

    @property
    def V(self) -> DenseMatrix:
        return self.Vt.T

    def reconstruct(self) -> DenseMatrix:
        return (self.U * self.s) @ self.Vt


def _require_finite(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteMatrixError("Cannot decompose a matrix with NaN or Inf entries")
    return matrix


def svd(matrix: DenseMatrix) -> SingularValueDecomposition:
    """Economy-size SVD; falls back to the slower gesvd driver if gesdd does not converge"""
    matrix = _require_finite(matrix)
    try:
        U, s, Vt = scipy.linalg.svd(
            matrix, full_matrices=False, check_finite=False, lapack_driver="gesdd"
        )
    except np.linalg.LinAlgError:
        logger.warning("gesdd did not converge on %s matrix, retrying with gesvd", matrix.shape)
        U, s, Vt = scipy.linalg.svd(
            matrix, full_matrices=False, check_finite=False, lapack_driver="gesvd"
        )
    return SingularValueDecomposition(U, s, Vt)


def singular_values(matrix: DenseMatrix) -> np.ndarray:
    """Singular values only, descending"""
    return scipy.linalg.svdvals(_require_finite(matrix), check_finite=False)


def clamp_entrywise(matrix: DenseMatrix, zeta: float) -> DenseMatrix:
    """Project every entry onto [-zeta, zeta]"""
    if zeta <= 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    return np.clip(matrix, -zeta, zeta)
