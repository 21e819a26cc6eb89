"""
Spectral regularizers: transformed L1 (TL1) and the nuclear norm

TL1_a(M) = sum_j (a+1) s_j / (a + s_j) over the singular values s_j of M.
It tends to rank(M) as a -> 0+ and to the nuclear norm as a -> inf.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NonSmoothPointError
from .models import DenseMatrix, Regularizer, SolverConfig
from .utils.linalg import singular_values, svd

# arccos arguments this far outside [-1, 1] are rounding noise, not a missing root
ARCCOS_SLACK = 1e-12
SMOOTH_GAP = 1e-8

ArrayOrScalar = Union[float, np.ndarray]


@dataclass(frozen=True)
class ProxParams:
    """Prox weight mu (= lambda / rho in the Z-update) and TL1 parameter a"""
    mu: float
    a: float

    def __post_init__(self):
        if not (self.mu > 0 and np.isfinite(self.mu)):
            raise ValueError(f"mu must be positive and finite, got {self.mu}")
        if not (self.a > 0 and np.isfinite(self.a)):
            raise ValueError(f"a must be positive and finite, got {self.a}")

    @classmethod
    def from_config(cls, config: SolverConfig) -> "ProxParams":
        return cls(mu=config.mu, a=config.a)


def _check_a(a: float) -> None:
    if not a > 0:
        raise ValueError(f"TL1 parameter a must be positive, got {a}")


def tl1_penalty(sigma: ArrayOrScalar, a: float) -> ArrayOrScalar:
    """Scalar TL1 term (a+1)|x| / (a+|x|), elementwise"""
    magnitude = np.abs(sigma)
    return (a + 1.0) * magnitude / (a + magnitude)


def tl1_value(matrix: DenseMatrix, a: float) -> float:
    _check_a(a)
    return float(np.sum(tl1_penalty(singular_values(matrix), a)))


def nuclear_norm(matrix: DenseMatrix) -> float:
    return float(np.sum(singular_values(matrix)))


def tl1_prox_objective(z: ArrayOrScalar, x: ArrayOrScalar, params: ProxParams) -> ArrayOrScalar:
    """g(z) = mu (a+1)|z| / (a+|z|) + (z-x)^2 / 2, the function the scalar prox minimizes"""
    return params.mu * tl1_penalty(z, params.a) + 0.5 * (np.asarray(z) - x) ** 2


def tl1_scalar_prox(x: ArrayOrScalar, params: ProxParams) -> ArrayOrScalar:
    """
    Global minimizer of g(z) = mu (a+1)|z|/(a+|z|) + (z-x)^2/2, elementwise.

    For z > 0 the stationary points solve a cubic in a+z whose largest root is
    |x| + (2/3)(a+|x|)(cos(phi/3) - 1) with phi = arccos(1 - delta),
    delta = 27 mu a (1+a) / (2 (a+|x|)^3). It is evaluated as
    |x| - (4/3)(a+|x|) sin^2(phi/6) with phi = 2 arcsin(sqrt(delta/2)), which is
    the same quantity without cancellation when a is large. The candidate is
    compared against z = 0 and the smaller objective wins; ties go to 0.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    magnitude = np.abs(x_arr)
    mu, a = params.mu, params.a

    shifted = a + magnitude
    delta = 27.0 * mu * a * (1.0 + a) / (2.0 * shifted ** 3)
    has_root = delta <= 2.0 + ARCCOS_SLACK

    half = np.clip(delta, 0.0, 2.0) / 2.0
    phi = 2.0 * np.arcsin(np.sqrt(half))
    candidate = magnitude - (4.0 / 3.0) * shifted * np.sin(phi / 6.0) ** 2
    candidate = np.clip(candidate, 0.0, magnitude)

    zero_cost = 0.5 * magnitude ** 2
    candidate_cost = tl1_prox_objective(candidate, magnitude, params)
    keep = has_root & (candidate_cost < zero_cost)

    result = np.sign(x_arr) * np.where(keep, candidate, 0.0)
    if np.ndim(x) == 0:
        return float(result)
    return result


def nuclear_scalar_prox(x: ArrayOrScalar, mu: float) -> ArrayOrScalar:
    """Soft threshold sign(x) max(|x| - mu, 0)"""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    result = np.sign(x) * np.maximum(np.abs(x) - mu, 0.0)
    if np.ndim(x) == 0:
        return float(result)
    return result


def tl1_matrix_prox(matrix: DenseMatrix, params: ProxParams) -> DenseMatrix:
    """U diag(prox(s_j)) V^T over the thin SVD of the input"""
    decomposition = svd(matrix)
    shrunk = tl1_scalar_prox(decomposition.s, params)
    return (decomposition.U * shrunk) @ decomposition.Vt


def nuclear_matrix_prox(matrix: DenseMatrix, mu: float) -> DenseMatrix:
    """Singular value thresholding"""
    decomposition = svd(matrix)
    shrunk = nuclear_scalar_prox(decomposition.s, mu)
    return (decomposition.U * shrunk) @ decomposition.Vt


def tl1_gradient(matrix: DenseMatrix, a: float) -> DenseMatrix:
    """
    Gradient sum_j a(1+a)/(a+s_j)^2 u_j v_j^T of TL1_a.

    Only defined where all singular values are distinct and nonzero; raises
    NonSmoothPointError otherwise.
    """
    _check_a(a)
    decomposition = svd(matrix)
    s = decomposition.s

    if s.size and s[-1] < SMOOTH_GAP:
        raise NonSmoothPointError(f"Singular value {s[-1]:.3e} is (numerically) zero")
    gaps = -np.diff(s)
    if gaps.size and gaps.min() < SMOOTH_GAP:
        raise NonSmoothPointError(f"Repeated singular values (gap {gaps.min():.3e})")

    weights = a * (1.0 + a) / (a + s) ** 2
    return (decomposition.U * weights) @ decomposition.Vt


def penalty_value(matrix: DenseMatrix, config: SolverConfig) -> float:
    """Regularizer value selected by the solver configuration"""
    if config.regularizer is Regularizer.NUCLEAR:
        return nuclear_norm(matrix)
    return tl1_value(matrix, config.a)


def spectral_penalty(sigma: np.ndarray, config: SolverConfig) -> float:
    """Regularizer value from known singular values"""
    if config.regularizer is Regularizer.NUCLEAR:
        return float(np.sum(np.abs(sigma)))
    return float(np.sum(tl1_penalty(sigma, config.a)))
