"""
Synthetic trace-regression benchmarks: low-rank truth, sampling schemes and SNR-calibrated noise
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DegenerateSignalError, InvalidScenarioError
from .models import DenseMatrix, Entries, ObservationSet, SamplingDistribution, as_matrix

logger = logging.getLogger(__name__)

# Piece weights (k <= m/10, m/10 < k <= m/5, otherwise) in units of p0
SCHEME_WEIGHTS = {
    2: (2.0, 4.0, 1.0),
    3: (3.0, 9.0, 1.0),
}
MIN_NONUNIFORM_SIZE = 10


class SamplingScheme(IntEnum):
    S1 = 1  # uniform
    S2 = 2
    S3 = 3


class ScenarioSpec(BaseModel):
    """One synthetic design: dimensions, rank, sampling scheme, sampling ratio, SNR and seed"""
    model_config = ConfigDict(frozen=True)

    m1: int = Field(ge=1)
    m2: int = Field(ge=1)
    r: int = Field(ge=1)
    scheme: SamplingScheme = SamplingScheme.S1
    sampling_ratio: float = Field(gt=0, le=1)
    snr_db: Optional[float] = Field(default=None, allow_inf_nan=False)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def _check_design(self) -> "ScenarioSpec":
        if self.r > min(self.m1, self.m2):
            raise ValueError(f"rank {self.r} exceeds min({self.m1}, {self.m2})")
        if self.n < 1:
            raise ValueError("sampling ratio yields no observations")
        return self

    @property
    def n(self) -> int:
        """Number of observed entries, round(SR * m1 * m2)"""
        return int(round(self.sampling_ratio * self.m1 * self.m2))

    @property
    def label(self) -> str:
        snr = "noiseless" if self.snr_db is None else f"snr{self.snr_db:g}"
        return (
            f"{self.m1}x{self.m2}_r{self.r}_s{int(self.scheme)}_sr{self.sampling_ratio:g}"
            f"_{snr}_seed{self.seed}"
        )

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return self.model_copy(update={"seed": int(seed)})


class SampleIndices(NamedTuple):
    """Observed index pairs without values"""
    rows: np.ndarray
    cols: np.ndarray


@dataclass(frozen=True, eq=False)
class SyntheticInstance:
    """Ground truth together with its noisy observations"""
    spec: ScenarioSpec
    truth: DenseMatrix
    observations: ObservationSet
    noise_sigma: float


def derive_seed(base_seed: int, index: int) -> int:
    """Independent 64-bit seed for the index-th child of a base seed"""
    state = np.random.SeedSequence((int(base_seed), int(index))).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def _streams(seed: int):
    """Independent generators for truth, mask and noise"""
    children = np.random.SeedSequence(int(seed)).spawn(3)
    return tuple(np.random.default_rng(child) for child in children)


def generate_ground_truth(spec: ScenarioSpec, rng: Optional[np.random.Generator] = None) -> DenseMatrix:
    """A0 = U V^T with U (m1 x r) and V (m2 x r) i.i.d. standard normal"""
    if rng is None:
        rng = _streams(spec.seed)[0]
    U = np.asarray(rng.standard_normal((spec.m1, spec.r)), dtype=np.float64)
    V = np.asarray(rng.standard_normal((spec.m2, spec.r)), dtype=np.float64)
    return as_matrix(U @ V.T)


def scheme_marginals(m: int, scheme: SamplingScheme) -> np.ndarray:
    """Marginal probabilities p_1..p_m of a sampling scheme"""
    scheme = SamplingScheme(scheme)
    if m < 1:
        raise InvalidScenarioError(f"dimension must be positive, got {m}")

    if scheme is SamplingScheme.S1:
        return np.full(m, 1.0 / m)

    if m < MIN_NONUNIFORM_SIZE:
        raise InvalidScenarioError(
            f"Scheme {int(scheme)} needs m >= {MIN_NONUNIFORM_SIZE}, got {m}"
        )

    first, second, rest = SCHEME_WEIGHTS[int(scheme)]
    weights = np.full(m, rest)
    weights[: m // 10] = first
    weights[m // 10: m // 5] = second
    return weights / weights.sum()


def sampling_distribution(spec: ScenarioSpec) -> SamplingDistribution:
    """Row and column marginals, both following the scenario's scheme"""
    return SamplingDistribution(
        row_probs=scheme_marginals(spec.m1, spec.scheme),
        col_probs=scheme_marginals(spec.m2, spec.scheme),
    )


def sample_mask(
    spec: ScenarioSpec,
    dist: SamplingDistribution,
    rng: Optional[np.random.Generator] = None,
) -> SampleIndices:
    """
    Draw n distinct entries from pi_kl without replacement.

    Uses exponential-key weighted reservoir sampling: every entry gets the key
    log(u) / pi_kl and the n largest keys are kept, which has the same law as
    sequential weighted draws with removal. Output is sorted row-major.
    """
    if dist.shape != (spec.m1, spec.m2):
        raise ValueError(f"Distribution shape {dist.shape} does not match scenario")
    if rng is None:
        rng = _streams(spec.seed)[1]

    total = spec.m1 * spec.m2
    n = spec.n
    if n > total:
        raise InvalidScenarioError(f"cannot draw {n} distinct entries from {total}")

    if n == total:
        chosen = np.arange(total)
    else:
        weights = dist.entry_probabilities().ravel()
        with np.errstate(divide="ignore"):
            keys = np.log(rng.random(total)) / weights
        chosen = np.argpartition(keys, total - n)[total - n:]
        chosen.sort()

    rows, cols = np.divmod(chosen, spec.m2)
    return SampleIndices(rows=rows, cols=cols)


def noise_level(signal: np.ndarray, snr_db: Optional[float]) -> float:
    """
    sigma such that the realized SNR 10 log10(sum signal^2 / (n sigma^2)) equals snr_db,
    i.e. sigma^2 = mean(signal^2) / 10^(snr_db/10)
    """
    if snr_db is None:
        return 0.0
    energy = float(np.mean(np.square(signal)))
    if energy == 0.0:
        raise DegenerateSignalError("Observed signal is identically zero; SNR is undefined")
    return float(np.sqrt(energy / 10.0 ** (snr_db / 10.0)))


def apply_noise(
    truth: DenseMatrix,
    indices: SampleIndices,
    snr_db: Optional[float],
    rng: Optional[np.random.Generator] = None,
    seed: int = 0,
) -> ObservationSet:
    """Y_i = A0(k_i, l_i) + sigma xi_i at the observed indices only"""
    if len(indices.rows) == 0:
        raise ValueError("No indices to observe")
    if rng is None:
        rng = _streams(seed)[2]

    truth = np.asarray(truth)
    signal = truth[indices.rows, indices.cols]
    sigma = noise_level(signal, snr_db)
    values = signal + sigma * rng.standard_normal(signal.size) if sigma > 0 else signal.copy()

    return ObservationSet(truth.shape[0], truth.shape[1], Entries(indices.rows, indices.cols, values))


def make_instance(spec: ScenarioSpec) -> SyntheticInstance:
    """Ground truth, mask and noisy observations from the scenario seed"""
    truth_rng, mask_rng, noise_rng = _streams(spec.seed)
    truth = generate_ground_truth(spec, truth_rng)
    indices = sample_mask(spec, sampling_distribution(spec), mask_rng)
    observations = apply_noise(truth, indices, spec.snr_db, noise_rng)
    sigma = noise_level(truth[indices.rows, indices.cols], spec.snr_db)

    logger.debug("Generated %s (n=%d, sigma=%.4g)", spec.label, observations.n, sigma)
    return SyntheticInstance(spec=spec, truth=truth, observations=observations, noise_sigma=sigma)
