import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import NonFiniteMatrixError
from src.models import (
    Entries,
    ObservationSet,
    Regularizer,
    SamplingDistribution,
    SolverConfig,
    as_matrix,
)


class TestAsMatrix:
    def test_reshapes_row_major(self):
        matrix = as_matrix([1, 2, 3, 4, 5, 6], rows=2, cols=3)
        assert matrix.shape == (2, 3)
        assert matrix[1, 0] == 4.0

    def test_is_read_only(self):
        matrix = as_matrix([[1.0, 2.0]])
        with pytest.raises(ValueError):
            matrix[0, 0] = 5.0

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteMatrixError):
            as_matrix([[1.0, np.nan]])

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError):
            as_matrix([1, 2, 3], rows=2, cols=2)


class TestObservationSet:
    def test_mask_and_filled(self):
        obs = ObservationSet.from_samples(2, 3, [(0, 1, 2.5), (1, 2, -1.0)])
        assert obs.n == 2
        assert obs.mask.sum() == 2
        assert obs.filled[0, 1] == 2.5
        assert obs.filled[1, 2] == -1.0
        assert obs.filled[0, 0] == 0.0

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="Duplicate"):
            ObservationSet.from_samples(2, 2, [(0, 0, 1.0), (0, 0, 2.0)])

    def test_rejects_out_of_bounds(self):
        with pytest.raises(ValueError):
            ObservationSet.from_samples(2, 2, [(2, 0, 1.0)])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ObservationSet(3, 3, Entries.empty())

    def test_from_matrix_covers_every_entry(self):
        obs = ObservationSet.from_matrix(np.arange(6.0).reshape(2, 3))
        assert obs.n == 6
        np.testing.assert_array_equal(obs.filled, np.arange(6.0).reshape(2, 3))

    def test_values_at_follows_sample_order(self):
        obs = ObservationSet.from_samples(2, 2, [(1, 1, 0.0), (0, 1, 0.0)])
        matrix = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(obs.values_at(matrix), [4.0, 2.0])


class TestEntries:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Entries([0, 1], [0], [1.0, 2.0])

    def test_subset_and_triples(self):
        entries = Entries.from_triples([(0, 0, 1.0), (1, 2, 3.0), (2, 1, 5.0)])
        assert entries.subset([0, 2]).triples() == [(0, 0, 1.0), (2, 1, 5.0)]


class TestSamplingDistribution:
    def test_entry_probabilities_sum_to_one(self):
        dist = SamplingDistribution([0.5, 0.5], [0.2, 0.3, 0.5])
        probs = dist.entry_probabilities()
        assert probs.shape == (2, 3)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            SamplingDistribution([0.5, 0.6], [1.0])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SamplingDistribution([1.5, -0.5], [1.0])


class TestSolverConfig:
    def test_lambda_alias(self):
        config = SolverConfig.model_validate({"lambda": 0.5, "rho": 2.0})
        assert config.lam == 0.5
        assert config.mu == pytest.approx(0.25)
        assert config.to_json_dict()["lambda"] == 0.5

    def test_defaults(self):
        config = SolverConfig(lam=1.0)
        assert config.regularizer is Regularizer.TL1
        assert config.a == 1.0

    @pytest.mark.parametrize("field,value", [
        ("lam", 0.0), ("a", -1.0), ("zeta", 0.0), ("rho", -0.1), ("tau", 1.7),
        ("max_iters", 0), ("rank_threshold", 1.0),
    ])
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ValidationError):
            SolverConfig.model_validate({"lam": 1.0, field: value})

    def test_frozen(self):
        config = SolverConfig(lam=1.0)
        with pytest.raises(ValidationError):
            config.a = 2.0

    def test_with_updates_validates(self):
        config = SolverConfig(lam=1.0)
        assert config.with_updates(a=10.0).a == 10.0
        with pytest.raises(ValidationError):
            config.with_updates(tau=5.0)
