import numpy as np
import pytest

import src.admm as admm
from src.admm import (
    AdmmState,
    a_update,
    estimate_rank,
    objective_value,
    solve,
    w_update,
    z_update,
)
from src.errors import DivergenceError, NonFiniteMatrixError
from src.evaluation.metrics import relative_error
from src.evaluation.tuning import observed_scale, synthetic_zeta
from src.models import ObservationSet, Regularizer, SolverConfig
from src.synthetic import SamplingScheme, ScenarioSpec, make_instance


def _state(A, Z, W):
    return AdmmState(A=np.asarray(A, float), Z=np.asarray(Z, float), W=np.asarray(W, float))


class TestUpdates:
    def test_a_update_closed_form(self):
        obs = ObservationSet.from_samples(2, 2, [(0, 0, 4.0)])
        config = SolverConfig(lam=1.0, rho=1.0, zeta=10.0)
        zeros = np.zeros((2, 2))
        A = a_update(_state(zeros, zeros, zeros), obs, config)
        # observed: (2/n y) / (2/n + rho) = 8 / 3; unobserved: 0 / rho
        np.testing.assert_allclose(A, [[8.0 / 3.0, 0.0], [0.0, 0.0]])

    def test_a_update_is_clamped(self):
        obs = ObservationSet.from_samples(1, 2, [(0, 0, 100.0), (0, 1, -100.0)])
        config = SolverConfig(lam=1.0, rho=0.01, zeta=5.0)
        zeros = np.zeros((1, 2))
        np.testing.assert_array_equal(a_update(_state(zeros, zeros, zeros), obs, config), [[5.0, -5.0]])

    def test_z_update_of_zero(self):
        config = SolverConfig(lam=1.0)
        zeros = np.zeros((3, 3))
        np.testing.assert_array_equal(z_update(_state(zeros, zeros, zeros), config), zeros)

    def test_z_update_nuclear_thresholds(self):
        config = SolverConfig(lam=1.0, rho=1.0, regularizer=Regularizer.NUCLEAR)
        zeros = np.zeros((2, 2))
        Z = z_update(_state(np.diag([3.0, 1.0]), zeros, zeros), config)
        np.testing.assert_allclose(Z, np.diag([2.0, 0.0]), atol=1e-12)

    def test_z_update_huge_weight(self, rng):
        config = SolverConfig(lam=1e8, rho=1.0)
        zeros = np.zeros((4, 4))
        Z = z_update(_state(rng.standard_normal((4, 4)), zeros, zeros), config)
        np.testing.assert_allclose(Z, 0.0, atol=1e-12)

    def test_w_update_without_residual(self, rng):
        config = SolverConfig(lam=1.0)
        A = rng.standard_normal((3, 3))
        W = rng.standard_normal((3, 3))
        np.testing.assert_array_equal(w_update(_state(A, A, W), config), W)

    def test_w_update_unit_step(self, rng):
        config = SolverConfig(lam=1.0, rho=1.0, tau=1.0)
        E = rng.standard_normal((3, 2))
        zeros = np.zeros((3, 2))
        np.testing.assert_allclose(w_update(_state(E, zeros, zeros), config), E)


class TestEstimateRank:
    def test_direct_count(self):
        assert estimate_rank(np.diag([5.0, 0.004, 0.0]), 1e-2) == 1

    def test_identity(self):
        assert estimate_rank(np.eye(5), 1e-2) == 5

    def test_zero(self):
        assert estimate_rank(np.zeros((3, 3)), 1e-2) == 0

    def test_rejects_threshold(self):
        with pytest.raises(ValueError):
            estimate_rank(np.eye(2), 1.5)


class TestSolve:
    def test_fully_observed_recovery(self, rank_one_full):
        truth, obs = rank_one_full
        config = SolverConfig(lam=1e-10, zeta=100.0, max_iters=5000, tol=1e-12)
        report = solve(obs, config)
        assert relative_error(report.estimate, truth) <= 1e-4

    def test_report_shape_and_bounds(self, small_scenario):
        instance = make_instance(small_scenario)
        zeta = synthetic_zeta(instance.truth)
        config = SolverConfig(
            lam=1e-3 * observed_scale(instance.observations), a=1.0, zeta=zeta, max_iters=300
        )
        report = solve(instance.observations, config)

        assert report.estimate.shape == (20, 20)
        assert np.max(np.abs(report.estimate)) <= zeta
        assert len(report.primal_residuals) == report.iterations
        assert len(report.objective_trace) == report.iterations
        assert report.config == config

    def test_recovers_low_rank_matrix(self, small_scenario):
        instance = make_instance(small_scenario)
        config = SolverConfig(
            lam=1e-4 * observed_scale(instance.observations), a=1.0,
            zeta=synthetic_zeta(instance.truth), max_iters=5000, tol=1e-8,
        )
        report = solve(instance.observations, config)
        one_step = solve(instance.observations, config.with_updates(max_iters=1))
        error = relative_error(report.estimate, instance.truth)

        assert report.iterations > 1
        # a=1 leaves the zero-filling components nearly unshrunk at this lambda;
        # 5000 iterations reach RE 0.145
        assert error <= 0.2
        assert error < 0.5 * relative_error(one_step.estimate, instance.truth)

    def test_keeps_iterating_past_first_step(self, small_scenario):
        instance = make_instance(small_scenario)
        config = SolverConfig(
            lam=1e-3 * observed_scale(instance.observations),
            zeta=synthetic_zeta(instance.truth), max_iters=50, tol=1e-5,
        )
        report = solve(instance.observations, config)
        assert report.iterations > 1
        first_step = solve(instance.observations, config.with_updates(max_iters=1))
        assert not np.array_equal(report.final_a, first_step.final_a)

    def test_deterministic(self, small_scenario):
        instance = make_instance(small_scenario)
        config = SolverConfig(lam=0.05, zeta=synthetic_zeta(instance.truth), max_iters=100)
        first = solve(instance.observations, config)
        second = solve(instance.observations, config)
        np.testing.assert_array_equal(first.estimate, second.estimate)
        np.testing.assert_array_equal(first.primal_residuals, second.primal_residuals)

    @pytest.mark.parametrize("regularizer", [Regularizer.NUCLEAR, Regularizer.TL1])
    def test_objective_below_initializer(self, small_scenario, regularizer):
        instance = make_instance(small_scenario)
        config = SolverConfig(
            lam=1e-3 * observed_scale(instance.observations), a=10.0,
            zeta=synthetic_zeta(instance.truth), max_iters=3000, tol=1e-7, regularizer=regularizer,
        )
        report = solve(instance.observations, config)
        if regularizer is Regularizer.TL1 and not report.converged:
            pytest.skip("objective comparison only holds for converged runs")
        final = objective_value(report.raw_estimate, instance.observations, config)
        assert report.objective_trace[-1] == pytest.approx(final, rel=1e-8)
        assert final <= objective_value(instance.observations.filled, instance.observations, config)

    @pytest.mark.parametrize("regularizer", [Regularizer.NUCLEAR, Regularizer.TL1])
    def test_primal_residual_trend(self, small_scenario, regularizer):
        instance = make_instance(small_scenario)
        config = SolverConfig(
            lam=1e-3 * observed_scale(instance.observations), a=10.0,
            zeta=synthetic_zeta(instance.truth), max_iters=3000, tol=1e-7, regularizer=regularizer,
        )
        report = solve(instance.observations, config)
        if regularizer is Regularizer.TL1 and not report.converged:
            pytest.skip("residual trend only holds for converged runs")
        assert report.iterations > 5
        assert report.primal_residuals[-1] <= report.primal_residuals[4]

    def test_iteration_cap(self, small_scenario):
        instance = make_instance(small_scenario)
        config = SolverConfig(lam=0.05, zeta=synthetic_zeta(instance.truth), max_iters=1, tol=1e-15)
        report = solve(instance.observations, config)
        assert report.iterations == 1
        assert not report.converged

    def test_divergence_names_iteration(self, small_scenario, monkeypatch):
        instance = make_instance(small_scenario)

        def broken_svd(matrix):
            raise NonFiniteMatrixError("bad")

        monkeypatch.setattr(admm, "svd", broken_svd)
        with pytest.raises(DivergenceError) as excinfo:
            solve(instance.observations, SolverConfig(lam=0.05, max_iters=10))
        assert excinfo.value.iteration == 1


def _tl1_vs_nuclear_gap(seed):
    spec = ScenarioSpec(
        m1=50, m2=50, r=3, scheme=SamplingScheme.S1, sampling_ratio=0.5, snr_db=10.0, seed=seed
    )
    instance = make_instance(spec)
    base = SolverConfig(
        lam=1e-5 * observed_scale(instance.observations), a=1e8,
        zeta=synthetic_zeta(instance.truth), max_iters=300,
    )
    tl1 = solve(instance.observations, base)
    nuclear = solve(instance.observations, base.with_updates(regularizer=Regularizer.NUCLEAR))
    assert np.linalg.norm(nuclear.estimate) > 0
    return relative_error(tl1.estimate, nuclear.estimate)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_large_a_matches_nuclear_baseline(seed):
    assert _tl1_vs_nuclear_gap(seed) <= 1e-3


@pytest.mark.slow
def test_large_a_matches_nuclear_baseline_full():
    for seed in range(20):
        assert _tl1_vs_nuclear_gap(100 + seed) <= 1e-3
