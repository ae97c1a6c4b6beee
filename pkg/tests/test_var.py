"""Unit tests for the VAR model core: validation, simulation, likelihood,
design stacking, forecasting, and serialization."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from svarfit import (InputError, ModelDomainError, MultiSeries, SparsityPattern,
                     VarModel, as_series, build_design, forecast, is_causal,
                     log_likelihood, ma_weights, simulate)


def scalar_ar(phi: float, noise_var: float = 1.0) -> VarModel:
    return VarModel(np.array([[[phi]]]), np.array([[noise_var]]))


# =============================================================================
# MultiSeries
# =============================================================================


class TestMultiSeries:
    def test_promotes_vector_to_single_column(self):
        series = MultiSeries(np.arange(5.0))
        assert series.values.shape == (5, 1)
        assert series.dimension == 1
        assert series.sample_size == 5

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            MultiSeries(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            MultiSeries(np.zeros((0, 2)))

    def test_centered_removes_mean_and_accumulates(self):
        rng = np.random.default_rng(0)
        series = MultiSeries(rng.standard_normal((50, 3)) + 7.0)
        centered = series.centered()
        assert_allclose(centered.values.mean(axis=0), np.zeros(3), atol=1e-12)
        assert_allclose(centered.mean, series.values.mean(axis=0) + series.mean)

    def test_short_sample_warns(self):
        with pytest.warns(UserWarning, match="short"):
            MultiSeries(np.eye(4)).centered()


# =============================================================================
# VarModel construction and serialization
# =============================================================================


class TestVarModel:
    def test_requires_positive_definite_sigma(self):
        with pytest.raises(ModelDomainError):
            VarModel(np.zeros((1, 2, 2)), np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_requires_symmetric_sigma(self):
        with pytest.raises(InputError):
            VarModel(np.zeros((0, 2, 2)), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_round_trip_is_exact(self):
        rng = np.random.default_rng(1)
        A = 0.1 * rng.standard_normal((2, 3, 3))
        B = rng.standard_normal((3, 3))
        model = VarModel(A, B @ B.T + np.eye(3), rng.standard_normal(3))
        other = VarModel.from_dict(model.to_dict())
        assert np.array_equal(other.coeffs, model.coeffs)
        assert np.array_equal(other.sigma, model.sigma)
        assert np.array_equal(other.mu, model.mu)

    def test_from_dict_rejects_inconsistent_dims(self):
        doc = scalar_ar(0.5).to_dict()
        doc["p"] = 2
        with pytest.raises(InputError):
            VarModel.from_dict(doc)

    def test_trimmed_drops_trailing_zero_lags(self):
        A = np.zeros((3, 2, 2))
        A[0, 0, 1] = 0.4
        model = VarModel(A, np.eye(2))
        assert model.trimmed().order == 1

    def test_coeff_matrix_layout(self):
        A = np.arange(8.0).reshape(2, 2, 2)
        model = VarModel(0.01 * A, np.eye(2))
        stacked = model.coeff_matrix()
        assert stacked.shape == (2, 4)
        assert_allclose(stacked[:, :2], 0.01 * A[0])
        assert_allclose(stacked[:, 2:], 0.01 * A[1])


# =============================================================================
# Causality
# =============================================================================


class TestCausality:
    def test_stable_scalar(self):
        assert is_causal(scalar_ar(0.95))

    def test_unit_root_is_not_causal(self):
        assert not is_causal(scalar_ar(1.0))

    def test_explosive_var2(self):
        A = np.zeros((2, 2, 2))
        A[0] = 0.9 * np.eye(2)
        A[1] = 0.4 * np.eye(2)
        assert not is_causal(VarModel(A, np.eye(2)))

    def test_order_zero_always_causal(self):
        assert is_causal(VarModel(np.zeros((0, 2, 2)), np.eye(2)))


# =============================================================================
# Simulation
# =============================================================================


class TestSimulate:
    def test_deterministic_for_fixed_seed(self):
        model = scalar_ar(0.6)
        a = simulate(model, 100, seed=42)
        b = simulate(model, 100, seed=42)
        assert np.array_equal(a.values, b.values)

    def test_rejects_non_causal(self):
        with pytest.raises(ModelDomainError):
            simulate(scalar_ar(1.01), 50, seed=0)

    def test_rejects_bad_lengths(self):
        with pytest.raises(InputError):
            simulate(scalar_ar(0.5), 0, seed=0)
        with pytest.raises(InputError):
            simulate(scalar_ar(0.5), 10, burn_in=-1, seed=0)

    def test_scalar_moments_match_stationary_values(self):
        # AR(1): var = s^2/(1-phi^2), lag-1 autocov = phi * var
        phi, s2 = 0.7, 2.0
        series = simulate(scalar_ar(phi, s2), 200_000, seed=3).values[:, 0]
        var = series.var()
        acov1 = np.mean((series[1:] - series.mean()) * (series[:-1] - series.mean()))
        assert_allclose(var, s2 / (1 - phi ** 2), rtol=0.03)
        assert_allclose(acov1 / var, phi, atol=0.01)

    def test_intercept_shifts_the_mean(self):
        # X_t = mu + 0.5 X_{t-1} + Z_t has mean mu / (1 - 0.5)
        model = VarModel(np.array([[[0.5]]]), np.array([[0.5]]), mu=np.array([3.0]))
        series = simulate(model, 100_000, seed=4)
        assert_allclose(series.values.mean(), 6.0, atol=0.1)

    def test_noise_covariance_respected(self):
        sigma = np.array([[2.0, 0.8], [0.8, 1.0]])
        model = VarModel(np.zeros((0, 2, 2)), sigma)
        series = simulate(model, 150_000, seed=5)
        assert_allclose(np.cov(series.values.T, bias=True), sigma, atol=0.05)


# =============================================================================
# Design stacking
# =============================================================================


class TestBuildDesign:
    def test_columns_hold_lagged_blocks(self):
        values = np.arange(10.0).reshape(5, 2)
        design = build_design(values, 2)
        assert design.response.shape == (2, 3)
        assert design.lagged.shape == (4, 3)
        # response at t=2 (0-based) pairs with (Y_1, Y_0) stacked lag-1 first
        assert_allclose(design.response[:, 0], values[2])
        assert_allclose(design.lagged[:2, 0], values[1])
        assert_allclose(design.lagged[2:, 0], values[0])

    def test_presample_must_cover_order(self):
        with pytest.raises(InputError):
            build_design(np.zeros((10, 1)) + np.arange(10)[:, None], 3, presample=2)

    def test_series_must_be_longer_than_presample(self):
        with pytest.raises(InputError):
            build_design(np.arange(3.0), 3)

    def test_order_zero_design(self):
        design = build_design(np.arange(4.0), 0)
        assert design.lagged.shape == (0, 4)
        assert design.gram.shape == (0, 0)

    def test_gram_and_cross_products(self):
        rng = np.random.default_rng(7)
        values = rng.standard_normal((30, 2))
        design = build_design(values, 1)
        assert_allclose(design.gram, design.lagged @ design.lagged.T)
        assert_allclose(design.cross, design.response @ design.lagged.T)


# =============================================================================
# Log-likelihood
# =============================================================================


class TestLogLikelihood:
    def test_matches_direct_gaussian_formula(self):
        rng = np.random.default_rng(8)
        model = VarModel(np.array([[[0.5, 0.1], [0.0, 0.3]]]), np.eye(2) * 1.5)
        series = simulate(model, 60, seed=9)
        ll = log_likelihood(model, series)

        Y = series.values
        resid = np.array([Y[t] - model.coeffs[0] @ Y[t - 1] for t in range(1, 60)])
        sigma_inv = np.linalg.inv(model.sigma)
        quad = np.einsum("ti,ij,tj->", resid, sigma_inv, resid)
        expected = -0.5 * (59 * (2 * np.log(2 * np.pi) + np.linalg.slogdet(model.sigma)[1]) + quad)
        assert_allclose(ll, expected, rtol=1e-12)

    def test_larger_presample_conditions_on_more(self):
        model = scalar_ar(0.5)
        series = simulate(model, 50, seed=10)
        full = log_likelihood(model, series, presample=1)
        shorter = log_likelihood(model, series, presample=5)
        assert shorter != full    # fewer terms in the sum

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            log_likelihood(scalar_ar(0.5), np.zeros((10, 2)) + np.arange(10)[:, None])


# =============================================================================
# Forecasting
# =============================================================================


class TestForecast:
    def test_no_dynamics_forecasts_the_intercept(self):
        model = VarModel(np.zeros((0, 2, 2)), np.eye(2), mu=np.array([1.0, -2.0]))
        points, covs = forecast(model, np.zeros((3, 2)) + [[1.0, 1.0]], 4)
        assert_allclose(points, np.tile(model.mu, (4, 1)))
        assert_allclose(covs[0], model.sigma)

    def test_scalar_geometric_decay(self):
        points, _ = forecast(scalar_ar(0.5), np.array([[2.0]]), 2)
        assert_allclose(points[:, 0], [1.0, 0.5])

    def test_one_step_covariance_is_noise_covariance(self):
        model = VarModel(np.array([[[0.4, 0.2], [0.1, 0.3]]]), np.array([[2.0, 0.3], [0.3, 1.0]]))
        _, covs = forecast(model, np.ones((2, 2)), 3)
        assert_allclose(covs[0], model.sigma)
        # forecast-error covariance grows with horizon (Loewner order on diagonal)
        assert np.all(np.diag(covs[2]) >= np.diag(covs[0]) - 1e-12)

    def test_ma_weights_recursion(self):
        model = VarModel(np.array([[[0.5]], [[0.2]]]), np.eye(1))
        psi = ma_weights(model, 4)[:, 0, 0]
        assert_allclose(psi, [1.0, 0.5, 0.45, 0.325])

    def test_history_must_cover_order(self):
        with pytest.raises(InputError):
            forecast(VarModel(np.zeros((2, 1, 1)) + 0.1, np.eye(1)), np.array([[1.0]]), 1)


# =============================================================================
# SparsityPattern
# =============================================================================


class TestSparsityPattern:
    def test_rejects_duplicates_and_out_of_range(self):
        with pytest.raises(InputError):
            SparsityPattern(1, 2, [(1, 0, 0), (1, 0, 0)])
        with pytest.raises(InputError):
            SparsityPattern(1, 2, [(2, 0, 0)])
        with pytest.raises(InputError):
            SparsityPattern(1, 2, [(1, 2, 0)])

    def test_full_and_diagonal_sizes(self):
        assert SparsityPattern.full(2, 3).m == 18
        assert SparsityPattern.diagonal(2, 3).m == 6

    def test_constraint_matrix_shape_and_selection(self):
        pattern = SparsityPattern(2, 2, [(1, 0, 1), (2, 1, 0)])
        R = pattern.constraint_matrix()
        assert R.shape == (8, 2)
        assert_allclose(R.sum(axis=0), np.ones(2))
        # R maps free parameters onto the column-major vec of the K x Kp matrix
        gamma = np.array([0.3, -0.7])
        stacked = np.zeros((2, 4))
        rows, cols = pattern.design_indices()
        stacked[rows, cols] = gamma
        assert_allclose((R @ gamma).reshape((2, 4), order="F"), stacked)
        assert pattern.coeff_array(gamma)[0, 0, 1] == 0.3
        assert pattern.coeff_array(gamma)[1, 1, 0] == -0.7

    def test_max_lag_and_contains(self):
        pattern = SparsityPattern(3, 2, [(1, 0, 0), (3, 1, 1)])
        assert pattern.max_lag == 3
        assert (1, 0, 0) in pattern
        assert (2, 0, 0) not in pattern


# =============================================================================
# as_series coercion
# =============================================================================


def test_as_series_passthrough_and_coercion():
    series = MultiSeries(np.arange(6.0).reshape(3, 2))
    assert as_series(series) is series
    assert as_series(np.arange(6.0).reshape(3, 2)).dimension == 2
