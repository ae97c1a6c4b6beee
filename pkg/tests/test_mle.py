"""Unit tests for pattern-constrained maximum likelihood and t-statistics."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from svarfit import (EstimationError, MultiSeries, SparsityPattern, VarModel,
                     benchmark_model, benchmark_pattern, build_design,
                     constrained_mle, log_likelihood, replication_seed,
                     simulate, t_statistics)


def random_series(rng, T=80, K=3):
    model = VarModel(0.25 * rng.standard_normal((1, K, K)) / np.sqrt(K),
                     np.eye(K))
    while True:
        try:
            return simulate(model, T, seed=rng)
        except Exception:
            model = VarModel(0.5 * model.coeffs, np.eye(K))


def least_squares(series, p):
    design = build_design(series, p)
    return np.linalg.solve(design.gram, design.cross.T).T


# =============================================================================
# Core estimator behaviour
# =============================================================================


class TestConstrainedMle:
    def test_empty_pattern_gives_sample_covariance(self):
        rng = np.random.default_rng(0)
        values = rng.standard_normal((40, 2))
        fit = constrained_mle(values, SparsityPattern(0, 2, []))
        assert fit.gamma.shape == (0,)
        assert_allclose(fit.sigma, values.T @ values / 40, atol=1e-12)
        K, n = 2, 40
        expected = -0.5 * n * (K * np.log(2 * np.pi)
                               + np.linalg.slogdet(fit.sigma)[1] + K)
        assert_allclose(fit.loglik, expected, rtol=1e-12)

    def test_full_pattern_equals_least_squares(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            series = random_series(rng)
            pattern = SparsityPattern.full(1, 3)
            fit = constrained_mle(series, pattern)
            assert_allclose(fit.coeffs[0], least_squares(series, 1), atol=1e-10)
            assert fit.converged
            assert fit.n_iter <= 2    # coefficient step is covariance-free

    def test_minus_two_loglik_is_monotone(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            series = random_series(rng, K=4)
            pattern = SparsityPattern(1, 4, [(1, 0, 0), (1, 1, 1), (1, 0, 2),
                                             (1, 3, 1), (1, 2, 2)])
            fit = constrained_mle(series, pattern)
            trace = -2.0 * fit.loglik_trace
            assert np.all(np.diff(trace) <= 1e-6)

    def test_zero_outside_pattern_is_bit_exact(self):
        rng = np.random.default_rng(3)
        series = random_series(rng)
        pattern = SparsityPattern(2, 3, [(1, 0, 0), (2, 1, 2)])
        fit = constrained_mle(series, pattern)
        coeffs = fit.coeffs
        mask = np.zeros_like(coeffs, dtype=bool)
        for (k, i, j) in pattern.entries:
            mask[k - 1, i, j] = True
        assert np.all(coeffs[~mask] == 0.0)

    def test_nested_patterns_never_lose_likelihood(self):
        rng = np.random.default_rng(4)
        series = random_series(rng)
        small = SparsityPattern(1, 3, [(1, 0, 0), (1, 1, 1)])
        big = SparsityPattern(1, 3, small.entries + [(1, 2, 2), (1, 0, 1)])
        fit_small = constrained_mle(series, small)
        fit_big = constrained_mle(series, big)
        assert fit_big.loglik >= fit_small.loglik - 1e-6

    def test_loglik_self_consistency(self):
        rng = np.random.default_rng(5)
        series = random_series(rng)
        pattern = SparsityPattern(1, 3, [(1, 0, 0), (1, 2, 1), (1, 1, 1)])
        fit = constrained_mle(series, pattern)
        recomputed = log_likelihood(fit.model(), series, presample=1)
        assert_allclose(recomputed, fit.loglik, atol=1e-8)

    def test_rank_deficient_design_raises(self):
        values = np.arange(10.0).reshape(5, 2)    # 3 usable rows, 8 parameters
        with pytest.raises(EstimationError):
            constrained_mle(values, SparsityPattern.full(2, 2))

    def test_non_convergence_flagged(self):
        rng = np.random.default_rng(6)
        series = random_series(rng)
        pattern = SparsityPattern(1, 3, [(1, 0, 0), (1, 0, 1), (1, 1, 0)])
        fit = constrained_mle(series, pattern, max_iter=1)
        assert not fit.converged
        assert fit.n_iter == 1

    def test_presample_extends_conditioning(self):
        rng = np.random.default_rng(7)
        series = random_series(rng)
        pattern = SparsityPattern(1, 3, [(1, 0, 0)])
        fit = constrained_mle(series, pattern, presample=4)
        assert fit.n_obs == series.sample_size - 4

    def test_asymp_cov_symmetric_psd(self):
        rng = np.random.default_rng(8)
        series = random_series(rng)
        fit = constrained_mle(series, SparsityPattern.full(1, 3))
        assert_allclose(fit.asymp_cov, fit.asymp_cov.T, atol=1e-8)
        assert np.linalg.eigvalsh(fit.asymp_cov).min() > -1e-10

    def test_relabelling_leaves_loglik_unchanged(self):
        rng = np.random.default_rng(9)
        series = random_series(rng)
        perm = np.array([2, 0, 1])
        permuted = MultiSeries(series.values[:, perm])
        full = SparsityPattern.full(1, 3)
        a = constrained_mle(series, full)
        b = constrained_mle(permuted, full)
        assert_allclose(a.loglik, b.loglik, atol=1e-8)


# =============================================================================
# t-statistics
# =============================================================================


class TestTStatistics:
    def test_aligned_with_pattern_entries(self):
        rng = np.random.default_rng(10)
        series = random_series(rng)
        pattern = SparsityPattern(1, 3, [(1, 2, 2), (1, 0, 0)])
        fit = constrained_mle(series, pattern)
        tvals = t_statistics(fit)
        assert tvals.shape == (2,)
        se = np.sqrt(np.diag(fit.asymp_cov) / fit.sample_size)
        assert_allclose(tvals, fit.gamma / se)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(11)
        series = random_series(rng)
        pattern = SparsityPattern(1, 3, [(1, 0, 0), (1, 1, 2), (1, 2, 1)])
        a = t_statistics(constrained_mle(series, pattern))
        b = t_statistics(constrained_mle(MultiSeries(5.0 * series.values), pattern))
        assert_allclose(a, b, rtol=1e-8)

    def test_large_sample_pins_true_support(self):
        model = benchmark_model(1.0)
        pattern = benchmark_pattern()
        truth = np.array([model.coeffs[k - 1, i, j] for (k, i, j) in pattern.entries])
        series = simulate(model, 10_000, seed=12).centered()
        fit = constrained_mle(series, pattern)
        se = np.sqrt(np.diag(fit.asymp_cov) / fit.sample_size)
        assert np.all(np.abs(fit.gamma - truth) <= 4 * se)
        assert np.all(np.abs(t_statistics(fit)) > 10)

    def test_null_coefficient_t_is_standard_normal(self):
        # force one truly-zero coefficient into the pattern; its t-values over
        # replications should have roughly unit standard deviation
        model = benchmark_model(1.0)
        entries = benchmark_pattern().entries + [(1, 0, 1)]
        pattern = SparsityPattern(1, 6, entries)
        tnull = []
        for rep in range(300):
            seed = replication_seed(999, rep)
            series = simulate(model, 100, seed=np.random.default_rng(seed)).centered()
            fit = constrained_mle(series, pattern)
            tnull.append(t_statistics(fit)[-1])
        assert abs(np.std(tnull) - 1.0) < 0.15
        assert abs(np.mean(tnull)) < 0.15
