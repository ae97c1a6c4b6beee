"""Unit tests for spectral estimation and partial spectral coherence."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from svarfit import (NumericalError, VarModel, benchmark_model,
                     default_spans, estimate_spectrum, hidden_pair_model,
                     model_spectrum, periodogram, psc_from_inverse,
                     psc_from_residual_filter, psc_summary, simulate,
                     smooth_daniell)
from svarfit.spectral import _daniell_kernel


def random_hermitian_pd_spectra(rng, n_freq, K, floor=0.5):
    out = np.empty((n_freq, K, K), dtype=complex)
    for idx in range(n_freq):
        B = rng.standard_normal((K, K)) + 1j * rng.standard_normal((K, K))
        out[idx] = B @ B.conj().T + floor * np.eye(K)
    return out


# =============================================================================
# Periodogram
# =============================================================================


class TestPeriodogram:
    def test_zero_frequency_vanishes_after_centering(self):
        rng = np.random.default_rng(0)
        est = periodogram(rng.standard_normal((64, 3)) + 5.0)
        assert_allclose(est.values[0], np.zeros((3, 3)), atol=1e-22)

    def test_parseval_total_power(self):
        # (2 pi / T) * sum_k I(w_k) equals the biased sample covariance
        rng = np.random.default_rng(1)
        values = rng.standard_normal((128, 2))
        est = periodogram(values)
        centred = values - values.mean(axis=0)
        target = centred.T @ centred / 128
        assert_allclose((2 * np.pi / 128) * est.values.sum(axis=0).real, target, atol=1e-12)
        assert_allclose(est.values.sum(axis=0).imag, np.zeros((2, 2)), atol=1e-12)

    def test_hermitian_at_each_frequency_and_conjugate_pairing(self):
        rng = np.random.default_rng(2)
        est = periodogram(rng.standard_normal((50, 2)))
        for k in (1, 7, 24):
            assert_allclose(est.values[k], est.values[k].conj().T, atol=1e-14)
            assert_allclose(est.values[50 - k], est.values[k].conj(), atol=1e-14)

    def test_full_grid_frequencies(self):
        est = periodogram(np.random.default_rng(3).standard_normal((10, 1)))
        assert_allclose(est.frequencies, 2 * np.pi * np.arange(10) / 10)
        freqs, vals = est.half_grid()
        assert freqs.shape == (5,)
        assert vals.shape == (5, 1, 1)


# =============================================================================
# Daniell smoothing
# =============================================================================


class TestDaniellSmoothing:
    def test_kernel_weights(self):
        assert_allclose(_daniell_kernel(3), [0.25, 0.5, 0.25])
        w = _daniell_kernel(11)
        assert_allclose(w[0], 1 / 20)
        assert_allclose(w[5], 1 / 10)
        assert_allclose(w.sum(), 1.0)

    def test_kernel_rejects_even_or_tiny_spans(self):
        for span in (2, 4, 1, -3):
            with pytest.raises(Exception):
                _daniell_kernel(span)

    def test_default_spans(self):
        assert default_spans(100) == [11, 11]        # tie 9 vs 11 rounds up
        assert default_spans(144) == [13, 13]        # tie 11 vs 13 rounds up
        assert default_spans(121) == [11, 11]        # exact odd root
        assert default_spans(4) == [3, 3]            # floor kicks in

    def test_total_power_conserved(self):
        rng = np.random.default_rng(4)
        raw = periodogram(rng.standard_normal((60, 2)))
        smoothed = smooth_daniell(raw, [5, 7])
        assert_allclose(smoothed.values.sum(axis=0), raw.values.sum(axis=0), atol=1e-12)
        assert smoothed.spans == (5, 7)

    def test_single_span_matches_manual_circular_convolution(self):
        rng = np.random.default_rng(5)
        raw = periodogram(rng.standard_normal((16, 1)))
        smoothed = smooth_daniell(raw, [3])
        manual = (0.25 * np.roll(raw.values, 1, axis=0)
                  + 0.5 * raw.values
                  + 0.25 * np.roll(raw.values, -1, axis=0))
        assert_allclose(smoothed.values, manual, atol=1e-15)

    def test_iterated_spans_compose(self):
        rng = np.random.default_rng(6)
        raw = periodogram(rng.standard_normal((32, 1)))
        once_then_again = smooth_daniell(smooth_daniell(raw, [3]), [5])
        both = smooth_daniell(raw, [3, 5])
        assert_allclose(once_then_again.values, both.values, atol=1e-15)

    def test_estimate_is_consistent_for_scalar_ar(self):
        # smoothed estimate approaches the true spectrum at large T
        phi, s2, T = 0.6, 1.0, 4096
        model = VarModel(np.array([[[phi]]]), np.array([[s2]]))
        series = simulate(model, T, seed=7)
        est = estimate_spectrum(series)
        freqs, vals = est.half_grid()
        truth = model_spectrum(model, freqs)[:, 0, 0].real
        rel = np.abs(vals[:, 0, 0].real - truth) / truth
        assert np.median(rel) < 0.15
        assert rel.max() < 0.6


# =============================================================================
# Model spectrum
# =============================================================================


class TestModelSpectrum:
    def test_white_noise_is_flat(self):
        sigma = np.array([[2.0, 0.5], [0.5, 1.0]])
        model = VarModel(np.zeros((0, 2, 2)), sigma)
        vals = model_spectrum(model, [0.1, 1.0, 3.0])
        for idx in range(3):
            assert_allclose(vals[idx], sigma / (2 * np.pi), atol=1e-14)

    def test_scalar_ar1_closed_form(self):
        phi, s2 = 0.6, 2.0
        model = VarModel(np.array([[[phi]]]), np.array([[s2]]))
        freqs = np.linspace(0.0, np.pi, 9)
        vals = model_spectrum(model, freqs)[:, 0, 0].real
        expected = s2 / (2 * np.pi * np.abs(1 - phi * np.exp(-1j * freqs)) ** 2)
        assert_allclose(vals, expected, rtol=1e-12)

    def test_integral_recovers_variance(self):
        # int_0^{2pi} f(w) dw = Gamma(0); Riemann sum on a fine grid
        model = benchmark_model(1.0)
        T = 4096
        freqs = 2 * np.pi * np.arange(T) / T
        vals = model_spectrum(model, freqs)
        gamma0 = vals.sum(axis=0).real * (2 * np.pi / T)
        sample = simulate(model, 300_000, seed=8).values
        sample = sample - sample.mean(axis=0)
        assert_allclose(gamma0, sample.T @ sample / sample.shape[0], atol=0.06)


# =============================================================================
# Partial spectral coherence
# =============================================================================


class TestPsc:
    def test_routes_agree_on_random_spectra(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            K = int(rng.integers(3, 7))
            spectra = random_hermitian_pd_spectra(rng, 4, K)
            inv = psc_from_inverse(spectra, ridge=None)
            flt = psc_from_residual_filter(spectra)
            assert_allclose(inv.values, flt.values, atol=1e-10)

    def test_values_are_conjugate_symmetric_with_zero_diagonal(self):
        rng = np.random.default_rng(10)
        spectra = random_hermitian_pd_spectra(rng, 6, 4)
        psc = psc_from_inverse(spectra, ridge=None)
        for idx in range(6):
            assert_allclose(psc.values[idx], psc.values[idx].conj().T, atol=1e-12)
            assert_allclose(np.diag(psc.values[idx]), np.zeros(4), atol=0)

    def test_modulus_bounded_by_one(self):
        rng = np.random.default_rng(11)
        spectra = random_hermitian_pd_spectra(rng, 20, 5)
        psc = psc_from_inverse(spectra, ridge=None)
        assert np.max(np.abs(psc.values)) <= 1.0 + 1e-12

    def test_bivariate_degenerates_to_ordinary_coherence(self):
        rng = np.random.default_rng(12)
        spectra = random_hermitian_pd_spectra(rng, 5, 2)
        with pytest.warns(UserWarning, match="ordinary coherence"):
            psc = psc_from_inverse(spectra, ridge=None)
        coherence = spectra[:, 0, 1] / np.sqrt(spectra[:, 0, 0].real * spectra[:, 1, 1].real)
        assert_allclose(psc.values[:, 0, 1], coherence, atol=1e-12)

    def test_summary_is_sup_of_squared_modulus(self):
        rng = np.random.default_rng(13)
        spectra = random_hermitian_pd_spectra(rng, 8, 3)
        psc = psc_from_inverse(spectra, ridge=None)
        summary = psc_summary(psc)
        assert_allclose(summary, summary.T, atol=1e-15)
        assert_allclose(np.diag(summary), np.zeros(3))
        assert_allclose(summary[0, 1], (np.abs(psc.values[:, 0, 1]) ** 2).max())

    def test_singular_spectrum_ridge_repair(self):
        spectra = np.ones((1, 3, 3), dtype=complex)   # rank one, exactly singular
        with pytest.raises(NumericalError):
            psc_from_inverse(spectra, ridge=None)
        psc = psc_from_inverse(spectra, ridge="auto")
        assert np.all(np.isfinite(psc.values))

    def test_hidden_pair_model_has_vanishing_psc(self):
        freqs = np.linspace(0.01, np.pi, 64)
        spectra = model_spectrum(hidden_pair_model(), freqs)
        psc = psc_from_inverse(spectra, freqs, ridge=None)
        assert np.abs(psc.values[:, 0, 1]).max() < 1e-12
        assert np.abs(psc.values[:, 0, 2]).max() > 0.1

    def test_estimated_summary_tracks_true_coupling(self):
        # the three truly coupled pairs of the benchmark generator should
        # dominate the estimated summary statistic in a long sample
        series = simulate(benchmark_model(1.0), 2048, seed=14)
        est = estimate_spectrum(series)
        psc = psc_from_inverse(est)
        summary = psc_summary(psc)
        coupled = [(0, 3), (1, 3), (2, 4)]
        uncoupled_max = max(summary[i, j] for i in range(6) for j in range(i + 1, 6)
                            if (i, j) not in coupled)
        coupled_min = min(summary[i, j] for (i, j) in coupled)
        assert coupled_min > uncoupled_max
