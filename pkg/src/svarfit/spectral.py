"""Spectral density estimation and partial spectral coherence.

The spectral matrix is estimated by smoothing the periodogram across
frequencies with iterated modified Daniell kernels on the full circular
Fourier grid. Partial spectral coherence (PSC) between two components --
their coherence after linearly filtering out all remaining components -- is
computed by two mathematically equivalent routes:

* the inverse route, reading PSC off the inverse spectral matrix, and
* the residual-filter route, projecting each pair on the other components
  and taking the ordinary coherence of the projection residuals.

The two routes agree exactly (a Schur-complement identity), which provides
a strong internal consistency check; keep both.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, NumericalError
from .series import as_series
from .var import VarModel


@dataclass
class SpectralDensityEstimate:
    """Spectral matrix on the full Fourier grid omega_k = 2 pi k / T.

    ``values[k]`` is the K x K Hermitian spectral matrix at frequency
    ``frequencies[k]``; ``spans`` lists the Daniell spans applied (empty for
    the raw periodogram).
    """

    frequencies: np.ndarray     # (T,) angular frequencies in [0, 2 pi)
    values: np.ndarray          # (T, K, K) complex
    spans: tuple[int, ...]
    sample_size: int

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def half_grid(self):
        """Frequencies and values for k = 1..floor(T/2) (positive half)."""
        half = self.sample_size // 2
        return self.frequencies[1:half + 1], self.values[1:half + 1]


@dataclass
class PscEstimate:
    """Partial spectral coherence on a frequency grid.

    ``values[k]`` is complex with zero diagonal; ``values[k, j, i]`` is the
    conjugate of ``values[k, i, j]``.
    """

    frequencies: np.ndarray     # (nfreq,)
    values: np.ndarray          # (nfreq, K, K) complex
    route: str                  # "inverse" or "filter"

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def summary(self) -> np.ndarray:
        """sup over frequencies of squared PSC modulus, per pair (K x K)."""
        return np.abs(self.values).max(axis=0) ** 2


def periodogram(series) -> SpectralDensityEstimate:
    """Raw periodogram (2 pi T)^-1 d(w) d(w)^H on the full Fourier grid.

    The series is centred first, so the zero-frequency matrix vanishes
    exactly.
    """
    series = as_series(series).centered()
    T, K = series.sample_size, series.dimension
    d = np.fft.fft(series.values, axis=0)                      # (T, K)
    I = d[:, :, None] * d[:, None, :].conj() / (2.0 * np.pi * T)
    freqs = 2.0 * np.pi * np.arange(T) / T
    return SpectralDensityEstimate(frequencies=freqs, values=I, spans=(), sample_size=T)


def default_spans(T: int) -> list[int]:
    """Two passes with the odd span nearest sqrt(T), ties rounding up."""
    root = np.sqrt(T)
    lower = int(np.floor(root))
    lower = lower if lower % 2 == 1 else lower - 1
    upper = lower + 2
    span = upper if upper - root <= root - lower else lower
    span = max(span, 3)
    return [span, span]


def _daniell_kernel(span: int) -> np.ndarray:
    if span < 3 or span % 2 == 0:
        raise InputError(f"Daniell span must be an odd integer >= 3, got {span}")
    half = (span - 1) // 2
    w = np.full(span, 1.0 / (2 * half))
    w[0] = w[-1] = 1.0 / (4 * half)
    return w


def smooth_daniell(estimate: SpectralDensityEstimate, spans=None) -> SpectralDensityEstimate:
    """Iterated modified-Daniell smoothing, circular over the full grid.

    Each span s = 2h+1 averages with weight 1/(2h) on interior offsets and
    1/(4h) on the two endpoints (weights sum to one, so total power over the
    grid is conserved). Passing several spans applies them in sequence.
    """
    if spans is None:
        spans = default_spans(estimate.sample_size)
    values = estimate.values
    T = estimate.sample_size
    for span in spans:
        w = _daniell_kernel(int(span))
        half = (span - 1) // 2
        acc = np.zeros_like(values)
        for offset, weight in zip(range(-half, half + 1), w):
            acc += weight * np.roll(values, -offset, axis=0)
        values = acc
    return SpectralDensityEstimate(
        frequencies=estimate.frequencies,
        values=values,
        spans=tuple(estimate.spans) + tuple(int(s) for s in spans),
        sample_size=T,
    )


def estimate_spectrum(series, spans=None) -> SpectralDensityEstimate:
    """Smoothed periodogram of a series (the standard nonparametric path)."""
    return smooth_daniell(periodogram(series), spans)


def model_spectrum(model: VarModel, frequencies) -> np.ndarray:
    """VAR spectral matrices f(w) = (2 pi)^-1 A(e^-iw)^-1 Sigma A(e^-iw)^-H."""
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    K, p = model.dimension, model.order
    out = np.empty((freqs.size, K, K), dtype=complex)
    eye = np.eye(K)
    for idx, w in enumerate(freqs):
        trans = eye.astype(complex).copy()
        for k in range(1, p + 1):
            trans -= model.coeffs[k - 1] * np.exp(-1j * w * k)
        try:
            inv = np.linalg.inv(trans)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"transfer function singular at frequency {w}") from exc
        out[idx] = inv @ model.sigma @ inv.conj().T / (2.0 * np.pi)
    return out


def _half_grid_input(spectra):
    if isinstance(spectra, SpectralDensityEstimate):
        return spectra.half_grid()
    values = np.asarray(spectra)
    if values.ndim != 3 or values.shape[1] != values.shape[2]:
        raise InputError("spectra must be a (nfreq, K, K) array or a SpectralDensityEstimate")
    return None, values


def _warn_if_bivariate(K: int):
    if K == 2:
        warnings.warn(
            "with two components there is nothing to partial out: "
            "partial coherence degenerates to ordinary coherence",
            UserWarning,
            stacklevel=3,
        )


def psc_from_inverse(spectra, frequencies=None, ridge="auto") -> PscEstimate:
    """PSC via the inverse spectral matrix.

    With g = f(w)^-1, PSC_ij(w) = -g_ij / sqrt(g_ii g_jj). ``ridge="auto"``
    adds the smallest diagonal loading (growing from 1e-12 of the mean
    diagonal) needed to make an ill-conditioned matrix invertible; a float
    fixes the loading, None disables it.
    """
    freqs, values = _half_grid_input(spectra)
    if frequencies is not None:
        freqs = np.asarray(frequencies, dtype=float)
    if freqs is None:
        freqs = np.arange(values.shape[0], dtype=float)
    nfreq, K, _ = values.shape
    _warn_if_bivariate(K)
    out = np.empty_like(values)
    for idx in range(nfreq):
        g = _robust_inverse(values[idx], ridge)
        d = np.real(np.diag(g))
        if np.any(d <= 0):
            raise NumericalError(f"inverse spectrum has non-positive diagonal at grid point {idx}")
        scale = np.sqrt(d)
        out[idx] = -g / scale[:, None] / scale[None, :]
        np.fill_diagonal(out[idx], 0.0)
    return PscEstimate(frequencies=freqs, values=out, route="inverse")


def _robust_inverse(mat: np.ndarray, ridge) -> np.ndarray:
    K = mat.shape[0]
    scale = max(np.real(np.trace(mat)) / K, np.finfo(float).tiny)
    if ridge is None:
        loadings = [0.0]
    elif ridge == "auto":
        loadings = [0.0] + [scale * 10.0 ** e for e in range(-12, -3)]
    else:
        loadings = [float(ridge) * scale]
    for load in loadings:
        try:
            g = np.linalg.inv(mat + load * np.eye(K))
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(g)):
            return g
    raise NumericalError("spectral matrix could not be inverted; series may be rank deficient")


def psc_from_residual_filter(spectra, frequencies=None) -> PscEstimate:
    """PSC via explicit linear filtering of the remaining components.

    For each pair (i, j) the spectrum of the residual after projecting on
    the other K-2 components is the Schur complement
    ``f_SS - f_SO f_OO^-1 f_OS`` (S = {i, j}); the PSC is its off-diagonal
    normalised by the residual auto-spectra.
    """
    freqs, values = _half_grid_input(spectra)
    if frequencies is not None:
        freqs = np.asarray(frequencies, dtype=float)
    if freqs is None:
        freqs = np.arange(values.shape[0], dtype=float)
    nfreq, K, _ = values.shape
    _warn_if_bivariate(K)
    out = np.zeros_like(values)
    for idx in range(nfreq):
        f = values[idx]
        for i in range(K):
            for j in range(i + 1, K):
                others = [c for c in range(K) if c not in (i, j)]
                sel = [i, j]
                if others:
                    foo = f[np.ix_(others, others)]
                    fso = f[np.ix_(sel, others)]
                    try:
                        resid = f[np.ix_(sel, sel)] - fso @ np.linalg.solve(foo, fso.conj().T)
                    except np.linalg.LinAlgError as exc:
                        raise NumericalError(
                            f"conditioning spectrum singular at grid point {idx} for pair ({i}, {j})"
                        ) from exc
                else:
                    resid = f[np.ix_(sel, sel)]
                denom = np.sqrt(np.real(resid[0, 0]) * np.real(resid[1, 1]))
                if not denom > 0:
                    raise NumericalError(
                        f"residual spectrum degenerate at grid point {idx} for pair ({i}, {j})"
                    )
                out[idx, i, j] = resid[0, 1] / denom
                out[idx, j, i] = np.conj(out[idx, i, j])
    return PscEstimate(frequencies=freqs, values=out, route="filter")


def psc_summary(psc: PscEstimate) -> np.ndarray:
    """Symmetric K x K matrix of sup-over-frequency squared PSC moduli."""
    return psc.summary()
