"""Multivariate time series container.

Observations are stored as a T x K matrix: one row per time point, one
column per marginal series.
"""

from __future__ import annotations

import warnings

import numpy as np

from .exceptions import InputError


class MultiSeries:
    """A length-T, K-dimensional real time series.

    Parameters
    ----------
    values : array_like, shape (T, K)
        Observations, row t = the K-vector observed at time t. A 1-D array
        is treated as a single marginal series (K = 1).
    mean : array_like, shape (K,), optional
        Column means that were removed from ``values``. Populated by
        :meth:`centered`; zero for raw data.
    """

    def __init__(self, values, mean=None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
            raise InputError(f"series must be a non-empty T x K matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("series contains non-finite values")
        self.values = values
        self.mean = np.zeros(values.shape[1]) if mean is None else np.asarray(mean, dtype=float)
        if self.mean.shape != (values.shape[1],):
            raise InputError("mean must be a length-K vector")

    @property
    def sample_size(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def centered(self) -> "MultiSeries":
        """Subtract column means; the removed means are kept in ``mean``."""
        mu = self.values.mean(axis=0)
        out = MultiSeries(self.values - mu, mean=self.mean + mu)
        if out.sample_size <= 2 * out.dimension:
            warnings.warn(
                f"short series: T={out.sample_size} <= 2K={2 * out.dimension}; "
                "spectral and likelihood estimates will be unstable",
                stacklevel=2,
            )
        return out

    def __repr__(self):
        return f"MultiSeries(T={self.sample_size}, K={self.dimension})"


def as_series(data) -> MultiSeries:
    """Coerce an array or MultiSeries to MultiSeries."""
    if isinstance(data, MultiSeries):
        return data
    return MultiSeries(data)
