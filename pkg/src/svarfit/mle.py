"""Constrained Gaussian maximum likelihood for sparse VAR coefficients.

Given a sparsity pattern with m free coefficients, the estimator alternates
two closed-form updates until the free-parameter vector settles:

* given the noise covariance, the free coefficients solve an m x m linear
  system (the pattern-restricted generalised least squares normal equations);
* given the coefficients, the covariance is the residual second-moment
  matrix.

Both steps increase the conditional likelihood, so -2 log L is monotone
along the iteration. With the full (unrestricted) pattern the coefficient
step reduces to multivariate least squares and no longer depends on the
covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EstimationError, InputError
from .series import as_series
from .var import SparsityPattern, StackedDesign, VarModel, build_design


@dataclass
class ConstrainedFit:
    """Result of a pattern-constrained VAR fit."""

    pattern: SparsityPattern
    gamma: np.ndarray          # (m,) free coefficients, in pattern entry order
    sigma: np.ndarray          # (K, K) residual covariance
    loglik: float              # conditional Gaussian log-likelihood
    loglik_trace: np.ndarray   # log-likelihood after each update cycle
    n_iter: int
    converged: bool
    n_obs: int                 # effective observations (T - presample)
    sample_size: int           # full series length T
    asymp_cov: np.ndarray      # (m, m) asymptotic covariance of sqrt(T) gamma

    @property
    def coeffs(self) -> np.ndarray:
        return self.pattern.coeff_array(self.gamma)

    def model(self) -> VarModel:
        return VarModel(self.coeffs, self.sigma)


def _gaussian_loglik_at_mle_sigma(n: int, K: int, sigma: np.ndarray) -> float:
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise EstimationError("residual covariance is not positive definite")
    return -0.5 * n * (K * np.log(2.0 * np.pi) + logdet + K)


def constrained_mle(
    data,
    pattern: SparsityPattern,
    presample: int | None = None,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> ConstrainedFit:
    """Fit VAR coefficients restricted to a sparsity pattern.

    Parameters
    ----------
    data : MultiSeries, array_like, or StackedDesign
        The observed series (centre it first if the mean is unknown) or a
        pre-built regression stack.
    pattern : SparsityPattern
        Positions allowed non-zero; its declared order sets the regression
        order.
    presample : int, optional
        Observations conditioned on (default: the pattern order). Ignored
        when ``data`` is already a StackedDesign.
    tol : float
        Convergence threshold on the max absolute coefficient change.
    max_iter : int
        Iteration cap; the fit is returned with ``converged=False`` when hit.
    """
    if isinstance(data, StackedDesign):
        design = data
        if design.order != pattern.order:
            raise InputError(f"design order {design.order} != pattern order {pattern.order}")
        T = design.n_obs + design.presample
    else:
        series = as_series(data)
        if series.dimension != pattern.dimension:
            raise InputError(f"series dimension {series.dimension} != pattern dimension {pattern.dimension}")
        design = build_design(series, pattern.order, presample)
        T = series.sample_size

    K = pattern.dimension
    n = design.n_obs
    m = pattern.m
    rows, cols = pattern.design_indices()
    G = design.gram
    C = design.cross
    Gp = G[np.ix_(cols, cols)]

    gamma = np.zeros(m)
    sigma_inv = np.eye(K)
    trace: list[float] = []
    converged = False
    n_iter = 0
    M = np.empty((0, 0))
    for n_iter in range(1, max_iter + 1):
        M = Gp * sigma_inv[np.ix_(rows, rows)]
        b = (sigma_inv @ C)[rows, cols]
        try:
            new_gamma = np.linalg.solve(M, b) if m else np.zeros(0)
        except np.linalg.LinAlgError as exc:
            raise EstimationError(
                f"singular normal equations (m={m}, n={n}); pattern too rich for the sample"
            ) from exc
        resid = design.response.copy()
        if m:
            A = np.zeros((K, K * pattern.order))
            A[rows, cols] = new_gamma
            resid -= A @ design.lagged
        sigma = resid @ resid.T / n
        trace.append(_gaussian_loglik_at_mle_sigma(n, K, sigma))
        try:
            sigma_inv = np.linalg.inv(sigma)
        except np.linalg.LinAlgError as exc:
            raise EstimationError("residual covariance is singular") from exc
        delta = np.max(np.abs(new_gamma - gamma)) if m else 0.0
        gamma = new_gamma
        if delta < tol:
            converged = True
            break

    if m:
        M = Gp * sigma_inv[np.ix_(rows, rows)]
        try:
            asymp_cov = n * np.linalg.inv(M)
        except np.linalg.LinAlgError as exc:
            raise EstimationError("asymptotic covariance is singular") from exc
    else:
        asymp_cov = np.zeros((0, 0))

    return ConstrainedFit(
        pattern=pattern,
        gamma=gamma,
        sigma=sigma,
        loglik=trace[-1],
        loglik_trace=np.asarray(trace),
        n_iter=n_iter,
        converged=converged,
        n_obs=n,
        sample_size=T,
        asymp_cov=asymp_cov,
    )


def t_statistics(fit: ConstrainedFit) -> np.ndarray:
    """t-ratio of each free coefficient, in pattern entry order.

    Standard errors are sqrt(diag(asymp_cov) / T) with T the full series
    length, matching the sqrt(T)-scaling of the asymptotic covariance.
    """
    if fit.pattern.m == 0:
        return np.zeros(0)
    se = np.sqrt(np.diag(fit.asymp_cov) / fit.sample_size)
    if np.any(se <= 0):
        raise EstimationError("non-positive standard error; covariance is degenerate")
    return fit.gamma / se
