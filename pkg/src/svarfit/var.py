"""VAR(p) model representation, simulation, likelihood, and forecasting.

The recursion is ``Y_t = mu + sum_k A_k Y_{t-k} + Z_t`` with iid Gaussian
noise ``Z_t ~ N(0, sigma)``. Row/column indices are zero-based throughout;
lags are one-based (lag k multiplies ``Y_{t-k}``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError, ModelDomainError
from .series import MultiSeries, as_series

_CAUSAL_MARGIN = 1e-10


class VarModel:
    """A Gaussian VAR(p) model.

    Parameters
    ----------
    coeffs : array_like, shape (p, K, K)
        Coefficient matrices A_1..A_p. An empty list gives p = 0 (pure
        noise); then ``dimension`` is taken from ``sigma``.
    sigma : array_like, shape (K, K)
        Noise covariance. Must be symmetric positive definite.
    mu : array_like, shape (K,), optional
        Intercept of the recursion (defaults to zero).
    """

    def __init__(self, coeffs, sigma, mu=None):
        sigma = np.asarray(sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise InputError("sigma must be a square matrix")
        K = sigma.shape[0]
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1, K, K) if len(coeffs) else np.zeros((0, K, K))
        if not np.all(np.isfinite(coeffs)):
            raise InputError("coefficient matrices contain non-finite values")
        if not np.all(np.isfinite(sigma)) or np.max(np.abs(sigma - sigma.T)) > 1e-12 * max(1.0, np.max(np.abs(sigma))):
            raise InputError("sigma must be finite and symmetric")
        if np.linalg.eigvalsh(sigma).min() <= 0:
            raise ModelDomainError("sigma must be positive definite")
        self.coeffs = coeffs
        self.sigma = 0.5 * (sigma + sigma.T)
        self.mu = np.zeros(K) if mu is None else np.asarray(mu, dtype=float)
        if self.mu.shape != (K,):
            raise InputError("mu must be a length-K vector")

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    @property
    def dimension(self) -> int:
        return self.sigma.shape[0]

    def coeff_matrix(self) -> np.ndarray:
        """The K x Kp matrix (A_1, ..., A_p); empty for p = 0."""
        p, K = self.order, self.dimension
        return self.coeffs.transpose(1, 0, 2).reshape(K, K * p)

    def trimmed(self) -> "VarModel":
        """Drop trailing all-zero lags (minimal faithful order)."""
        p = self.order
        while p > 0 and not np.any(self.coeffs[p - 1]):
            p -= 1
        return VarModel(self.coeffs[:p], self.sigma, self.mu)

    def to_dict(self) -> dict:
        return {
            "p": self.order,
            "K": self.dimension,
            "A": self.coeffs.tolist(),
            "sigma_z": self.sigma.tolist(),
            "mu": self.mu.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VarModel":
        try:
            coeffs = np.asarray(doc["A"], dtype=float)
            K = int(doc["K"])
            if coeffs.size == 0:
                coeffs = np.zeros((0, K, K))
            if int(doc["p"]) != coeffs.shape[0] or coeffs.shape[1:] != (K, K):
                raise InputError("model document dimensions are inconsistent")
            return cls(coeffs, np.asarray(doc["sigma_z"], dtype=float), np.asarray(doc["mu"], dtype=float))
        except KeyError as exc:
            raise InputError(f"model document missing key {exc}") from exc

    def __repr__(self):
        return f"VarModel(p={self.order}, K={self.dimension})"


class SparsityPattern:
    """The set of (lag, row, col) coefficient positions allowed non-zero.

    Equivalent to a selection matrix R mapping m free parameters to the
    stacked coefficient vector vec(A_1, ..., A_p). Entry order is
    preserved: it fixes the order of the free-parameter vector.
    """

    def __init__(self, order: int, dimension: int, entries):
        entries = [(int(k), int(i), int(j)) for (k, i, j) in entries]
        if len(set(entries)) != len(entries):
            raise InputError("duplicate entries in sparsity pattern")
        for (k, i, j) in entries:
            if not (1 <= k <= order and 0 <= i < dimension and 0 <= j < dimension):
                raise InputError(f"pattern entry {(k, i, j)} out of range for p={order}, K={dimension}")
        self.order = order
        self.dimension = dimension
        self.entries = entries

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def max_lag(self) -> int:
        return max((k for (k, _, _) in self.entries), default=0)

    @classmethod
    def full(cls, order: int, dimension: int) -> "SparsityPattern":
        ents = [(k, i, j) for k in range(1, order + 1) for j in range(dimension) for i in range(dimension)]
        return cls(order, dimension, ents)

    @classmethod
    def diagonal(cls, order: int, dimension: int) -> "SparsityPattern":
        return cls(order, dimension, [(k, i, i) for k in range(1, order + 1) for i in range(dimension)])

    def design_indices(self):
        """(rows, cols) into the K x Kp coefficient matrix for each entry.

        Column (k-1)*K + j of the stacked regressor holds series j at lag k.
        """
        K = self.dimension
        rows = np.array([i for (_, i, _) in self.entries], dtype=np.intp)
        cols = np.array([(k - 1) * K + j for (k, _, j) in self.entries], dtype=np.intp)
        return rows, cols

    def constraint_matrix(self) -> np.ndarray:
        """The K^2 p x m selection matrix R (one unit entry per column)."""
        K, p = self.dimension, self.order
        R = np.zeros((K * K * p, self.m))
        rows, cols = self.design_indices()
        R[cols * K + rows, np.arange(self.m)] = 1.0
        return R

    def coeff_array(self, gamma) -> np.ndarray:
        """Scatter free parameters into a dense (p, K, K) coefficient array."""
        A = np.zeros((self.order, self.dimension, self.dimension))
        for (k, i, j), g in zip(self.entries, np.asarray(gamma, dtype=float)):
            A[k - 1, i, j] = g
        return A

    def __contains__(self, triplet):
        return tuple(triplet) in set(self.entries)

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"SparsityPattern(p={self.order}, K={self.dimension}, m={self.m})"


@dataclass
class StackedDesign:
    """Lagged-regressor stack for the conditional VAR regression.

    ``response[:, t]`` is the observation being predicted and ``lagged[:, t]``
    the corresponding Kp regressor vector (lag-1 block first). ``presample``
    observations at the start of the series are conditioned on.
    """

    lagged: np.ndarray     # (K*p, n)
    response: np.ndarray   # (K, n)
    order: int
    presample: int
    gram: np.ndarray = field(init=False)        # lagged @ lagged.T
    cross: np.ndarray = field(init=False)       # response @ lagged.T

    def __post_init__(self):
        self.gram = self.lagged @ self.lagged.T
        self.cross = self.response @ self.lagged.T

    @property
    def n_obs(self) -> int:
        return self.response.shape[1]

    @property
    def y(self) -> np.ndarray:
        """vec of the response block (columns stacked)."""
        return self.response.reshape(-1, order="F")


def build_design(series, p: int, presample: int | None = None) -> StackedDesign:
    """Assemble the regression stack for a VAR(p) fit.

    Parameters
    ----------
    series : MultiSeries or array_like
    p : int
        Autoregression order (>= 0).
    presample : int, optional
        Number of initial observations to condition on; defaults to ``p``.
        Passing ``max(p_grid)`` makes likelihoods comparable across orders.
    """
    series = as_series(series)
    Yfull = series.values.T  # (K, T)
    K, T = Yfull.shape
    if presample is None:
        presample = p
    if presample < p:
        raise InputError(f"presample ({presample}) must be at least p ({p})")
    if T <= presample:
        raise InputError(f"series too short: T={T} <= presample={presample}")
    n = T - presample
    resp = Yfull[:, presample:]
    lag = np.empty((K * p, n))
    for k in range(1, p + 1):
        lag[(k - 1) * K:k * K, :] = Yfull[:, presample - k:T - k]
    return StackedDesign(lagged=lag, response=resp, order=p, presample=presample)


def is_causal(model: VarModel) -> bool:
    """True iff all companion-matrix eigenvalues have modulus < 1."""
    p, K = model.order, model.dimension
    if p == 0:
        return True
    comp = np.zeros((K * p, K * p))
    comp[:K, :] = model.coeff_matrix()
    if p > 1:
        comp[K:, :-K] = np.eye(K * (p - 1))
    return bool(np.abs(np.linalg.eigvals(comp)).max() < 1.0 - _CAUSAL_MARGIN)


def _sigma_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Symmetric PD square root via eigendecomposition."""
    evals, vecs = np.linalg.eigh(sigma)
    if evals.min() <= 0:
        raise ModelDomainError("sigma must be positive definite")
    return (vecs * np.sqrt(evals)) @ vecs.T


def simulate(model: VarModel, T: int, burn_in: int = 500, seed=None) -> MultiSeries:
    """Draw T observations from the model.

    Starts from a zero presample, runs ``burn_in`` extra steps and discards
    them. Deterministic for a fixed ``seed`` (int, SeedSequence, or
    Generator).
    """
    if T <= 0:
        raise InputError("T must be positive")
    if burn_in < 0:
        raise InputError("burn_in must be non-negative")
    if not is_causal(model):
        raise ModelDomainError("cannot simulate a non-causal model")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p, K = model.order, model.dimension
    root = _sigma_sqrt(model.sigma)
    total = T + burn_in
    noise = rng.standard_normal((total, K)) @ root.T + model.mu
    Y = np.zeros((total + p, K))
    A = model.coeffs
    for t in range(total):
        acc = noise[t]
        for k in range(1, p + 1):
            acc = acc + A[k - 1] @ Y[t + p - k]
        Y[t + p] = acc
    return MultiSeries(Y[p + burn_in:])


def log_likelihood(model: VarModel, series, presample: int | None = None) -> float:
    """Conditional Gaussian log-likelihood given the first ``presample`` points.

    Includes the 2*pi constant; ``presample`` defaults to the model order.
    """
    series = as_series(series)
    K = model.dimension
    if series.dimension != K:
        raise InputError(f"series dimension {series.dimension} != model dimension {K}")
    evals = np.linalg.eigvalsh(model.sigma)
    if evals.min() <= 0:
        raise ModelDomainError("sigma must be positive definite")
    design = build_design(series, model.order, presample)
    resid = design.response - model.mu[:, None]
    if model.order > 0:
        resid = resid - model.coeff_matrix() @ design.lagged
    n = design.n_obs
    sign, logdet = np.linalg.slogdet(model.sigma)
    quad = float(np.sum(resid * np.linalg.solve(model.sigma, resid)))
    return -0.5 * (n * (K * np.log(2.0 * np.pi) + logdet) + quad)


def ma_weights(model: VarModel, horizon: int) -> np.ndarray:
    """Moving-average weight matrices Psi_0..Psi_{horizon-1} (Psi_0 = I)."""
    p, K = model.order, model.dimension
    psi = np.zeros((horizon, K, K))
    psi[0] = np.eye(K)
    for j in range(1, horizon):
        acc = np.zeros((K, K))
        for k in range(1, min(j, p) + 1):
            acc += model.coeffs[k - 1] @ psi[j - k]
        psi[j] = acc
    return psi


def forecast(model: VarModel, history, h: int):
    """Point forecasts and forecast-error covariances, horizons 1..h.

    Returns ``(points, covs)`` with shapes (h, K) and (h, K, K). The h-step
    forecast distribution is Gaussian(points[h-1], covs[h-1]).
    """
    if h < 1:
        raise InputError("horizon must be >= 1")
    history = as_series(history)
    p, K = model.order, model.dimension
    if history.dimension != K:
        raise InputError("history dimension does not match the model")
    if history.sample_size < p:
        raise InputError(f"history must hold at least p={p} observations")
    buf = list(history.values[history.sample_size - p:]) if p else []
    points = np.empty((h, K))
    for step in range(h):
        acc = model.mu.copy()
        for k in range(1, p + 1):
            acc += model.coeffs[k - 1] @ buf[len(buf) - k]
        points[step] = acc
        if p:
            buf.append(acc)
    psi = ma_weights(model, h)
    covs = np.empty((h, K, K))
    acc = np.zeros((K, K))
    for j in range(h):
        acc = acc + psi[j] @ model.sigma @ psi[j].T
        covs[j] = acc
    return points, covs
