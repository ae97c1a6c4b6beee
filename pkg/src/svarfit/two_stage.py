"""Two-stage sparse VAR fitting.

Stage 1 screens variable pairs by the sup-over-frequency squared partial
spectral coherence, then searches (order p, number of retained pairs M) by
BIC over group-sparse candidate patterns: all own-lag (diagonal)
coefficients plus, for each retained pair, both directed coefficients at
every lag. Stage 2 ranks the surviving coefficients by |t| and searches the
retained count m by BIC over nested top-m patterns. The result is a sparse
VAR(p*, m*) with p* the largest lag actually used.

All BIC values within a fit condition on the same presample (the largest
candidate order), so likelihoods are comparable across p.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import EstimationError, InputError
from .mle import ConstrainedFit, constrained_mle, t_statistics
from .series import as_series
from .spectral import estimate_spectrum, psc_from_inverse
from .var import SparsityPattern, VarModel


@dataclass
class TwoStageConfig:
    """Tuning knobs for the two-stage pipeline (defaults match the tests)."""

    p_range: tuple[int, ...] = (0, 1, 2, 3)
    m_range: tuple[int, ...] | None = None   # None: all pair counts (capped for large K)
    spans: tuple[int, ...] | None = None     # None: two passes at the odd span nearest sqrt(T)
    ridge: float | str | None = "auto"
    mle_tol: float = 1e-8
    mle_max_iter: int = 200
    presample: int | None = None             # None: max(p_range)

    def __post_init__(self):
        self.p_range = tuple(sorted(int(p) for p in set(self.p_range)))
        if not self.p_range or self.p_range[0] < 0:
            raise InputError("p_range must be non-empty with non-negative orders")
        if self.m_range is not None:
            self.m_range = tuple(sorted(int(m) for m in set(self.m_range)))
            if self.m_range[0] < 0:
                raise InputError("m_range entries must be non-negative")

    def resolved_m_range(self, dimension: int) -> tuple[int, ...]:
        n_pairs = dimension * (dimension - 1) // 2
        if self.m_range is not None:
            if self.m_range[-1] > n_pairs:
                raise InputError(f"m_range exceeds the {n_pairs} available pairs")
            return self.m_range
        cap = n_pairs if dimension <= 20 else min(n_pairs, 10 * dimension)
        return tuple(range(cap + 1))

    def to_dict(self) -> dict:
        return {
            "p_range": list(self.p_range),
            "m_range": None if self.m_range is None else list(self.m_range),
            "spans": None if self.spans is None else list(self.spans),
            "ridge": self.ridge,
            "mle_tol": self.mle_tol,
            "mle_max_iter": self.mle_max_iter,
            "presample": self.presample,
        }


@dataclass
class PairRanking:
    """All i<j pairs sorted by descending summary statistic.

    Ties break lexicographically on (i, j) so the order is deterministic.
    """

    pairs: list[tuple[int, int]]
    scores: np.ndarray
    dimension: int

    @classmethod
    def from_summary(cls, summary: np.ndarray) -> "PairRanking":
        K = summary.shape[0]
        items = [(i, j, float(summary[i, j])) for i in range(K) for j in range(i + 1, K)]
        if any(not np.isfinite(s) or s < 0 for (_, _, s) in items):
            raise EstimationError("pair summary statistics must be finite and non-negative")
        items.sort(key=lambda t: (-t[2], t[0], t[1]))
        return cls(pairs=[(i, j) for (i, j, _) in items],
                   scores=np.asarray([s for (_, _, s) in items]),
                   dimension=K)

    def top(self, count: int) -> list[tuple[int, int]]:
        return self.pairs[:count]

    def __len__(self):
        return len(self.pairs)


@dataclass
class CoeffRanking:
    """Stage-1 pattern entries sorted by descending |t|, ties on (k, i, j)."""

    entries: list[tuple[int, int, int]]   # (lag, row, col)
    t_values: np.ndarray                  # aligned with entries

    @classmethod
    def from_fit(cls, fit: ConstrainedFit) -> "CoeffRanking":
        tvals = t_statistics(fit)
        items = sorted(zip(fit.pattern.entries, tvals), key=lambda e: (-abs(e[1]), e[0]))
        return cls(entries=[e for (e, _) in items],
                   t_values=np.asarray([t for (_, t) in items]))

    def __len__(self):
        return len(self.entries)


@dataclass
class Stage1Result:
    p_tilde: int
    m_tilde: int                      # retained pair count
    ranking: PairRanking | None
    bic_surface: np.ndarray           # (len(p_range), len(m_range)); +inf = infeasible
    p_range: tuple[int, ...]
    m_range: tuple[int, ...]
    pattern: SparsityPattern
    fit: ConstrainedFit

    @property
    def bic(self) -> float:
        a = self.p_range.index(self.p_tilde)
        b = self.m_range.index(self.m_tilde)
        return float(self.bic_surface[a, b])


@dataclass
class Stage2Result:
    m_star: int
    ranking: CoeffRanking
    bic_curve: np.ndarray             # indexed by m = 0..len(ranking)
    pattern: SparsityPattern
    fit: ConstrainedFit

    @property
    def bic(self) -> float:
        return float(self.bic_curve[self.m_star])


@dataclass
class FitReport:
    """Everything the pipeline decided, with the surfaces it decided on."""

    model: VarModel                   # final sparse VAR(p*, m*), trailing zero lags dropped
    stage1: Stage1Result
    stage2: Stage2Result
    config: TwoStageConfig
    sample_size: int
    timings: dict = field(default_factory=dict)
    likelihood: str = "conditional"

    @property
    def p_star(self) -> int:
        return self.model.order

    @property
    def m_star(self) -> int:
        return self.stage2.m_star

    def to_dict(self) -> dict:
        s1, s2 = self.stage1, self.stage2
        return {
            "model": self.model.to_dict(),
            "p_star": self.p_star,
            "m_star": self.m_star,
            "sample_size": self.sample_size,
            "likelihood": self.likelihood,
            "stage1": {
                "p_tilde": s1.p_tilde,
                "m_tilde": s1.m_tilde,
                "p_range": list(s1.p_range),
                "m_range": list(s1.m_range),
                "bic_surface": s1.bic_surface.tolist(),
                "pairs": [] if s1.ranking is None else [list(p) for p in s1.ranking.pairs],
                "pair_scores": [] if s1.ranking is None else s1.ranking.scores.tolist(),
                "pattern": [list(e) for e in s1.pattern.entries],
                "loglik": s1.fit.loglik,
            },
            "stage2": {
                "m_star": s2.m_star,
                "bic_curve": s2.bic_curve.tolist(),
                "entries": [list(e) for e in s2.ranking.entries],
                "t_values": s2.ranking.t_values.tolist(),
                "pattern": [list(e) for e in s2.pattern.entries],
                "loglik": s2.fit.loglik,
            },
            "config": self.config.to_dict(),
            "timings": self.timings,
        }


def bic_stage1(loglik: float, sample_size: int, p: int, n_pairs: int, dimension: int) -> float:
    """Group-selection criterion -2 log L + log T * (K + 2M) p."""
    return -2.0 * loglik + np.log(sample_size) * (dimension + 2 * n_pairs) * p


def bic_stage2(loglik: float, sample_size: int, n_coeffs: int) -> float:
    """Refinement criterion -2 log L + log T * m."""
    return -2.0 * loglik + np.log(sample_size) * n_coeffs


def stage1_pattern(p: int, dimension: int, pairs) -> SparsityPattern:
    """Own-lag diagonal entries plus both directions of each pair, all lags."""
    entries = [(k, i, i) for k in range(1, p + 1) for i in range(dimension)]
    for (i, j) in pairs:
        for k in range(1, p + 1):
            entries.append((k, i, j))
            entries.append((k, j, i))
    return SparsityPattern(p, dimension, entries)


def stage1_rank(series, spans=None, ridge="auto") -> PairRanking:
    """Rank all pairs by the peak squared partial coherence of the data."""
    series = as_series(series)
    if series.dimension < 2:
        raise InputError("pair ranking needs at least two component series")
    spectrum = estimate_spectrum(series, spans)
    psc = psc_from_inverse(spectrum, ridge=ridge)
    return PairRanking.from_summary(psc.summary())


def _fit_pattern(series, pattern, presample, config) -> ConstrainedFit:
    return constrained_mle(series, pattern, presample=presample,
                           tol=config.mle_tol, max_iter=config.mle_max_iter)


def stage1_select(series, ranking: PairRanking | None, config: TwoStageConfig) -> Stage1Result:
    """Search (p, M) by BIC over the group-sparse candidate patterns."""
    series = as_series(series)
    K, T = series.dimension, series.sample_size
    p_range = config.p_range
    m_range = config.resolved_m_range(K) if K >= 2 else (0,)
    presample = config.presample if config.presample is not None else max(p_range)
    if ranking is None and K >= 2 and any(m > 0 for m in m_range):
        raise InputError("a pair ranking is required when m_range allows pairs")

    surface = np.full((len(p_range), len(m_range)), np.inf)
    fits: dict[tuple[int, int], tuple[SparsityPattern, ConstrainedFit]] = {}
    for a, p in enumerate(p_range):
        for b, M in enumerate(m_range):
            if p == 0 and M > 0:
                continue    # no lags: pair count cannot matter; evaluated once at M=0
            pattern = stage1_pattern(p, K, ranking.top(M) if M else [])
            try:
                fit = _fit_pattern(series, pattern, presample, config)
            except EstimationError as exc:
                warnings.warn(f"stage-1 grid point (p={p}, M={M}) infeasible: {exc}",
                              UserWarning, stacklevel=2)
                continue
            surface[a, b] = bic_stage1(fit.loglik, T, p, M, K)
            fits[(a, b)] = (pattern, fit)
    if not np.isfinite(surface).any():
        raise EstimationError("no feasible (p, M) grid point in stage 1")
    a_opt, b_opt = np.unravel_index(np.argmin(surface), surface.shape)
    pattern, fit = fits[(a_opt, b_opt)]
    return Stage1Result(
        p_tilde=p_range[a_opt],
        m_tilde=m_range[b_opt],
        ranking=ranking,
        bic_surface=surface,
        p_range=p_range,
        m_range=m_range,
        pattern=pattern,
        fit=fit,
    )


def stage2_refine(series, stage1_fit: ConstrainedFit, config: TwoStageConfig | None = None) -> Stage2Result:
    """Prune the stage-1 pattern by |t|-ranked nested BIC search."""
    config = config or TwoStageConfig()
    series = as_series(series)
    T = series.sample_size
    presample = stage1_fit.sample_size - stage1_fit.n_obs
    ranking = CoeffRanking.from_fit(stage1_fit)
    order, K = stage1_fit.pattern.order, stage1_fit.pattern.dimension

    curve = np.full(len(ranking) + 1, np.inf)
    fits: dict[int, tuple[SparsityPattern, ConstrainedFit]] = {}
    for m in range(len(ranking) + 1):
        pattern = SparsityPattern(order, K, ranking.entries[:m])
        try:
            fit = _fit_pattern(series, pattern, presample, config)
        except EstimationError as exc:
            warnings.warn(f"stage-2 size m={m} infeasible: {exc}", UserWarning, stacklevel=2)
            continue
        curve[m] = bic_stage2(fit.loglik, T, m)
        fits[m] = (pattern, fit)
    if not np.isfinite(curve).any():
        raise EstimationError("no feasible pattern size in stage 2")
    m_star = int(np.argmin(curve))
    pattern, fit = fits[m_star]
    return Stage2Result(m_star=m_star, ranking=ranking, bic_curve=curve,
                        pattern=pattern, fit=fit)


def fit_svar(series, config: TwoStageConfig | None = None) -> FitReport:
    """Run the full pipeline: pair screening, BIC group search, t-refinement."""
    config = config or TwoStageConfig()
    series = as_series(series).centered()
    timings = {}

    tic = time.perf_counter()
    ranking = stage1_rank(series, spans=config.spans, ridge=config.ridge) \
        if series.dimension >= 2 else None
    stage1 = stage1_select(series, ranking, config)
    timings["stage1_seconds"] = time.perf_counter() - tic

    tic = time.perf_counter()
    stage2 = stage2_refine(series, stage1.fit, config)
    timings["stage2_seconds"] = time.perf_counter() - tic

    model = stage2.fit.model().trimmed()
    return FitReport(model=model, stage1=stage1, stage2=stage2, config=config,
                     sample_size=series.sample_size, timings=timings)
