"""Monte-Carlo evaluation harness: simulation studies and forecast scoring.

A study simulates a known sparse VAR repeatedly, fits each requested method,
and aggregates five metrics per method: mean selected order, mean non-zero
count, squared bias, variance, and their sum (MSE) over all coefficient
positions. Two benchmark generators ship with the package: a six-variable
sparse VAR(1) whose noise covariance concentrates increasing power on the
first component (``benchmark_model``), and a three-variable VAR(1) whose
(1,2) partial spectral coherence vanishes identically even though the (1,2)
coefficient is non-zero (``hidden_pair_model``), useful for probing the
screening stage's blind spot.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .exceptions import InputError, SvarError
from .lasso import fit_lasso_cv
from .mle import constrained_mle
from .series import as_series
from .two_stage import (FitReport, Stage1Result, TwoStageConfig, bic_stage1,
                        fit_svar, stage1_pattern, stage2_refine)
from .var import SparsityPattern, VarModel, forecast, is_causal, simulate

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

METHODS = ("two_stage", "lasso_ss", "lasso_ll", "oracle_two_stage")


def replication_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit stream: finalised splitmix64 of master + step.

    Independent of evaluation order, so serial and parallel runs agree.
    """
    z = (int(master_seed) + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def rank_overlap_pvalue(first, second) -> float:
    """Two-sided Mann-Whitney p-value that two samples share a distribution.

    Used to compare per-replication statistics (selected sizes, criterion
    values) across methods; a large p-value means the samples overlap.
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    if first.size == 0 or second.size == 0:
        raise InputError("rank test needs non-empty samples")
    return float(stats.mannwhitneyu(first, second, alternative="two-sided").pvalue)


def benchmark_model(delta_sq: float = 1.0) -> VarModel:
    """Six-variable sparse VAR(1) benchmark generator.

    ``delta_sq`` scales the first noise variance (with matching covariances
    delta/4 .. delta/12 to the other components), so larger values
    concentrate spectral power on component 0 and stress methods that weight
    all series equally.
    """
    if delta_sq <= 0:
        raise InputError("delta_sq must be positive")
    A = np.zeros((1, 6, 6))
    A[0, 0, 0] = 0.8
    A[0, 1, 3] = 0.3
    A[0, 2, 4] = -0.3
    A[0, 3, 0] = 0.6
    A[0, 4, 2] = 0.6
    A[0, 5, 5] = 0.8
    delta = float(np.sqrt(delta_sq))
    sigma = np.eye(6)
    sigma[0, 0] = delta_sq
    for j, denom in zip(range(1, 6), (4.0, 6.0, 8.0, 10.0, 12.0)):
        sigma[0, j] = sigma[j, 0] = delta / denom
    return VarModel(A, sigma)


def benchmark_pattern() -> SparsityPattern:
    """True non-zero positions of ``benchmark_model``."""
    return SparsityPattern(1, 6, [(1, 0, 0), (1, 1, 3), (1, 2, 4),
                                  (1, 3, 0), (1, 4, 2), (1, 5, 5)])


def hidden_pair_model() -> VarModel:
    """Three-variable VAR(1) whose (0,1) partial coherence is identically zero.

    The (0,1) coefficient is 0.5, yet the cross terms cancel in the inverse
    spectral matrix at every frequency, so screening on partial coherence
    alone would never retain that pair.
    """
    A = np.array([[[0.0, 0.5, 0.5],
                   [0.0, 0.0, 0.3],
                   [0.0, 0.25, 0.5]]])
    sigma = np.array([[18.0, 0.0, 6.0],
                      [0.0, 1.0, 0.0],
                      [6.0, 0.0, 3.0]])
    return VarModel(A, sigma)


def hidden_pair_pattern() -> SparsityPattern:
    """True non-zero positions of ``hidden_pair_model``."""
    return SparsityPattern(1, 3, [(1, 0, 1), (1, 0, 2), (1, 1, 2),
                                  (1, 2, 1), (1, 2, 2)])


def coupled_pairs(model: VarModel) -> list[tuple[int, int]]:
    """Pairs i<j with a non-zero cross coefficient at any lag."""
    K = model.dimension
    out = []
    for i in range(K):
        for j in range(i + 1, K):
            if np.any(model.coeffs[:, i, j]) or np.any(model.coeffs[:, j, i]):
                out.append((i, j))
    return out


def oracle_stage1_pattern(model: VarModel) -> SparsityPattern:
    """Stage-1-shaped pattern a clairvoyant screener would produce.

    All diagonals at every lag up to the true order, plus both directions of
    every truly coupled pair.
    """
    return stage1_pattern(model.order, model.dimension, coupled_pairs(model))


def support_pattern(model: VarModel) -> SparsityPattern:
    """Exact non-zero positions of a model's lagged coefficients."""
    entries = [(int(lag) + 1, int(i), int(j))
               for lag, i, j in zip(*np.nonzero(model.coeffs))]
    return SparsityPattern(model.order, model.dimension, entries)


def oracle_two_stage(series, true_pattern: SparsityPattern,
                     config: TwoStageConfig | None = None) -> FitReport:
    """Refinement stage run on an externally supplied (true) pattern.

    Skips screening entirely: the given pattern is fitted by constrained
    maximum likelihood and pruned exactly as the ordinary second stage would
    prune a screened pattern.
    """
    config = config or TwoStageConfig()
    series = as_series(series).centered()
    presample = config.presample if config.presample is not None else max(config.p_range)
    presample = max(presample, true_pattern.order)
    fit = constrained_mle(series, true_pattern, presample=presample,
                          tol=config.mle_tol, max_iter=config.mle_max_iter)
    T, K = series.sample_size, series.dimension
    n_pairs = len({(min(i, j), max(i, j)) for (_, i, j) in true_pattern.entries if i != j})
    stage1 = Stage1Result(
        p_tilde=true_pattern.order,
        m_tilde=n_pairs,
        ranking=None,
        bic_surface=np.asarray([[bic_stage1(fit.loglik, T, true_pattern.order, n_pairs, K)]]),
        p_range=(true_pattern.order,),
        m_range=(n_pairs,),
        pattern=true_pattern,
        fit=fit,
    )
    stage2 = stage2_refine(series, fit, config)
    model = stage2.fit.model().trimmed()
    return FitReport(model=model, stage1=stage1, stage2=stage2, config=config,
                     sample_size=T)


@dataclass
class StudyConfig:
    """Specification of one simulation study."""

    generator: VarModel
    T: int = 100
    replications: int = 500
    seed: int = 0
    methods: tuple[str, ...] = ("two_stage",)
    two_stage: TwoStageConfig = field(default_factory=TwoStageConfig)
    lasso_p_range: tuple[int, ...] = (0, 1, 2, 3)
    n_folds: int = 10
    n_lambda: int = 50
    lambda_min_ratio: float = 1e-3
    burn_in: int = 500
    oracle_pattern: SparsityPattern | None = None   # None: derived from the generator
    label: str = ""
    delta_sq: float | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise InputError("replications must be at least 1")
        if self.T < 2:
            raise InputError("T must be at least 2")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InputError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if not is_causal(self.generator):
            raise InputError("generator must be causal")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "delta_sq": self.delta_sq,
            "generator": self.generator.to_dict(),
            "T": self.T,
            "replications": self.replications,
            "seed": self.seed,
            "methods": list(self.methods),
            "two_stage": self.two_stage.to_dict(),
            "lasso_p_range": list(self.lasso_p_range),
            "n_folds": self.n_folds,
            "n_lambda": self.n_lambda,
            "lambda_min_ratio": self.lambda_min_ratio,
            "burn_in": self.burn_in,
        }


@dataclass
class MethodMetrics:
    """The five aggregate metrics for one method, plus bookkeeping."""

    method: str
    p_hat_mean: float
    m_hat_mean: float
    bias_sq: float
    variance: float
    mse: float
    n_used: int
    n_failed: int
    flagged: bool


@dataclass
class MetricsTable:
    """Aggregated study output plus the per-replication records."""

    config: StudyConfig
    rows: dict[str, MethodMetrics]
    records: list[dict]

    def row_tuples(self):
        """(method, delta_sq, p_hat, m_hat, bias_sq, variance, mse) rows."""
        for name in self.config.methods:
            r = self.rows[name]
            yield (r.method, self.config.delta_sq, r.p_hat_mean, r.m_hat_mean,
                   r.bias_sq, r.variance, r.mse)


def _fit_one(name: str, series, config: StudyConfig):
    """Fit one method; returns (model, stage2_bic_or_None)."""
    if name == "two_stage":
        report = fit_svar(series, config.two_stage)
        return report.model, report.stage2.bic
    if name == "oracle_two_stage":
        pattern = config.oracle_pattern or support_pattern(config.generator)
        report = oracle_two_stage(series, pattern, config.two_stage)
        return report.model, report.stage2.bic
    kind = "SS" if name == "lasso_ss" else "LL"
    fit, _ = fit_lasso_cv(series, config.lasso_p_range, kind,
                          n_folds=config.n_folds, n_lambda=config.n_lambda,
                          lambda_min_ratio=config.lambda_min_ratio)
    return fit.model.trimmed(), None


def _run_replication(index: int, config: StudyConfig) -> list[dict]:
    seed = replication_seed(config.seed, index)
    series = simulate(config.generator, config.T, burn_in=config.burn_in,
                      seed=np.random.default_rng(seed))
    out = []
    for name in config.methods:
        record = {"replication": index, "seed": seed, "method": name}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                model, bic = _fit_one(name, series, config)
        except (SvarError, np.linalg.LinAlgError) as exc:
            record.update(ok=False, error=f"{type(exc).__name__}: {exc}")
        else:
            record.update(ok=True, error=None,
                          p_hat=model.order,
                          m_hat=int(np.count_nonzero(model.coeffs)),
                          bic=bic,
                          coeffs=model.coeffs.tolist())
        out.append(record)
    return out


def _aggregate(name: str, config: StudyConfig, records: list[dict]) -> MethodMetrics:
    mine = [r for r in records if r["method"] == name]
    good = [r for r in mine if r["ok"]]
    n_failed = len(mine) - len(good)
    flagged = n_failed > 0.01 * max(len(mine), 1)
    if not good:
        return MethodMetrics(name, float("nan"), float("nan"), float("nan"),
                             float("nan"), float("nan"), 0, n_failed, True)
    truth = config.generator
    K, p_true = truth.dimension, truth.order
    p_pad = max([p_true] + [r["p_hat"] for r in good])
    stack = np.zeros((len(good), p_pad, K, K))
    for idx, r in enumerate(good):
        coeffs = np.asarray(r["coeffs"], dtype=float).reshape(-1, K, K)
        stack[idx, :coeffs.shape[0]] = coeffs
    target = np.zeros((p_pad, K, K))
    target[:p_true] = truth.coeffs
    mean_est = stack.mean(axis=0)
    bias_sq = float(np.sum((mean_est - target) ** 2))
    variance = float(np.sum(stack.var(axis=0)))
    mse = float(np.mean(np.sum((stack - target) ** 2, axis=(1, 2, 3))))
    return MethodMetrics(
        method=name,
        p_hat_mean=float(np.mean([r["p_hat"] for r in good])),
        m_hat_mean=float(np.mean([r["m_hat"] for r in good])),
        bias_sq=bias_sq,
        variance=variance,
        mse=mse,
        n_used=len(good),
        n_failed=n_failed,
        flagged=flagged,
    )


def run_study(config: StudyConfig, threads: int = 1) -> MetricsTable:
    """Simulate, fit, and aggregate; reproducible for a fixed config seed.

    Replication i draws its own seed from the master via
    ``replication_seed``, so results do not depend on execution order or on
    ``threads``. Failed replications are excluded per method with a count;
    a method is flagged when more than 1% of its replications failed.
    """
    indices = range(config.replications)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(lambda i: _run_replication(i, config), indices))
    else:
        batches = [_run_replication(i, config) for i in indices]
    records = [rec for batch in batches for rec in batch]
    rows = {name: _aggregate(name, config, records) for name in config.methods}
    for name, row in rows.items():
        if row.flagged:
            warnings.warn(
                f"method {name}: {row.n_failed}/{config.replications} replications failed",
                UserWarning,
                stacklevel=2,
            )
    return MetricsTable(config=config, rows=rows, records=records)


PRESETS = {
    "table1-delta1": 1.0,
    "table1-delta4": 4.0,
    "table1-delta25": 25.0,
    "table1-delta100": 100.0,
}


def preset_study(name: str, replications: int = 500, seed: int = 0,
                 methods: tuple[str, ...] = ("two_stage", "lasso_ss", "lasso_ll"),
                 T: int = 100) -> StudyConfig:
    """Built-in benchmark studies over the six-variable generator."""
    if name not in PRESETS:
        raise InputError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    delta_sq = PRESETS[name]
    return StudyConfig(
        generator=benchmark_model(delta_sq),
        T=T,
        replications=replications,
        seed=seed,
        methods=methods,
        label=name,
        delta_sq=delta_sq,
    )


def _forecast_context(model: VarModel, test, history):
    test = as_series(test)
    if test.dimension != model.dimension:
        raise InputError("test dimension does not match the model")
    p = model.order
    if p == 0:
        return test, np.zeros((0, model.dimension))
    if history is None:
        raise InputError("history (at least p training observations) is required when p > 0")
    history = as_series(history)
    if history.dimension != model.dimension or history.sample_size < p:
        raise InputError(f"history must hold at least p={p} observations of matching dimension")
    return test, history.values[history.sample_size - p:]


def forecast_rmse(model: VarModel, test, h: int, history=None) -> float:
    """Rolling h-step root-mean-squared forecast error over a test window.

    Forecast origins run from the end of the training sample through the
    point h steps before the end of the test window (T_test - h + 1 origins);
    the average is over origins and components. The model is frozen: no
    refitting as the origin advances.
    """
    if h < 1:
        raise InputError("horizon must be >= 1")
    test, tail = _forecast_context(model, test, history)
    n_test = test.sample_size
    if n_test < h:
        raise InputError(f"test window ({n_test}) shorter than horizon ({h})")
    ctx = np.vstack([tail, test.values])
    offset = tail.shape[0]
    total = 0.0
    n_origins = n_test - h + 1
    for origin in range(n_origins):
        past = ctx[:offset + origin]
        points, _ = forecast(model, past, h) if model.order else \
            (np.tile(model.mu, (h, 1)), None)
        err = points[h - 1] - test.values[origin + h - 1]
        total += float(err @ err)
    return float(np.sqrt(total / (model.dimension * n_origins)))


def log_score(model: VarModel, test, history=None) -> float:
    """Average negative one-step Gaussian log predictive density.

    Scores the first T_test - 1 test points, each predicted from the
    training tail plus the preceding test observations, with predictive
    covariance equal to the model noise covariance.
    """
    test, tail = _forecast_context(model, test, history)
    n_test = test.sample_size
    if n_test < 2:
        raise InputError("log score needs at least two test observations")
    K = model.dimension
    sign, logdet = np.linalg.slogdet(model.sigma)
    if sign <= 0:
        raise InputError("model noise covariance must be positive definite")
    sigma_inv = np.linalg.inv(model.sigma)
    ctx = np.vstack([tail, test.values])
    offset = tail.shape[0]
    total = 0.0
    for t in range(n_test - 1):
        if model.order:
            past = ctx[:offset + t]
            point = forecast(model, past, 1)[0][0]
        else:
            point = model.mu
        err = test.values[t] - point
        total += 0.5 * (K * np.log(2.0 * np.pi) + logdet + float(err @ sigma_inv @ err))
    return total / (n_test - 1)
