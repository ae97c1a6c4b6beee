"""Sparse vector autoregression via spectral screening and likelihood refinement.

The package fits VAR(p) models whose coefficient matrices are mostly zero.
The main entry point is :func:`fit_svar`, a two-stage pipeline: pairs of
series are screened by their peak squared partial spectral coherence and a
BIC search picks the order and the retained pair count; the surviving
coefficients are then ranked by t-ratio and pruned by a second BIC search.
L1-penalised baselines (:func:`lasso_ss`, :func:`lasso_ll`) with blocked
cross-validation, a Monte-Carlo study harness, forecast scoring, and a CLI
round out the toolkit.
"""

from .exceptions import (EstimationError, InputError, ModelDomainError,
                         NumericalError, SvarError)
from .lasso import (CvPlan, CvResult, LassoFit, cross_validate, default_cv_plan,
                    fit_lasso_cv, kkt_residual, lambda_max, lasso_ll, lasso_ss)
from .mle import ConstrainedFit, constrained_mle, t_statistics
from .series import MultiSeries, as_series
from .spectral import (PscEstimate, SpectralDensityEstimate, default_spans,
                       estimate_spectrum, model_spectrum, periodogram,
                       psc_from_inverse, psc_from_residual_filter, psc_summary,
                       smooth_daniell)
from .study import (METHODS, MethodMetrics, MetricsTable, PRESETS, StudyConfig,
                    benchmark_model, benchmark_pattern, coupled_pairs,
                    forecast_rmse, hidden_pair_model, hidden_pair_pattern,
                    log_score, oracle_stage1_pattern, oracle_two_stage,
                    preset_study, rank_overlap_pvalue, replication_seed,
                    run_study, support_pattern)
from .two_stage import (CoeffRanking, FitReport, PairRanking, Stage1Result,
                        Stage2Result, TwoStageConfig, bic_stage1, bic_stage2,
                        fit_svar, stage1_pattern, stage1_rank, stage1_select,
                        stage2_refine)
from .var import (SparsityPattern, StackedDesign, VarModel, build_design,
                  forecast, is_causal, log_likelihood, ma_weights, simulate)

__version__ = "0.1.0"

__all__ = [
    "CoeffRanking", "ConstrainedFit", "CvPlan", "CvResult", "EstimationError",
    "FitReport", "InputError", "LassoFit", "METHODS", "MethodMetrics",
    "MetricsTable", "ModelDomainError", "MultiSeries", "NumericalError",
    "PRESETS", "PairRanking", "PscEstimate", "SparsityPattern",
    "SpectralDensityEstimate", "StackedDesign", "Stage1Result", "Stage2Result",
    "StudyConfig",
    "SvarError", "TwoStageConfig", "VarModel", "as_series", "benchmark_model",
    "benchmark_pattern", "bic_stage1", "bic_stage2", "build_design",
    "constrained_mle", "coupled_pairs", "cross_validate", "default_cv_plan",
    "default_spans", "estimate_spectrum", "fit_lasso_cv", "fit_svar",
    "forecast", "forecast_rmse", "hidden_pair_model", "hidden_pair_pattern",
    "is_causal", "kkt_residual", "lambda_max", "lasso_ll", "lasso_ss",
    "log_likelihood", "log_score", "ma_weights", "model_spectrum",
    "oracle_stage1_pattern", "oracle_two_stage", "periodogram", "preset_study",
    "psc_from_inverse", "psc_from_residual_filter", "psc_summary",
    "rank_overlap_pvalue", "replication_seed", "run_study", "simulate",
    "smooth_daniell",
    "stage1_pattern", "stage1_rank", "stage1_select", "stage2_refine",
    "support_pattern", "t_statistics",
]
