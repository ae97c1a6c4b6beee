"""
Out-of-sample forecasting and predictive density scoring
========================================================

Fit a sparse model on a training window, then evaluate it on a held-out
test window two ways: rolling h-step root-mean-square forecast error, and
the average negative log predictive density (log score).  A correctly
specified sparse fit should beat both a dense unrestricted fit and a
white-noise baseline.

Run with:  python3 demos/03_forecasting_and_scoring.py
"""

from __future__ import annotations

import numpy as np

import svarfit

# ----------------------------------------------------------------------------
# 1. Train/test split of a simulated sample
# ----------------------------------------------------------------------------

model = svarfit.benchmark_model(delta_sq=1.0)
full = svarfit.simulate(model, T=500, seed=3).values
train, test = full[:400], full[400:]
print(f"training window: {train.shape[0]} points, test window: {test.shape[0]} points")

# ----------------------------------------------------------------------------
# 2. Three competing fits
# ----------------------------------------------------------------------------
# sparse: the two-stage procedure.  dense: maximum likelihood with every
# lag-one coefficient free.  noise: a no-dynamics model that predicts the
# unconditional mean.

sparse = svarfit.fit_svar(train).model

K = svarfit.as_series(train).dimension
dense = svarfit.constrained_mle(train, svarfit.SparsityPattern.full(1, K)).model()

noise = svarfit.VarModel(np.zeros((1, K, K)), np.cov(train.T))

print(f"sparse fit keeps {np.count_nonzero(sparse.coeffs)} of "
      f"{dense.coeffs.size} lagged coefficients")

# ----------------------------------------------------------------------------
# 3. Rolling h-step RMSE on the test window
# ----------------------------------------------------------------------------
# For each forecast origin in the test window the model iterates h steps
# ahead from the observed history; errors are pooled across origins and
# series.  history supplies the last p observations before the window.

history = train[-sparse.order:]
print("\nh    sparse    dense     white-noise")
for h in (1, 3, 8):
    r_sparse = svarfit.forecast_rmse(sparse, test, h=h, history=history)
    r_dense = svarfit.forecast_rmse(dense, test, h=h, history=history)
    r_noise = svarfit.forecast_rmse(noise, test, h=h, history=train[-1:])
    print(f"{h}    {r_sparse:.4f}    {r_dense:.4f}    {r_noise:.4f}")

# ----------------------------------------------------------------------------
# 4. Log score: does the predictive *density* fit?
# ----------------------------------------------------------------------------
# RMSE only judges the point forecast.  The log score judges the whole
# one-step Gaussian predictive distribution, so a model with the right
# noise covariance gains even when point forecasts are similar.

ls_sparse = svarfit.log_score(sparse, test, history=history)
ls_dense = svarfit.log_score(dense, test, history=history)
ls_noise = svarfit.log_score(noise, test, history=train[-1:])

print("\naverage negative log predictive density (lower is better):")
print(f"    sparse       {ls_sparse:.4f}")
print(f"    dense        {ls_dense:.4f}")
print(f"    white-noise  {ls_noise:.4f}")

# ----------------------------------------------------------------------------
# 5. Multi-step forecasts with uncertainty bands
# ----------------------------------------------------------------------------
# forecast returns the point path and the forecast-error covariance at each
# horizon; the variances grow toward the stationary variance as h increases.

path, cov = svarfit.forecast(sparse, full[-sparse.order:], h=5)
spread = np.sqrt(cov[:, 0, 0])
print("\n5-step forecast from the end of the sample, series 0:")
print("h    point     +/- 1 s.d.")
for step in range(5):
    print(f"{step + 1}    {path[step, 0]:+.3f}    {spread[step]:.3f}")
