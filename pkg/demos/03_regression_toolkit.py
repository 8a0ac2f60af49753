"""Least squares with classical diagnostics, and AIC-guided selection."""

import numpy as np

import creditfactors as cf

rng = np.random.default_rng(11)
T = 120

# six candidate predictors, only three carry signal
X = rng.normal(size=(T, 6))
names = ["ip_growth", "cpi", "term_slope", "vix", "oil", "fx"]
y = 0.8 + 1.5 * X[:, 0] - 2.0 * X[:, 2] + 0.9 * X[:, 3] + rng.normal(size=T)

full = cf.ols(y, X, predictor_names=names, response_name="spread_36A")
print("full fit:")
for name, c, t in zip(full.predictor_names, full.coefficients,
                      full.t_statistics):
    print(f"  {name:>10}: {c:8.3f}  (t={t:6.2f})")
print(f"  adj R2 {full.adj_r_squared:.3f}, AIC {full.aic:.2f}")
print()

selected, trace = cf.stepwise_aic(y, X, predictor_names=names,
                                  response_name="spread_36A")
print(f"stepwise from intercept only (AIC {trace.initial_aic:.2f}):")
for step in trace.steps:
    print(f"  {step.action} {step.predictor:>10} -> AIC {step.aic_after:.2f}")
print(f"kept: {', '.join(selected.slope_names)}")
assert selected.aic <= min(full.aic, cf.ols(y).aic)
print()

# the two-line layout: coefficient row over t-statistic row, one pair per fit
y2 = -0.3 + 0.7 * X[:, 0] + rng.normal(size=T)
fit2 = cf.stepwise_aic(y2, X, predictor_names=names,
                       response_name="spread_60B")[0]
header, rows = cf.fit_table([selected, fit2])
print(cf.to_markdown(header, rows))
