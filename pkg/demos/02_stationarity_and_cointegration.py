"""
Unit-root testing and cointegration rank
=========================================

Three series with known persistence, tested for a unit root; then a pair
sharing a common stochastic trend, tested for cointegration rank.
"""

import numpy as np

import creditfactors as cf

rng = np.random.default_rng(7)
T = 240

# a pure random walk, an AR(1) with moderate persistence, and a walk with drift
walk = np.cumsum(rng.normal(size=T))
ar = np.zeros(T)
for t in range(1, T):
    ar[t] = 0.5 * ar[t - 1] + rng.normal()
drifting = np.cumsum(0.1 + rng.normal(size=T))

results = {
    "random walk": cf.adf_test(walk),
    "AR(0.5)": cf.adf_test(ar),
    "walk with drift": cf.adf_test(drifting),
}
print(cf.to_markdown(*cf.adf_table(results)))
print()
for name, res in results.items():
    verdict = "stationary" if res.p_value <= 0.05 else "unit root retained"
    print(f"  {name}: p={res.p_value:.2f} with {res.lag_order} lags, {verdict}")
print()

# differencing the walk removes the unit root
d = np.diff(walk)
print(f"differenced walk: p={cf.adf_test(d).p_value:.2f} (floor is 0.01)")
print()

# ---------------------------------------------------------------------------
# Cointegration. Two spreads driven by one common trend move apart only
# transiently, so the trace test finds rank 1. Two independent walks do not.
common = np.cumsum(rng.normal(size=T))
pair = np.column_stack([
    common + rng.normal(0, 0.3, T),
    0.7 * common + rng.normal(0, 0.3, T),
])
res = cf.johansen_trace(pair)
print("pair sharing a trend:")
print(cf.to_markdown(*cf.johansen_table(res)))
print()

independent = np.column_stack([np.cumsum(rng.normal(size=T)),
                               np.cumsum(rng.normal(size=T))])
res2 = cf.johansen_trace(independent)
print("independent walks:")
print(cf.to_markdown(*cf.johansen_table(res2)))
