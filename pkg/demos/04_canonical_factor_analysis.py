"""
Canonical correlation analysis between two variable blocks
===========================================================

A synthetic factor model generates a response block (12 series) and a proxy
block (10 series) that share 3 latent factors. CCA finds the linear
combinations of each block with maximal mutual correlation; the leading
canonical pairs recover the shared factor space.

The tables printed below are the standard CCA report set: the eigenvalue
decomposition of the correlation structure, the sequential Wilks tests for
how many pairs are jointly significant, redundancy indices, and the
cross-loadings of the proxy block on the response-side variates.
"""

import numpy as np

import creditfactors as cf

# 12 responses, 10 proxies, 3 shared factors, 63 monthly observations
spec = cf.default_spec(seed=0, n_periods=63)
ds = cf.generate(spec)
print(f"responses {ds.responses.shape}, proxies {ds.proxies.shape}, "
      f"shared factors {ds.proxied_factors.shape[1]}")
print()

sol = cf.cca_fit(ds.responses, ds.proxies)
print("canonical correlations:")
print("  " + "  ".join(f"{r:.4f}" for r in sol.correlations))
print()

# eigenvalue table: lambda_k = rho_k^2 / (1 - rho_k^2) and variance shares
rows = cf.eigen_table(sol)
print(cf.to_markdown(*cf.eigen_table_rows(rows)))
print()

# sequential tests: the null at row k is that pairs k..m are all noise
wrows = cf.wilks_lambda(sol)
print(cf.to_markdown(*cf.wilks_table_rows(wrows, sol.correlations)))
n_sig = sum(r.p_value <= 0.05 for r in wrows)
print(f"significant pairs at 5%: {n_sig}")
print()

# redundancy: share of response-block variance explained by each proxy variate
rrows = cf.redundancy(sol, ds.responses)
print(cf.to_markdown(*cf.redundancy_table_rows(rrows)))
print()

# cross-loadings of each proxy on the first response-side variates
loads = cf.cross_loadings(sol, ds.proxies, k_max=3)
names = [f"Z{j + 1}" for j in range(ds.proxies.shape[1])]
print(cf.to_markdown(*cf.cross_loadings_table_rows(loads, names)))
print()

# with enough data the sample correlations converge on the population values
big = cf.generate(cf.FactorModelSpec(
    intercepts=spec.intercepts, proxied_loadings=spec.proxied_loadings,
    missing_loadings=spec.missing_loadings,
    proxy_projection=spec.proxy_projection,
    proxy_noise_scale=spec.proxy_noise_scale,
    idio_variances=spec.idio_variances, n_periods=50_000, seed=1))
sample = cf.cca_fit(big.responses, big.proxies).correlations
population = cf.population_cca(spec)
print("sample vs population at T=50000:")
for s, p in zip(sample, population):
    print(f"  {s:.4f}  vs  {p:.4f}")
