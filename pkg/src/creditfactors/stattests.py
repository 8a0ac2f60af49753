"""Unit-root and cointegration testing on monthly series.

adf_test runs the augmented Dickey-Fuller regression and interpolates its
p-value from embedded finite-sample quantile tables, so reported p-values live
on [0.01, 0.99] and extreme statistics saturate at the ends instead of
extrapolating. johansen_trace runs the trace variant of the reduced-rank
cointegration test with an unrestricted constant (series with linear trends in
levels) and compares against embedded 5% critical values for up to six series.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError
from .panel import AlignedPanel
from .regress import ols

REGRESSION_CONSTANT = "constant"
REGRESSION_CONSTANT_TREND = "constant_trend"
REGRESSION_KINDS = (REGRESSION_CONSTANT, REGRESSION_CONSTANT_TREND)

# Finite-sample quantiles of the Dickey-Fuller t distribution. Rows are sample
# sizes (last row is the asymptotic limit), columns cumulative probabilities.
_DF_SAMPLE_SIZES = np.array([25.0, 50.0, 100.0, 250.0, 500.0, 1e5])
_DF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_DF_QUANTILES = {
    REGRESSION_CONSTANT: np.array([
        [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
        [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
        [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
        [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
        [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
        [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
    ]),
    REGRESSION_CONSTANT_TREND: np.array([
        [-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15],
        [-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24],
        [-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28],
        [-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31],
        [-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32],
        [-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33],
    ]),
}

# 5% critical values of the trace statistic (unrestricted constant), indexed by
# the number of common trends under the null, k - r = 1..6.
TRACE_CV_5PCT = {1: 8.18, 2: 17.95, 3: 31.52, 4: 48.28, 5: 70.60, 6: 90.39}


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    p_value: float
    lag_order: int
    regression_kind: str
    n_obs: int  # rows entering the test regression

    def __post_init__(self):
        if not 0.01 <= self.p_value <= 0.99:
            raise DataError(f"p-value outside [0.01, 0.99]: {self.p_value}")
        if self.regression_kind not in REGRESSION_KINDS:
            raise DataError(f"unknown regression kind {self.regression_kind!r}")


def default_lag_order(n: int) -> int:
    """Cube-root rule of thumb for the number of lagged difference terms."""
    return int(np.floor((max(n - 1, 1)) ** (1.0 / 3.0)))


def _df_pvalue(stat: float, n: int, kind: str) -> float:
    table = _DF_QUANTILES[kind]
    at_n = np.array([np.interp(n, _DF_SAMPLE_SIZES, table[:, j])
                     for j in range(table.shape[1])])
    # both interpolations clamp at the table edges, flooring/capping the p-value
    return float(np.interp(stat, at_n, _DF_PROBS))


def adf_test(series, lag_order: int = None, kind: str = REGRESSION_CONSTANT_TREND) -> AdfResult:
    """Augmented Dickey-Fuller test for a unit root in one complete series.

    The test regresses the first difference on the lagged level, lag_order
    lagged differences, a constant, and (for kind constant_trend) a linear
    trend. The statistic is the t-ratio on the lagged level. lag_order
    defaults to floor((n-1)^(1/3)).
    """
    y = np.asarray(series, dtype=float).ravel()
    if np.isnan(y).any():
        raise DataError("series has missing values; trim or align first")
    n = y.size
    if kind not in REGRESSION_KINDS:
        raise DataError(f"unknown regression kind {kind!r}")
    if lag_order is None:
        lag_order = default_lag_order(n)
    lag_order = int(lag_order)
    if lag_order < 0:
        raise DataError(f"lag_order must be nonnegative, got {lag_order}")
    if n < lag_order + 10:
        raise DataError(f"series too short for the test (n={n}, need >= {lag_order + 10})")
    if np.ptp(y) == 0:
        raise NumericalError("degenerate series (constant)")

    dy = np.diff(y)
    p = lag_order
    rows = n - 1 - p
    response = dy[p:]
    cols = [y[p:n - 1]]
    names = ["lag_level"]
    for i in range(1, p + 1):
        cols.append(dy[p - i:n - 1 - i])
        names.append(f"diff_lag{i}")
    if kind == REGRESSION_CONSTANT_TREND:
        cols.append(np.arange(1, rows + 1, dtype=float))
        names.append("trend")
    fit = ols(response, np.column_stack(cols), intercept=True,
              response_name="diff", predictor_names=names)
    stat = float(fit.t_statistics[1])
    pval = _df_pvalue(stat, n - 1, kind)
    return AdfResult(statistic=stat, p_value=pval, lag_order=p,
                     regression_kind=kind, n_obs=rows)


@dataclass(frozen=True)
class JohansenResult:
    """Trace statistics for the nested nulls r <= k-1 down to r = 0."""

    hypotheses: tuple
    trace_statistics: np.ndarray
    critical_values_5pct: np.ndarray
    rejected: tuple
    eigenvalues: np.ndarray  # descending, in [0, 1)
    lag_order: int
    n_obs: int  # rows entering the reduced-rank regression

    def __post_init__(self):
        for field in ("trace_statistics", "critical_values_5pct", "eigenvalues"):
            arr = np.array(getattr(self, field), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "rejected", tuple(bool(b) for b in self.rejected))
        if not (len(self.hypotheses) == len(self.trace_statistics)
                == len(self.critical_values_5pct) == len(self.rejected)):
            raise DataError("result rows have inconsistent lengths")


def johansen_trace(panel, lag_order: int = 2) -> JohansenResult:
    """Johansen trace test on the levels of 2..6 jointly complete series.

    lag_order is the VAR lag length in levels (lag_order - 1 lagged
    differences enter the auxiliary regressions). The constant enters
    unrestricted, matching critical values for series with linear trends.
    """
    if isinstance(panel, AlignedPanel):
        X = np.asarray(panel.values, dtype=float)
    else:
        X = np.asarray(panel, dtype=float)
    if X.ndim != 2:
        raise DataError(f"panel must be 2-D, got shape {X.shape}")
    if np.isnan(X).any():
        raise DataError("panel has missing values; align(intersect) first")
    n, k = X.shape
    if not 2 <= k <= 6:
        raise DataError(f"need 2..6 series (critical values embedded up to 6), got {k}")
    K = int(lag_order)
    if K < 1:
        raise DataError(f"lag_order must be >= 1, got {lag_order}")
    if n < 5 * k:
        raise DataError(f"too few observations (n={n}, need >= {5 * k})")
    centered = X - X.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise NumericalError("collinear columns in panel")

    dX = np.diff(X, axis=0)
    rows = n - K
    Z0 = dX[K - 1:]
    parts = [np.ones((rows, 1))]
    for i in range(1, K):
        parts.append(dX[K - 1 - i:n - 1 - i])
    Z1 = np.column_stack(parts)
    ZK = X[:n - K]

    R0 = Z0 - Z1 @ np.linalg.lstsq(Z1, Z0, rcond=None)[0]
    RK = ZK - Z1 @ np.linalg.lstsq(Z1, ZK, rcond=None)[0]
    S00 = R0.T @ R0 / rows
    SKK = RK.T @ RK / rows
    S0K = R0.T @ RK / rows
    try:
        L = np.linalg.cholesky(SKK)
        G = np.linalg.cholesky(S00)
    except np.linalg.LinAlgError:
        raise NumericalError("singular product-moment matrix; columns may be collinear") from None
    # eigenvalues of SKK^-1 SK0 S00^-1 S0K through a symmetric pencil
    E = np.linalg.solve(G, S0K)            # G^-1 S0K
    H = np.linalg.solve(L, E.T)            # L^-1 SK0 G^-T
    lam = np.linalg.eigvalsh(H @ H.T)[::-1]
    lam = np.clip(lam, 0.0, None)
    if np.any(1.0 - lam <= 1e-14):
        raise NumericalError("degenerate eigenvalue at 1; system is collinear")

    stats, cvs, hyps, rej = [], [], [], []
    for r_star in range(k - 1, -1, -1):
        stat = float(-rows * np.sum(np.log(1.0 - lam[r_star:])))
        cv = TRACE_CV_5PCT[k - r_star]
        hyps.append(f"r <= {r_star}" if r_star > 0 else "r = 0")
        stats.append(stat)
        cvs.append(cv)
        rej.append(stat > cv)
    return JohansenResult(
        hypotheses=tuple(hyps),
        trace_statistics=np.array(stats),
        critical_values_5pct=np.array(cvs),
        rejected=tuple(rej),
        eigenvalues=lam,
        lag_order=K,
        n_obs=rows,
    )


# ---------------------------------------------------------------------------
# table layouts
# ---------------------------------------------------------------------------

def adf_table(results: dict, decimals: int = 2):
    """(header, rows) with one series per row: statistic and p-value."""
    header = ["", "Test Statistic", "p-value"]
    rows = [[name, format(res.statistic, f".{decimals}f"), format(res.p_value, f".{decimals}f")]
            for name, res in results.items()]
    return header, rows


def johansen_table(result: JohansenResult, decimals: int = 2):
    """(header, rows) with one null hypothesis per row."""
    header = ["", "Test Statistic", "Critical Value (5%)", "Rejected"]
    rows = []
    for h, stat, cv, rej in zip(result.hypotheses, result.trace_statistics,
                                result.critical_values_5pct, result.rejected):
        rows.append([h, format(stat, f".{decimals}f"), format(cv, f".{decimals}f"),
                     "yes" if rej else "no"])
    return header, rows
