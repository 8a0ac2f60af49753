"""Ordinary least squares with classical inference and AIC-driven stepwise selection.

Conventions: t-statistics are classical (homoskedastic) ratios, adjusted R^2 is
1 - (1 - R^2)(T - 1)/(T - p - 1) for p slope predictors next to an intercept,
and AIC is the constant-free form T*ln(RSS/T) + 2k with k counting every
estimated mean parameter (intercept included). Only AIC differences between
models on the same response are meaningful.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError

INTERCEPT = "(Intercept)"

# a design whose reciprocal condition number falls below this is treated as rank deficient
RCOND_MIN = 1e-10


@dataclass(frozen=True)
class RegressionFit:
    """One fitted least-squares equation and its classical diagnostics."""

    response_name: str
    predictor_names: tuple
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_statistics: np.ndarray
    residuals: np.ndarray
    r_squared: float
    adj_r_squared: float
    aic: float
    n_obs: int
    condition_number: float

    def __post_init__(self):
        k = len(self.predictor_names)
        for field in ("coefficients", "std_errors", "t_statistics", "residuals"):
            arr = np.array(getattr(self, field), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)
        if not (len(self.coefficients) == len(self.std_errors) == len(self.t_statistics) == k):
            raise DataError("coefficient vectors do not match predictor names")
        if len(self.residuals) != self.n_obs:
            raise DataError("residual length does not match n_obs")

    @property
    def has_intercept(self) -> bool:
        return bool(self.predictor_names) and self.predictor_names[0] == INTERCEPT

    @property
    def slope_names(self) -> tuple:
        return tuple(n for n in self.predictor_names if n != INTERCEPT)

    def coefficient(self, name: str) -> float:
        try:
            return float(self.coefficients[self.predictor_names.index(name)])
        except ValueError:
            raise DataError(f"no predictor named {name!r} in this fit") from None


def _as_design(y, X):
    y = np.asarray(y, dtype=float).ravel()
    if X is None:
        X = np.empty((y.size, 0))
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DataError(f"predictor matrix must be 2-D, got shape {X.shape}")
    if X.shape[0] != y.size:
        raise DataError(f"response has {y.size} rows but predictors have {X.shape[0]}")
    if np.isnan(y).any() or np.isnan(X).any():
        raise DataError("regression inputs contain missing values; align or trim first")
    return y, X


def _suspects(vt, s, names):
    # columns loading on the near-null right singular vector
    null_vec = np.abs(vt[-1])
    flagged = [names[j] for j in range(len(names)) if null_vec[j] >= 0.1 * null_vec.max()]
    return ", ".join(flagged)


def ols(y, X=None, intercept: bool = True, response_name: str = "y",
        predictor_names=None) -> RegressionFit:
    """Least squares of y on X (plus an intercept unless disabled).

    Solved through the SVD of the design; a reciprocal condition number below
    RCOND_MIN raises NumericalError naming the collinear columns.
    """
    y, X = _as_design(y, X)
    T, p = X.shape
    if predictor_names is None:
        names = [f"x{j + 1}" for j in range(p)]
    else:
        names = [str(n) for n in predictor_names]
        if len(names) != p:
            raise DataError(f"{len(names)} predictor names for {p} columns")
    if intercept:
        design = np.column_stack([np.ones(T), X]) if p else np.ones((T, 1))
        all_names = (INTERCEPT,) + tuple(names)
    else:
        design = X
        all_names = tuple(names)
    k = design.shape[1]
    if k == 0:
        raise DataError("no predictors and no intercept")
    if T <= k:
        raise DataError(f"need more observations than parameters (T={T}, parameters={k})")

    u, s, vt = np.linalg.svd(design, full_matrices=False)
    if s[-1] <= RCOND_MIN * s[0]:
        raise NumericalError(
            f"rank deficient design for {response_name!r}; collinear columns: "
            f"{_suspects(vt, s, all_names)}")
    condition = float(s[0] / s[-1])
    if intercept and np.all(y == y[0]):
        # the intercept alone fits a constant response exactly; solving would
        # leak noise-scale slopes whose t-statistics are meaningless
        coef = np.zeros(k)
        coef[0] = y[0]
        resid = np.zeros(T)
        rss = 0.0
    else:
        coef = vt.T @ ((u.T @ y) / s)
        resid = y - design @ coef
        rss = float(resid @ resid)

    if intercept:
        dev = y - y.mean()
        tss = float(dev @ dev)
        dof_total = T - 1
    else:
        tss = float(y @ y)
        dof_total = T
    r2 = 0.0 if tss == 0.0 else 1.0 - rss / tss
    adj = 1.0 - (1.0 - r2) * dof_total / (T - k)

    sigma2 = rss / (T - k)
    xtx_inv_diag = np.einsum("ji,ji->i", vt / s[:, None], vt / s[:, None])
    se = np.sqrt(sigma2 * xtx_inv_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = coef / se
    tstats = np.where(np.isnan(tstats), 0.0, tstats)

    with np.errstate(divide="ignore"):
        aic = float(T * np.log(rss / T) + 2 * k)

    return RegressionFit(
        response_name=response_name,
        predictor_names=all_names,
        coefficients=coef,
        std_errors=se,
        t_statistics=tstats,
        residuals=resid,
        r_squared=float(r2),
        adj_r_squared=float(adj),
        aic=aic,
        n_obs=T,
        condition_number=condition,
    )


@dataclass(frozen=True)
class StepwiseStep:
    action: str  # "add" or "drop"
    predictor: str
    aic_after: float

    def __post_init__(self):
        if self.action not in ("add", "drop"):
            raise DataError(f"unknown stepwise action {self.action!r}")


@dataclass(frozen=True)
class StepwiseTrace:
    """Accepted moves of a stepwise search, in order. AIC strictly decreases."""

    initial_aic: float
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        prev = self.initial_aic
        for step in self.steps:
            if not step.aic_after < prev:
                raise DataError("stepwise trace must strictly decrease the AIC")
            prev = step.aic_after

    @property
    def final_aic(self) -> float:
        return self.steps[-1].aic_after if self.steps else self.initial_aic


def stepwise_aic(y, X_full=None, direction: str = "both", response_name: str = "y",
                 predictor_names=None):
    """Greedy AIC search from the intercept-only model.

    Every pass scores all single-predictor additions and removals, takes the
    best strict improvement, and stops when none exists. Ties go to the
    predictor earliest in column order. Returns (final fit, trace); selected
    predictors keep their original column order.
    """
    if direction != "both":
        raise DataError(f"unsupported direction {direction!r} (only 'both')")
    y, X = _as_design(y, X_full)
    p = X.shape[1]
    if predictor_names is None:
        names = [f"x{j + 1}" for j in range(p)]
    else:
        names = [str(n) for n in predictor_names]
        if len(names) != p:
            raise DataError(f"{len(names)} predictor names for {p} columns")

    def fit_for(selected):
        return ols(y, X[:, selected], intercept=True, response_name=response_name,
                   predictor_names=[names[j] for j in selected])

    selected = []
    current = fit_for(selected)
    initial_aic = current.aic
    steps = []
    while True:
        best = None  # (aic, action, column)
        for j in range(p):
            if j in selected:
                candidate = [i for i in selected if i != j]
                action = "drop"
            else:
                candidate = sorted(selected + [j])
                action = "add"
            try:
                fit = fit_for(candidate)
            except (DataError, NumericalError):
                continue  # unusable move (too many parameters or collinear)
            if fit.aic >= current.aic - 1e-10:
                continue
            if best is None or fit.aic < best[0]:
                best = (fit.aic, action, j, candidate, fit)
        if best is None:
            break
        _, action, j, selected, current = best
        steps.append(StepwiseStep(action=action, predictor=names[j], aic_after=current.aic))
    return current, StepwiseTrace(initial_aic=initial_aic, steps=tuple(steps))


def residual_matrix(fits) -> np.ndarray:
    """Residual vectors of several fits, stacked as columns."""
    fits = list(fits)
    if not fits:
        raise DataError("no fits")
    T = fits[0].n_obs
    for f in fits[1:]:
        if f.n_obs != T:
            raise DataError(
                f"fits cover different sample sizes ({f.response_name!r} has "
                f"{f.n_obs} rows, expected {T})")
    return np.column_stack([f.residuals for f in fits])


def fit_table(fits, predictors=None, decimals: int = 3):
    """Two-line report layout: a coefficient row over its t-statistic row.

    Returns (header, rows) of strings. Predictors a fit did not select are
    blank. Column order follows `predictors` or first appearance.
    """
    fits = list(fits)
    if predictors is None:
        predictors = []
        for f in fits:
            for name in f.predictor_names:
                if name not in predictors:
                    predictors.append(name)
    header = [""] + list(predictors) + ["Adj. R2"]
    rows = []
    for f in fits:
        coef_row = [f.response_name]
        t_row = [""]
        for name in predictors:
            if name in f.predictor_names:
                i = f.predictor_names.index(name)
                coef_row.append(format(f.coefficients[i], f".{decimals}f"))
                t_row.append(format(f.t_statistics[i], f".{decimals}f"))
            else:
                coef_row.append("")
                t_row.append("")
        coef_row.append(format(f.adj_r_squared, f".{decimals}f"))
        t_row.append("")
        rows.append(coef_row)
        rows.append(t_row)
    return header, rows
