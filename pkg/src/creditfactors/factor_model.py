"""Factor regressions and the residual-PC missing-factor diagnostic.

The workflow: keep the first r canonical variates of the response set as
estimated factor scores, regress every response on them, then ask whether the
first principal component of the stacked residuals still explains the
responses. Large, across-the-board adjusted-R^2 gains from that component are
the signature of a common factor the proxies never saw.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cca import CcaSolution
from .errors import DataError, NumericalError
from .panel import AlignedPanel
from .regress import INTERCEPT, RegressionFit, ols, residual_matrix

VERDICT_MISSING = "missing_factor"
VERDICT_NONE = "no_missing_factor"
VERDICT_INCONCLUSIVE = "inconclusive"

PC1_NAME = "ResidualPC1"


@dataclass(frozen=True)
class FactorScores:
    """Retained factor score series (unit sample variance each)."""

    scores: np.ndarray  # (T, r)
    r: int
    source: CcaSolution = None

    def __post_init__(self):
        arr = np.array(self.scores, dtype=float)
        if arr.ndim != 2:
            raise DataError(f"scores must be 2-D, got shape {arr.shape}")
        if arr.shape[1] != self.r:
            raise DataError(f"r={self.r} but scores have {arr.shape[1]} columns")
        arr.setflags(write=False)
        object.__setattr__(self, "scores", arr)

    @classmethod
    def from_solution(cls, solution: CcaSolution, r: int) -> "FactorScores":
        if not 1 <= r <= solution.m:
            raise DataError(f"r must be in 1..{solution.m}, got {r}")
        return cls(scores=solution.u_scores[:, :r], r=int(r), source=solution)

    @property
    def names(self) -> tuple:
        return tuple(f"Factor{k + 1}" for k in range(self.r))


def _responses_of(data):
    if isinstance(data, AlignedPanel):
        if not data.is_complete():
            raise DataError("response panel has missing values; align(intersect) first")
        return np.asarray(data.values, dtype=float), list(data.names)
    M = np.asarray(data, dtype=float)
    if M.ndim != 2:
        raise DataError(f"responses must be 2-D, got shape {M.shape}")
    return M, [f"y{j + 1}" for j in range(M.shape[1])]


def factor_regressions(responses, factors: FactorScores) -> tuple:
    """OLS of every response column on the retained factor scores."""
    Y, names = _responses_of(responses)
    F = factors.scores
    if F.shape[0] != Y.shape[0]:
        raise DataError(f"factor scores have {F.shape[0]} rows, responses {Y.shape[0]}")
    return tuple(
        ols(Y[:, j], F, intercept=True, response_name=names[j],
            predictor_names=list(factors.names))
        for j in range(Y.shape[1])
    )


def residual_pc1(residuals) -> tuple:
    """First principal component of a residual matrix.

    Columns are centered; scores are rescaled to unit sample variance with the
    largest-magnitude loading oriented positive. Returns (scores, share of
    total residual variance carried by the component).
    """
    R = np.asarray(residuals, dtype=float)
    if R.ndim != 2:
        raise DataError(f"residual matrix must be 2-D, got shape {R.shape}")
    if R.shape[1] < 2:
        raise DataError("need at least two residual series")
    if R.shape[0] < 3:
        raise DataError("need at least three rows")
    if np.isnan(R).any():
        raise DataError("residual matrix contains missing values")
    if not np.any(R):
        raise NumericalError("degenerate residuals (all zero)")
    centered = R - R.mean(axis=0)
    cov = centered.T @ centered / (R.shape[0] - 1)
    w, vecs = np.linalg.eigh(cov)
    lead = vecs[:, -1]
    jmax = int(np.argmax(np.abs(lead)))
    if lead[jmax] < 0:
        lead = -lead
    scores = centered @ lead
    scale = scores.std(ddof=1)
    if scale == 0:
        raise NumericalError("degenerate residuals (no variation along the first component)")
    w = np.clip(w, 0.0, None)
    share = float(w[-1] / w.sum())
    return scores / scale, share


def _rebuild_response(fit: RegressionFit, X: np.ndarray) -> np.ndarray:
    design = np.column_stack([np.ones(fit.n_obs), X]) if fit.has_intercept else X
    if design.shape[1] != len(fit.coefficients):
        raise DataError(
            f"design for {fit.response_name!r} has {design.shape[1]} columns, "
            f"fit has {len(fit.coefficients)} coefficients")
    return design @ fit.coefficients + fit.residuals


def _designs_for(fits, designs):
    if isinstance(designs, np.ndarray) or designs is None:
        designs = [designs] * len(fits)
    else:
        designs = list(designs)
        if len(designs) != len(fits):
            raise DataError(f"{len(designs)} designs for {len(fits)} fits")
    out = []
    for fit, X in zip(fits, designs):
        if X is None:
            X = np.empty((fit.n_obs, 0))
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != fit.n_obs:
            raise DataError(f"design rows {X.shape[0]} do not match fit rows {fit.n_obs}")
        out.append(X)
    return out


def augment_with_pc1(fits, designs):
    """Refit every equation with the residual PC1 appended as a predictor.

    designs supplies each fit's original slope matrix (one shared array is
    broadcast). Returns (augmented fits, pc1 scores, pc1 variance share).
    """
    fits = list(fits)
    if len(fits) < 2:
        raise DataError("need at least two fitted responses")
    designs = _designs_for(fits, designs)
    pc1, share = residual_pc1(residual_matrix(fits))
    augmented = []
    for fit, X in zip(fits, designs):
        y = _rebuild_response(fit, X)
        slim = [n for n in fit.predictor_names if n != INTERCEPT]
        augmented.append(ols(
            y, np.column_stack([X, pc1]),
            intercept=fit.has_intercept,
            response_name=fit.response_name,
            predictor_names=slim + [PC1_NAME],
        ))
    return tuple(augmented), pc1, share


@dataclass(frozen=True)
class DiagnosticReport:
    """Before/after fit comparison and the verdict it implies."""

    responses: tuple
    adj_r2_before: tuple
    adj_r2_after: tuple
    deltas: tuple
    mean_delta: float
    pc1_variance_share: float
    strong_threshold: float
    weak_threshold: float
    verdict: str

    def __post_init__(self):
        if self.verdict not in (VERDICT_MISSING, VERDICT_NONE, VERDICT_INCONCLUSIVE):
            raise DataError(f"unknown verdict {self.verdict!r}")


def missing_factor_diagnostic(fits_before, designs, thresholds=(0.30, 0.10)) -> DiagnosticReport:
    """Decide whether the residual PC1 behaves like an omitted common factor.

    missing_factor: every adjusted-R^2 delta is at least the strong threshold.
    no_missing_factor: the mean delta is at most the weak threshold, or gains
    above strong are confined to at most ceil(n/3) responses. Anything else is
    inconclusive.
    """
    strong, weak = float(thresholds[0]), float(thresholds[1])
    if strong <= weak:
        raise DataError(f"strong threshold must exceed weak ({strong} vs {weak})")
    fits = list(fits_before)
    augmented, _, share = augment_with_pc1(fits, designs)
    before = np.array([f.adj_r_squared for f in fits])
    after = np.array([f.adj_r_squared for f in augmented])
    deltas = after - before
    n = len(fits)
    if np.all(deltas >= strong):
        verdict = VERDICT_MISSING
    elif deltas.mean() <= weak or int(np.sum(deltas >= strong)) <= math.ceil(n / 3):
        verdict = VERDICT_NONE
    else:
        verdict = VERDICT_INCONCLUSIVE
    return DiagnosticReport(
        responses=tuple(f.response_name for f in fits),
        adj_r2_before=tuple(float(v) for v in before),
        adj_r2_after=tuple(float(v) for v in after),
        deltas=tuple(float(v) for v in deltas),
        mean_delta=float(deltas.mean()),
        pc1_variance_share=share,
        strong_threshold=strong,
        weak_threshold=weak,
        verdict=verdict,
    )


def diagnostic_table_rows(report: DiagnosticReport, decimals: int = 3):
    header = ["", "Adj. R2 (factors)", "Adj. R2 (factors + PC1)", "Delta"]
    rows = [[name,
             format(b, f".{decimals}f"),
             format(a, f".{decimals}f"),
             format(d, f".{decimals}f")]
            for name, b, a, d in zip(report.responses, report.adj_r2_before,
                                     report.adj_r2_after, report.deltas)]
    rows.append(["mean", "", "", format(report.mean_delta, f".{decimals}f")])
    return header, rows
