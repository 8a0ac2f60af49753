"""Canonical correlation analysis with significance and redundancy diagnostics.

cca_fit standardizes both variable sets, whitens them with inverse square
roots of their correlation matrices, and reads the canonical structure off the
SVD of the whitened cross-covariance:

    K = Sy^(-1/2) Syz Sz^(-1/2) = P D Q'

Weights are a = Sy^(-1/2) P and b = Sz^(-1/2) Q, rescaled so every variate has
unit sample variance (ddof=1), with the sign convention that the largest
weight in each left variate is positive. Eigenvalues are rho^2/(1 - rho^2);
percentage columns are shares of their total. wilks_lambda implements the
sequential likelihood-ratio tests with the F approximation whose df constant
m = n - 3/2 - (p + q)/2 is computed once from the full variable counts.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sstats

from ._linalg import inv_sqrt_psd
from .errors import DataError, NumericalError


@dataclass(frozen=True)
class CcaSolution:
    """Fitted canonical system for p left variables and q right variables."""

    p: int
    q: int
    n_obs: int
    correlations: np.ndarray        # (m,) descending, in [0, 1]
    a_weights: np.ndarray           # (p, m); U = standardized(Y) @ a_weights
    b_weights: np.ndarray           # (q, m); V = standardized(Z) @ b_weights
    u_scores: np.ndarray            # (T, m), unit sample variance each
    v_scores: np.ndarray            # (T, m)
    eigenvalues: np.ndarray         # rho^2 / (1 - rho^2)
    variance_percentages: np.ndarray
    y_means: np.ndarray
    y_scales: np.ndarray
    z_means: np.ndarray
    z_scales: np.ndarray
    ridge: float

    def __post_init__(self):
        for field in ("correlations", "a_weights", "b_weights", "u_scores", "v_scores",
                      "eigenvalues", "variance_percentages", "y_means", "y_scales",
                      "z_means", "z_scales"):
            arr = np.array(getattr(self, field), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)

    @property
    def m(self) -> int:
        return len(self.correlations)


def _validate_block(M, label):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DataError(f"{label} must be 2-D, got shape {M.shape}")
    if np.isnan(M).any():
        raise DataError(f"{label} contains missing values; align(intersect) first")
    return M


def _standardize(M, label):
    means = M.mean(axis=0)
    scales = M.std(axis=0, ddof=1)
    dead = np.flatnonzero(scales == 0)
    if dead.size:
        raise NumericalError(f"constant column(s) in {label}: indices {[int(i) for i in dead]}")
    return (M - means) / scales, means, scales


def _eigen_shares(lam: np.ndarray) -> np.ndarray:
    total = lam.sum()
    if not np.isfinite(total):
        return np.full_like(lam, np.nan)
    if total <= 0:
        return np.zeros_like(lam)
    return 100.0 * lam / total


def cca_fit(Y, Z, ridge: float = 0.0) -> CcaSolution:
    """Canonical correlations and variates of two jointly observed sets.

    ridge (default 0) is added to the diagonals of both correlation matrices
    before whitening; use a small value like 1e-8 when a block is nearly
    collinear. It is recorded on the solution.
    """
    Y = _validate_block(Y, "left set")
    Z = _validate_block(Z, "right set")
    if Y.shape[0] != Z.shape[0]:
        raise DataError(f"row mismatch: left has {Y.shape[0]}, right has {Z.shape[0]}")
    T, p = Y.shape
    q = Z.shape[1]
    if p < 1 or q < 1:
        raise DataError("both sets need at least one column")
    if T <= p + q:
        raise DataError(f"need more rows than total variables (T={T}, p+q={p + q})")
    if ridge < 0:
        raise DataError(f"ridge must be nonnegative, got {ridge}")

    Ys, y_means, y_scales = _standardize(Y, "left set")
    Zs, z_means, z_scales = _standardize(Z, "right set")
    Sy = Ys.T @ Ys / (T - 1)
    Sz = Zs.T @ Zs / (T - 1)
    Syz = Ys.T @ Zs / (T - 1)

    hint = "supply a small ridge (e.g. 1e-8) to proceed"
    iy = inv_sqrt_psd(Sy + ridge * np.eye(p), "left-set", hint if ridge == 0 else "")
    iz = inv_sqrt_psd(Sz + ridge * np.eye(q), "right-set", hint if ridge == 0 else "")

    P, d, Qt = np.linalg.svd(iy @ Syz @ iz)
    m = min(p, q)
    a = iy @ P[:, :m]
    b = iz @ Qt[:m].T

    # unit sample variance of every variate (exact under ridge = 0, renormalized otherwise)
    a = a / np.sqrt(np.einsum("jk,jk->k", a, Sy @ a))
    b = b / np.sqrt(np.einsum("jk,jk->k", b, Sz @ b))

    # orient: the largest-magnitude left weight of each pair is positive
    for k in range(m):
        jmax = int(np.argmax(np.abs(a[:, k])))
        if a[jmax, k] < 0:
            a[:, k] = -a[:, k]
            b[:, k] = -b[:, k]

    u = Ys @ a
    v = Zs @ b
    rho = np.clip(np.einsum("tk,tk->k", u, v) / (T - 1), 0.0, 1.0)
    order = np.argsort(-rho, kind="stable")
    rho, a, b, u, v = rho[order], a[:, order], b[:, order], u[:, order], v[:, order]

    with np.errstate(divide="ignore"):
        lam = np.where(rho < 1.0, rho ** 2 / (1.0 - rho ** 2), np.inf)

    return CcaSolution(
        p=p, q=q, n_obs=T,
        correlations=rho,
        a_weights=a, b_weights=b,
        u_scores=u, v_scores=v,
        eigenvalues=lam,
        variance_percentages=_eigen_shares(lam),
        y_means=y_means, y_scales=y_scales,
        z_means=z_means, z_scales=z_scales,
        ridge=float(ridge),
    )


# ---------------------------------------------------------------------------
# derived tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenRow:
    k: int
    correlation: float
    squared: float
    eigenvalue: float
    percentage: float
    cumulative: float


def _correlations_of(source) -> np.ndarray:
    if isinstance(source, CcaSolution):
        return np.array(source.correlations, dtype=float)
    rho = np.asarray(source, dtype=float).ravel()
    if rho.size == 0:
        raise DataError("no correlations")
    if np.any(rho < 0):
        raise DataError("canonical correlations must be nonnegative")
    return rho


def eigen_table(source) -> tuple:
    """Rows of the eigenvalue decomposition table for a solution or raw rhos.

    eigenvalue = rho^2/(1 - rho^2); percentage = its share of the eigenvalue
    total; cumulative sums the shares. A correlation of exactly 1 is an error.
    """
    rho = _correlations_of(source)
    if np.any(rho >= 1.0):
        raise NumericalError("degenerate correlation (rho = 1)")
    lam = rho ** 2 / (1.0 - rho ** 2)
    pct = _eigen_shares(lam)
    cum = np.cumsum(pct)
    return tuple(
        EigenRow(k=i + 1, correlation=float(rho[i]), squared=float(rho[i] ** 2),
                 eigenvalue=float(lam[i]), percentage=float(pct[i]), cumulative=float(cum[i]))
        for i in range(rho.size)
    )


@dataclass(frozen=True)
class WilksRow:
    k: int
    lambda_stat: float
    f_approx: float
    num_df: float
    den_df: float
    p_value: float


def wilks_lambda(source, p: int = None, q: int = None, n_obs: int = None) -> tuple:
    """Sequential likelihood-ratio rows: row k tests rho_k = ... = rho_m = 0.

    Accepts a CcaSolution, or raw correlations plus explicit p, q, n_obs.
    Row k uses Lambda_k = prod_{i>=k}(1 - rho_i^2) and the F approximation
    with p_k = p-k+1, q_k = q-k+1 and the df constant fixed at the original
    variable counts.
    """
    if isinstance(source, CcaSolution):
        rho, p, q, n_obs = source.correlations, source.p, source.q, source.n_obs
    else:
        rho = _correlations_of(source)
        if p is None or q is None or n_obs is None:
            raise DataError("raw correlations need explicit p, q, and n_obs")
    m = rho.size
    if m != min(p, q):
        raise DataError(f"expected min(p, q) = {min(p, q)} correlations, got {m}")
    if np.any(rho >= 1.0):
        raise NumericalError("degenerate correlation (rho = 1)")

    one_minus = 1.0 - np.asarray(rho, dtype=float) ** 2
    lam_seq = np.flip(np.cumprod(np.flip(one_minus)))
    m_const = n_obs - 1.5 - (p + q) / 2.0
    rows = []
    for i in range(m):
        pk = p - i
        qk = q - i
        denom = pk * pk + qk * qk - 5
        s = np.sqrt((pk * pk * qk * qk - 4.0) / denom) if denom > 0 else 1.0
        num_df = float(pk * qk)
        den_df = float(m_const * s - pk * qk / 2.0 + 1.0)
        lam = float(lam_seq[i])
        root = lam ** (1.0 / s)
        f_stat = float((1.0 - root) / root * den_df / num_df)
        p_val = float(_sstats.f.sf(f_stat, num_df, den_df))
        rows.append(WilksRow(k=i + 1, lambda_stat=lam, f_approx=f_stat,
                             num_df=num_df, den_df=den_df, p_value=p_val))
    return tuple(rows)


@dataclass(frozen=True)
class RedundancyRow:
    k: int
    redundancy: float


def _column_correlations(A, B, label):
    """corr(A_j, B_k) matrix; errors on constant columns of A."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[0] != B.shape[0]:
        raise DataError(f"{label}: row count {A.shape[0]} does not match scores {B.shape[0]}")
    a_scale = A.std(axis=0, ddof=1)
    b_scale = B.std(axis=0, ddof=1)
    dead = np.flatnonzero(a_scale == 0)
    if dead.size:
        raise NumericalError(f"constant column(s) in {label}: indices {[int(i) for i in dead]}")
    if np.any(b_scale == 0):
        raise NumericalError("degenerate variate scores")
    As = (A - A.mean(axis=0)) / a_scale
    Bs = (B - B.mean(axis=0)) / b_scale
    return As.T @ Bs / (A.shape[0] - 1)


def redundancy(solution: CcaSolution, Y) -> tuple:
    """Share of the left set's variance explained by each opposite variate.

    Row k is rho_k^2 times the mean squared loading corr(Y_j, U_k) over the
    left variables (so it equals the variance share of Y carried by V_k).
    """
    Y = _validate_block(Y, "left set")
    if Y.shape[1] != solution.p:
        raise DataError(f"left set has {Y.shape[1]} columns, solution expects {solution.p}")
    loadings = _column_correlations(Y, solution.u_scores, "left set")
    rd = solution.correlations ** 2 * np.mean(loadings ** 2, axis=0)
    return tuple(RedundancyRow(k=i + 1, redundancy=float(rd[i])) for i in range(rd.size))


def cross_loadings(solution: CcaSolution, Z, k_max: int = None) -> np.ndarray:
    """corr(Z_j, U_k) for the first k_max variates; shape (q, k_max)."""
    Z = _validate_block(Z, "right set")
    if Z.shape[1] != solution.q:
        raise DataError(f"right set has {Z.shape[1]} columns, solution expects {solution.q}")
    m = solution.m
    if k_max is None:
        k_max = m
    k_max = int(k_max)
    if not 1 <= k_max <= m:
        raise DataError(f"k_max must be in 1..{m}, got {k_max}")
    return _column_correlations(Z, solution.u_scores[:, :k_max], "right set")


# ---------------------------------------------------------------------------
# table layouts
# ---------------------------------------------------------------------------

def eigen_table_rows(rows, decimals: int = 5):
    header = ["", "CanCor", "CanCorSq", "Eigenvalue", "Percentage", "Cumulative"]
    out = [[str(r.k), format(r.correlation, f".{decimals}f"), format(r.squared, f".{decimals}f"),
            format(r.eigenvalue, f".{decimals}f"), format(r.percentage, f".{decimals}f"),
            format(r.cumulative, f".2f")] for r in rows]
    return header, out


def wilks_table_rows(rows, correlations, decimals: int = 4):
    header = ["", "CanCor", "LR Statistic", "Approx F", "NumDF", "DenDF", "Pr(>F)"]
    out = []
    for r, rho in zip(rows, correlations):
        out.append([str(r.k), format(rho, f".{decimals}f"), format(r.lambda_stat, f".{decimals}f"),
                    format(r.f_approx, ".2f"), format(r.num_df, ".0f"),
                    format(r.den_df, ".2f"), format(r.p_value, f".{decimals}f")])
    return header, out


def redundancy_table_rows(rows, decimals: int = 4):
    header = ["", "Redundancy"]
    return header, [[str(r.k), format(r.redundancy, f".{decimals}f")] for r in rows]


def cross_loadings_table_rows(matrix, names, decimals: int = 4):
    matrix = np.asarray(matrix, dtype=float)
    header = [""] + [f"U{k + 1}" for k in range(matrix.shape[1])]
    rows = [[str(names[j])] + [format(matrix[j, k], f".{decimals}f")
                               for k in range(matrix.shape[1])]
            for j in range(matrix.shape[0])]
    return header, rows
