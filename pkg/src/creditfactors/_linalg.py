"""Internal linear-algebra helpers shared by the factor modules."""

import numpy as np

from .errors import NumericalError

# relative eigenvalue floor below which a covariance matrix counts as singular
EIG_RTOL = 1e-12


def inv_sqrt_psd(matrix: np.ndarray, label: str, hint: str = "") -> np.ndarray:
    """Symmetric inverse square root of a positive definite matrix.

    Raises NumericalError when the smallest eigenvalue is numerically zero
    relative to the largest.
    """
    sym = 0.5 * (matrix + matrix.T)
    w, v = np.linalg.eigh(sym)
    if w[-1] <= 0 or w[0] <= EIG_RTOL * w[-1]:
        msg = f"singular {label} covariance (smallest eigenvalue {w[0]:.3e})"
        if hint:
            msg += f"; {hint}"
        raise NumericalError(msg)
    return (v / np.sqrt(w)) @ v.T
