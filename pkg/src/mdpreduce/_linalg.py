"""Dense linear-system helpers used throughout the package.

Everything goes through LU with partial pivoting.  A factorization is
treated as singular when its smallest pivot falls below 1e-12 times the
largest row 1-norm of the input matrix; this keeps singularity decisions
reproducible across platforms.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import SingularSystemError

PIVOT_RTOL = 1e-12


def factorize(a: np.ndarray):
    """LU-factorize ``a``; return ``None`` when numerically singular."""
    a = np.asarray(a, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # LAPACK warns on exact zero pivots
        lu, piv = lu_factor(a, check_finite=False)
    scale = max(float(np.abs(a).sum(axis=1).max()), 1.0)
    if float(np.abs(np.diag(lu)).min()) <= PIVOT_RTOL * scale:
        return None
    return lu, piv


def solve(a: np.ndarray, b: np.ndarray, context: str = "") -> np.ndarray:
    """Solve ``a x = b``, raising SingularSystemError on a singular matrix."""
    fac = factorize(a)
    if fac is None:
        suffix = f": {context}" if context else ""
        raise SingularSystemError(f"singular linear system{suffix}")
    return lu_solve(fac, np.asarray(b, dtype=float), check_finite=False)


def inverse(a: np.ndarray) -> np.ndarray | None:
    """Inverse of ``a``, or ``None`` when singular."""
    fac = factorize(a)
    if fac is None:
        return None
    return lu_solve(fac, np.eye(a.shape[0]), check_finite=False)
