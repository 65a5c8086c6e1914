"""Thomas algorithm for diagonally dominant tridiagonal systems."""

import numpy as np
from numba import njit

from .errors import SolverBreakdown


@njit(cache=True)
def _thomas(lower, diag, upper, rhs):
    n = diag.size
    c = np.empty(n)
    d = np.empty(n)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / m
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m
    x = np.empty(n)
    x[n - 1] = d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def is_diagonally_dominant(lower, diag, upper) -> bool:
    """Weak row dominance with at least one strict row, and a positive diagonal."""
    off = np.abs(lower) + np.abs(upper)
    off[0] -= abs(lower[0])
    off[-1] -= abs(upper[-1])
    ad = np.abs(diag)
    return bool(np.all(diag > 0) and np.all(ad >= off) and np.any(ad > off))


def solve_tridiagonal(lower, diag, upper, rhs, check=True):
    """Solve ``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]``.

    ``lower[0]`` and ``upper[-1]`` are ignored. Raises SolverBreakdown when
    the matrix is not diagonally dominant, since the elimination sweep is
    only guaranteed stable in that case.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if check and not is_diagonally_dominant(lower, diag, upper):
        raise SolverBreakdown("tridiagonal system is not diagonally dominant")
    return _thomas(lower, diag, upper, rhs)
