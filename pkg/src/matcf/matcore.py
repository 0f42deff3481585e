"""Dense real square matrices under the max-row-sum norm.

Matrices are plain ``float64`` numpy arrays that have been validated
(square, finite) and marked read-only.  Every function here returns a fresh
array, so values can be shared freely between threads and recurrence states.
"""

from __future__ import annotations

import warnings
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

__all__ = [
    "Matrix",
    "MatrixError",
    "DimensionError",
    "SingularMatrixError",
    "as_matrix",
    "inf_norm",
    "add",
    "sub",
    "mul",
    "scale",
    "identity",
    "zero",
    "invert",
    "divide",
    "is_symmetric_positive",
]

Matrix = npt.NDArray[np.float64]

# pivots at or below this fraction of ||M|| count as zero
SINGULAR_RTOL = 1e-14


class MatrixError(ArithmeticError):
    """Base class for matrix validation and arithmetic failures."""


class DimensionError(MatrixError, ValueError):
    """Operands are not square or do not share a dimension."""


class SingularMatrixError(MatrixError):
    """A matrix that must be inverted is numerically singular.

    ``index`` is filled in by callers that know which continued-fraction
    element (or convergent) triggered the failure.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


def _freeze(a: np.ndarray) -> Matrix:
    if not np.all(np.isfinite(a)):
        raise MatrixError("matrix has non-finite entries")
    a.flags.writeable = False
    return a


def as_matrix(data: Any) -> Matrix:
    """Validate ``data`` and return it as a read-only square float matrix.

    Scalars become 1x1 matrices.  The input is always copied.
    """
    a = np.array(data, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    return _freeze(a)


def _same_dim(m: Matrix, n: Matrix) -> None:
    if m.shape != n.shape:
        raise DimensionError(f"dimension mismatch: {m.shape} vs {n.shape}")


def inf_norm(m: Matrix) -> float:
    """Maximum absolute row sum."""
    return float(np.abs(m).sum(axis=1).max())


def add(m: Matrix, n: Matrix) -> Matrix:
    _same_dim(m, n)
    return _freeze(np.add(m, n))


def sub(m: Matrix, n: Matrix) -> Matrix:
    _same_dim(m, n)
    return _freeze(np.subtract(m, n))


def mul(m: Matrix, n: Matrix) -> Matrix:
    _same_dim(m, n)
    return _freeze(np.matmul(m, n))


def scale(m: Matrix, c: float) -> Matrix:
    return _freeze(np.multiply(m, float(c)))


def identity(dim: int) -> Matrix:
    return _freeze(np.eye(dim))


def zero(dim: int) -> Matrix:
    return _freeze(np.zeros((dim, dim)))


def _factor(m: Matrix):
    norm = inf_norm(m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    threshold = SINGULAR_RTOL * norm
    bad = np.flatnonzero(pivots <= threshold)
    if bad.size:
        raise SingularMatrixError(
            f"matrix is numerically singular (pivot {pivots[bad[0]]:.3e} "
            f"<= {threshold:.3e} at step {bad[0] + 1})"
        )
    return lu, piv


def invert(m: Matrix) -> Matrix:
    """Inverse via LU factorization with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot magnitude is at or below ``1e-14 * ||m||``.
    """
    factors = _factor(m)
    return _freeze(lu_solve(factors, np.eye(m.shape[0]), check_finite=False))


def divide(a: Matrix, b: Matrix) -> Matrix:
    """Left quotient ``b^{-1} a``; the fraction ``a/b`` of the continued fraction."""
    _same_dim(a, b)
    factors = _factor(b)
    return _freeze(lu_solve(factors, np.asarray(a), check_finite=False))


def is_symmetric_positive(m: Matrix, tol: float = 1e-12) -> bool:
    """True iff ``m`` is symmetric within ``tol`` and positive definite.

    Positive definiteness is decided by attempting a Cholesky factorization,
    which succeeds exactly when all leading principal minors are positive.
    """
    if inf_norm(np.subtract(m, m.T)) > tol:
        return False
    try:
        np.linalg.cholesky(0.5 * (m + m.T))
    except np.linalg.LinAlgError:
        return False
    return True
