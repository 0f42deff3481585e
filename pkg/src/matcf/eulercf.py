"""Euler's correspondence between truncated power series and continued fractions.

For ``f(x) = sum c_n x^n`` the fraction

    [c_0; c_1 x/1, -c_2 x/(c_1 + c_2 x), -c_1 c_3 x/(c_2 + c_3 x), ...,
          -c_{n-2} c_n x/(c_{n-1} + c_n x), ...]

has n-th convergent equal to the degree-n partial sum.  Scalars and matrices
go through the same code: a scalar argument is a 1x1 matrix and scalar
coefficients multiply the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cfengine import CFGenerator, CFTerm
from .matcore import Matrix, add, as_matrix, identity, mul, scale, zero

__all__ = ["TaylorSeries", "ZeroCoefficientError", "taylor_to_cf", "taylor_eval"]


class ZeroCoefficientError(ValueError):
    """An interior Taylor coefficient is zero, so the transform is undefined."""

    def __init__(self, n: int):
        super().__init__(f"Taylor coefficient c_{n} is zero; Euler's transform needs it non-zero")
        self.n = n


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients ``c_0 .. c_N`` of a power series about 0."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]):
        values = tuple(float(c) for c in coeffs)
        if not values:
            raise ValueError("a series needs at least c_0")
        if not all(np.isfinite(values)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", values)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def taylor_to_cf(series: TaylorSeries, x, split: bool = False) -> CFGenerator:
    """Continued fraction whose convergents are the partial sums of ``series`` at ``x``.

    With ``split=False`` the leading term is ``c_0`` and the fraction has N
    partial quotients; F_n is the partial sum through ``c_n x^n``.

    With ``split=True`` the constant term is moved into the first quotient:

        [0; c_0/1, -c_1 x/(c_0 + c_1 x), -c_0 c_2 x/(c_1 + c_2 x), ...]

    which has N + 1 partial quotients, F_n being the partial sum through
    ``c_{n-1} x^{n-1}``.

    Raises
    ------
    ZeroCoefficientError
        If a coefficient that enters a denominator is zero
        (``c_1..c_N``, or ``c_0..c_N`` when ``split``).
    """
    c = series.coeffs
    X = as_matrix(x)
    m = X.shape[0]
    eye = identity(m)
    first = 0 if split else 1
    for n in range(first, len(c)):
        if c[n] == 0:
            raise ZeroCoefficientError(n)

    if split:
        # shift so that the generic formula below can be shared
        d = (0.0,) + c
        a0 = zero(m)
        length = len(c)

        def term(k: int) -> CFTerm:
            if k == 1:
                return CFTerm(scale(eye, c[0]), eye)
            return _generic(d, k, X, eye)

    else:
        d = c
        a0 = scale(eye, c[0])
        length = len(c) - 1

        def term(k: int) -> CFTerm:
            if k == 1:
                return CFTerm(scale(X, c[1]), eye)
            return _generic(d, k, X, eye)

    def checked(k: int) -> CFTerm:
        if not 1 <= k <= length:
            raise IndexError(f"term index {k} outside 1..{length}")
        return term(k)

    return CFGenerator(m, a0, checked, length)


def _generic(d: tuple[float, ...], k: int, X: Matrix, eye: Matrix) -> CFTerm:
    # k >= 2: b_k = -d_{k-2} d_k x, a_k = d_{k-1} + d_k x
    # the numerator at k = 2 has no d_{k-2} factor
    prev2 = 1.0 if k == 2 else d[k - 2]
    b = scale(X, -prev2 * d[k])
    a = add(scale(eye, d[k - 1]), scale(X, d[k]))
    return CFTerm(b, a)


def taylor_eval(series: TaylorSeries, x):
    """Horner evaluation of the stored prefix at a scalar or a square matrix.

    Returns a float for scalar input and a matrix otherwise.
    """
    scalar = np.ndim(x) == 0
    X = as_matrix(x)
    eye = identity(X.shape[0])
    acc = scale(eye, series.coeffs[-1])
    for c in reversed(series.coeffs[:-1]):
        acc = add(mul(X, acc), scale(eye, c))
    return float(acc[0, 0]) if scalar else acc
