"""Error function of scalars and square matrices by continued fraction.

The fraction used is

    erf(A) = [0; (2/sqrt(pi)) A / I,  A^2 / (3I - A^2),
              b_k / a_k for k >= 3]

    b_k = -(k-2)(2k-3)^2 A^2
    a_k = (-1)^(k-2) ((k-1)(2k-1) I - (2k-3) A^2)

Every element is a polynomial in A, so all of them commute.  Convergence is
guaranteed for ``||A|| < 1/2`` and observed well beyond it.  The Taylor
series ``(2/sqrt(pi)) sum (-1)^n A^(2n+1) / ((2n+1) n!)`` is kept as an
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cfengine import (
    CFGenerator,
    CFTerm,
    DiagnosticReport,
    EvaluationReport,
    Termination,
    evaluate,
    iter_convergents,
    worpitzky_diagnostic,
)
from .matcore import (
    Matrix,
    SingularMatrixError,
    add,
    as_matrix,
    identity,
    inf_norm,
    mul,
    scale,
    sub,
    zero,
)

__all__ = [
    "TWO_OVER_SQRT_PI",
    "ErfCFSpec",
    "ConvergentRow",
    "ConvergentTable",
    "erf_cf_terms",
    "erf_scalar",
    "erf_scalar_taylor",
    "erf_matrix",
    "erf_matrix_taylor",
    "convergent_table",
]

TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
PROVED_RADIUS = 0.5
ORACLE_TOL = 1e-15


@dataclass(frozen=True)
class ErfCFSpec:
    """Argument of the erf fraction with its cached norm."""

    argument: Matrix
    norm: float = field(init=False)
    within_proved_region: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "argument", as_matrix(self.argument))
        object.__setattr__(self, "norm", inf_norm(self.argument))
        object.__setattr__(self, "within_proved_region", self.norm < PROVED_RADIUS)


def erf_cf_terms(spec: ErfCFSpec) -> CFGenerator:
    """Unbounded generator of the erf continued fraction at ``spec.argument``."""
    A = spec.argument
    m = A.shape[0]
    eye = identity(m)
    A2 = mul(A, A)
    first = CFTerm(scale(A, TWO_OVER_SQRT_PI), eye)
    second = CFTerm(A2, sub(scale(eye, 3.0), A2))

    def term(k: int) -> CFTerm:
        if k < 1:
            raise IndexError("terms are indexed from 1")
        if k == 1:
            return first
        if k == 2:
            return second
        sign = 1.0 if k % 2 == 0 else -1.0
        b = scale(A2, -(k - 2) * (2 * k - 3) ** 2)
        a = scale(sub(scale(eye, (k - 1) * (2 * k - 1)), scale(A2, 2 * k - 3)), sign)
        return CFTerm(b, a)

    return CFGenerator(m, zero(m), term, None)


def erf_scalar(x: float, tol: float = 1e-13, max_terms: int = 64) -> float:
    """erf(x) from the continued fraction.

    Raises :class:`SingularMatrixError` if a denominator vanishes.
    """
    report = evaluate(erf_cf_terms(ErfCFSpec(x)), tol, max_terms)
    if report.termination is Termination.SINGULAR_DENOMINATOR:
        raise SingularMatrixError(report.message)
    return float(report.value[0, 0])


def erf_scalar_taylor(x: float, tol: float = ORACLE_TOL) -> float:
    """erf(x) from its Maclaurin series, stopped once a term drops below ``tol``.

    For ``|x| <= 1`` the terms alternate and decrease, so the truncation
    error is below ``tol``.  Larger ``|x|`` still converges but loses digits
    to cancellation.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = float(x)
    term = x
    total = 0.0
    n = 0
    while True:
        total += term / (2 * n + 1)
        n += 1
        term *= -x * x / n
        if abs(term) / (2 * n + 1) < tol or n > 2000:
            break
    return TWO_OVER_SQRT_PI * total


def erf_matrix_taylor(A, tol: float = ORACLE_TOL) -> Matrix:
    """erf(A) from the matrix power series.

    Summation stops once ``||term|| < tol`` and the term norms have started
    to decrease (or a term vanishes, as for nilpotent A).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_matrix(A)
    minus_a2 = scale(mul(A, A), -1.0)
    power = A  # (-1)^n A^(2n+1) / n!
    total = zero(A.shape[0])
    prev = math.inf
    n = 0
    while True:
        t = scale(power, 1.0 / (2 * n + 1))
        total = add(total, t)
        norm = inf_norm(t)
        if norm == 0 or (norm < tol and norm < prev) or n > 2000:
            break
        prev = norm
        n += 1
        power = scale(mul(minus_a2, power), 1.0 / n)
    return scale(total, TWO_OVER_SQRT_PI)


def erf_matrix(
    A, tol: float = 1e-12, max_terms: int = 64, keep_history: bool = False
) -> tuple[Matrix, EvaluationReport, DiagnosticReport]:
    """erf(A) from the continued fraction, with a convergence diagnostic.

    The diagnostic evaluates the alpha/beta product bounds over the first
    ``min(10, max_terms // 2)`` index pairs.  It needs ``A`` invertible; when
    it is not, the diagnostic carries ``singular_index`` and is marked
    unsatisfied.  ``flags["within_proved_region"]`` records whether
    ``||A|| < 1/2``; outside that region the value is still computed.
    """
    spec = ErfCFSpec(A)
    gen = erf_cf_terms(spec)
    report = evaluate(gen, tol, max_terms, keep_history)
    K = max(1, min(10, max_terms // 2))
    try:
        diag = worpitzky_diagnostic(gen, K)
    except SingularMatrixError as exc:
        diag = DiagnosticReport(kind="worpitzky", K=K, singular_index=exc.index, notes=[str(exc)])
    diag.flags["within_proved_region"] = spec.within_proved_region
    if not spec.within_proved_region:
        msg = f"||A|| = {spec.norm:.6g} is outside the proved region ||A|| < 1/2"
        diag.notes.append(msg)
    return report.value, report, diag


@dataclass(frozen=True)
class ConvergentRow:
    n: int
    value: float | Matrix
    difference: float | Matrix  # oracle - F_n


@dataclass(frozen=True)
class ConvergentTable:
    argument: float | Matrix
    oracle: float | Matrix
    rows: tuple[ConvergentRow, ...]
    truncated: bool = False


def convergent_table(A, n_max: int) -> ConvergentTable:
    """Rows ``(n, F_n, erf - F_n)`` for n = 1..n_max against the Taylor oracle.

    Scalar input gives scalar entries.  A singular denominator ends the
    table early with ``truncated=True``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    scalar = np.ndim(A) == 0
    M = as_matrix(A)
    oracle = erf_matrix_taylor(M, ORACLE_TOL)
    rows = []
    truncated = False
    it = iter_convergents(erf_cf_terms(ErfCFSpec(M)))
    for _ in range(n_max):
        try:
            n, f = next(it)
        except SingularMatrixError:
            truncated = True
            break
        diff = sub(oracle, f)
        if scalar:
            rows.append(ConvergentRow(n, float(f[0, 0]), float(diff[0, 0])))
        else:
            rows.append(ConvergentRow(n, f, diff))
    if scalar:
        return ConvergentTable(float(A), float(oracle[0, 0]), tuple(rows), truncated)
    return ConvergentTable(M, oracle, tuple(rows), truncated)
