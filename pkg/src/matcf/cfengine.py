"""Forward evaluation and transformation of matrix continued fractions.

A continued fraction ``A_0 + K(B_n/A_n)`` is described by a
:class:`CFGenerator`: the leading term plus a deterministic function mapping
``k >= 1`` to the partial quotient ``(B_k, A_k)``.  Fractions use the left
convention ``X/Y = Y^{-1} X`` throughout, so the n-th convergent is
``F_n = Q_n^{-1} P_n`` with

    P_n = A_n P_{n-1} + B_n P_{n-2},    P_{-1} = I, P_0 = A_0
    Q_n = A_n Q_{n-1} + B_n Q_{n-2},    Q_{-1} = 0, Q_0 = I
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from .matcore import (
    Matrix,
    MatrixError,
    SingularMatrixError,
    add,
    as_matrix,
    divide,
    identity,
    inf_norm,
    invert,
    is_symmetric_positive,
    mul,
    scale,
    sub,
    zero,
)

__all__ = [
    "CFTerm",
    "CFGenerator",
    "ConvergentState",
    "Termination",
    "EvaluationReport",
    "DiagnosticReport",
    "NormTooLargeError",
    "seed",
    "step",
    "rescale",
    "convergent",
    "iter_convergents",
    "evaluate",
    "nested_value",
    "equivalent_scale",
    "to_ordinary",
    "worpitzky_diagnostic",
    "positive_divergence_diagnostic",
    "neumann_bound",
]

RESCALE_THRESHOLD = 1e100


class NormTooLargeError(MatrixError, ValueError):
    """``||C|| >= 1``, so the Neumann series bound does not apply."""


class CFTerm(NamedTuple):
    b: Matrix
    a: Matrix


@dataclass(frozen=True)
class CFGenerator:
    """Leading term ``a0`` and lazily indexed partial quotients.

    ``term(k)`` must be deterministic.  ``length`` is ``None`` for an
    unbounded fraction.
    """

    dim: int
    a0: Matrix
    term: Callable[[int], CFTerm]
    length: int | None = None

    @classmethod
    def from_terms(cls, a0, terms: Sequence[tuple]) -> "CFGenerator":
        """Finite generator from explicit ``(b, a)`` pairs, ``terms[0]`` being k = 1."""
        a0 = as_matrix(a0)
        frozen = tuple(CFTerm(as_matrix(b), as_matrix(a)) for b, a in terms)
        for t in frozen:
            if t.b.shape != a0.shape or t.a.shape != a0.shape:
                raise ValueError("all elements must share the dimension of a0")
        return cls(a0.shape[0], a0, lambda k: frozen[k - 1], len(frozen))

    @classmethod
    def constant(cls, a0, b, a, length: int | None = None) -> "CFGenerator":
        a0, b, a = as_matrix(a0), as_matrix(b), as_matrix(a)
        t = CFTerm(b, a)
        return cls(a0.shape[0], a0, lambda k: t, length)

    def terms(self, n: int) -> list[CFTerm]:
        """The first ``n`` partial quotients (fewer if the generator is shorter)."""
        if self.length is not None:
            n = min(n, self.length)
        return [self.term(k) for k in range(1, n + 1)]

    def _require(self, n: int) -> None:
        if self.length is not None and self.length < n:
            raise ValueError(f"generator has {self.length} terms, {n} required")


@dataclass(frozen=True)
class ConvergentState:
    p_prev: Matrix
    p_curr: Matrix
    q_prev: Matrix
    q_curr: Matrix
    n: int = 0


class Termination(str, enum.Enum):
    TOLERANCE_MET = "tolerance_met"
    MAX_TERMS = "max_terms"
    GENERATOR_EXHAUSTED = "generator_exhausted"
    SINGULAR_DENOMINATOR = "singular_denominator"


@dataclass
class EvaluationReport:
    value: Matrix
    n_used: int
    deltas: list[float]
    termination: Termination
    history: list[Matrix] | None = None
    message: str = ""


@dataclass
class DiagnosticReport:
    """Per-index bound values plus pass/fail flags for a convergence criterion."""

    kind: str
    K: int
    alphas: list[float] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)
    partial_sums: list[float] = field(default_factory=list)
    alpha: float | None = None
    beta: float | None = None
    satisfied: bool = False
    flags: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    singular_index: int | None = None

    @property
    def product(self) -> float | None:
        if self.alpha is None or self.beta is None:
            return None
        return self.alpha * self.beta


def seed(a0: Matrix) -> ConvergentState:
    m = a0.shape[0]
    return ConvergentState(identity(m), as_matrix(a0), zero(m), identity(m), 0)


def step(state: ConvergentState, term: CFTerm) -> ConvergentState:
    b, a = term
    p = add(mul(a, state.p_curr), mul(b, state.p_prev))
    q = add(mul(a, state.q_curr), mul(b, state.q_prev))
    return ConvergentState(state.p_curr, p, state.q_curr, q, state.n + 1)


def rescale(state: ConvergentState, c: float) -> ConvergentState:
    """Multiply all four recurrence matrices by ``c``; convergents are unchanged."""
    return ConvergentState(
        scale(state.p_prev, c),
        scale(state.p_curr, c),
        scale(state.q_prev, c),
        scale(state.q_curr, c),
        state.n,
    )


def convergent(state: ConvergentState) -> Matrix:
    """``Q_n^{-1} P_n``; raises :class:`SingularMatrixError` with ``index = n``."""
    try:
        return divide(state.p_curr, state.q_curr)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"denominator Q_{state.n} is singular: {exc}", index=state.n
        ) from None


def _guard(state: ConvergentState) -> ConvergentState:
    qn = inf_norm(state.q_curr)
    if qn > RESCALE_THRESHOLD:
        return rescale(state, 1.0 / qn)
    return state


def iter_convergents(gen: CFGenerator) -> Iterator[tuple[int, Matrix]]:
    """Yield ``(n, F_n)`` for n = 1, 2, ... until the generator is exhausted.

    Singular denominators raise :class:`SingularMatrixError` from the
    iterator.
    """
    state = seed(gen.a0)
    k = 1
    while gen.length is None or k <= gen.length:
        state = _guard(step(state, gen.term(k)))
        yield k, convergent(state)
        k += 1


def evaluate(
    gen: CFGenerator,
    tol: float = 1e-12,
    max_terms: int = 64,
    keep_history: bool = False,
) -> EvaluationReport:
    """Run the forward recurrence until successive convergents agree.

    Stops when ``||F_n - F_{n-1}|| <= tol * max(1, ||F_n||)``, after
    ``max_terms`` partial quotients, or when the generator runs out.  A
    singular denominator halts evaluation and the report carries the last
    convergent that could be formed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_terms < 1:
        raise ValueError("max_terms must be at least 1")
    value = gen.a0
    n_used = 0
    deltas: list[float] = []
    history: list[Matrix] | None = [] if keep_history else None
    termination = Termination.GENERATOR_EXHAUSTED
    message = ""
    it = iter_convergents(gen)
    while True:
        try:
            n, f = next(it)
        except StopIteration:
            break
        except SingularMatrixError as exc:
            termination = Termination.SINGULAR_DENOMINATOR
            message = str(exc)
            break
        delta = inf_norm(sub(f, value))
        deltas.append(delta)
        if history is not None:
            history.append(f)
        value, n_used = f, n
        if delta <= tol * max(1.0, inf_norm(f)):
            termination = Termination.TOLERANCE_MET
            break
        if n >= max_terms:
            termination = Termination.MAX_TERMS
            break
    return EvaluationReport(value, n_used, deltas, termination, history, message)


def nested_value(gen: CFGenerator, n: int) -> Matrix:
    """Bottom-up evaluation ``A_0 + (A_1 + (A_2 + ...)^{-1} B_2)^{-1} B_1`` of F_n."""
    gen._require(n)
    tail = zero(gen.dim)
    for k in range(n, 0, -1):
        b, a = gen.term(k)
        tail = divide(b, add(a, tail))
    return add(gen.a0, tail)


def equivalent_scale(
    gen: CFGenerator, r: Sequence[float] | Callable[[int], float]
) -> CFGenerator:
    """Scalar equivalence transform: ``b_k -> r_k r_{k-1} b_k``, ``a_k -> r_k a_k``.

    ``r`` is either a callable ``k -> r_k`` or a sequence whose entry ``i``
    is ``r_{i+1}``.  ``r_0`` is fixed at 1.
    """
    if callable(r):
        rk = r
        length = gen.length
    else:
        values = tuple(float(v) for v in r)
        length = len(values) if gen.length is None else min(gen.length, len(values))
        rk = lambda k: values[k - 1]  # noqa: E731
        if any(v == 0 for v in values[:length]):
            raise ValueError("scale factors must be non-zero")

    def term(k: int) -> CFTerm:
        cur = float(rk(k))
        prev = 1.0 if k == 1 else float(rk(k - 1))
        if cur == 0 or prev == 0:
            raise ValueError(f"scale factor r_{k if cur == 0 else k - 1} is zero")
        b, a = gen.term(k)
        return CFTerm(scale(b, cur * prev), scale(a, cur))

    return CFGenerator(gen.dim, gen.a0, term, length)


def to_ordinary(gen: CFGenerator, K: int) -> CFGenerator:
    """Equivalent ordinary fraction ``A_0 + K(I/A*_k)`` for the first ``K`` terms.

    ``A*_k = (B_k B_{k-2} ...)^{-1} A_k (B_{k-1} B_{k-3} ...)``, where each
    product runs down through indices of one parity and is empty (I) when
    it would start below 1.
    """
    gen._require(K)
    eye = identity(gen.dim)
    # chains[k % 2] = B_k B_{k-2} ... for the most recent k of that parity
    chains = [eye, eye]
    stars = []
    for k in range(1, K + 1):
        b, a = gen.term(k)
        chains[k % 2] = mul(b, chains[k % 2])
        try:
            stars.append(mul(divide(a, chains[k % 2]), chains[(k - 1) % 2]))
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"B-chain at k={k} is singular: {exc}", index=k) from None
    return CFGenerator.from_terms(gen.a0, [(eye, s) for s in stars])


def worpitzky_diagnostic(gen: CFGenerator, K: int) -> DiagnosticReport:
    """Evaluate the alpha/beta product bounds for k = 1..K.

    alpha_k = ||(B_{2k-2}...B_2)^{-1} A_{2k-1}^{-1} B_{2k-1}...B_1||
    beta_k  = ||(B_{2k-1}...B_1)^{-1} A_{2k}^{-1} B_{2k}...B_2||

    with products over indices of one parity.  The criterion holds when
    alpha = max alpha_k < 1, beta = max beta_k < 1 and alpha * beta <= 1/4.
    It is sufficient for convergence, not necessary.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    gen._require(2 * K)
    eye = identity(gen.dim)
    odd, even = eye, eye
    alphas, betas = [], []

    def bound(left: Matrix, a: Matrix, right: Matrix, index: int) -> float:
        try:
            return inf_norm(divide(divide(right, a), left))
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"element chain at n={index} is singular: {exc}", index=index) from None

    for k in range(1, K + 1):
        b, a = gen.term(2 * k - 1)
        odd = mul(b, odd)
        alphas.append(bound(even, a, odd, 2 * k - 1))
        b, a = gen.term(2 * k)
        even = mul(b, even)
        betas.append(bound(odd, a, even, 2 * k))
    alpha, beta = max(alphas), max(betas)
    return DiagnosticReport(
        kind="worpitzky",
        K=K,
        alphas=alphas,
        betas=betas,
        alpha=alpha,
        beta=beta,
        satisfied=bool(alpha < 1 and beta < 1 and alpha * beta <= 0.25),
        flags={"alpha_lt_1": alpha < 1, "beta_lt_1": beta < 1, "product_le_quarter": alpha * beta <= 0.25},
    )


def positive_divergence_diagnostic(gen: CFGenerator, K: int, tol: float = 1e-12) -> DiagnosticReport:
    """Partial sums of ``||A_n||`` for an ordinary fraction with positive elements.

    For such fractions convergence is equivalent to divergence of the norm
    series.  Only finitely many terms are inspected, so the report can hint
    at divergence of the series but never decide it.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    gen._require(K)
    eye = identity(gen.dim)
    ordinary = symmetric = entrywise = True
    sums, total = [], 0.0
    for k in range(1, K + 1):
        b, a = gen.term(k)
        ordinary &= inf_norm(sub(b, eye)) <= tol
        symmetric &= is_symmetric_positive(a, tol)
        entrywise &= bool(np.all(a > 0))
        total += inf_norm(a)
        sums.append(total)
    notes = ["indicative only: divergence of the norm series cannot be decided from finitely many terms"]
    if not ordinary:
        notes.append("not an ordinary continued fraction (some B_k != I)")
    if not symmetric:
        notes.append("some A_k is not symmetric positive definite")
    return DiagnosticReport(
        kind="positive_divergence",
        K=K,
        partial_sums=sums,
        satisfied=ordinary and symmetric,
        flags={"ordinary": ordinary, "symmetric_positive": symmetric, "entrywise_positive": entrywise},
        notes=notes,
    )


def neumann_bound(c: Matrix) -> float:
    """``1 / (1 - ||C||)``, an upper bound on ``||(I - C)^{-1}||`` when ``||C|| < 1``.

    The bound is checked against the actual inverse before returning.
    """
    norm = inf_norm(c)
    if norm >= 1:
        raise NormTooLargeError(f"||C|| = {norm} is not below 1")
    bound = 1.0 / (1.0 - norm)
    actual = inf_norm(invert(sub(identity(c.shape[0]), c)))
    if not actual <= bound + 1e-10 or math.isnan(actual):
        raise AssertionError(f"Neumann bound violated: {actual} > {bound}")
    return bound
