import math

import numpy as np
import pytest

from matcf.cfengine import CFGenerator


def random_generator(rng: np.random.Generator, m: int, n: int, radius: float = 0.2) -> CFGenerator:
    """Finite generator whose elements are I plus a perturbation of norm <= radius."""

    def element():
        e = rng.uniform(-1, 1, (m, m))
        return np.eye(m) + e * (radius / np.abs(e).sum(axis=1).max())

    return CFGenerator.from_terms(element(), [(element(), element()) for _ in range(n)])


def nested_oracle(a0, terms):
    """Bottom-up evaluation of a0 + b1/(a1 + b2/(a2 + ...)) with X/Y = Y^{-1} X."""
    tail = np.zeros_like(np.asarray(a0, dtype=float))
    for b, a in reversed(list(terms)):
        tail = np.linalg.solve(np.asarray(a) + tail, np.asarray(b))
    return np.asarray(a0) + tail


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def erf_via_euler(x: float, n_terms: int) -> CFGenerator:
    """erf fraction at scalar x rebuilt from g(x) = sum c_n x^n, c_n = (-1)^n x^(n+1)/((2n+1) n!).

    Euler's transform (constant term split off) gives the raw fraction for g;
    multiplying its first numerator by 2/sqrt(pi) gives erf; rescaling by
    r_1 = 1, r_n = (2n-1)(2n-3)(n-1)!/x^(n-1) clears the x-powers.
    """
    from matcf.cfengine import CFTerm, equivalent_scale
    from matcf.eulercf import TaylorSeries, taylor_to_cf
    from matcf.matcore import scale

    coeffs = [(-1) ** n * x ** (n + 1) / ((2 * n + 1) * math.factorial(n)) for n in range(n_terms)]
    raw = taylor_to_cf(TaylorSeries(coeffs), x, split=True)

    def term(k):
        t = raw.term(k)
        return CFTerm(scale(t.b, 2 / math.sqrt(math.pi)), t.a) if k == 1 else t

    erf_raw = CFGenerator(raw.dim, raw.a0, term, raw.length)

    def r(n):
        if n == 1:
            return 1.0
        return (2 * n - 1) * (2 * n - 3) * math.factorial(n - 1) / x ** (n - 1)

    return equivalent_scale(erf_raw, r)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
