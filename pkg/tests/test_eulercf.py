import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matcf.cfengine import Termination, evaluate, iter_convergents
from matcf.eulercf import TaylorSeries, ZeroCoefficientError, taylor_eval, taylor_to_cf


def partial_sum(coeffs, x, n):
    return sum(c * x**k for k, c in enumerate(coeffs[: n + 1]))


def convergents(gen):
    return [f[0, 0] for _, f in iter_convergents(gen)]


class TestTaylorToCF:
    def test_geometric_partial_sums(self):
        gen = taylor_to_cf(TaylorSeries([1.0] * 5), 0.5)
        assert gen.length == 4
        f = convergents(gen)
        assert f == pytest.approx([1.5, 1.75, 1.875, 1.9375], abs=1e-15)

    def test_geometric_limit(self):
        f = convergents(taylor_to_cf(TaylorSeries([1.0] * 41), 0.5))
        assert f[-1] == pytest.approx(2.0, abs=1e-9)

    def test_exp(self):
        series = TaylorSeries([1 / math.factorial(n) for n in range(9)])
        oracle = sum(0.3**n / math.factorial(n) for n in range(20))
        assert convergents(taylor_to_cf(series, 0.3))[-1] == pytest.approx(oracle, abs=1e-8)
        assert oracle == pytest.approx(math.exp(0.3), abs=1e-15)

    def test_constant_only(self):
        gen = taylor_to_cf(TaylorSeries([4.25]), 0.7)
        assert gen.length == 0
        assert list(iter_convergents(gen)) == []
        assert gen.a0[0, 0] == 4.25

    def test_element_layout(self):
        c = [2.0, 3.0, 5.0, 7.0]
        x = 0.1
        gen = taylor_to_cf(TaylorSeries(c), x)
        assert gen.a0[0, 0] == 2.0
        b, a = zip(*[(t.b[0, 0], t.a[0, 0]) for t in gen.terms(3)])
        assert b == pytest.approx([c[1] * x, -c[2] * x, -c[1] * c[3] * x])
        assert a == pytest.approx([1, c[1] + c[2] * x, c[2] + c[3] * x])

    def test_split_layout(self):
        c = [2.0, 3.0, 5.0, 7.0]
        x = 0.1
        gen = taylor_to_cf(TaylorSeries(c), x, split=True)
        assert gen.length == 4 and gen.a0[0, 0] == 0
        b, a = zip(*[(t.b[0, 0], t.a[0, 0]) for t in gen.terms(4)])
        assert b == pytest.approx([c[0], -c[1] * x, -c[0] * c[2] * x, -c[1] * c[3] * x])
        assert a == pytest.approx([1, c[0] + c[1] * x, c[1] + c[2] * x, c[2] + c[3] * x])
        f = convergents(gen)
        assert f == pytest.approx([partial_sum(c, x, n) for n in range(4)], abs=1e-15)

    def test_zero_interior_coefficient(self):
        with pytest.raises(ZeroCoefficientError) as info:
            taylor_to_cf(TaylorSeries([1.0, 2.0, 0.0, 1.0]), 0.1)
        assert info.value.n == 2

    def test_zero_constant_term(self):
        taylor_to_cf(TaylorSeries([0.0, 1.0]), 0.1)
        with pytest.raises(ZeroCoefficientError):
            taylor_to_cf(TaylorSeries([0.0, 1.0]), 0.1, split=True)

    def test_out_of_range_term(self):
        gen = taylor_to_cf(TaylorSeries([1.0, 1.0]), 0.1)
        with pytest.raises(IndexError):
            gen.term(2)

    def test_erf_raw_quotients(self):
        # g(x) = sum c_n x^n with c_n = (-1)^n x^(n+1) / ((2n+1) n!)
        x = 0.3
        c = [(-1) ** n * x ** (n + 1) / ((2 * n + 1) * math.factorial(n)) for n in range(6)]
        gen = taylor_to_cf(TaylorSeries(c), x, split=True)
        (b1, a1), (b2, a2), (b3, a3) = [(t.b[0, 0], t.a[0, 0]) for t in gen.terms(3)]
        assert (b1, a1) == pytest.approx((x, 1))
        assert (b2, a2) == pytest.approx((x**3 / 3, (3 * x - x**3) / 3), rel=1e-14)
        assert (b3, a3) == pytest.approx((-(x**5) / 10, (-10 * x**2 + 3 * x**4) / 30), rel=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.tuples(st.floats(0.2, 2), st.booleans()).map(lambda t: t[0] if t[1] else -t[0]),
            min_size=2,
            max_size=12,
        ),
        st.floats(-0.3, 0.3).filter(lambda x: x != 0),
    )
    def test_convergents_are_partial_sums(self, coeffs, x):
        f = convergents(taylor_to_cf(TaylorSeries(coeffs), x))
        for n, value in enumerate(f, start=1):
            assert value == pytest.approx(partial_sum(coeffs, x, n), abs=1e-8)

    def test_diagonal_matrix_matches_scalars(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            coeffs = rng.uniform(0.2, 2, 8) * rng.choice([-1, 1], 8)
            d = rng.uniform(-0.3, 0.3, 3)
            series = TaylorSeries(coeffs)
            rep = evaluate(taylor_to_cf(series, np.diag(d)), 1e-15, 50)
            assert rep.termination in (Termination.GENERATOR_EXHAUSTED, Termination.TOLERANCE_MET)
            expected = [evaluate(taylor_to_cf(series, v), 1e-15, 50).value[0, 0] for v in d]
            np.testing.assert_allclose(rep.value, np.diag(expected), rtol=0, atol=1e-10)


class TestTaylorEval:
    def test_at_zero(self):
        assert taylor_eval(TaylorSeries([3.0, 1.0, 2.0]), 0.0) == 3.0

    def test_scalar_returns_float(self):
        assert isinstance(taylor_eval(TaylorSeries([1.0, 1.0]), 0.5), float)

    def test_exp_diagonal(self):
        series = TaylorSeries([1 / math.factorial(n) for n in range(21)])
        got = taylor_eval(series, np.diag([0.1, 0.2]))
        np.testing.assert_allclose(got, np.diag([math.exp(0.1), math.exp(0.2)]), rtol=0, atol=1e-12)

    def test_geometric_matrix(self):
        got = taylor_eval(TaylorSeries([1.0] * 41), 0.5 * np.eye(3))
        np.testing.assert_allclose(got, 2 * np.eye(3), rtol=0, atol=1e-9)

    def test_nilpotent(self):
        n = np.array([[0.0, 1.0], [0.0, 0.0]])
        got = taylor_eval(TaylorSeries([1.0, 2.0, 3.0]), n)
        np.testing.assert_array_equal(got, [[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_bad_series(self):
        with pytest.raises(ValueError):
            TaylorSeries([])
        with pytest.raises(ValueError):
            TaylorSeries([1.0, math.inf])
