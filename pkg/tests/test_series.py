import json
import math
import warnings
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from scalable_measures.errors import DegreeOverflowError, DomainError, InvalidArgumentError
from scalable_measures.series import (
    ConvergenceWarning,
    ScaledSeries,
    SeedSeries,
    check_composition_law,
    composition_sum,
    degree_law,
    evaluate,
    scale_coefficients,
    third_order_recurrence,
)

x = sympy.Symbol("x")
FIG1 = SeedSeries(3, (3, 0.24, 0.0192))


def sympy_iterate(coeffs, n, order=None, length=None):
    """Coefficients of the n-fold self-composition of sum c_j x**j (sympy)."""
    seed = sum(sympy.nsimplify(c, rational=True) * x ** (j + 1) for j, c in enumerate(coeffs))
    poly = x
    for _ in range(n):
        poly = sympy.expand(poly.subs(x, seed))
        if order is not None:
            poly = sum(poly.coeff(x, j) * x**j for j in range(1, order + 1))
    p = sympy.Poly(poly, x)
    top = order or length or p.degree()
    return [Fraction(int(sympy.fraction(p.coeff_monomial(x**j))[0]),
                     int(sympy.fraction(p.coeff_monomial(x**j))[1])) for j in range(1, top + 1)]


rational = st.fractions(min_value=-3, max_value=3, max_denominator=7)
positive = st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=7)


@st.composite
def finite_seeds(draw, max_len=3):
    base = draw(st.sampled_from([2, 3]))
    d1 = draw(positive)
    rest = draw(st.lists(rational, min_size=0, max_size=max_len - 1))
    return SeedSeries(base, (d1, *rest))


class TestDegreeLaw:
    def test_two_coefficient_seed_ends_at_N(self):
        for n in range(8):
            assert degree_law(2, n) == 2**n

    def test_linear_stays_linear(self):
        assert degree_law(1, 5) == 1

    def test_multiplicative(self):
        assert degree_law(3, 3) == 27 == degree_law(3, 2) * degree_law(3, 1)

    def test_overflow(self):
        with pytest.raises(DegreeOverflowError):
            degree_law(2, 13)
        assert degree_law(2, 13, max_length=None) == 8192


class TestScaleCoefficients:
    def test_additive_seed(self):
        s = scale_coefficients(SeedSeries(2, (2,)), 3)
        assert s.coeffs == (8,)
        assert s.copies == 8

    def test_identity_for_n_zero(self):
        s = scale_coefficients(FIG1, 0)
        assert s.coeffs == (1.0,)

    def test_binomial_seed(self):
        s = scale_coefficients(SeedSeries(2, (2, 1)), 2)
        assert s.coeffs == (4, 6, 4, 1)
        assert all(isinstance(c, Fraction) for c in s.coeffs)

    def test_fig1_seed_against_symbolic_composition(self):
        oracle = sympy_iterate([Fraction("3"), Fraction("0.24"), Fraction("0.0192")], 2)
        got = scale_coefficients(FIG1, 2).coeffs
        assert len(got) == 9
        for g, o in zip(got, oracle):
            assert g == pytest.approx(float(o), rel=1e-13)
        assert oracle[:3] == [9, Fraction("2.88"), Fraction("0.9216")]

    def test_exact_fig1_seed_against_symbolic_composition(self):
        seed = SeedSeries(3, (3, Fraction("0.24"), Fraction("0.0192")))
        for n in range(4):
            assert list(scale_coefficients(seed, n).coeffs) == sympy_iterate(seed.coeffs, n)

    def test_methods_agree(self):
        seed = SeedSeries(2, (Fraction(3, 2), Fraction(-1, 3), Fraction(2, 5)))
        for n in range(3):
            a = scale_coefficients(seed, n, method="powers")
            b = scale_coefficients(seed, n, method="compositions")
            assert a.coeffs == b.coeffs

    def test_composition_sum_by_hand(self):
        d = (Fraction(2), Fraction(5), Fraction(7))
        # compositions of 3 into 2 parts: (1,2), (2,1)
        assert composition_sum(d, 3, 2) == 2 * 2 * 5
        assert composition_sum(d, 3, 1) == 7
        assert composition_sum(d, 3, 3) == 8

    def test_infinite_seed_needs_truncation(self):
        seed = SeedSeries(2, (2, 1, 1, 1), finite=False)
        with pytest.raises(InvalidArgumentError):
            scale_coefficients(seed, 2)
        with pytest.raises(InvalidArgumentError):
            scale_coefficients(seed, 2, truncation=5)
        s = scale_coefficients(seed, 2, truncation=4)
        assert s.truncated and len(s) == 4

    def test_truncation_keeps_leading_orders(self):
        seed = SeedSeries(3, (2, Fraction(1, 3), Fraction(-1, 2)))
        full = scale_coefficients(seed, 3)
        for T in (1, 3, 5, 40):
            cut = scale_coefficients(seed, 3, truncation=T)
            assert cut.coeffs == full.coeffs[:T]

    def test_infinite_truncated_orders_depend_only_on_low_seed_orders(self):
        # exp(e) - 1 style seed: later unknown coefficients must not matter
        a = SeedSeries(2, (2, 1, Fraction(1, 3), 5), finite=False)
        b = SeedSeries(2, (2, 1, Fraction(1, 3), -7), finite=False)
        assert (scale_coefficients(a, 3, truncation=3).coeffs
                == scale_coefficients(b, 3, truncation=3).coeffs)

    def test_overflow_without_truncation(self):
        with pytest.raises(DegreeOverflowError):
            scale_coefficients(SeedSeries(2, (2, 1)), 13)
        assert len(scale_coefficients(SeedSeries(2, (2, 1)), 13, truncation=10)) == 10

    @pytest.mark.parametrize("bad", [(0, 1), (-1,), ()])
    def test_invalid_seeds(self, bad):
        with pytest.raises(InvalidArgumentError):
            SeedSeries(2, bad)

    def test_invalid_base(self):
        with pytest.raises(InvalidArgumentError):
            SeedSeries(1, (1,))

    def test_first_order_is_power(self):
        seed = SeedSeries(3, (Fraction(5, 2), Fraction(1, 4)))
        for n in range(6):
            assert scale_coefficients(seed, n).coeffs[0] == Fraction(5, 2) ** n

    def test_top_coefficient(self):
        # leading coefficient of f o g is f_top * g_top**deg(f)
        seed = SeedSeries(2, (Fraction(1, 2), Fraction(3, 2)))
        top = Fraction(1)
        for n in range(6):
            s = scale_coefficients(seed, n)
            assert len(s) == 2**n
            assert s.coeffs[-1] == top != 0
            top *= Fraction(3, 2) ** (2**n)

    @settings(max_examples=25, deadline=None)
    @given(finite_seeds(), st.integers(2, 4))
    def test_split_independence(self, seed, n):
        full = scale_coefficients(seed, n)
        if len(seed.coeffs) ** n <= 27:
            assert list(full.coeffs) == sympy_iterate(seed.coeffs, n, length=len(full))
        for k in range(1, n):
            inner = scale_coefficients(seed, k)
            outer = scale_coefficients(seed, n - k)
            assert _compose(outer.coeffs, inner.coeffs) == list(full.coeffs)


def _compose(outer, inner):
    """Plain polynomial composition outer(inner(x)) with Fraction lists."""
    result = [Fraction(0)]
    power = [Fraction(1)]
    for c in outer:
        power = _mul(power, [Fraction(0)] + list(inner))
        result = _add(result, [c * p for p in power])
    return result[1:]


def _mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _add(p, q):
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return [a + b for a, b in zip(p, q)]


class TestThirdOrder:
    def test_additive_is_zero(self):
        for n in range(5):
            assert third_order_recurrence(SeedSeries(2, (2,)), n) == 0

    def test_binomial_seed(self):
        assert third_order_recurrence(SeedSeries(2, (2, 1)), 2) == 4

    @settings(max_examples=40, deadline=None)
    @given(finite_seeds(), st.integers(0, 5))
    def test_matches_general_recurrence(self, seed, n):
        s = scale_coefficients(seed, n, truncation=3)
        padded = list(s.coeffs) + [0, 0, 0]
        assert third_order_recurrence(seed, n) == padded[2]


class TestEvaluate:
    def test_zero(self):
        assert evaluate(scale_coefficients(FIG1, 2), 0.0) == 0.0

    def test_identity(self):
        assert evaluate(scale_coefficients(FIG1, 0), 0.37) == 0.37

    def test_binomial_power_form(self):
        s = scale_coefficients(SeedSeries(2, (2, 1)), 3)
        assert evaluate(s, 0.1) == pytest.approx(1.1**8 - 1, rel=1e-14)
        assert evaluate(s, 0.1) == pytest.approx(1.14358881, rel=1e-12)

    def test_exact(self):
        s = scale_coefficients(SeedSeries(2, (2, 1)), 3)
        assert evaluate(s, Fraction(1, 10), exact=True) == Fraction(11, 10) ** 8 - 1

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            evaluate(scale_coefficients(FIG1, 1), -0.1)

    def test_radius_warning(self):
        s = scale_coefficients(FIG1, 1)
        with pytest.warns(ConvergenceWarning):
            evaluate(s, 1.5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            evaluate(s, 1.5, radius_hint=2.0)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone_for_nonnegative_coefficients(self, e1, e2):
        s = scale_coefficients(FIG1, 2)
        lo, hi = sorted((e1, e2))
        assert evaluate(s, lo) <= evaluate(s, hi)


class TestCompositionLaw:
    def test_additive_exact_zero(self):
        r = check_composition_law(SeedSeries(2, (2,)), 3, 1, [0.1, 0.5, 1.0])
        assert r.max_residual == 0.0 and r.passed

    def test_binomial_seed(self):
        r = check_composition_law(SeedSeries(2, (2, 1)), 3, 1, [0.1, 0.5, 1.0])
        assert r.exact and r.max_residual == 0.0
        rf = check_composition_law(SeedSeries(2, (2.0, 1.0)), 3, 1, [0.1, 0.5, 1.0])
        assert not rf.exact and rf.max_residual <= 1e-12

    def test_truncated_fig1_reported(self):
        r = check_composition_law(FIG1, 2, 1, [0.1, 0.3], truncation=3)
        assert r.truncated
        # the neglected orders start at e**4
        assert 0 < r.residuals[0] < 1e-2

    def test_requires_split(self):
        with pytest.raises(InvalidArgumentError):
            check_composition_law(FIG1, 2, 2, [0.1])

    @settings(max_examples=20, deadline=None)
    @given(finite_seeds(), st.integers(2, 3), st.data())
    def test_exact_zero_for_rational_seeds(self, seed, n, data):
        k = data.draw(st.integers(1, n - 1))
        r = check_composition_law(seed, n, k, [Fraction(1, 7), Fraction(1, 2)])
        assert r.max_residual == 0.0


class TestJson:
    def test_round_trip_exact(self):
        s = scale_coefficients(SeedSeries(3, (Fraction(7, 3), Fraction(-1, 9))), 2)
        data = json.loads(json.dumps(s.to_json()))
        assert data["coefficients"][0] == "49/9"
        back = ScaledSeries.from_json(data)
        assert back == s

    def test_round_trip_float(self):
        s = scale_coefficients(FIG1, 2)
        back = ScaledSeries.from_json(json.loads(json.dumps(s.to_json())))
        assert back.coeffs == s.coeffs
        assert not back.exact
