from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from bldgzeta.errors import DivisionByZeroPoly, NotExpandable
from bldgzeta.poly import (MultiPoly, RationalFunction, RationalMatrix, adjugate_poly_matrix,
                           det_cofactor, det_poly_matrix, format_fraction, matrix_inverse_exact,
                           poly_gcd_univariate, series_expand, series_inverse)

small = st.integers(-5, 5)


def polys(nvars, max_deg=3):
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars)
    return st.dictionaries(exps, small, max_size=5).map(lambda d: MultiPoly(nvars, d))


def to_sympy(p, syms):
    return sum((sympy.Rational(c.numerator, c.denominator)
                * sympy.prod([s ** e for s, e in zip(syms, exp)])
                for exp, c in p.terms.items()), sympy.Integer(0))


X, Y = sympy.symbols("x y")


@given(polys(2), polys(2))
def test_ring_operations_match_sympy(a, b):
    for ours, theirs in [(a + b, to_sympy(a, (X, Y)) + to_sympy(b, (X, Y))),
                         (a - b, to_sympy(a, (X, Y)) - to_sympy(b, (X, Y))),
                         (a * b, to_sympy(a, (X, Y)) * to_sympy(b, (X, Y)))]:
        assert sympy.expand(to_sympy(ours, (X, Y)) - theirs) == 0


@given(polys(2), polys(2))
def test_exact_division_recovers_factor(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_div(b) == a


@given(polys(1, 4), polys(1, 4))
def test_univariate_gcd_matches_sympy(a, b):
    if a.is_zero() or b.is_zero():
        return
    g = poly_gcd_univariate(a, b)
    ref = sympy.gcd(to_sympy(a, (X,)), to_sympy(b, (X,)))
    ratio = sympy.simplify(to_sympy(g, (X,)) / ref)
    assert ratio.is_number and ratio != 0


def test_zero_polynomial_is_distinct_from_empty_constant():
    z = MultiPoly.zero(2)
    assert z.is_zero() and not z
    assert MultiPoly.constant(2, 0) == z
    assert MultiPoly.constant(2, 3).constant_term() == 3


def test_format_fraction_strings():
    assert format_fraction(Fraction(3)) == "3"
    assert format_fraction(Fraction(-1, 2)) == "-1/2"


def test_json_round_trip():
    p = MultiPoly(2, {(1, 0): Fraction(1, 2), (0, 3): -2})
    assert MultiPoly.from_json(p.to_json(), 2) == p
    f = RationalFunction(p, MultiPoly(2, {(0, 0): 1, (1, 1): -1}))
    assert RationalFunction.from_json(f.to_json()) == f


def test_geometric_series():
    u = MultiPoly.var(1, 0)
    f = RationalFunction(MultiPoly.constant(1), MultiPoly.constant(1) - u)
    assert series_expand(f, 6).coeffs(7) == [1] * 7


@given(polys(1, 3), polys(1, 3))
def test_series_times_denominator_is_numerator(num, den):
    if den.constant_term() == 0:
        return
    f = RationalFunction(num, den, reduce=False)
    s = series_expand(f, 8)
    assert (s * den).truncate(8) == num.truncate(8)


@given(polys(2, 2), polys(2, 2))
def test_bivariate_series_times_denominator(num, den):
    if den.constant_term() == 0:
        return
    s = series_expand(RationalFunction(num, den, reduce=False), 5)
    assert (s * den).truncate(5) == num.truncate(5)


def test_series_needs_invertible_constant_term():
    u = MultiPoly.var(1, 0)
    with pytest.raises(NotExpandable):
        series_expand(RationalFunction(MultiPoly.constant(1), u), 3)


def test_rational_function_reduces():
    u = MultiPoly.var(1, 0)
    one = MultiPoly.constant(1)
    f = RationalFunction((one - u) * (one + u), (one - u) * (one - u))
    assert f.den.degree() == 1
    assert f == RationalFunction(one + u, one - u)


@given(st.lists(small, min_size=1, max_size=6))
def test_series_inverse_scalar(cs):
    if cs[0] == 0:
        return
    inv = series_inverse([Fraction(c) for c in cs], 6)
    for t in range(7):
        acc = sum(Fraction(cs[s]) * inv[t - s] for s in range(min(t, len(cs) - 1) + 1))
        assert acc == (1 if t == 0 else 0)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_matrix_inverse_exact(rows):
    m = np.array([[Fraction(x) for x in r] for r in rows], dtype=object)
    if sympy.Matrix(rows).det() == 0:
        with pytest.raises(ZeroDivisionError):
            matrix_inverse_exact(m)
        return
    inv = matrix_inverse_exact(m)
    assert np.array_equal(m @ inv, np.eye(3, dtype=int).astype(object))


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(polys(1, 2), min_size=n, max_size=n),
                                                  min_size=n, max_size=n)))
def test_bareiss_matches_cofactor(m):
    d = det_poly_matrix(m)
    ref = det_cofactor(m)
    assert d == (ref if isinstance(ref, MultiPoly) else MultiPoly.constant(1, ref))


@given(st.lists(st.lists(polys(1, 1), min_size=3, max_size=3), min_size=3, max_size=3))
def test_adjugate_identity(m):
    adj = adjugate_poly_matrix(m)
    d = det_poly_matrix(m)
    for i in range(3):
        for j in range(3):
            s = sum((m[i][k] * adj[k][j] for k in range(3)), MultiPoly.zero(1))
            assert s == (d if i == j else MultiPoly.zero(1))


def test_rational_matrix_inverse_and_singular():
    u = MultiPoly.var(1, 0)
    one = MultiPoly.constant(1)
    m = RationalMatrix.from_polys([[one, u], [MultiPoly.zero(1), one]])
    inv = m.inverse()
    assert inv.entry(0, 1) == RationalFunction(-u, one)
    sing = RationalMatrix.from_polys([[u, u], [u, u]])
    with pytest.raises(DivisionByZeroPoly):
        sing.inverse()
