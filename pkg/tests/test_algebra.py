from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import nonzero_polynomials, polynomials
from hypersum.algebra import (
    Polynomial,
    RatFunc,
    Unsolvable,
    dispersion_set,
    nonneg_integer_roots,
    poly_gcd,
    resultant,
    solve_linear,
)

k, a, b, j, n = (Polynomial.var(s) for s in "kabjn")


def test_gcd_examples():
    assert poly_gcd(k**2 - 1, k - 1) == k - 1
    p = 3 * k**2 + a
    assert poly_gcd(p, Polynomial(0)) == p.primitive()
    assert poly_gcd((k + a) * (k + 1), (k + a) * (k + 2)) == k + a


def test_resultant_examples():
    r = resultant(k - 1, k - j, "k")
    assert r in (j - 1, 1 - j)
    assert resultant(k**2, k + 1, "k") == Polynomial(1)
    # q = k, r = k - 2, so r(k + j) = k + j - 2
    r = resultant(k, k + j - 2, "k")
    assert r in (j - 2, 2 - j)


def test_nonneg_integer_roots():
    assert nonneg_integer_roots(j**2 - 3 * j + 2, "j") == {1, 2}
    assert nonneg_integer_roots(j + 1, "j") == set()
    assert nonneg_integer_roots(a * (j - 2), "j") == {2}
    assert nonneg_integer_roots(a * (j - 2) + (j - 3), "j") == set()


def test_dispersion_matches_resultant_roots():
    q = (k + 3) * (k - a) * (2 * k + 1)
    r = (k - 2) * (k + a + 4) * (2 * k - 5)
    res = resultant(q, r.shift("k", j), "k")
    assert dispersion_set(q, r) == sorted(nonneg_integer_roots(res, "j"))


def test_solve_linear_examples():
    assert solve_linear([[1, 0], [0, 1]], [a, b]) == [RatFunc(a), RatFunc(b)]
    assert solve_linear([[1, 1]], [n]) == [RatFunc(n), RatFunc(0)]
    with pytest.raises(Unsolvable):
        solve_linear([[1], [1]], [1, 2])


def test_solve_linear_parametric():
    m = [[RatFunc(a), RatFunc(1)], [RatFunc(1), RatFunc(k, a + 1)]]
    rhs = [RatFunc(k), RatFunc(b)]
    x = solve_linear(m, rhs)
    for row, want in zip(m, rhs):
        assert row[0] * x[0] + row[1] * x[1] == want


def test_ratfunc_normalization():
    r = RatFunc(2 * k**2 - 2, 4 * k - 4)
    # constant denominators fold into the numerator
    assert r.num == (k + 1) * Fraction(1, 2) and r.den == Polynomial(1)
    r = RatFunc(k, 4 * a - 2)
    assert r.den == 2 * a - 1 and r.num == k * Fraction(1, 2)
    assert RatFunc(-k, -a) == RatFunc(k, a)
    with pytest.raises(ZeroDivisionError):
        RatFunc(k, 0)


def test_ratfunc_evaluate_and_shift():
    r = RatFunc(k + a, k - 1)
    assert r.evaluate({"k": 3, "a": Fraction(1, 2)}) == Fraction(7, 4)
    assert r.shift("k", 1) == RatFunc(k + a + 1, k)


@settings(max_examples=120, deadline=None)
@given(nonzero_polynomials(), nonzero_polynomials())
def test_gcd_divides(p, q):
    g = poly_gcd(p, q)
    assert g.divides(p) and g.divides(q)
    assert p.exact_div(g) * g == p


@settings(max_examples=120, deadline=None)
@given(nonzero_polynomials(), nonzero_polynomials(), nonzero_polynomials())
def test_ratfunc_equality_is_cross_multiplication(p, q, r):
    x, y = RatFunc(p * r, q * r), RatFunc(p, q)
    assert x == y
    assert RatFunc(x.num, x.den) == x
    assert (x == RatFunc(q, p)) == (p * p == q * q)


@settings(max_examples=120, deadline=None)
@given(nonzero_polynomials(variables=("k", "a")), nonzero_polynomials(variables=("k", "a")))
def test_resultant_vanishes_iff_common_factor(p, q):
    if p.degree("k") == 0 or q.degree("k") == 0:
        return
    common = poly_gcd(p, q).degree("k") > 0
    assert resultant(p, q, "k").is_zero() == common


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(polynomials(variables=("a",), max_degree=2), min_size=3, max_size=3), min_size=2, max_size=3),
       st.lists(polynomials(variables=("a",), max_degree=2), min_size=3, max_size=3))
def test_solve_linear_substitutes_back(rows, rhs):
    rhs = rhs[: len(rows)]
    try:
        x = solve_linear(rows, rhs)
    except Unsolvable:
        return
    for row, want in zip(rows, rhs):
        total = RatFunc(0)
        for c, v in zip(row, x):
            total = total + RatFunc(c) * v
        assert total == RatFunc(want)
