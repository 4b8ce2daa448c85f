from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import hyperterms, linear_args
from hypersum.algebra import Polynomial, RatFunc
from hypersum.parser import parse_term
from hypersum.terms import (
    HyperTerm,
    LinearArg,
    NonRationalValue,
    PoleError,
    UnassignedSymbol,
    eval_at,
    eval_symbolic,
    hyperterm,
    scale,
    shift,
)

T = parse_term


def test_shift_examples():
    assert shift(T("binomial(n,k)"), "n", -1) == T("binomial(n-1,k)")
    assert shift(T("Gamma(2*k)"), "k", -1) == T("Gamma(2*k-2)")
    assert shift(T("(k/2)!"), "k", -2) == T("(k/2-1)!")


def test_scale_examples():
    assert scale(T("k*(k/2)!"), "k", 2) == T("2*k*k!")
    assert scale(T("binomial(k/3,n)"), "k", 3) == T("binomial(k,n)")
    t = T("binomial(n,k)^2*2^k/(a+k)")
    assert scale(t, "k", 1) == t


def test_hyperterm_constructor():
    assert hyperterm(["a", "b"], ["c"], 1, "k") == T("pochhammer(a,k)*pochhammer(b,k)/(pochhammer(c,k)*k!)")
    assert hyperterm([], [], RatFunc.var("x"), "k") == T("x^k/k!")
    assert hyperterm([LinearArg.from_items({"n": -1})], [], 1, "k") == T("pochhammer(-n,k)/k!")


def test_eval_examples():
    assert eval_at(T("2^(-n)*binomial(n,k)"), {"n": 4, "k": 2}) == Fraction(3, 8)
    assert eval_at(T("pochhammer(a,k)"), {"a": Fraction(1, 2), "k": 3}) == Fraction(15, 8)
    with pytest.raises(PoleError):
        eval_at(T("Gamma(k)"), {"k": 0})


def test_eval_conventions():
    # binomial(n,k) vanishes outside 0 <= k <= n for integer n
    assert eval_at(T("binomial(n,k)"), {"n": 3, "k": 5}) == 0
    assert eval_at(T("binomial(n,k)"), {"n": 3, "k": -1}) == 0
    assert eval_at(T("binomial(-2,k)"), {"k": 3}) == -4
    assert eval_at(T("pochhammer(-n,k)"), {"n": 2, "k": 3}) == 0
    assert eval_at(T("1/k!"), {"k": -2}) == 0
    with pytest.raises(UnassignedSymbol):
        eval_at(T("a*k"), {"k": 1})


def test_symbolic_values():
    v = eval_symbolic(T("Gamma(k+1/2)"), {"k": 2})
    with pytest.raises(NonRationalValue):
        v.rational()
    w = eval_symbolic(T("Gamma(k+1/2)"), {"k": 1}).scale(Fraction(3, 2))
    assert v == w


def test_strict_evaluation():
    t = T("(k-1)*Gamma(k-1)")
    assert eval_symbolic(t, {"k": 1}).is_zero()
    with pytest.raises(PoleError):
        eval_symbolic(t, {"k": 1}, strict=True)


@settings(max_examples=150, deadline=None)
@given(hyperterms(), st.integers(-3, 3), st.integers(-3, 3), st.sampled_from(["k", "n"]))
def test_shift_composes(t, d1, d2, var):
    assert shift(shift(t, var, d1), var, d2) == shift(t, var, d1 + d2)


@settings(max_examples=150, deadline=None)
@given(hyperterms(), st.integers(1, 3), st.integers(1, 3), st.sampled_from(["k", "n"]))
def test_scale_composes(t, f1, f2, var):
    assert scale(scale(t, var, f1), var, f2) == scale(t, var, f1 * f2)


@settings(max_examples=120, deadline=None)
@given(st.lists(linear_args(variables=("n", "a")), max_size=3), st.lists(linear_args(variables=("n", "a")), max_size=3),
       st.sampled_from([1, 2, Fraction(-1, 3)]))
def test_hyperterm_at_zero_is_one(upper, lower, x):
    values = {"n": Fraction(3, 7), "a": Fraction(5, 11)}
    t = hyperterm(upper, lower, x, "k")
    assert eval_at(t, {**values, "k": 0}) == 1


@settings(max_examples=120, deadline=None)
@given(hyperterms(max_factors=4), st.integers(-2, 6))
def test_eval_respects_shift(t, j):
    values = {"n": Fraction(5, 13), "a": Fraction(-7, 17), "b": Fraction(2, 19)}
    try:
        lhs = eval_symbolic(shift(t, "k", -1), {**values, "k": j}, strict=True)
        rhs = eval_symbolic(t, {**values, "k": j - 1}, strict=True)
    except (PoleError, ZeroDivisionError):
        assume(False)
    assert lhs == rhs


def test_polynomial_coefficient_folds():
    t = HyperTerm(Polynomial.var("k"), [])
    assert t.is_rational() and eval_at(t, {"k": 7}) == 7
