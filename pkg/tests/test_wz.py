from __future__ import annotations

import random
from fractions import Fraction
from math import comb

from hypersum.algebra import RatFunc
from hypersum.parser import parse_ratfunc, parse_term
from hypersum.terms import eval_symbolic
from hypersum.wz import (
    Certificate,
    check_certificate_numeric,
    extended_wz_certificate,
    verify_certificate,
    wz_certificate,
    wz_prove,
)
from hypersum.zeilberger import natural_sum

T, R = parse_term, parse_ratfunc
BINOMIAL = T("2^(-n)*binomial(n,k)")
VANDERMONDE = T("hyperterm([-n,b],[c],1,k)*pochhammer(c,n)/pochhammer(c-b,n)")
KUMMER = T("hyperterm([a,-n],[1+a+n],-1,k)*pochhammer(1+a/2,n)/pochhammer(1+a,n)")
GS11 = T("hyperterm([-n,n+3*a,a],[3*a/2,(3*a+1)/2],3/4,k)")
GS11_RHS = T("n!*pochhammer(a+1,n/3)/((n/3)!*pochhammer(3*a+1,n))")
WATSON = T("hyperterm([-n,b,c],[(-n+b+1)/2,2*c],1,k)")
WATSON_RHS = T(
    "gamma(1/2)*gamma((1+2*c)/2)*gamma((1-n+b)/2)*gamma((1+n-b+2*c)/2)"
    "/(gamma((1-n)/2)*gamma((1+b)/2)*gamma((1+n+2*c)/2)*gamma((1-b+2*c)/2))"
)
HALF = T("(-2)^n*binomial(n,k)*binomial(k/2,n)*(-1)^k")


def test_binomial_certificate():
    cert = wz_certificate(BINOMIAL)
    assert cert.R == R("(k-n)/n")
    assert verify_certificate(BINOMIAL, Certificate(R("(k-n)/n")))
    assert not verify_certificate(BINOMIAL, Certificate(R("(k-n)/n + 1")))


def test_table_rows():
    assert wz_certificate(VANDERMONDE).R == R("-(b+k)*(-n+k)/(n*(c+n-1))")
    assert wz_certificate(KUMMER).R == R("(a+k)*(-n+k)/(n*(a+2*n))")


def test_extended_rows():
    cert = extended_wz_certificate(GS11 / GS11_RHS, "k", "n", 3, 1)
    assert cert.R == R("3*(a+k)*(n-k)*(3*a+2*n-3)/((n+3*a+k-2)*(n+3*a+k-1)*n)")
    cert = extended_wz_certificate(WATSON / WATSON_RHS, "k", "n", 2, 1)
    assert cert.R == R("-2*(c+k)*(b+k)*(n-k)/((-1+n+2*c)*(-b+n-1-2*k)*n)")
    cert = extended_wz_certificate(HALF, "k", "n", 1, 2)
    assert cert.R == R("(-k+n-1)*(-k+n)/((n-1)*(-k+2*n-2))")
    assert verify_certificate(HALF, cert)


def test_self_consistency_and_numeric():
    for F, m, l in ((BINOMIAL, 1, 1), (VANDERMONDE, 1, 1), (KUMMER, 1, 1), (GS11 / GS11_RHS, 3, 1), (HALF, 1, 2)):
        cert = extended_wz_certificate(F, "k", "n", m, l)
        assert verify_certificate(F, cert)
        assert check_certificate_numeric(F, cert, points=20, seed=3)


def test_numeric_check_rejects_wrong_certificate():
    assert not check_certificate_numeric(BINOMIAL, Certificate(R("(k-n)/n + 1")), points=20)


def test_json():
    cert = wz_certificate(BINOMIAL)
    data = cert.to_json()
    assert data["m"] == 1 and data["l"] == 1
    assert R(data["R"]) == cert.R


def test_prove_binomial_theorem():
    report = wz_prove(BINOMIAL)
    assert report.verdict == "proved"
    assert report.initial_values == [1]


def test_prove_gs11_classes():
    report = wz_prove(GS11, rhs=GS11_RHS, expected=[1, 0, 0])
    assert report.verdict == "proved"
    assert report.certificate.m == 3 and report.initial_values == [1, 0, 0]
    # the sum itself vanishes off the multiples of three
    values = {"a": Fraction(2, 7)}
    for n in range(1, 10):
        s = natural_sum(GS11, "k", {**values, "n": n}).rational()
        assert (s == 0) == (n % 3 != 0)


def test_prove_refutes_false_claim():
    report = wz_prove(BINOMIAL, expected=[2])
    assert report.verdict == "refuted"


def test_gs19_inapplicable():
    # the symbolic s makes the arguments nonlinear, so no (m,l)-fold term exists
    F = "hyperterm([-s*b+s+1,b-1,-n],[b+1,s*(-n-b)-n],1,k)"
    rhs = "pochhammer(1+s+s*n,n)*b*(n+1)/(pochhammer(1+s*(b+n),n)*(b+n))"
    report = wz_prove(F, rhs=rhs)
    assert report.verdict == "inapplicable" and "NonLinearArgument" in report.reason


def _vandermonde_sum(n: int, b: Fraction, c: Fraction) -> Fraction:
    total, term = Fraction(0), Fraction(1)
    for j in range(n + 1):
        total += term
        term = term * (-n + j) * (b + j) / ((c + j) * (j + 1))
    return total


def _rising(x: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= x + i
    return out


def test_proved_identities_hold_numerically():
    rng = random.Random(11)
    for _ in range(5):
        b = Fraction(rng.randrange(1, 400), 97)
        c = Fraction(rng.randrange(1, 400), 101)
        for n in range(11):
            assert _vandermonde_sum(n, b, c) == _rising(c - b, n) / _rising(c, n)
            got = natural_sum(VANDERMONDE, "k", {"n": n, "b": b, "c": c})
            assert got.rational() == 1
    for n in range(11):
        assert natural_sum(BINOMIAL, "k", {"n": n}).rational() == sum(comb(n, j) for j in range(n + 1)) / 2**n


def test_watson_prove_with_rhs():
    report = wz_prove(WATSON, rhs=WATSON_RHS)
    assert report.verdict == "proved"
    assert report.certificate.m == 2


def test_eval_of_rhs_consistent():
    v = eval_symbolic(GS11_RHS, {"n": 3, "a": Fraction(2, 7)})
    assert v.rational() == Fraction(6, 1) * Fraction(9, 7) / (_rising(Fraction(13, 7), 3))
