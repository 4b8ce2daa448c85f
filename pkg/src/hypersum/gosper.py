"""Gosper's algorithm and its m-fold extension.

Convention: ``s`` is an antidifference of ``a`` when ``s(k) - s(k-1) = a(k)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .algebra import (
    Polynomial,
    RatFunc,
    Unsolvable,
    dispersion_set,
    poly_gcd,
    solve_polynomial_system,
)
from .parser import Expr
from .simplify import NotRational, collapse_sum, simplify_combinatorial, term_ratio
from .terms import HyperTerm, LinearArg, eval_limit

log = logging.getLogger(__name__)


class NoSolution(ArithmeticError):
    """No hypergeometric term antidifference exists."""

    def __init__(self, message: str = "no hypergeometric term antidifference exists"):
        super().__init__(message)


@dataclass(frozen=True)
class PqrDecomposition:
    p: Polynomial
    q: Polynomial
    r: Polynomial


@dataclass(frozen=True)
class GosperSolution:
    f: RatFunc
    antidifference_ratio: RatFunc
    pqr: PqrDecomposition


def pqr_decompose(u: Polynomial, v: Polynomial, k: str = "k") -> PqrDecomposition:
    """Split u/v as (p(k)/p(k-1)) * q(k)/r(k) with gcd(q(k), r(k+j)) = 1."""
    u, v = Polynomial(u), Polynomial(v)
    p = Polynomial(1)
    q, r = u, v
    for j in dispersion_set(q, r, k):
        while True:
            g = poly_gcd(q, r.shift(k, j))
            if g.degree(k) <= 0:
                break
            q = q.exact_div(g)
            r = r.exact_div(g.shift(k, -j))
            for i in range(j):
                p = p * g.shift(k, -i)
    return PqrDecomposition(p, q, r)


def _bound(p_degree: int, q: Polynomial, r: Polynomial, k: str) -> int:
    q1 = q.shift(k, 1)
    plus = q1 + r
    minus = q1 - r
    ds, dd = plus.degree(k), minus.degree(k)
    if ds <= dd:
        d = p_degree - dd
        if d < 0:
            raise NoSolution()
        return d
    candidates = [p_degree - ds + 1]
    lead = plus.coefficient(k, ds)
    sub = minus.coefficient(k, ds - 1) if ds >= 1 else Polynomial(0)
    ell = RatFunc(-2 * sub, lead)
    if ell.is_constant():
        value = ell.constant_value()
        if value.denominator == 1:
            candidates.append(int(value))
    candidates = [c for c in candidates if c >= 0]
    if not candidates:
        raise NoSolution()
    return max(candidates)


def degree_bound(d: PqrDecomposition, k: str = "k") -> int:
    """Upper bound for the degree of f in p = q(k+1) f(k) - r(k) f(k-1)."""
    return _bound(d.p.degree(k), d.q, d.r, k)


def solve_fequation(
    parts: Sequence[Polynomial], q: Polynomial, r: Polynomial, k: str = "k"
) -> tuple[RatFunc, list[RatFunc]]:
    """Solve q(k+1) f(k) - r(k) f(k-1) = parts[0] + sum_j s_j parts[j].

    Returns the polynomial f (with coefficients in the parameter field) and
    the k-free unknowns s_j.  Raises NoSolution.
    """
    d = _bound(max(p.degree(k) for p in parts), q, r, k)
    q1 = q.shift(k, 1)
    kk = Polynomial.var(k)
    columns: list[Polynomial] = []
    km1 = kk - 1
    pow_k = Polynomial(1)
    pow_km1 = Polynomial(1)
    for _ in range(d + 1):
        columns.append(q1 * pow_k - r * pow_km1)
        pow_k = pow_k * kk
        pow_km1 = pow_km1 * km1
    columns += [-p for p in parts[1:]]
    col_coeffs = [c.coefficients(k) for c in columns]
    rhs = parts[0].coefficients(k)
    height = max([len(c) for c in col_coeffs] + [len(rhs)])
    rows = []
    zero = Polynomial(0)
    for e in range(height):
        row = [cs[e] if e < len(cs) else zero for cs in col_coeffs]
        row.append(rhs[e] if e < len(rhs) else zero)
        rows.append(row)
    try:
        x = solve_polynomial_system(rows, len(columns))
    except Unsolvable:
        raise NoSolution() from None
    f = RatFunc(0)
    for i in range(d + 1):
        if not x[i].is_zero():
            f = f + x[i] * RatFunc(kk**i)
    return f, x[d + 1 :]


def solve_gosper(a: HyperTerm | Expr | Sequence[HyperTerm], k: str = "k") -> tuple[HyperTerm, GosperSolution]:
    """Run the pipeline on ``a``; returns (a as one term, solution)."""
    if not isinstance(a, HyperTerm):
        terms = a.num if isinstance(a, Expr) and a.is_term_sum() else a
        if isinstance(terms, Expr):
            raise NotRational(terms, "expected a sum of terms")
        a = collapse_sum(list(terms))
    if a.is_zero():
        raise ValueError("the summand is identically zero")
    ratio = term_ratio(a, k, 1)
    d = pqr_decompose(ratio.num, ratio.den, k)
    f, _ = solve_fequation([d.p], d.q, d.r, k)
    if f.is_zero():
        raise NoSolution()
    R = RatFunc(d.q.shift(k, 1)) * f / RatFunc(d.p)
    return a, GosperSolution(f, R, d)


def _check_antidifference(s: HyperTerm, a: HyperTerm, k: str, m: int) -> None:
    diff = Expr([s, -s.shift(k, -m)], [a])
    value = simplify_combinatorial(diff)
    if not (isinstance(value, RatFunc) and value.is_one()):
        raise AssertionError(f"antidifference check failed: {value}")


def gosper(a: HyperTerm, k: str = "k") -> HyperTerm:
    """Hypergeometric antidifference s of ``a``: s(k) - s(k-1) = a(k)."""
    a, sol = solve_gosper(a, k)
    s = a * sol.antidifference_ratio
    _check_antidifference(s, a, k, 1)
    return s


@dataclass(frozen=True)
class DefiniteSum:
    """s(hi) - s(lo - 1) for an antidifference s."""

    antidifference: HyperTerm
    var: str
    lo: LinearArg
    hi: LinearArg

    def expression(self) -> Expr:
        s, k = self.antidifference, self.var
        return Expr([s.substitute(k, self.hi), -s.substitute(k, self.lo - 1)])

    def evaluate(self, assignment: Mapping[str, Fraction | int]) -> Fraction:
        """Exact value; boundary terms are limits along the summation variable."""
        s, k = self.antidifference, self.var
        values = dict(assignment)
        top = eval_limit(s, {**values, k: self.hi.evaluate(values)}, k)
        bottom = eval_limit(s, {**values, k: (self.lo - 1).evaluate(values)}, k)
        return top - bottom


def gosper_definite(a: HyperTerm, k: str, lo, hi) -> DefiniteSum:
    """Sum of a(k) for lo <= k <= hi by telescoping."""
    return DefiniteSum(gosper(a, k), k, LinearArg.of(lo), LinearArg.of(hi))


def find_mfold(a: HyperTerm | Sequence[HyperTerm], k: str = "k") -> int:
    """lcm of the denominators of the ``k`` coefficients of all arguments."""
    terms = [a] if isinstance(a, HyperTerm) else list(a)
    m = 1
    for t in terms:
        for arg in t.linear_args():
            m = lcm(m, arg.coeff(k).denominator)
    return m


def extended_gosper(a: HyperTerm, k: str = "k", m: int = 1) -> HyperTerm:
    """m-fold antidifference: s(k) - s(k-m) = a(k)."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return gosper(a, k)
    b = a.scale(k, m)
    try:
        _, sol = solve_gosper(b, k)
    except NoSolution:
        raise NoSolution(f"no {m}-fold hypergeometric term antidifference exists") from None
    kk = Polynomial.var(k)
    R = sol.antidifference_ratio.compose({k: kk * Fraction(1, m)})
    s = a * R
    _check_antidifference(s, a, k, m)
    return s


def antidifference_from_mfold(s: HyperTerm, k: str = "k", m: int = 1) -> list[HyperTerm]:
    """Terms whose sum is an ordinary antidifference."""
    return [s.shift(k, -i) for i in range(m)]
