"""Rationality of term ratios: Gamma conversion plus two rewrite rules."""

from __future__ import annotations

from fractions import Fraction
from math import floor
from typing import Iterable, Sequence, Union

from .algebra import Polynomial, RatFunc
from .parser import Expr
from .terms import Factor, HyperTerm, LinearArg, exponential, gamma


class NotRational(ArithmeticError):
    """A ratio that should be rational kept non-rational factors."""

    def __init__(self, residual, message: str = "term ratio is not rational"):
        super().__init__(message)
        self.residual = residual


Simplifiable = Union[HyperTerm, Expr, Sequence[HyperTerm]]


def togamma(t: HyperTerm) -> HyperTerm:
    """Rewrite factorials, binomials and Pochhammer symbols through Gamma."""
    factors: list[tuple[Factor, int]] = []
    for f, p in t.factors:
        if f.kind == "fact":
            factors.append((gamma(f.args[0] + 1), p))
        elif f.kind == "binom":
            top, bottom = f.args
            factors += [(gamma(top + 1), p), (gamma(bottom + 1), -p), (gamma(top - bottom + 1), -p)]
        elif f.kind == "poch":
            base, count = f.args
            factors += [(gamma(base + count), p), (gamma(base), -p)]
        else:
            factors.append((f, p))
    return HyperTerm(t.coeff, factors)


def _class_key(arg: LinearArg) -> tuple:
    c = arg.constant
    return (tuple(sorted(arg.items().items())), c - floor(c))


class _Accumulator:
    """Product of linear polynomials with cancellation before expansion."""

    def __init__(self):
        self.count: dict[LinearArg, int] = {}

    def add(self, arg: LinearArg, p: int) -> None:
        self.count[arg] = self.count.get(arg, 0) + p

    def rising(self, arg: LinearArg, d: int, p: int) -> None:
        for i in range(d):
            self.add(arg + i, p)

    def value(self) -> RatFunc:
        num = Polynomial(1)
        den = Polynomial(1)
        for arg, p in self.count.items():
            if p > 0:
                num = num * arg.to_polynomial() ** p
            elif p < 0:
                den = den * arg.to_polynomial() ** (-p)
        return RatFunc(num, den)


def simplify_gamma(t: HyperTerm) -> HyperTerm:
    """Shift Gamma arguments at integer distance onto the smallest one."""
    classes: dict[tuple, list[tuple[LinearArg, int]]] = {}
    rest: list[tuple[Factor, int]] = []
    for f, p in t.factors:
        if f.kind == "gamma":
            classes.setdefault(_class_key(f.args[0]), []).append((f.args[0], p))
        else:
            rest.append((f, p))
    acc = _Accumulator()
    for members in classes.values():
        anchor = min(members, key=lambda ap: ap[0].constant)[0]
        net = 0
        for arg, p in members:
            d = int(arg.constant - anchor.constant)
            acc.rising(anchor, d, p)
            net += p
        if net:
            rest.append((gamma(anchor), net))
    if not acc.count:
        return HyperTerm(t.coeff, rest)
    return HyperTerm(t.coeff * acc.value(), rest)


def simplify_power(t: HyperTerm) -> HyperTerm:
    """Combine powers of a common base whose exponents differ by integers."""
    groups: dict[tuple, list[tuple[LinearArg, int]]] = {}
    rest: list[tuple[Factor, int]] = []
    for f, p in t.factors:
        if f.kind == "exp":
            base, e = f.args
            items = e.items()
            if items and next(iter(sorted(items.items())))[1] < 0:
                e, p = -e, -p  # x^(-e) = (x^e)^(-1)
            groups.setdefault((base, _class_key(e)), []).append((e, p))
        else:
            rest.append((f, p))
    coeff = t.coeff
    for (base, _), members in groups.items():
        anchor = min(members, key=lambda ep: ep[0].constant)[0]
        net = 0
        extra = 0
        for e, p in members:
            extra += int(e.constant - anchor.constant) * p
            net += p
        if extra:
            coeff = coeff * base**extra
        if net:
            rest.append((exponential(base, anchor), net))
    return HyperTerm(coeff, rest)


def _reduce(t: HyperTerm) -> HyperTerm:
    return simplify_power(simplify_gamma(togamma(t)))


def _terms_of(e: Simplifiable) -> tuple[list[HyperTerm], list[HyperTerm]]:
    if isinstance(e, (HyperTerm, RatFunc)):
        return [HyperTerm.of(e)], [HyperTerm(1)]
    if isinstance(e, Expr):
        return list(e.num), list(e.den)
    return list(e), [HyperTerm(1)]


def collapse_sum(terms: Sequence[HyperTerm]) -> HyperTerm:
    """Write a sum of terms as one term: t1 times a rational function.

    Raises NotRational when some t_i/t_1 is not rational.
    """
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        return HyperTerm(0)
    first = _reduce(terms[0])
    if len(terms) == 1:
        return first
    rho = RatFunc(1)
    for t in terms[1:]:
        q = _reduce(t) / first
        q = _reduce(q)
        if not q.is_rational():
            raise NotRational(q, "summands are not rational multiples of each other")
        rho = rho + q.coeff
    if rho.is_zero():
        return HyperTerm(0)
    return first * rho


def simplify_combinatorial(e: Simplifiable) -> RatFunc | HyperTerm | Expr:
    """Reduce an expression; returns a RatFunc whenever the result is rational."""
    num, den = _terms_of(e)
    try:
        top = collapse_sum(num)
        bottom = collapse_sum(den)
    except NotRational:
        return Expr([_reduce(t) for t in num], [_reduce(t) for t in den])
    if bottom.is_zero():
        raise ZeroDivisionError("denominator simplifies to zero")
    out = _reduce(top / bottom)
    return out.coeff if out.is_rational() else out


def term_ratio(a: Simplifiable, var: str, step: int = 1) -> RatFunc:
    """The rational function a / a(var -> var - step), or NotRational."""
    num, den = _terms_of(a)
    top = collapse_sum(num)
    bottom = collapse_sum(den)
    if top.is_zero():
        raise ZeroDivisionError("term is identically zero")
    t = _reduce(top / bottom)
    ratio = _reduce(t / t.shift(var, -step))
    if not ratio.is_rational():
        raise NotRational(ratio)
    return ratio.coeff


def ratio_of(a: HyperTerm, b: HyperTerm) -> RatFunc:
    """The rational function a/b, or NotRational."""
    r = _reduce(a / b)
    if not r.is_rational():
        raise NotRational(r)
    return r.coeff


def is_rational_multiple(a: HyperTerm, b: HyperTerm) -> bool:
    try:
        ratio_of(a, b)
    except NotRational:
        return False
    return True


def reduce_term(t: HyperTerm) -> HyperTerm:
    return _reduce(t)


