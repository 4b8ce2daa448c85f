"""Holonomic recurrences for definite sums by creative telescoping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd
from typing import Iterable, Mapping, Sequence

from .algebra import (
    Polynomial,
    RatFunc,
    format_factored,
    format_polynomial,
    nonneg_integer_roots,
    poly_gcd,
    poly_lcm,
)
from .gosper import NoSolution, find_mfold, pqr_decompose, solve_fequation
from .parser import parse_recurrence_polys, parse_ratfunc
from .simplify import NotRational, ratio_of, term_ratio
from .terms import HyperTerm, LinearArg, SymbolicValue, eval_symbolic, hyperterm

log = logging.getLogger(__name__)


class NoRecurrenceFound(ArithmeticError):
    def __init__(self, max_order: int):
        super().__init__(f"no recurrence of order <= {max_order} found")
        self.max_order = max_order


class NonTerminating(ValueError):
    """The summand does not vanish beyond a finite range of k."""


def _normalize(coeffs: Sequence[Polynomial]) -> list[Polynomial]:
    polys = [Polynomial(c) for c in coeffs]
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise ValueError("recurrence with all coefficients zero")
    g = nonzero[0]
    for p in nonzero[1:]:
        g = poly_gcd(g, p)
    polys = [p.exact_div(g) for p in polys]
    content = Fraction(0)
    for p in polys:
        if not p.is_zero():
            c = p.content()
            content = c if not content else Fraction(gcd(content.numerator, c.numerator), content.denominator * c.denominator // gcd(content.denominator, c.denominator))
    lead = next(p for p in polys if not p.is_zero()).leading_coefficient()
    if lead < 0:
        content = -content
    return [p.exact_div(content) for p in polys]


@dataclass(frozen=True)
class Recurrence:
    """sum_j coeffs[j](n) * S(n - j*stride) = 0, content-normalized."""

    coeffs: tuple[Polynomial, ...]
    stride: int = 1
    var: str = "n"
    certificate: RatFunc | None = field(default=None, compare=False)
    method: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_normalize(self.coeffs)))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def terms(self) -> dict[int, Polynomial]:
        return {j * self.stride: p for j, p in enumerate(self.coeffs) if not p.is_zero()}

    def same_as(self, other: "Recurrence") -> bool:
        """Equality of the relation, independent of stride bookkeeping."""
        return self.terms() == other.terms()

    def singular_points(self) -> set[int]:
        """n >= 0 where the certificate has a pole free of k: the telescoping breaks there."""
        if self.certificate is None:
            return set()
        _, factors = self.certificate.den.factor()
        out: set[int] = set()
        for f, _ in factors:
            if set(f.variables()) == {self.var}:
                out |= nonneg_integer_roots(f, self.var)
        return out

    def __str__(self) -> str:
        parts = []
        for offset, p in sorted(self.terms().items()):
            c = format_factored(RatFunc(p))
            sign = "+"
            if c.startswith("-"):
                sign, c = "-", c[1:]
            s = f"S({self.var})" if offset == 0 else f"S({self.var}-{offset})"
            body = s if c == "1" else f"{c}*{s}"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text + " = 0"

    def to_json(self) -> dict:
        return {"order": self.order, "stride": self.stride, "coeffs": [format_polynomial(p) for p in self.coeffs]}

    @staticmethod
    def from_json(data: Mapping) -> "Recurrence":
        return Recurrence(tuple(parse_ratfunc(c).num for c in data["coeffs"]), int(data["stride"]))

    @staticmethod
    def from_terms(terms: Mapping[int, Polynomial]) -> "Recurrence":
        offsets = [j for j, p in terms.items() if not p.is_zero()]
        stride = 0
        for j in offsets:
            stride = gcd(stride, j)
        stride = stride or 1
        top = max(offsets) // stride
        return Recurrence(tuple(terms.get(j * stride, Polynomial(0)) for j in range(top + 1)), stride)

    @staticmethod
    def parse(text: str) -> "Recurrence":
        lhs = text.split("=")[0]
        return Recurrence.from_terms(parse_recurrence_polys(lhs))


def _clear(values: Sequence[RatFunc]) -> list[Polynomial]:
    den = Polynomial(1)
    for v in values:
        den = poly_lcm(den, v.den)
    return [v.num * den.exact_div(v.den) for v in values]


def _creative_telescoping(F: HyperTerm, k: str, n: str, J: int) -> Recurrence:
    uv = term_ratio(F, k, 1)
    ratios = [ratio_of(F.shift(n, -j), F) for j in range(1, J + 1)]
    D = Polynomial(1)
    for r in ratios:
        D = poly_lcm(D, r.den)
    N = [r.num * D.exact_div(r.den) for r in ratios]
    t_ratio = uv * RatFunc(D.shift(k, -1), D)
    d = pqr_decompose(t_ratio.num, t_ratio.den, k)
    parts = [D * d.p] + [c * d.p for c in N]
    f, sigmas = solve_fequation(parts, d.q, d.r, k)
    cert = RatFunc(d.q.shift(k, 1)) * f / RatFunc(d.p * D)
    # telescoping witness: (F + sum s_j F(n-j)) / F = R - R(k-1) F(k-1)/F
    lhs = RatFunc(1)
    for s, r in zip(sigmas, ratios):
        lhs = lhs + s * r
    rhs = cert - cert.shift(k, -1) / uv
    if lhs != rhs:
        raise AssertionError("telescoping identity failed")
    return Recurrence(tuple(_clear([RatFunc(1)] + list(sigmas))), 1, n, certificate=cert, method="zeilberger")


def sumrecursion_order(F: HyperTerm, k: str = "k", n: str = "n", J: int = 1) -> Recurrence:
    try:
        return _creative_telescoping(F, k, n, J)
    except NoSolution:
        raise NoRecurrenceFound(J) from None


def sumrecursion(F: HyperTerm, k: str = "k", n: str = "n", max_order: int = 5) -> Recurrence:
    """Minimal-order recurrence for the sum over k of F(n, k)."""
    for J in range(1, max_order + 1):
        try:
            return _creative_telescoping(F, k, n, J)
        except NoSolution:
            log.debug("no recurrence of order %d", J)
    raise NoRecurrenceFound(max_order)


def extended_sumrecursion(
    F: HyperTerm, k: str = "k", n: str = "n", m: int = 1, l: int = 1, max_order: int = 5
) -> Recurrence:
    """Recurrence with stride m from Zeilberger on F(m n, l k)."""
    scaled = F.scale(n, m).scale(k, l)
    rec = sumrecursion(scaled, k, n, max_order)
    if m == 1 and l == 1:
        return rec
    nn = Polynomial.var(n)
    back = {n: nn * Fraction(1, m)}
    coeffs = [p.compose(back) for p in rec.coeffs]
    cert = rec.certificate.compose({n: nn * Fraction(1, m), k: Polynomial.var(k) * Fraction(1, l)})
    return Recurrence(tuple(coeffs), m, n, certificate=cert, method=f"extended(m={m},l={l})")


def hyperrecursion(
    upper: Iterable, lower: Iterable, x: RatFunc | int | Fraction, n: str = "n", max_order: int = 5
) -> Recurrence:
    """Recurrence for pFq(upper; lower; x) as a function of n."""
    F = hyperterm(list(upper), list(lower), x, "k")
    try:
        rec = sumrecursion(F, "k", n, max_order)
        log.info("hyperrecursion: plain Zeilberger succeeded")
        return rec
    except (NotRational, NoRecurrenceFound) as exc:
        m, l = find_mfold(F, n), find_mfold(F, "k")
        if m == 1 and l == 1:
            raise
        log.info("hyperrecursion: plain attempt failed (%s); using m=%d, l=%d", exc, m, l)
        return extended_sumrecursion(F, "k", n, m, l, max_order)


def _k_bound(F: HyperTerm, k: str, values: Mapping[str, Fraction]) -> int:
    consts = [Fraction(0)]
    slopes = []
    for arg in F.linear_args():
        c = arg.coeff(k)
        rest = arg.substitute(k, LinearArg.of(0)).evaluate(values)
        consts.append(abs(rest))
        if c:
            slopes.append(abs(c))
    scale_ = min(slopes) if slopes else Fraction(1)
    return int(ceil(max(consts) / scale_)) + 2


def natural_sum(F: HyperTerm, k: str, assignment: Mapping[str, Fraction | int]) -> SymbolicValue:
    """Exact sum of F over k >= 0, which must have finite support."""
    values = {s: Fraction(v) for s, v in assignment.items()}
    K = _k_bound(F, k, values)
    total = SymbolicValue()
    j = 0
    while True:
        while j <= K:
            total = total + eval_symbolic(F, {**values, k: j})
            j += 1
        tail = [eval_symbolic(F, {**values, k: K + i}) for i in range(1, 4)]
        if all(t.is_zero() for t in tail):
            return total
        if K > 2000:
            raise NonTerminating("summand does not terminate")
        K *= 2


def verify_recurrence_numeric(
    rec: Recurrence,
    F: HyperTerm,
    k: str,
    n_values: Iterable[int],
    assignment: Mapping[str, Fraction | int] | None = None,
) -> bool:
    """Check the recurrence on exact finite sums for each n given.

    Values of n below the order or at poles of the certificate are skipped.
    """
    assignment = dict(assignment or {})
    n = rec.var
    cache: dict[int, SymbolicValue] = {}

    def S(N: int) -> SymbolicValue:
        if N not in cache:
            cache[N] = natural_sum(F, k, {**assignment, n: N})
        return cache[N]

    span = rec.order * rec.stride
    singular = rec.singular_points()
    for N in n_values:
        if N - span < 0 or N in singular:
            continue
        total = SymbolicValue()
        for offset, p in rec.terms().items():
            c = p.evaluate({**assignment, n: N})
            if c:
                total = total + S(N - offset).scale(c)
        if not total.is_zero():
            return False
    return True


def matches_modulo(rec: Recurrence, expected: Recurrence, var: str, minpoly: Polynomial) -> bool:
    """Equality up to a scalar after reducing coefficients modulo minpoly(var)."""

    def reduce(p: Polynomial) -> Polynomial:
        d = minpoly.degree(var)
        lead = minpoly.coefficient(var, d)
        tail = minpoly - lead * Polynomial.var(var) ** d
        out = Polynomial(0)
        coeffs = p.coefficients(var)
        # repeatedly replace var^d by -tail/lead
        while len(coeffs) > d:
            e = len(coeffs) - 1
            c = coeffs[e]
            p = p - c * Polynomial.var(var) ** e + (c * Polynomial.var(var) ** (e - d) * (-tail)).exact_div(lead)
            coeffs = p.coefficients(var)
        for e, c in enumerate(coeffs):
            out = out + c * Polynomial.var(var) ** e
        return out

    got = {j: reduce(p) for j, p in rec.terms().items()}
    want = expected.terms()
    if all(p.is_zero() for p in got.values()):
        return False
    offsets = set(got) | set(want)
    items = [(got.get(j, Polynomial(0)), want.get(j, Polynomial(0))) for j in offsets]
    for gi, wi in items:
        for gj, wj in items:
            if not reduce(gi * wj - gj * wi).is_zero():
                return False
    return True
