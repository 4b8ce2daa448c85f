"""Rational WZ certificates, classical and (m,l)-fold."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import Polynomial, RatFunc, format_ratfunc
from .gosper import NoSolution, find_mfold, solve_gosper
from .parser import parse_term
from .simplify import NotRational, ratio_of
from .terms import (
    HyperTerm,
    NonLinearArgument,
    NonRationalValue,
    PoleError,
    SymbolicValue,
    eval_symbolic,
)
from .zeilberger import NonTerminating, natural_sum

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    R: RatFunc
    m: int = 1
    l: int = 1

    def to_json(self) -> dict:
        return {"R": format_ratfunc(self.R), "m": self.m, "l": self.l}

    def __str__(self) -> str:
        return format_ratfunc(self.R)


def extended_wz_certificate(F: HyperTerm, k: str = "k", n: str = "n", m: int = 1, l: int = 1) -> Certificate:
    """R = G/F where G is the l-fold antidifference of F(n,k) - F(n-m,k)."""
    if m < 1 or l < 1:
        raise ValueError("strides must be positive")
    rho = ratio_of(F.shift(n, -m), F)
    factor = RatFunc(1) - rho
    if factor.is_zero():
        raise NoSolution("F(n,k) - F(n-m,k) vanishes identically")
    a = F * factor
    _, sol = solve_gosper(a.scale(k, l), k)
    Rb = sol.antidifference_ratio
    if l > 1:
        Rb = Rb.compose({k: Polynomial.var(k) * Fraction(1, l)})
    return Certificate(factor * Rb, m, l)


def wz_certificate(F: HyperTerm, k: str = "k", n: str = "n") -> Certificate:
    return extended_wz_certificate(F, k, n, 1, 1)


def verify_certificate(F: HyperTerm, cert: Certificate, k: str = "k", n: str = "n") -> bool:
    """The purely rational identity behind the telescoping argument."""
    m, l, R = cert.m, cert.l, cert.R
    down_k = ratio_of(F.shift(k, -l), F)
    down_n = ratio_of(F.shift(n, -m), F)
    return (RatFunc(1) - R + R.shift(k, -l) * down_k - down_n).is_zero()


def _random_params(F: HyperTerm, cert: Certificate, k: str, n: str, rng: random.Random) -> dict[str, Fraction]:
    names = set(F.coeff.variables()) | set(cert.R.variables())
    for arg in F.linear_args():
        names |= set(arg.items())
    for f, _ in F.factors:
        if f.kind == "exp":
            names |= set(f.args[0].variables())
    names -= {k, n}
    return {s: Fraction(rng.randint(-40, 40), rng.choice([7, 11, 13])) for s in sorted(names)}


def check_certificate_numeric(
    F: HyperTerm,
    cert: Certificate,
    k: str = "k",
    n: str = "n",
    points: int = 20,
    seed: int = 0,
    params: Mapping[str, Fraction] | None = None,
) -> bool:
    """F(n,k) - F(n-m,k) = G(n,k) - G(n,k-l) at random integer points."""
    rng = random.Random(seed)
    base = dict(params) if params is not None else _random_params(F, cert, k, n, rng)
    m, l, R = cert.m, cert.l, cert.R
    done = tries = 0
    while done < points:
        tries += 1
        if tries > 50 * points:
            return done > 0
        at = {**base, n: rng.randint(1, 12), k: rng.randint(-3, 15)}
        try:
            r_here = R.evaluate(at)
            r_back = R.evaluate({**at, k: at[k] - l})
            f = eval_symbolic(F, at, strict=True)
            f_k = eval_symbolic(F, {**at, k: at[k] - l}, strict=True)
            f_n = eval_symbolic(F, {**at, n: at[n] - m}, strict=True)
        except (PoleError, ZeroDivisionError):
            continue
        if not (f - f_n - f.scale(r_here) + f_k.scale(r_back)).is_zero():
            return False
        done += 1
    return True


@dataclass
class ProofReport:
    verdict: str  # proved | refuted | inapplicable | certified
    certificate: Certificate | None = None
    initial_values: list = field(default_factory=list)
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "initial_values": [str(v) for v in self.initial_values],
            "reason": self.reason,
        }


def _as_value(v) -> SymbolicValue:
    return v if isinstance(v, SymbolicValue) else SymbolicValue.of(Fraction(v))


def _class_value(F, rhs, k, n, i, values, target) -> tuple[bool, object]:
    """Compare the sum at n = i with ``target`` (times the rhs when given)."""
    quotient = F / rhs if rhs is not None else F
    try:
        got = natural_sum(quotient, k, {**values, n: i})
        return got == target, got
    except PoleError:
        if rhs is None:
            raise
    # the quotient is singular here: compare the summand with target * rhs
    got = natural_sum(F, k, {**values, n: i})
    want = eval_symbolic(rhs, {**values, n: i}).scale(target.rational())
    return got == want, got


def wz_prove(
    F: HyperTerm | str,
    k: str = "k",
    n: str = "n",
    m: int | None = None,
    l: int | None = None,
    auto: bool = True,
    expected: Sequence | None = None,
    params: Mapping[str, Fraction | int] | None = None,
    rhs: HyperTerm | str | None = None,
) -> ProofReport:
    """Prove sum_k F(n,k) = rhs(n), or that sum_k F is constant on classes mod m.

    ``expected`` lists the claimed class values for n = 0..m-1 (default all 1).
    Initial sums are exact, at ``params`` or at random rational parameters.
    Text input that is not an (m,l)-fold term gives the verdict inapplicable.
    """
    try:
        F = parse_term(F) if isinstance(F, str) else F
        rhs = parse_term(rhs) if isinstance(rhs, str) else rhs
    except NonLinearArgument as exc:
        return ProofReport("inapplicable", reason=f"NonLinearArgument: {exc}")
    quotient = F / rhs if rhs is not None else F
    try:
        if auto or m is None or l is None:
            m = m or find_mfold(quotient, n)
            l = l or find_mfold(quotient, k)
        cert = extended_wz_certificate(quotient, k, n, m, l)
        if not verify_certificate(quotient, cert, k, n):
            return ProofReport("refuted", cert, reason="certificate identity fails")
    except (NotRational, NoSolution, NonLinearArgument, ZeroDivisionError) as exc:
        return ProofReport("inapplicable", reason=f"{type(exc).__name__}: {exc}")
    rng = random.Random(1)
    values = _random_params(quotient, cert, k, n, rng)
    if params:
        values.update({s: Fraction(v) for s, v in params.items()})
    targets = list(expected) if expected is not None else [1] * m
    shown = []
    for i in range(m):
        target = _as_value(targets[i] if i < len(targets) else 1)
        try:
            ok, got = _class_value(F, rhs, k, n, i, values, target)
        except (PoleError, NonTerminating) as exc:
            return ProofReport("certified", cert, shown, f"initial value at n={i} unavailable: {exc}")
        try:
            shown.append(got.rational())
        except NonRationalValue:
            shown.append(got)
        if not ok:
            return ProofReport("refuted", cert, shown, f"initial value at n={i} differs from the claim")
    return ProofReport("proved", cert, shown)
