"""Recursive-descent parser and canonical printer for term expressions.

Grammar (whitespace is ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := postfix ("^" unary)?
    postfix := primary "!"*
    primary := INT | NAME | NAME "(" args ")" | "(" expr ")" | list

Names are ``k``, ``n``, one-letter parameters and ``pi``.  Functions:
``factorial``, ``Gamma``, ``binomial``, ``pochhammer``, ``hyperterm`` and
``hyper``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .algebra import PARAMETERS, Polynomial, RatFunc, format_polynomial
from .terms import (
    Factor,
    HyperSeries,
    HyperTerm,
    LinearArg,
    NonLinearArgument,
    binom,
    exponential,
    fact,
    format_linear,
    gamma,
    hyperterm,
    poch,
)


class ParseError(SyntaxError):
    """Malformed input; ``offset`` is the 0-based byte position."""

    def __init__(self, message: str, text: str = "", offset: int = 0):
        super().__init__(f"{message} at offset {offset}")
        self.msg = message
        self.text = text
        self.offset = offset


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")

_SYMBOLS = {"k", "n", *PARAMETERS}
_FUNCTIONS = {
    "factorial": "fact",
    "Gamma": "gamma",
    "GAMMA": "gamma",
    "gamma": "gamma",
    "binomial": "binom",
    "pochhammer": "poch",
}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    data = text.encode("utf-8")
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        start = len(text[: m.start(m.lastindex)].encode("utf-8"))
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(_Tok("name", m.group(2), start))
        else:
            toks.append(_Tok("op", m.group(3), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(data)))
    return toks


class Expr:
    """A quotient of sums of hypergeometric terms."""

    __slots__ = ("num", "den")

    def __init__(self, num: list[HyperTerm], den: list[HyperTerm] | None = None):
        self.num = _collect(num)
        self.den = _collect(den) if den is not None else [HyperTerm(1)]
        if not self.den:
            raise ZeroDivisionError("division by zero")
        if len(self.den) == 1:
            d = self.den[0]
            self.num = _collect([t / d for t in self.num])
            self.den = [HyperTerm(1)]
        elif all(t.is_rational() for t in self.den):
            d = HyperTerm(sum((t.coeff for t in self.den), RatFunc(0)))
            self.num = _collect([t / d for t in self.num])
            self.den = [HyperTerm(1)]

    @staticmethod
    def of(value) -> "Expr":
        if isinstance(value, Expr):
            return value
        return Expr([HyperTerm.of(value)])

    def is_term_sum(self) -> bool:
        return len(self.den) == 1 and self.den[0] == HyperTerm(1)

    def __add__(self, other: "Expr") -> "Expr":
        if self.is_term_sum() and other.is_term_sum():
            return Expr(self.num + other.num)
        return Expr(_mul_sums(self.num, other.den) + _mul_sums(other.num, self.den), _mul_sums(self.den, other.den))

    def __neg__(self) -> "Expr":
        return Expr([-t for t in self.num], self.den)

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, other: "Expr") -> "Expr":
        return Expr(_mul_sums(self.num, other.num), _mul_sums(self.den, other.den))

    def __truediv__(self, other: "Expr") -> "Expr":
        if not other.num:
            raise ZeroDivisionError("division by zero")
        return Expr(_mul_sums(self.num, other.den), _mul_sums(self.den, other.num))

    def __pow__(self, e: int) -> "Expr":
        if e < 0:
            return Expr.of(1) / (self ** (-e))
        out = Expr.of(1)
        for _ in range(e):
            out = out * self
        return out

    def single(self) -> HyperTerm | None:
        if self.is_term_sum():
            if not self.num:
                return HyperTerm(0)
            if len(self.num) == 1:
                return self.num[0]
        return None

    def rational(self) -> RatFunc | None:
        """Value as a rational function if all terms are rational."""
        if all(t.is_rational() for t in self.num) and all(t.is_rational() for t in self.den):
            num = sum((t.coeff for t in self.num), RatFunc(0))
            den = sum((t.coeff for t in self.den), RatFunc(0))
            return num / den
        return None


def _collect(terms: list[HyperTerm]) -> list[HyperTerm]:
    groups: dict[tuple, HyperTerm] = {}
    order = []
    for t in terms:
        if t.is_zero():
            continue
        key = t.factors
        if key in groups:
            groups[key] = HyperTerm(groups[key].coeff + t.coeff, key)
        else:
            groups[key] = t
            order.append(key)
    return [groups[key] for key in order if not groups[key].is_zero()]


def _mul_sums(a: list[HyperTerm], b: list[HyperTerm]) -> list[HyperTerm]:
    return [x * y for x in a for y in b]


Parsed = Union[HyperTerm, HyperSeries, Expr]


class _Parser:
    def __init__(self, text: str, env: Mapping[str, "Expr"] | None, recurrence: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.env = dict(env or {})
        self.recurrence = recurrence

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.text, tok.pos)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, op: str) -> bool:
        t = self.peek()
        if t.kind == "op" and t.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            raise self.error(f"expected {op!r}")

    def parse_top(self):
        t = self.peek()
        if t.kind == "name" and t.text == "hyper" and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            series = self.parse_series_args()
            self.expect(")")
            if self.peek().kind != "end":
                raise self.error("unexpected input after hyper(...)")
            return series
        value = self.expr()
        if self.peek().kind != "end":
            raise self.error("unexpected token")
        return value

    def expr(self) -> Expr:
        value = self.term()
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> Expr:
        value = self.unary()
        while True:
            if self.accept("*"):
                value = value * self.unary()
            elif self.peek().kind == "op" and self.peek().text == "/":
                tok = self.next()
                rhs = self.unary()
                if not rhs.num:
                    raise ParseError("division by zero", self.text, tok.pos)
                value = value / rhs
            else:
                return value

    def unary(self) -> Expr:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.postfix()
        if self.peek().kind == "op" and self.peek().text in ("^", "**"):
            tok = self.next()
            exponent = self.unary()
            return self.raise_power(base, exponent, tok)
        return base

    def raise_power(self, base: Expr, exponent: Expr, tok: _Tok) -> Expr:
        e = exponent.rational()
        if e is not None and e.is_constant() and e.constant_value().denominator == 1:
            return base ** int(e.constant_value())
        arg = self.linear(exponent, tok)
        b = base.rational()
        if b is None or not b.free_of("k", "n"):
            raise NonLinearArgument(f"cannot raise a non-constant base to the power {format_linear(arg)}")
        if b.is_zero():
            raise ParseError("zero raised to a symbolic power", self.text, tok.pos)
        return Expr.of(HyperTerm(1, [(exponential(b, arg), 1)]))

    def postfix(self) -> Expr:
        value = self.primary()
        while self.peek().kind == "op" and self.peek().text == "!":
            tok = self.next()
            value = Expr.of(HyperTerm(1, [(fact(self.linear(value, tok)), 1)]))
        return value

    def linear(self, value: Expr, tok: _Tok) -> LinearArg:
        r = value.rational()
        if r is None or not r.is_polynomial():
            raise NonLinearArgument(f"argument at offset {tok.pos} is not rational-linear")
        return LinearArg.from_polynomial(r.num.exact_div(r.den))

    def args(self) -> list[tuple[Expr, _Tok]]:
        out = []
        self.expect("(")
        if self.accept(")"):
            return out
        while True:
            tok = self.peek()
            out.append((self.expr(), tok))
            if self.accept(")"):
                return out
            self.expect(",")

    def parse_list(self) -> list[tuple[Expr, _Tok]]:
        close = {"[": "]", "{": "}"}
        t = self.peek()
        if t.kind != "op" or t.text not in close:
            raise self.error("expected a parameter list")
        self.next()
        end = close[t.text]
        out = []
        if self.accept(end):
            return out
        while True:
            tok = self.peek()
            out.append((self.expr(), tok))
            if self.accept(end):
                return out
            self.expect(",")

    def parse_series_args(self) -> HyperSeries:
        upper = [self.linear(e, t) for e, t in self.parse_list()]
        self.expect(",")
        lower = [self.linear(e, t) for e, t in self.parse_list()]
        self.expect(",")
        x = self.expr().rational()
        if x is None:
            raise self.error("series argument must be rational")
        return HyperSeries(tuple(upper), tuple(lower), x)

    def primary(self) -> Expr:
        t = self.next()
        if t.kind == "int":
            return Expr.of(int(t.text))
        if t.kind == "op" and t.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if t.kind == "name":
            name = t.text
            follows_paren = self.peek().kind == "op" and self.peek().text == "("
            if name in _FUNCTIONS and follows_paren:
                kind = _FUNCTIONS[name]
                args = self.args()
                want = 1 if kind in ("fact", "gamma") else 2
                if len(args) != want:
                    raise ParseError(f"{name} takes {want} argument(s)", self.text, t.pos)
                lin = [self.linear(e, tok) for e, tok in args]
                factor = {"fact": fact, "gamma": gamma, "binom": binom, "poch": poch}[kind](*lin)
                return Expr.of(HyperTerm(1, [(factor, 1)]))
            if name == "hyperterm" and follows_paren:
                self.expect("(")
                series = self.parse_series_args()
                self.expect(",")
                var = self.next()
                if var.kind != "name" or var.text not in ("k", "n"):
                    raise self.error("hyperterm index must be k or n", var)
                self.expect(")")
                return Expr.of(hyperterm(series.upper, series.lower, series.argument, var.text))
            if self.recurrence and name in ("S", "summ", "Sigma") and follows_paren:
                args = self.args()
                if len(args) != 1:
                    raise ParseError("S takes one argument", self.text, t.pos)
                r = args[0][0].rational()
                d = None
                if r is not None and r.is_polynomial():
                    shift = r.num.exact_div(r.den) - Polynomial.var("n")
                    if shift.is_constant() and shift.constant_value().denominator == 1 and shift.constant_value() <= 0:
                        d = -int(shift.constant_value())
                if d is None or d > 15:
                    raise ParseError("recurrence terms must look like S(n-j)", self.text, t.pos)
                return Expr.of(Polynomial.var(f"S{d}_"))
            if follows_paren:
                raise ParseError(f"unknown function {name!r}", self.text, t.pos)
            if name in self.env:
                return self.env[name]
            if name in _SYMBOLS:
                return Expr.of(Polynomial.var(name))
            raise ParseError(f"unknown symbol {name!r}", self.text, t.pos)
        if t.kind == "end":
            raise ParseError("unexpected end of input", self.text, t.pos)
        raise ParseError(f"unexpected {t.text!r}", self.text, t.pos)


def _env(subs: Mapping[str, str] | None) -> dict[str, Expr]:
    env: dict[str, Expr] = {}
    for name, text in (subs or {}).items():
        value = _Parser(text, {}, False).parse_top()
        if not isinstance(value, Expr):
            raise ParseError(f"substitution for {name} must be an expression", text, 0)
        env[name] = value
    return env


def parse_expression(text: str, subs: Mapping[str, str] | None = None) -> Expr:
    value = _Parser(text, _env(subs), False).parse_top()
    if not isinstance(value, Expr):
        raise ParseError("expected an expression, got a series", text, 0)
    return value


def parse(text: str, subs: Mapping[str, str] | None = None) -> Parsed:
    """Parse to a HyperTerm, a HyperSeries, or a general quotient of sums."""
    value = _Parser(text, _env(subs), False).parse_top()
    if isinstance(value, HyperSeries):
        return value
    single = value.single()
    return single if single is not None else value


def parse_term(text: str, subs: Mapping[str, str] | None = None) -> HyperTerm:
    value = parse(text, subs)
    if not isinstance(value, HyperTerm):
        raise ParseError("expected a single hypergeometric term", text, 0)
    return value


def parse_ratfunc(text: str, subs: Mapping[str, str] | None = None) -> RatFunc:
    value = parse_expression(text, subs).rational()
    if value is None:
        raise ParseError("expected a rational function", text, 0)
    return value


def parse_linear(text: str, subs: Mapping[str, str] | None = None) -> LinearArg:
    r = parse_ratfunc(text, subs)
    if not r.is_polynomial():
        raise NonLinearArgument(f"{text!r} is not linear")
    return LinearArg.from_polynomial(r.num.exact_div(r.den))


def parse_linear_list(text: str, subs: Mapping[str, str] | None = None) -> list[LinearArg]:
    p = _Parser(text, _env(subs), False)
    items = p.parse_list()
    if p.peek().kind != "end":
        raise p.error("unexpected token after list")
    return [p.linear(e, t) for e, t in items]


def parse_recurrence_polys(text: str, subs: Mapping[str, str] | None = None) -> dict[int, Polynomial]:
    """``P0(n)*S(n) + P1(n)*S(n-1) + ... `` as a map shift -> coefficient."""
    value = _Parser(text, _env(subs), True).parse_top()
    if isinstance(value, HyperSeries):
        raise ParseError("expected a recurrence", text, 0)
    r = value.rational()
    if r is None or not r.is_polynomial():
        raise ParseError("recurrence coefficients must be polynomial", text, 0)
    poly = r.num.exact_div(r.den)
    out: dict[int, Polynomial] = {}
    for j in range(16):
        name = f"S{j}_"
        c = poly.coefficient(name, 1)
        if poly.degree(name) > 1:
            raise ParseError("recurrence must be linear in S", text, 0)
        if not c.is_zero():
            out[j] = c.compose({f"S{i}_": Polynomial(0) for i in range(16)})
    rest = poly.compose({f"S{i}_": Polynomial(0) for i in range(16)})
    if not rest.is_zero():
        raise ParseError("recurrence has a term without S(...)", text, 0)
    return out


# printing


def _paren_linear(arg: LinearArg) -> str:
    s = format_linear(arg)
    simple = re.fullmatch(r"[a-z]+|\d+", s)
    return s if simple else f"({s})"


def format_factor(f: Factor) -> str:
    if f.kind == "exp":
        base, e = f.args
        b = format_ratfunc_atom(base)
        return f"{b}^{_paren_linear(e)}"
    if f.kind == "fact":
        return f"{_paren_linear(f.args[0])}!"
    if f.kind == "gamma":
        return f"Gamma({format_linear(f.args[0])})"
    if f.kind == "binom":
        return f"binomial({format_linear(f.args[0])},{format_linear(f.args[1])})"
    return f"pochhammer({format_linear(f.args[0])},{format_linear(f.args[1])})"


def format_ratfunc_atom(r: RatFunc) -> str:
    s = format_polynomial(r.num) if r.is_polynomial() else None
    if s is not None and r.den == 1 and re.fullmatch(r"[a-z]+|\d+", s):
        return s
    if r.is_polynomial():
        return f"({s})"
    return f"(({format_polynomial(r.num)})/({format_polynomial(r.den)}))"


def _powered(f: Factor, p: int) -> str:
    text = format_factor(f)
    if p == 1:
        return text
    # a^e^p would read as a^(e^p)
    return f"({text})^{p}" if f.kind == "exp" else f"{text}^{p}"


def _top_level_product(text: str) -> bool:
    depth = 0
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if ch == "*" and depth == 0:
            return True
    return False


def format_term(t: HyperTerm) -> str:
    """Canonical, re-parseable rendering."""
    if t.is_zero():
        return "0"
    num = [_powered(f, p) for f, p in t.factors if p > 0]
    den = [_powered(f, -p) for f, p in t.factors if p < 0]
    c = t.coeff
    cn = format_polynomial(c.num)
    sign = ""
    if cn.startswith("-") and len(c.num.terms()) == 1:
        sign, cn = "-", cn[1:]
    if len(c.num.terms()) > 1:
        cn = f"({cn})"
    if cn != "1" or not num:
        num.insert(0, cn)
    if c.den != 1:
        d = format_polynomial(c.den)
        den.insert(0, f"({d})" if len(c.den.terms()) > 1 else d)
    text = sign + "*".join(num)
    if den:
        single = len(den) == 1 and not _top_level_product(den[0])
        text += "/" + (den[0] if single else "(" + "*".join(den) + ")")
    return text


def format_series(s: HyperSeries) -> str:
    up = ",".join(format_linear(a) for a in s.upper)
    lo = ",".join(format_linear(a) for a in s.lower)
    return f"hyper([{up}],[{lo}],{format_ratfunc_atom(s.argument)})"


def format_expr(e: Expr) -> str:
    def side(ts: list[HyperTerm]) -> str:
        if not ts:
            return "0"
        parts = [format_term(t) for t in ts]
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    top = side(e.num)
    if e.is_term_sum():
        return top
    return f"({top})/({side(e.den)})"


def format_any(value: Parsed) -> str:
    if isinstance(value, HyperTerm):
        return format_term(value)
    if isinstance(value, HyperSeries):
        return format_series(value)
    return format_expr(value)


def to_text(value) -> str:
    if isinstance(value, RatFunc):
        return str(value)
    return format_any(value)


def parse_number(text: str) -> Fraction:
    r = parse_ratfunc(text)
    if not r.is_constant():
        raise ParseError("expected a number", text, 0)
    return r.constant_value()
