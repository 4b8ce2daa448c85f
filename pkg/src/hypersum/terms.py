"""Hypergeometric terms: products of combinatorial factors with linear arguments."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Union

from .algebra import PARAMETERS, VARIABLES, Polynomial, RatFunc, format_polynomial

Number = Union[int, Fraction]

_ORDER = {name: i for i, name in enumerate(VARIABLES)}


class NonLinearArgument(ValueError):
    """An argument is not rational-linear in the variables."""


class PoleError(ArithmeticError):
    """A factor was evaluated at a pole."""


class UnassignedSymbol(KeyError):
    """Evaluation met a symbol without a value."""


class NonRationalValue(ArithmeticError):
    """A numeric value is not a rational number (e.g. involves Gamma(1/2))."""


@dataclass(frozen=True)
class ParamAffine:
    constant: Fraction = Fraction(0)
    coeffs: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constant", Fraction(self.constant))
        clean = tuple(sorted(((s, Fraction(c)) for s, c in self.coeffs if c != 0), key=lambda sc: _ORDER[sc[0]]))
        object.__setattr__(self, "coeffs", clean)


@dataclass(frozen=True)
class LinearArg:
    """``n_coeff*n + k_coeff*k + shift`` with ``shift`` affine in the parameters."""

    n_coeff: Fraction = Fraction(0)
    k_coeff: Fraction = Fraction(0)
    shift: ParamAffine = field(default_factory=ParamAffine)

    def __post_init__(self):
        object.__setattr__(self, "n_coeff", Fraction(self.n_coeff))
        object.__setattr__(self, "k_coeff", Fraction(self.k_coeff))

    @staticmethod
    def from_items(items: Mapping[str, Number], constant: Number = 0) -> "LinearArg":
        params = tuple((s, Fraction(c)) for s, c in items.items() if s not in ("k", "n"))
        return LinearArg(
            Fraction(items.get("n", 0)), Fraction(items.get("k", 0)), ParamAffine(Fraction(constant), params)
        )

    @staticmethod
    def of(value: Union[Number, str, "LinearArg"]) -> "LinearArg":
        if isinstance(value, LinearArg):
            return value
        if isinstance(value, str):
            return LinearArg.from_items({value: 1})
        return LinearArg(shift=ParamAffine(Fraction(value)))

    @staticmethod
    def from_polynomial(p: Polynomial) -> "LinearArg":
        items: dict[str, Fraction] = {}
        constant = Fraction(0)
        for mono, c in p.terms().items():
            deg = sum(mono)
            if deg == 0:
                constant = c
            elif deg == 1:
                name = VARIABLES[next(i for i, e in enumerate(mono) if e)]
                if name not in ("k", "n") and name not in PARAMETERS:
                    raise NonLinearArgument(f"unexpected symbol {name} in argument")
                items[name] = c
            else:
                raise NonLinearArgument(f"argument {format_polynomial(p)} is not linear")
        return LinearArg.from_items(items, constant)

    def items(self) -> dict[str, Fraction]:
        out = {}
        if self.k_coeff:
            out["k"] = self.k_coeff
        if self.n_coeff:
            out["n"] = self.n_coeff
        out.update(dict(self.shift.coeffs))
        return out

    @property
    def constant(self) -> Fraction:
        return self.shift.constant

    def coeff(self, var: str) -> Fraction:
        return self.items().get(var, Fraction(0))

    def is_constant(self) -> bool:
        return not self.items()

    def is_integer_constant(self) -> bool:
        return self.is_constant() and self.constant.denominator == 1

    def free_of(self, var: str) -> bool:
        return self.coeff(var) == 0

    def __add__(self, other: Union["LinearArg", Number]) -> "LinearArg":
        other = LinearArg.of(other)
        items = self.items()
        for s, c in other.items().items():
            items[s] = items.get(s, Fraction(0)) + c
        return LinearArg.from_items(items, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "LinearArg":
        return self.scaled(-1)

    def __sub__(self, other: Union["LinearArg", Number]) -> "LinearArg":
        return self + (-LinearArg.of(other))

    def __rsub__(self, other: Number) -> "LinearArg":
        return LinearArg.of(other) - self

    def scaled(self, c: Number) -> "LinearArg":
        c = Fraction(c)
        return LinearArg.from_items({s: v * c for s, v in self.items().items()}, self.constant * c)

    def with_constant(self, c: Number) -> "LinearArg":
        return LinearArg(self.n_coeff, self.k_coeff, ParamAffine(Fraction(c), self.shift.coeffs))

    def substitute(self, var: str, image: "LinearArg") -> "LinearArg":
        c = self.coeff(var)
        if c == 0:
            return self
        items = self.items()
        del items[var]
        return LinearArg.from_items(items, self.constant) + image.scaled(c)

    def to_polynomial(self) -> Polynomial:
        p = Polynomial(self.constant)
        for s, c in self.items().items():
            p = p + c * Polynomial.var(s)
        return p

    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        total = self.constant
        for s, c in self.items().items():
            if s not in values:
                raise UnassignedSymbol(s)
            total += c * Fraction(values[s])
        return total

    def sort_key(self) -> tuple:
        return (tuple((_ORDER[s], c) for s, c in sorted(self.items().items(), key=lambda x: _ORDER[x[0]])), self.constant)

    def __str__(self) -> str:
        return format_linear(self)


def _format_monomial(c: Fraction, name: str) -> str:
    a = abs(c)
    if a.denominator == 1:
        body = name if a == 1 else f"{a.numerator}*{name}"
    else:
        body = f"{name}/{a.denominator}" if a.numerator == 1 else f"{a.numerator}*{name}/{a.denominator}"
    return ("-" if c < 0 else "+") + body


def format_linear(arg: LinearArg) -> str:
    parts = [_format_monomial(c, s) for s, c in sorted(arg.items().items(), key=lambda x: _ORDER[x[0]])]
    if arg.constant != 0 or not parts:
        c = arg.constant
        parts.append(("-" if c < 0 else "+") + str(abs(c)))
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


KINDS = ("exp", "fact", "gamma", "binom", "poch")
_KIND_ORDER = {kind: i for i, kind in enumerate(KINDS)}


@dataclass(frozen=True)
class Factor:
    """One combinatorial factor.

    ``exp``: (base RatFunc, exponent LinearArg); ``fact``/``gamma``: (arg,);
    ``binom``: (top, bottom); ``poch``: (base, count).
    """

    kind: str
    args: tuple

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown factor kind {self.kind!r}")

    def linear_args(self) -> tuple[LinearArg, ...]:
        return self.args[1:] if self.kind == "exp" else self.args

    def map_args(self, fn) -> "Factor":
        if self.kind == "exp":
            return Factor("exp", (self.args[0], fn(self.args[1])))
        return Factor(self.kind, tuple(fn(a) for a in self.args))

    def sort_key(self) -> tuple:
        if self.kind == "exp":
            return (_KIND_ORDER["exp"], str(self.args[0]), self.args[1].sort_key())
        return (_KIND_ORDER[self.kind], tuple(a.sort_key() for a in self.args))


def exponential(base: RatFunc | Number, exponent: LinearArg) -> Factor:
    return Factor("exp", (RatFunc._lift(base), exponent))


def fact(arg: LinearArg) -> Factor:
    return Factor("fact", (arg,))


def gamma(arg: LinearArg) -> Factor:
    return Factor("gamma", (arg,))


def binom(top: LinearArg, bottom: LinearArg) -> Factor:
    return Factor("binom", (top, bottom))


def poch(base: LinearArg, count: LinearArg) -> Factor:
    return Factor("poch", (base, count))


def _rising(x: Polynomial, count: int) -> Polynomial:
    out = Polynomial(1)
    for i in range(count):
        out = out * (x + i)
    return out


def _fold(f: Factor) -> RatFunc | None:
    """Rational value of a factor with integer-constant structure, else None."""
    if f.kind == "exp":
        base, e = f.args
        if base.is_one():
            return RatFunc(1)
        if e.is_integer_constant():
            return base ** int(e.constant)
        return None
    if f.kind == "fact":
        (a,) = f.args
        if a.is_integer_constant() and a.constant >= 0:
            return RatFunc(factorial(int(a.constant)))
        return None
    if f.kind == "gamma":
        (a,) = f.args
        if a.is_integer_constant() and a.constant >= 1:
            return RatFunc(factorial(int(a.constant) - 1))
        return None
    if f.kind == "poch":
        base, count = f.args
        if count.is_integer_constant():
            m = int(count.constant)
            x = base.to_polynomial()
            if m >= 0:
                return RatFunc(_rising(x, m))
            return RatFunc(1, _rising(x + m, -m))
        return None
    top, bottom = f.args
    for j in (bottom, top - bottom):
        if j.is_integer_constant() and j.constant >= 0:
            m = int(j.constant)
            x = top.to_polynomial()
            num = Polynomial(1)
            for i in range(m):
                num = num * (x - i)
            return RatFunc(num, factorial(m))
    return None


class HyperTerm:
    """``coeff * prod(factor**power)`` with a rational-function coefficient."""

    __slots__ = ("coeff", "factors", "_hash")

    def __init__(self, coeff: RatFunc | Polynomial | Number = 1, factors: Iterable[tuple[Factor, int]] = ()):
        coeff = RatFunc._lift(coeff)
        merged: dict[Factor, int] = {}
        for f, p in factors:
            if p == 0:
                continue
            folded = _fold(f)
            if folded is not None:
                if folded.is_zero():
                    if p < 0:
                        raise PoleError(f"division by a vanishing factor {f}")
                    coeff = RatFunc(0)
                    continue
                coeff = coeff * folded**p
                continue
            merged[f] = merged.get(f, 0) + p
        if coeff.is_zero():
            merged = {}
        self.coeff = coeff
        self.factors = tuple(sorted(((f, p) for f, p in merged.items() if p), key=lambda fp: fp[0].sort_key()))
        self._hash = None

    @property
    def sign_factor(self) -> RatFunc:
        return self.coeff

    @staticmethod
    def of(value: Union["HyperTerm", RatFunc, Polynomial, Number]) -> "HyperTerm":
        if isinstance(value, HyperTerm):
            return value
        return HyperTerm(value)

    def __mul__(self, other):
        if isinstance(other, (RatFunc, Polynomial, int, Fraction)):
            return HyperTerm(self.coeff * RatFunc._lift(other), self.factors)
        if not isinstance(other, HyperTerm):
            return NotImplemented
        return HyperTerm(self.coeff * other.coeff, self.factors + other.factors)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "HyperTerm":
        return HyperTerm(self.coeff**e, tuple((f, p * e) for f, p in self.factors))

    def inverse(self) -> "HyperTerm":
        return self ** -1

    def __truediv__(self, other):
        if isinstance(other, (RatFunc, Polynomial, int, Fraction)):
            return HyperTerm(self.coeff / RatFunc._lift(other), self.factors)
        if not isinstance(other, HyperTerm):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (RatFunc, Polynomial, int, Fraction)):
            return HyperTerm(other) * self.inverse()
        return NotImplemented

    def __neg__(self) -> "HyperTerm":
        return HyperTerm(-self.coeff, self.factors)

    def __eq__(self, other) -> bool:
        if isinstance(other, (RatFunc, Polynomial, int, Fraction)):
            other = HyperTerm(other)
        if not isinstance(other, HyperTerm):
            return NotImplemented
        return self.coeff == other.coeff and self.factors == other.factors

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.coeff, self.factors))
        return self._hash

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def is_rational(self) -> bool:
        return not self.factors

    def same_factors(self, other: "HyperTerm") -> bool:
        return self.factors == other.factors

    def without_coeff(self) -> "HyperTerm":
        return HyperTerm(1, self.factors)

    def free_of(self, var: str) -> bool:
        if not self.coeff.free_of(var):
            return False
        for f, _ in self.factors:
            if f.kind == "exp" and not f.args[0].free_of(var):
                return False
            if any(a.coeff(var) != 0 for a in f.linear_args()):
                return False
        return True

    def linear_args(self) -> list[LinearArg]:
        return [a for f, _ in self.factors for a in f.linear_args()]

    def substitute(self, var: str, image: LinearArg) -> "HyperTerm":
        """Replace ``var`` by a linear expression everywhere."""
        poly = image.to_polynomial()
        coeff = self.coeff.compose({var: poly})
        factors = []
        for f, p in self.factors:
            g = f.map_args(lambda a: a.substitute(var, image))
            if g.kind == "exp":
                g = Factor("exp", (g.args[0].compose({var: poly}), g.args[1]))
            factors.append((g, p))
        return HyperTerm(coeff, factors)

    def shift(self, var: str, delta: Number) -> "HyperTerm":
        if delta == 0:
            return self
        return self.substitute(var, LinearArg.of(var) + delta)

    def scale(self, var: str, factor: Number) -> "HyperTerm":
        if factor == 1:
            return self
        return self.substitute(var, LinearArg.of(var).scaled(factor))

    def __str__(self) -> str:
        from .parser import format_term

        return format_term(self)

    def __repr__(self) -> str:
        return f"HyperTerm({self})"


@dataclass(frozen=True)
class HyperSeries:
    upper: tuple[LinearArg, ...]
    lower: tuple[LinearArg, ...]
    argument: RatFunc

    def term(self, k: str = "k") -> HyperTerm:
        return hyperterm(self.upper, self.lower, self.argument, k)


def shift(t: HyperTerm, var: str, delta: Number) -> HyperTerm:
    return t.shift(var, delta)


def scale(t: HyperTerm, var: str, factor: Number) -> HyperTerm:
    return t.scale(var, factor)


def hyperterm(upper: Iterable, lower: Iterable, x: RatFunc | Number, k: str = "k") -> HyperTerm:
    """The k-th summand of pFq(upper; lower; x)."""
    kk = LinearArg.of(k)
    factors = [(poch(LinearArg.of(u), kk), 1) for u in upper]
    factors += [(poch(LinearArg.of(b), kk), -1) for b in lower]
    factors.append((fact(kk), -1))
    factors.append((exponential(x, kk), 1))
    return HyperTerm(1, factors)


# exact evaluation


class _Value:
    """Rational number times products of Gamma(f), 0<f<1, and fractional powers."""

    __slots__ = ("rat", "gammas", "powers", "zeros", "poles")

    def __init__(self):
        self.rat = Fraction(1)
        self.gammas: dict[Fraction, int] = {}
        self.powers: dict[Fraction, Fraction] = {}
        self.zeros = 0
        self.poles = 0

    def mul_gamma(self, x: Fraction, p: int) -> None:
        """Multiply by Gamma(x)**p."""
        if x.denominator == 1:
            if x <= 0:
                if p > 0:
                    self.poles += 1
                else:
                    self.zeros += 1
                return
            self.rat *= Fraction(factorial(int(x) - 1)) ** p
            return
        f = x - (x.numerator // x.denominator)
        r = Fraction(1)
        if x > f:
            y = f
            while y < x:
                r *= y
                y += 1
        else:
            y = x
            while y < f:
                r /= y
                y += 1
        self.rat *= r**p
        self.gammas[f] = self.gammas.get(f, 0) + p

    def mul_rat(self, v: Fraction, p: int) -> None:
        if v == 0:
            if p > 0:
                self.zeros += 1
            else:
                self.poles += 1
            return
        self.rat *= v**p

    def symbolic(self) -> "SymbolicValue":
        if self.zeros:
            return SymbolicValue()
        if self.poles:
            raise PoleError("term evaluated at a pole")
        rat = self.rat
        key = []
        for f, c in sorted(self.gammas.items()):
            if c:
                key.append(("gamma", f, c))
        for base, e in sorted(self.powers.items()):
            whole = e.numerator // e.denominator
            frac = e - whole
            rat *= base**whole
            if frac:
                root = _exact_root(base, frac.denominator)
                if root is None:
                    key.append(("pow", base, frac))
                else:
                    rat *= root**frac.numerator
        return SymbolicValue({tuple(key): rat}) if rat else SymbolicValue()

    def result(self) -> Fraction:
        return self.symbolic().rational()


class SymbolicValue:
    """Finite sum of rationals times monomials in Gamma(f) and surds."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[tuple, Fraction] | None = None):
        self.parts = {key: v for key, v in (parts or {}).items() if v}

    @staticmethod
    def of(c: Number) -> "SymbolicValue":
        return SymbolicValue({(): Fraction(c)})

    def __add__(self, other: "SymbolicValue") -> "SymbolicValue":
        out = dict(self.parts)
        for key, v in other.parts.items():
            out[key] = out.get(key, Fraction(0)) + v
        return SymbolicValue(out)

    def __neg__(self) -> "SymbolicValue":
        return SymbolicValue({key: -v for key, v in self.parts.items()})

    def __sub__(self, other: "SymbolicValue") -> "SymbolicValue":
        return self + (-other)

    def scale(self, c: Number) -> "SymbolicValue":
        return SymbolicValue({key: v * c for key, v in self.parts.items()})

    def is_zero(self) -> bool:
        return not self.parts

    def rational(self) -> Fraction:
        if not self.parts:
            return Fraction(0)
        if set(self.parts) != {()}:
            raise NonRationalValue("value involves Gamma at non-integer points or surds")
        return self.parts[()]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SymbolicValue({(): Fraction(other)})
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        return self.parts == other.parts

    def __repr__(self) -> str:
        return f"SymbolicValue({self.parts})"


def _iroot(x: int, n: int) -> int | None:
    if x < 0:
        return None
    r = round(x ** (1.0 / n)) if x < 1 << 1000 else None
    if r is None:
        lo, hi = 0, 1 << (x.bit_length() // n + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**n < x:
                lo = mid + 1
            else:
                hi = mid
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == x:
            return cand
    return None


def _exact_root(v: Fraction, n: int) -> Fraction | None:
    sign = 1
    if v < 0:
        if n % 2 == 0:
            return None
        sign, v = -1, -v
    a = _iroot(v.numerator, n)
    b = _iroot(v.denominator, n)
    if a is None or b is None:
        return None
    return sign * Fraction(a, b)


def _eval_factor(f: Factor, p: int, values: Mapping[str, Number], acc: _Value) -> None:
    if f.kind == "exp":
        base = f.args[0]
        missing = [v for v in base.variables() if v not in values]
        if missing:
            raise UnassignedSymbol(missing[0])
        b = base.evaluate(values)
        e = f.args[1].evaluate(values) * p
        if b == 1 or e == 0:
            return
        if b == 0:
            acc.mul_rat(Fraction(0), 1 if e > 0 else -1)
            return
        if e.denominator == 1:
            acc.rat *= b ** int(e)
        else:
            acc.powers[b] = acc.powers.get(b, Fraction(0)) + e
        return
    args = [a.evaluate(values) for a in f.args]
    if f.kind == "fact":
        acc.mul_gamma(args[0] + 1, p)
    elif f.kind == "gamma":
        acc.mul_gamma(args[0], p)
    elif f.kind == "poch":
        a, m = args
        if m.denominator == 1:
            m = int(m)
            v = Fraction(1)
            if m >= 0:
                for i in range(m):
                    v *= a + i
            else:
                for i in range(-m):
                    v *= a + m + i
                if v == 0:
                    acc.mul_rat(Fraction(0), -p)
                    return
                v = 1 / v
            acc.mul_rat(v, p)
        else:
            acc.mul_gamma(a + m, p)
            acc.mul_gamma(a, -p)
    else:
        t, b = args
        for j in (b, t - b):
            if j.denominator == 1:
                j = int(j)
                if j < 0:
                    acc.mul_rat(Fraction(0), p)
                    return
                v = Fraction(1)
                for i in range(j):
                    v *= t - i
                acc.mul_rat(v / factorial(j), p)
                return
        acc.mul_gamma(t + 1, p)
        acc.mul_gamma(b + 1, -p)
        acc.mul_gamma(t - b + 1, -p)


def eval_symbolic(t: HyperTerm, assignment: Mapping[str, Number], strict: bool = False) -> SymbolicValue:
    """Exact value of ``t``; a vanishing factor in the numerator wins over poles.

    With ``strict`` a zero meeting a pole raises PoleError instead.
    """
    values = {s: Fraction(v) for s, v in assignment.items()}
    acc = _Value()
    for f, p in t.factors:
        _eval_factor(f, p, values, acc)
    missing = [v for v in t.coeff.variables() if v not in values]
    if missing:
        raise UnassignedSymbol(missing[0])
    num = t.coeff.num.evaluate(values)
    den = t.coeff.den.evaluate(values)
    acc.mul_rat(num, 1)
    acc.mul_rat(den, -1)
    if strict and acc.zeros and acc.poles:
        raise PoleError("indeterminate product of a zero and a pole")
    return acc.symbolic()


def eval_at(t: HyperTerm, assignment: Mapping[str, Number]) -> Fraction:
    """Exact rational value of ``t``; raises NonRationalValue otherwise."""
    return eval_symbolic(t, assignment).rational()


def _gamma_parts(f: Factor, p: int) -> list[tuple[LinearArg, int]] | None:
    if f.kind == "fact":
        return [(f.args[0] + 1, p)]
    if f.kind == "gamma":
        return [(f.args[0], p)]
    if f.kind == "poch":
        a, m = f.args
        return [(a + m, p), (a, -p)]
    if f.kind == "binom":
        t, b = f.args
        return [(t + 1, p), (b + 1, -p), (t - b + 1, -p)]
    return None


class _Laurent:
    """Leading Laurent coefficient in a small perturbation of one variable."""

    def __init__(self):
        self.value = _Value()
        self.order = 0
        self.hard_zero = False
        self.hard_pole = False

    def linear(self, x0: Fraction, c: Fraction, p: int) -> None:
        if x0 != 0:
            self.value.rat *= x0**p
        elif c != 0:
            self.order += p
            self.value.rat *= c**p
        elif p > 0:
            self.hard_zero = True
        else:
            self.hard_pole = True

    def gamma(self, x0: Fraction, c: Fraction, p: int) -> None:
        if x0.denominator == 1 and x0 <= 0:
            if c == 0:
                if p > 0:
                    self.hard_pole = True
                else:
                    self.hard_zero = True
                return
            m = int(-x0)
            self.order -= p
            self.value.rat *= (Fraction((-1) ** m, factorial(m)) / c) ** p
            return
        self.value.mul_gamma(x0, p)

    def poly(self, poly: Polynomial, var: str, point: Fraction, values: Mapping[str, Fraction], p: int) -> None:
        others = {s: values[s] for s in poly.variables() if s != var}
        missing = [s for s in poly.variables() if s != var and s not in values]
        if missing:
            raise UnassignedSymbol(missing[0])
        u = poly.subs(others).shift(var, point)
        coeffs = u.coefficients(var)
        for i, c in enumerate(coeffs):
            if not c.is_zero():
                self.order += i * p
                self.value.rat *= c.constant_value() ** p
                return
        if p > 0:
            self.hard_zero = True
        else:
            self.hard_pole = True

    def result(self) -> Fraction:
        if self.hard_zero:
            return Fraction(0)
        if self.hard_pole:
            raise PoleError("term evaluated at a pole")
        if self.order > 0:
            return Fraction(0)
        if self.order < 0:
            raise PoleError("term has a pole in the limit")
        return self.value.result()


def eval_limit(t: HyperTerm, assignment: Mapping[str, Number], var: str) -> Fraction:
    """Value of ``t`` as ``var`` tends to its assigned value.

    Gamma poles and zeros along ``var`` are matched by their Laurent
    coefficients; poles independent of ``var`` are genuine.
    """
    values = {s: Fraction(v) for s, v in assignment.items()}
    if var not in values:
        raise UnassignedSymbol(var)
    acc = _Laurent()
    for f, p in t.factors:
        if f.kind == "exp":
            _eval_factor(f, p, values, acc.value)
            continue
        if f.kind == "poch" and f.args[1].evaluate(values).denominator == 1:
            a, m = f.args
            a0, c, m = a.evaluate(values), a.coeff(var), int(m.evaluate(values))
            if m >= 0:
                for i in range(m):
                    acc.linear(a0 + i, c, p)
            else:
                for i in range(-m):
                    acc.linear(a0 + m + i, c, -p)
            continue
        if f.kind == "binom":
            top, bottom = f.args
            done = False
            for j in (bottom, top - bottom):
                jv = j.evaluate(values)
                if jv.denominator == 1 and jv >= 0 and j.coeff(var) == 0:
                    t0, c = top.evaluate(values), top.coeff(var)
                    for i in range(int(jv)):
                        acc.linear(t0 - i, c, p)
                    acc.value.rat /= Fraction(factorial(int(jv))) ** p
                    done = True
                    break
            if done:
                continue
        for arg, q in _gamma_parts(f, p):
            acc.gamma(arg.evaluate(values), arg.coeff(var), q)
    acc.poly(t.coeff.num, var, values[var], values, 1)
    acc.poly(t.coeff.den, var, values[var], values, -1)
    return acc.result()
