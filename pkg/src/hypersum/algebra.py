"""Exact algebra: rationals, multivariate polynomials and rational functions.

Polynomials live in a single fixed lexicographic ring whose variables are
``k``, ``n``, the one-letter parameters, ``pi`` and a few auxiliary symbols.
The heavy lifting (multiplication, gcd, factorization, resultants) is done
by FLINT through python-flint.
"""

from __future__ import annotations

import string
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence, Union

import flint

Rational = Fraction

MAIN_VARIABLES = ("k", "n")
PARAMETERS = tuple(sorted((set(string.ascii_lowercase) - {"k", "n"}) | {"pi"}))
AUX_VARIABLES = ("J_",) + tuple(f"S{i}_" for i in range(16))
VARIABLES = MAIN_VARIABLES + PARAMETERS + AUX_VARIABLES
_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_CTX = flint.fmpq_mpoly_ctx.get(VARIABLES, "lex")
_NVARS = len(VARIABLES)


class Unsolvable(ArithmeticError):
    """Raised when a linear system has no solution."""


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(int(x.p), int(x.q))


def _to_fmpq(x: Fraction) -> flint.fmpq:
    return flint.fmpq(x.numerator, x.denominator)


Scalar = Union[int, Fraction]


class Polynomial:
    """Immutable multivariate polynomial with rational coefficients."""

    __slots__ = ("_p", "_key")

    def __init__(self, value: Union["Polynomial", Scalar, flint.fmpq_mpoly] = 0):
        if isinstance(value, Polynomial):
            self._p = value._p
        elif isinstance(value, flint.fmpq_mpoly):
            self._p = value
        elif isinstance(value, (int, Fraction)):
            self._p = _CTX.constant(_to_fmpq(Fraction(value)))
        else:
            raise TypeError(f"cannot build a polynomial from {type(value).__name__}")
        self._key = None

    @staticmethod
    def var(name: str) -> "Polynomial":
        if name not in _INDEX:
            raise KeyError(f"unknown variable {name!r}")
        return Polynomial(_CTX.gens()[_INDEX[name]])

    @staticmethod
    def from_terms(terms: Mapping[Mapping[str, int] | tuple, Scalar]) -> "Polynomial":
        data = {}
        for mono, c in terms.items():
            if isinstance(mono, tuple):
                vec = mono
            else:
                v = [0] * _NVARS
                for name, e in mono.items():
                    v[_INDEX[name]] = e
                vec = tuple(v)
            data[vec] = _to_fmpq(Fraction(c))
        return Polynomial(_CTX.from_dict(data))

    @property
    def raw(self) -> flint.fmpq_mpoly:
        return self._p

    # arithmetic

    @staticmethod
    def _lift(other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Polynomial(self._p + o._p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Polynomial(self._p - o._p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Polynomial(o._p - self._p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Polynomial(self._p * o._p)

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._p)

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        return Polynomial(self._p**e)

    def exact_div(self, other: "Polynomial | Scalar") -> "Polynomial":
        o = self._lift(other)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if o._p.is_constant():
            return Polynomial(self._p / o._p.leading_coefficient())
        q, r = divmod(self._p, o._p)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return Polynomial(q)

    def divides(self, other: "Polynomial") -> bool:
        if self.is_zero():
            return other.is_zero()
        if self._p.is_constant():
            return True
        return divmod(other._p, self._p)[1].is_zero()

    def __truediv__(self, other):
        if isinstance(other, (Polynomial, int, Fraction)):
            return RatFunc(self, other)
        if isinstance(other, RatFunc):
            return RatFunc(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatFunc(other, self)
        return NotImplemented

    # comparison and hashing

    def _hash_key(self):
        if self._key is None:
            self._key = tuple(sorted((m, (int(c.p), int(c.q))) for m, c in self._p.to_dict().items()))
        return self._key

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._p == o._p

    def __hash__(self) -> int:
        return hash(self._hash_key())

    # inspection

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    def constant_value(self) -> Fraction:
        if not self._p.is_constant():
            raise ValueError("polynomial is not constant")
        if self._p.is_zero():
            return Fraction(0)
        return _to_fraction(self._p.leading_coefficient())

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {m: _to_fraction(c) for m, c in self._p.to_dict().items()}

    def variables(self) -> tuple[str, ...]:
        degs = self._p.degrees()
        return tuple(name for name, d in zip(VARIABLES, degs) if d > 0)

    def free_of(self, *names: str) -> bool:
        degs = self._p.degrees()
        return all(degs[_INDEX[name]] <= 0 for name in names)

    def degree(self, var: str) -> int:
        """Degree in ``var``; -1 for the zero polynomial."""
        if self._p.is_zero():
            return -1
        return int(self._p.degrees()[_INDEX[var]])

    def total_degree(self) -> int:
        if self._p.is_zero():
            return -1
        return int(self._p.total_degree())

    def leading_coefficient(self) -> Fraction:
        """Leading coefficient under the fixed lexicographic order."""
        if self._p.is_zero():
            return Fraction(0)
        return _to_fraction(self._p.leading_coefficient())

    def coefficients(self, var: str) -> list["Polynomial"]:
        """Coefficients c_0, c_1, ... with self = sum c_i var^i."""
        idx = _INDEX[var]
        buckets: dict[int, dict] = {}
        for mono, c in self._p.to_dict().items():
            e = mono[idx]
            rest = mono[:idx] + (0,) + mono[idx + 1 :]
            buckets.setdefault(e, {})[rest] = c
        if not buckets:
            return []
        out = []
        for e in range(max(buckets) + 1):
            out.append(Polynomial(_CTX.from_dict(buckets[e])) if e in buckets else Polynomial(0))
        return out

    def coefficient(self, var: str, e: int) -> "Polynomial":
        cs = self.coefficients(var)
        return cs[e] if 0 <= e < len(cs) else Polynomial(0)

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators over lcm of denominators)."""
        from math import gcd

        num = 0
        den = 1
        for c in self._p.coeffs():
            num = gcd(num, int(c.p))
            den = lcm(den, int(c.q))
        return Fraction(num, den) if num else Fraction(0)

    def primitive(self) -> "Polynomial":
        """Integer-coefficient, content one, positive leading coefficient."""
        if self.is_zero():
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return Polynomial(self._p / _to_fmpq(c))

    # substitution

    def subs(self, values: Mapping[str, Scalar]) -> "Polynomial":
        if not values:
            return self
        return Polynomial(self._p.subs({name: _to_fmpq(Fraction(v)) for name, v in values.items()}))

    def compose(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        if not images:
            return self
        gens = list(_CTX.gens())
        for name, img in images.items():
            gens[_INDEX[name]] = Polynomial(img)._p if not isinstance(img, Polynomial) else img._p
        return Polynomial(self._p.compose(*gens))

    def shift(self, var: str, delta: Scalar) -> "Polynomial":
        if delta == 0:
            return self
        return self.compose({var: Polynomial.var(var) + delta})

    def evaluate(self, values: Mapping[str, Scalar]) -> Fraction:
        p = self.subs({v: values[v] for v in self.variables() if v in values})
        if not p.is_constant():
            missing = [v for v in p.variables()]
            raise KeyError(f"unassigned symbols: {', '.join(missing)}")
        return p.constant_value()

    def factor(self) -> tuple[Fraction, list[tuple["Polynomial", int]]]:
        c, fs = self._p.factor()
        return _to_fraction(c), [(Polynomial(f), int(e)) for f, e in fs]

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _var_power(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def format_polynomial(p: Polynomial) -> str:
    """Render in the expression grammar, terms in decreasing lex order."""
    if p.is_zero():
        return "0"
    items = sorted(p.terms().items(), reverse=True)
    parts = []
    for mono, c in items:
        factors = [_var_power(VARIABLES[i], e) for i, e in enumerate(mono) if e]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = str(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = str(a) + "*" + "*".join(factors)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f"{sign}{body}"
    return out


class RatFunc:
    """Normalized quotient of polynomials.

    The denominator has integer coefficients, content one and a positive
    leading coefficient, and is coprime to the numerator, so equal rational
    functions have identical representations.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Polynomial | Scalar = 0, den: Polynomial | Scalar = 1, *, _normalized: bool = False):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def var(name: str) -> "RatFunc":
        return RatFunc(Polynomial.var(name), _normalized=True)

    @staticmethod
    def _lift(other) -> "RatFunc | None":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (Polynomial, int, Fraction)):
            return RatFunc(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if o.den.is_constant() and self.den.is_constant():
            return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)
        g = poly_gcd(self.den, o.den)
        b1 = self.den.exact_div(g)
        d1 = o.den.exact_div(g)
        num = self.num * d1 + o.num * b1
        return RatFunc(num, b1 * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RatFunc(0)
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        num = self.num.exact_div(g1) * o.num.exact_div(g2)
        den = self.den.exact_div(g2) * o.den.exact_div(g1)
        return RatFunc(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int) -> "RatFunc":
        if e >= 0:
            return RatFunc(self.num**e, self.den**e, _normalized=True) if e else RatFunc(1)
        return self.inverse() ** (-e)

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_constant() and self.num == 1

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def free_of(self, *names: str) -> bool:
        return self.num.free_of(*names) and self.den.free_of(*names)

    def variables(self) -> tuple[str, ...]:
        used = set(self.num.variables()) | set(self.den.variables())
        return tuple(v for v in VARIABLES if v in used)

    def compose(self, images: Mapping[str, Polynomial]) -> "RatFunc":
        if not images:
            return self
        return RatFunc(self.num.compose(images), self.den.compose(images))

    def shift(self, var: str, delta: Scalar) -> "RatFunc":
        if delta == 0:
            return self
        return self.compose({var: Polynomial.var(var) + delta})

    def subs(self, values: Mapping[str, Scalar]) -> "RatFunc":
        return RatFunc(self.num.subs(values), self.den.subs(values))

    def substitute(self, var: str, image: "RatFunc") -> "RatFunc":
        """Replace ``var`` by a rational function."""
        if image.is_polynomial():
            img = image.num.exact_div(image.den)
            return self.compose({var: img})

        def hom(p: Polynomial, deg: int) -> Polynomial:
            out = Polynomial(0)
            for i, c in enumerate(p.coefficients(var)):
                if not c.is_zero():
                    out = out + c * image.num**i * image.den ** (deg - i)
            return out

        d = max(self.num.degree(var), self.den.degree(var), 0)
        return RatFunc(hom(self.num, d), hom(self.den, d))

    def evaluate(self, values: Mapping[str, Scalar]) -> Fraction:
        d = self.den.evaluate(values)
        if d == 0:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.num.evaluate(values) / d

    def __str__(self) -> str:
        return format_ratfunc(self)

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, Polynomial(1)
    if den.is_constant():
        return num.exact_div(den), Polynomial(1)
    if not num.is_constant():
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = num.exact_div(g)
            den = den.exact_div(g)
    c = den.content()
    if den.leading_coefficient() < 0:
        c = -c
    if c != 1:
        num = num.exact_div(c)
        den = den.exact_div(c)
    return num, den


def format_ratfunc(r: RatFunc) -> str:
    num = format_polynomial(r.num)
    if r.den == 1:
        return num
    den = format_polynomial(r.den)
    if len(r.num.terms()) > 1 or "/" in num:
        num = f"({num})"
    if not den.isidentifier():
        den = f"({den})"
    return f"{num}/{den}"


def format_factored(r: RatFunc) -> str:
    """Human-oriented rendering with numerator and denominator factored."""

    def part(p: Polynomial) -> tuple[Fraction, list[str]]:
        c, fs = p.factor()
        out = []
        for f, e in fs:
            s = format_polynomial(f)
            s = f"({s})" if len(f.terms()) > 1 else s
            out.append(s if e == 1 else f"{s}^{e}")
        return c, out

    if r.is_zero():
        return "0"
    cn, fn = part(r.num)
    cd, fd = part(r.den)
    c = cn / cd
    sign = "-" if c < 0 else ""
    c = abs(c)
    top = ([str(c.numerator)] if c.numerator != 1 or not fn else []) + fn
    bottom = ([str(c.denominator)] if c.denominator != 1 else []) + fd
    text = sign + "*".join(top)
    if bottom:
        text += "/" + (bottom[0] if len(bottom) == 1 else "(" + "*".join(bottom) + ")")
    return text


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Greatest common divisor, primitive with positive leading coefficient."""
    p, q = Polynomial(p), Polynomial(q)
    if p.is_zero():
        return q.primitive() if not q.is_zero() else Polynomial(0)
    if q.is_zero():
        return p.primitive()
    if p.is_constant() or q.is_constant():
        return Polynomial(1)
    return Polynomial(p.raw.gcd(q.raw)).primitive()


def poly_lcm(p: Polynomial, q: Polynomial) -> Polynomial:
    g = poly_gcd(p, q)
    return (p.exact_div(g) * q).primitive()


def resultant(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    return Polynomial(p.raw.resultant(q.raw, var))


def nonneg_integer_roots(p: Polynomial, var: str) -> set[int]:
    """All j >= 0 at which ``p`` vanishes identically in the other variables."""
    if p.is_zero():
        raise ValueError("zero polynomial has every root")
    idx = _INDEX[var]
    groups: dict[tuple, dict[int, flint.fmpq]] = {}
    for mono, c in p.raw.to_dict().items():
        rest = mono[:idx] + mono[idx + 1 :]
        groups.setdefault(rest, {})[mono[idx]] = c
    g = None
    for coeffs in groups.values():
        u = flint.fmpq_poly([coeffs.get(i, 0) for i in range(max(coeffs) + 1)])
        g = u if g is None else g.gcd(u)
        if g.degree() == 0:
            return set()
    return _univariate_nonneg_roots(g)


def _univariate_nonneg_roots(u: flint.fmpq_poly) -> set[int]:
    if u.degree() <= 0:
        return set()
    z = flint.fmpz_poly([int(c * u.denom()) for c in u.coeffs()])
    roots = set()
    for f, _ in z.factor()[1]:
        if f.degree() == 1:
            b, a = f.coeffs()
            if int(b) % int(a) == 0:
                r = -int(b) // int(a)
                if r >= 0:
                    roots.add(r)
    return roots


def dispersion_set(q: Polynomial, r: Polynomial, var: str = "k") -> list[int]:
    """Sorted j >= 0 with deg gcd(q(var), r(var+j)) > 0.

    Same set as the nonnegative integer roots of res_var(q(var), r(var+j)),
    found through irreducible factors instead of a symbolic resultant.
    """
    if q.degree(var) <= 0 or r.degree(var) <= 0:
        return []
    qf = [f for f, _ in q.factor()[1] if f.degree(var) > 0]
    rf = [f for f, _ in r.factor()[1] if f.degree(var) > 0]
    found = set()
    for f in qf:
        d = f.degree(var)
        fc = f.coefficients(var)
        for g in rf:
            if g.degree(var) != d:
                continue
            gc = g.coefficients(var)
            # f(k) ~ g(k+j): compare the subleading coefficients
            shift = RatFunc(fc[d - 1], fc[d]) - RatFunc(gc[d - 1], gc[d])
            if not shift.is_constant():
                continue
            j = shift.constant_value() / d
            if j.denominator != 1 or j < 0:
                continue
            j = int(j)
            if (f * gc[d]) == (g.shift(var, j) * fc[d]):
                found.add(j)
    return sorted(found)


def solve_linear(matrix: Sequence[Sequence[RatFunc | Polynomial | Scalar]], rhs: Sequence[RatFunc | Polynomial | Scalar]) -> list[RatFunc]:
    """Solve ``matrix * x = rhs`` over the rational-function field.

    Fraction-free (Bareiss) elimination on the polynomial matrix obtained by
    clearing row denominators; free variables are set to zero.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if len(rhs) != rows:
        raise ValueError("rhs length does not match the matrix")
    poly_rows = []
    for i in range(rows):
        entries = [RatFunc._lift(e) for e in list(matrix[i]) + [rhs[i]]]
        if len(entries) != cols + 1:
            raise ValueError("ragged matrix")
        den = Polynomial(1)
        for e in entries:
            if not e.den.is_constant() or e.den != 1:
                den = poly_lcm(den, e.den)
        poly_rows.append([e.num * den.exact_div(e.den) for e in entries])
    return solve_polynomial_system(poly_rows, cols)


def solve_polynomial_system(rows: list[list[Polynomial]], cols: int) -> list[RatFunc]:
    """Bareiss elimination on an augmented polynomial matrix (last column rhs)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    prev = Polynomial(1)
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        if r >= nrows:
            break
        best = None
        for i in range(r, nrows):
            if not m[i][c].is_zero():
                size = len(m[i][c].raw)
                if best is None or size < best[1]:
                    best = (i, size)
        if best is None:
            continue
        i = best[0]
        m[r], m[i] = m[i], m[r]
        piv = m[r][c]
        for i in range(r + 1, nrows):
            lead = m[i][c]
            row = m[i]
            if lead.is_zero():
                if prev != 1:
                    for j in range(c + 1, cols + 1):
                        if not row[j].is_zero():
                            row[j] = (piv * row[j]).exact_div(prev)
                else:
                    for j in range(c + 1, cols + 1):
                        row[j] = piv * row[j]
            else:
                for j in range(c + 1, cols + 1):
                    row[j] = (piv * row[j] - lead * m[r][j]).exact_div(prev)
            row[c] = Polynomial(0)
        prev = piv
        pivots.append((r, c))
        r += 1
    for i in range(r, nrows):
        if not m[i][cols].is_zero():
            raise Unsolvable("inconsistent linear system")
    x = [RatFunc(0)] * cols
    for row_i, c in reversed(pivots):
        row = m[row_i]
        acc = RatFunc(row[cols])
        for j in range(c + 1, cols):
            if not row[j].is_zero() and not x[j].is_zero():
                acc = acc - x[j] * row[j]
        x[c] = acc / row[c]
    return x


def lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out
