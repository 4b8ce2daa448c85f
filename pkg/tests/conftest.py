from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from hypersum.algebra import Polynomial

VARS = ("k", "a", "b")


@st.composite
def polynomials(draw, variables=VARS, max_degree=4, max_terms=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = [draw(st.integers(0, max_degree)) for _ in variables]
        while sum(exps) > max_degree:
            exps[exps.index(max(exps))] -= 1
        mono = dict(zip(variables, exps))
        terms[tuple(sorted(mono.items()))] = Fraction(draw(st.integers(-9, 9)), draw(st.integers(1, 4)))
    out = Polynomial(0)
    for mono, c in terms.items():
        out = out + c * _monomial(mono)
    return out


def _monomial(mono) -> Polynomial:
    out = Polynomial(1)
    for name, e in mono:
        out = out * Polynomial.var(name) ** e
    return out


def nonzero_polynomials(**kw):
    return polynomials(**kw).filter(lambda p: not p.is_zero())


small_fractions = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 1, 1, 2, 3]))


@st.composite
def linear_args(draw, variables=("n", "k", "a", "b")):
    from hypersum.terms import LinearArg

    items = {v: draw(small_fractions) for v in variables if draw(st.booleans())}
    return LinearArg.from_items(items, draw(small_fractions))


@st.composite
def factors(draw):
    from hypersum.terms import binom, exponential, fact, gamma, poch

    kind = draw(st.sampled_from(["exp", "fact", "gamma", "binom", "poch"]))
    if kind == "exp":
        base = draw(st.sampled_from([2, 3, -1, Fraction(1, 2), Fraction(-3, 4)]))
        return exponential(base, draw(linear_args()))
    if kind == "fact":
        return fact(draw(linear_args()))
    if kind == "gamma":
        return gamma(draw(linear_args()))
    if kind == "binom":
        return binom(draw(linear_args()), draw(linear_args()))
    return poch(draw(linear_args()), draw(linear_args()))


@st.composite
def hyperterms(draw, max_factors=6):
    from hypersum.algebra import RatFunc
    from hypersum.terms import HyperTerm

    num = draw(nonzero_polynomials(variables=("k", "n", "a"), max_degree=2, max_terms=3))
    den = draw(nonzero_polynomials(variables=("k", "n", "a"), max_degree=2, max_terms=3))
    fs = [(draw(factors()), draw(st.sampled_from([-2, -1, 1, 1, 2]))) for _ in range(draw(st.integers(0, max_factors)))]
    try:
        return HyperTerm(RatFunc(num, den), fs)
    except ArithmeticError:
        from hypothesis import reject

        reject()


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
