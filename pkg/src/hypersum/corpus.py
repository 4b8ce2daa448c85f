"""Identity corpus: file format, runner and report."""

from __future__ import annotations

import fnmatch
import multiprocessing
import os
import random
import time
import zlib
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable

from .algebra import RatFunc
from .gosper import NoSolution, extended_gosper, gosper
from .parser import ParseError, parse, parse_ratfunc, parse_term, to_text
from .simplify import NotRational, ratio_of, simplify_combinatorial
from .terms import HyperSeries, HyperTerm, NonLinearArgument, PoleError, eval_symbolic, hyperterm
from .wz import check_certificate_numeric, extended_wz_certificate, verify_certificate, wz_prove
from .zeilberger import (
    NoRecurrenceFound,
    Recurrence,
    extended_sumrecursion,
    hyperrecursion,
    matches_modulo,
    sumrecursion,
    verify_recurrence_numeric,
)

MODES = (
    "gosper",
    "extended_gosper",
    "simplify",
    "wz",
    "extended_wz",
    "wzprove",
    "zeilberger",
    "extended_zeilberger",
    "hyperrecursion",
)
KEYS = ("id", "mode", "summand", "rhs", "substitutions", "strides", "expected", "initial", "modulus", "order", "note")
NEGATIVE = ("NoSolution", "NotRational", "inapplicable")
DEFAULT_TIMEOUT_S = 600


class CorpusFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    mode: str
    summand: str
    expected: str
    rhs: str = "constant"
    substitutions: dict = field(default_factory=dict)
    strides: tuple[int, int] | None = None
    initial: tuple[str, ...] = ()
    modulus: str = ""
    order: int | None = None
    line: int = 0


def _parse_block(fields: dict[str, tuple[str, int]], start: int) -> CorpusEntry:
    for key in ("id", "mode", "summand", "expected"):
        if key not in fields:
            raise CorpusFormatError(f"missing field {key!r}", start)
    mode, mode_line = fields["mode"]
    if mode not in MODES:
        raise CorpusFormatError(f"unknown mode {mode!r}", mode_line)
    subs = {}
    if "substitutions" in fields:
        text, line = fields["substitutions"]
        for item in filter(None, (s.strip() for s in text.split(";"))):
            if "=" not in item:
                raise CorpusFormatError(f"bad substitution {item!r}", line)
            name, value = item.split("=", 1)
            subs[name.strip()] = value.strip()
    strides = None
    if "strides" in fields:
        text, line = fields["strides"]
        try:
            m, l = (int(x) for x in text.split(","))
        except ValueError:
            raise CorpusFormatError(f"bad strides {text!r}", line) from None
        strides = (m, l)
    order = None
    if "order" in fields:
        text, line = fields["order"]
        if not text.isdigit():
            raise CorpusFormatError(f"bad order {text!r}", line)
        order = int(text)
    initial = tuple(x.strip() for x in fields["initial"][0].split(",")) if "initial" in fields else ()
    return CorpusEntry(
        id=fields["id"][0],
        mode=mode,
        summand=fields["summand"][0],
        expected=fields["expected"][0],
        rhs=fields.get("rhs", ("constant", 0))[0],
        substitutions=subs,
        strides=strides,
        initial=initial,
        modulus=fields.get("modulus", ("", 0))[0],
        order=order,
        line=start,
    )


def parse_corpus(text: str) -> list[CorpusEntry]:
    """Blank-line separated ``key: value`` blocks after a ``version: 1`` header."""
    lines = text.splitlines()
    idx = 0
    while idx < len(lines) and (not lines[idx].strip() or lines[idx].lstrip().startswith("#")):
        idx += 1
    if idx == len(lines) or lines[idx].strip().replace(" ", "") != "version:1":
        raise CorpusFormatError("expected 'version: 1' header", idx + 1)
    entries: list[CorpusEntry] = []
    seen: set[str] = set()
    block: dict[str, tuple[str, int]] = {}
    start = 0

    def flush():
        nonlocal block
        if block:
            entry = _parse_block(block, start)
            if entry.id in seen:
                raise CorpusFormatError(f"duplicate id {entry.id!r}", start)
            seen.add(entry.id)
            entries.append(entry)
        block = {}

    for number, raw in enumerate(lines[idx + 1 :], idx + 2):
        line = raw.strip()
        if not line:
            flush()
            continue
        if line.startswith("#"):
            continue
        if ":" not in line:
            raise CorpusFormatError(f"expected 'key: value', got {line!r}", number)
        key, value = (s.strip() for s in line.split(":", 1))
        if key not in KEYS:
            raise CorpusFormatError(f"unknown key {key!r}", number)
        if key in block:
            raise CorpusFormatError(f"repeated key {key!r}", number)
        if not block:
            start = number
        block[key] = (value, number)
    flush()
    return entries


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    return parse_corpus(Path(path).read_text(encoding="utf-8"))


def builtin_corpus_files() -> list[Path]:
    root = resources.files("hypersum") / "data"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".txt"))


# --- evaluation --------------------------------------------------------------


def _rng(entry: CorpusEntry, salt: int = 0) -> random.Random:
    return random.Random(zlib.crc32(entry.id.encode()) + salt)


def random_parameters(names: Iterable[str], rng: random.Random) -> dict[str, Fraction]:
    """Rationals with distinct prime denominators, so affine combinations avoid integers."""
    primes = [97, 101, 103, 107, 109, 113, 127, 131, 137, 139]
    out = {}
    for i, name in enumerate(sorted(names)):
        p = primes[i % len(primes)]
        num = rng.choice([x for x in range(-3 * p, 3 * p) if x % p])
        out[name] = Fraction(num, p)
    return out


def _parameters_of(*items, exclude: tuple[str, ...] = ("k", "n")) -> set[str]:
    names: set[str] = set()
    for it in items:
        if isinstance(it, RatFunc):
            names |= set(it.variables())
        elif isinstance(it, HyperTerm):
            names |= set(it.coeff.variables())
            for f, _ in it.factors:
                if f.kind == "exp":
                    names |= set(f.args[0].variables())
            for a in it.linear_args():
                names |= set(a.items())
    return names - set(exclude)


def _summand(entry: CorpusEntry) -> HyperTerm:
    value = parse(entry.summand, entry.substitutions)
    if isinstance(value, HyperSeries):
        return hyperterm(value.upper, value.lower, value.argument, "k")
    if not isinstance(value, HyperTerm):
        raise ParseError("summand must be a single term", entry.summand, 0)
    return value


def _quotient(entry: CorpusEntry) -> HyperTerm:
    F = _summand(entry)
    if entry.rhs != "constant":
        F = F / parse_term(entry.rhs, entry.substitutions)
    return F


def _check_gosper(entry: CorpusEntry, a: HyperTerm, s: HyperTerm, m: int) -> bool:
    rng = _rng(entry)
    values = random_parameters(_parameters_of(a, s, exclude=("k",)), rng)
    checked = 0
    for k in range(1, 25):
        at = {**values, "k": k}
        try:
            diff = eval_symbolic(s, at, strict=True) - eval_symbolic(s, {**at, "k": k - m}, strict=True)
            target = eval_symbolic(a, at, strict=True)
        except PoleError:
            continue
        if diff != target:
            return False
        checked += 1
    return checked > 0


def _check_recurrence(entry: CorpusEntry, rec: Recurrence, F: HyperTerm) -> bool:
    names = _parameters_of(F) | set().union(*(set(p.variables()) for p in rec.coeffs)) - {"n", "k"}
    done = 0
    for salt in range(8):
        values = random_parameters(names, _rng(entry, salt))
        try:
            ok = verify_recurrence_numeric(rec, F, "k", range(0, 16), values)
        except PoleError:
            continue
        if not ok:
            return False
        done += 1
        if done == 2:
            return True
    return done > 0


def evaluate_entry(entry: CorpusEntry) -> dict:
    """Run one entry; returns a dict with status, got, verified."""
    expected = entry.expected.strip()
    negative = expected in NEGATIVE
    try:
        return _evaluate(entry, expected)
    except (NoSolution, NotRational, NoRecurrenceFound, NonLinearArgument) as exc:
        name = type(exc).__name__
        if negative and (expected == name or expected == "inapplicable"):
            return {"status": "match", "got": expected, "verified": True}
        if isinstance(exc, (NoSolution, NoRecurrenceFound)):
            return {"status": "mismatch", "got": f"{name}: {exc}", "verified": False}
        return {"status": "error", "got": f"{name}: {exc}", "verified": False}
    except Exception as exc:  # reported per entry, never fatal to the run
        return {"status": "error", "got": f"{type(exc).__name__}: {exc}", "verified": False}


def _result(match: bool, got: str, verified: bool) -> dict:
    return {"status": "match" if match else "mismatch", "got": got, "verified": verified if match else False}


def _evaluate(entry: CorpusEntry, expected: str) -> dict:
    mode = entry.mode
    m, l = entry.strides or (1, 1)
    if mode == "simplify":
        value = simplify_combinatorial(parse(entry.summand, entry.substitutions))
        want = simplify_combinatorial(parse(expected, entry.substitutions))
        if isinstance(value, RatFunc) and isinstance(want, RatFunc):
            return _result(value == want, to_text(value), True)
        if isinstance(value, HyperTerm) and isinstance(want, HyperTerm):
            r = simplify_combinatorial(value / want)
            return _result(isinstance(r, RatFunc) and r.is_one(), to_text(value), True)
        return _result(False, to_text(value), False)
    if mode in ("gosper", "extended_gosper"):
        a = _summand(entry)
        s = gosper(a, "k") if mode == "gosper" else extended_gosper(a, "k", m)
        if expected in NEGATIVE:
            return _result(False, to_text(s), False)
        same = ratio_of(s, parse_term(expected, entry.substitutions)).is_one()
        return _result(same, to_text(s), same and _check_gosper(entry, a, s, m if mode != "gosper" else 1))
    if mode in ("wz", "extended_wz"):
        F = _quotient(entry)
        cert = extended_wz_certificate(F, "k", "n", m, l)
        got = str(cert)
        if expected in NEGATIVE:
            return _result(False, got, False)
        same = cert.R == parse_ratfunc(expected)
        verified = same and verify_certificate(F, cert) and check_certificate_numeric(
            F, cert, points=20, seed=zlib.crc32(entry.id.encode()),
            params=random_parameters(_parameters_of(F, cert.R), _rng(entry)),
        )
        return _result(same, got, verified)
    if mode == "wzprove":
        try:
            F = _summand(entry)
            rhs = parse_term(entry.rhs, entry.substitutions) if entry.rhs != "constant" else None
        except NonLinearArgument:
            F, rhs = entry.summand, (entry.rhs if entry.rhs != "constant" else None)
        initial = [parse_ratfunc(v).constant_value() for v in entry.initial] or None
        report = wz_prove(F, "k", "n", *(entry.strides or (None, None)), auto=entry.strides is None,
                          expected=initial, rhs=rhs)
        return _result(report.verdict == expected, report.verdict, True)
    if mode in ("zeilberger", "extended_zeilberger", "hyperrecursion"):
        F = _summand(entry)
        if mode == "zeilberger":
            rec = sumrecursion(F, "k", "n") if entry.order is None else _fixed_order(F, entry.order)
        elif mode == "extended_zeilberger":
            rec = extended_sumrecursion(F, "k", "n", m, l)
        else:
            series = parse(entry.summand, entry.substitutions)
            rec = hyperrecursion(series.upper, series.lower, series.argument, "n")
        if expected in NEGATIVE:
            return _result(False, str(rec), False)
        want = Recurrence.parse(expected)
        if entry.modulus:
            variable = next(iter(parse_ratfunc(entry.modulus).variables()))
            same = matches_modulo(rec, want, variable, parse_ratfunc(entry.modulus).num)
        else:
            same = rec.same_as(want)
        return _result(same, str(rec), same and _check_recurrence(entry, rec, F))
    raise ValueError(f"unknown mode {mode}")


def _fixed_order(F: HyperTerm, order: int) -> Recurrence:
    from .zeilberger import sumrecursion_order

    return sumrecursion_order(F, "k", "n", order)


# --- runner ------------------------------------------------------------------


@dataclass
class EntryResult:
    id: str
    status: str  # match | mismatch | error | timeout
    got: str = ""
    verified: bool = False
    ms: int = 0


@dataclass
class RunReport:
    results: list[EntryResult]

    @property
    def ok(self) -> bool:
        return all(r.status == "match" and r.verified for r in self.results)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.results:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    def to_json(self) -> dict:
        return {"results": [asdict(r) for r in self.results], "counts": self.counts()}

    def lines(self) -> list[str]:
        rows = []
        for r in self.results:
            flag = "" if r.status != "match" else (" verified" if r.verified else " unverified")
            extra = f"  got: {r.got}" if r.status != "match" else ""
            rows.append(f"{r.status:8} {r.id}{flag} ({r.ms} ms){extra}")
        return rows


def _child(entry: CorpusEntry, conn) -> None:
    conn.send(evaluate_entry(entry))
    conn.close()


def _run_isolated(entry: CorpusEntry, timeout_s: float) -> dict:
    ctx = multiprocessing.get_context("fork")
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(entry, send), daemon=True)
    proc.start()
    send.close()
    if recv.poll(timeout_s):
        try:
            out = recv.recv()
        except EOFError:
            out = {"status": "error", "got": "worker exited without a result", "verified": False}
        proc.join(5)
        return out
    proc.kill()
    proc.join()
    return {"status": "timeout", "got": f"exceeded {timeout_s} s", "verified": False}


def default_timeout() -> float:
    return float(os.environ.get("HYPERSUM_TIMEOUT_S", DEFAULT_TIMEOUT_S))


def run_corpus(
    paths: str | Path | Iterable[str | Path],
    pattern: str | None = None,
    timeout_s: float | None = None,
    isolate: bool = True,
) -> RunReport:
    """Evaluate every entry (optionally filtered by an id glob); ordered by id."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    entries: list[CorpusEntry] = []
    for p in paths:
        entries += load_corpus(p)
    if pattern:
        entries = [e for e in entries if fnmatch.fnmatchcase(e.id, pattern)]
    timeout_s = default_timeout() if timeout_s is None else timeout_s
    results = []
    for entry in sorted(entries, key=lambda e: e.id):
        start = time.perf_counter()
        out = _run_isolated(entry, timeout_s) if isolate else evaluate_entry(entry)
        ms = int((time.perf_counter() - start) * 1000)
        results.append(EntryResult(entry.id, out["status"], out.get("got", ""), out.get("verified", False), ms))
    return RunReport(results)
