from __future__ import annotations

import json
import time

import pytest

from hypersum.cli import main
from hypersum.corpus import (
    CorpusFormatError,
    builtin_corpus_files,
    evaluate_entry,
    load_corpus,
    parse_corpus,
    run_corpus,
)
from hypersum.parser import parse_ratfunc, parse_term
from hypersum.simplify import ratio_of
from hypersum.zeilberger import Recurrence

FRANEL = Recurrence.parse("-8*(n-1)^2*S(n-2) - (7*n^2-7*n+2)*S(n-1) + n^2*S(n) = 0")
APPENDIX_GOSPER = "(-1)^(k+1)*(4*k+1)*(2*k)!/(k!*4^k*(2*k-1)*(k+1)!)"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def test_cli_gosper(capsys):
    code, out, _ = run(capsys, "gosper", APPENDIX_GOSPER, "k")
    assert code == 0
    assert ratio_of(parse_term(out), parse_term("(2*k)!*(-1)^(k+1)/((k+1)!*4^k*k!)")).is_one()


def test_cli_no_solution(capsys):
    code, out, _ = run(capsys, "gosper", "binomial(n,k)", "k")
    assert code == 1
    assert out == "NoSolution: no hypergeometric term antidifference exists"


def test_cli_auto_mfold(capsys):
    code, _, _ = run(capsys, "gosper", "binomial(k/2,n)", "k")
    assert code == 1
    code, out, _ = run(capsys, "gosper", "binomial(k/2,n)", "k", "--auto-mfold")
    assert code == 0
    assert ratio_of(parse_term(out), parse_term("(k/2+1)*binomial(k/2,n)/(n+1)")).is_one()


def test_cli_zeil(capsys):
    code, out, _ = run(capsys, "zeil", "binomial(n,k)^3", "k", "n")
    assert code == 0 and Recurrence.parse(out).same_as(FRANEL)
    code, out, _ = run(capsys, "--json", "zeil", "binomial(n,k)^3", "k", "n")
    assert Recurrence.from_json(json.loads(out)).same_as(FRANEL)
    code, out, _ = run(capsys, "zeil", "binomial(n,k)^3", "k", "n", "--order", "1")
    assert code == 1 and out.startswith("NoRecurrenceFound")


def test_cli_ezeil_and_hyperrec(capsys):
    code, out, _ = run(capsys, "ezeil", "(-2)^n*binomial(n,k)*binomial(k/2,n)", "k", "n", "1", "2")
    assert code == 0 and Recurrence.parse(out).same_as(Recurrence.parse("S(n)-S(n-1)"))
    code, out, _ = run(capsys, "hyperrec", "[a,-n]", "[b]", "x", "n")
    want = Recurrence.parse("(b-1+n)*S(n)+(-2*n+x*n+x*a-b+2-x)*S(n-1)-(x-1)*(n-1)*S(n-2)")
    assert code == 0 and Recurrence.parse(out).same_as(want)


def test_cli_wz_round_trip(capsys):
    code, out, _ = run(capsys, "--json", "wz", "2^(-n)*binomial(n,k)", "k", "n")
    data = json.loads(out)
    assert code == 0 and parse_ratfunc(data["R"]) == parse_ratfunc("(k-n)/n")
    code, out, _ = run(capsys, "wzverify", "2^(-n)*binomial(n,k)", data["R"], "k", "n")
    assert code == 0 and out == "verified"
    code, out, _ = run(capsys, "wzverify", "2^(-n)*binomial(n,k)", "(k-n)/n+1", "k", "n")
    assert code == 1


def test_cli_extended_wz(capsys):
    code, out, _ = run(capsys, "wz", "(-2)^n*binomial(n,k)*binomial(k/2,n)*(-1)^k", "k", "n", "1", "2")
    assert code == 0
    assert parse_ratfunc(out) == parse_ratfunc("(-k+n-1)*(-k+n)/((n-1)*(-k+2*n-2))")


def test_cli_wzprove(capsys):
    code, out, _ = run(capsys, "--json", "wzprove", "binomial(n,k)^2", "k", "n", "--rhs", "binomial(2*n,n)")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "proved"
    code, out, _ = run(capsys, "wzprove", "hyperterm([-s*b+s+1,b-1,-n],[b+1,s*(-n-b)-n],1,k)", "k", "n")
    assert code == 1 and out.startswith("inapplicable")


def test_cli_simplify(capsys):
    code, out, _ = run(capsys, "simplify", "(binomial(n,k)-binomial(n-2,k))/(binomial(n-3,k)-binomial(n-6,k))")
    want = "(n-5)*(n-4)*(n-3)*(n-2)*(-k+2*n-1)/((3*n^2-24*n-3*k*n+12*k+k^2+47)*(n-2-k)*(-k+n-1)*(-k+n))"
    assert code == 0 and parse_ratfunc(out) == parse_ratfunc(want)
    code, out, _ = run(capsys, "--json", "simplify", "(n+1)!/n!")
    assert json.loads(out) == {"kind": "ratfunc", "value": "n+1"}


def test_cli_usage_errors(capsys):
    code, _, err = run(capsys, "gosper", "binomial(n,", "k")
    assert code == 2 and "error" in err
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_cli_corpus(capsys, tmp_path):
    code, out, _ = run(capsys, "corpus", "run", "builtin", "--filter", "bailey.vandermonde")
    assert code == 0 and out.splitlines()[0].startswith("match    bailey.vandermonde verified")
    bad = tmp_path / "bad.txt"
    bad.write_text("version: 1\n\nid: x\nmode: gosper\nsummand: k\nexpected: k*(k+1)\n")
    code, out, _ = run(capsys, "--json", "corpus", "run", str(bad))
    data = json.loads(out)
    assert code == 1 and data["results"][0]["status"] == "mismatch"
    broken = tmp_path / "broken.txt"
    broken.write_text("version: 1\n\nid: x\nmode: gosper\nbogus: 1\n")
    code, _, err = run(capsys, "corpus", "run", str(broken))
    assert code == 2 and "line 5" in err


CORPUS = """version: 1
# comment

id: one
mode: gosper
summand: k
expected: k*(k+1)/2

id: two
mode: wz
summand: 2^(-n)*binomial(n,k)
expected: (k-n)/n
"""


def test_parse_corpus():
    entries = parse_corpus(CORPUS)
    assert [e.id for e in entries] == ["one", "two"]
    assert entries[1].rhs == "constant" and entries[0].line == 4


@pytest.mark.parametrize(
    "text, line",
    [
        ("id: x\n", 1),
        ("version: 1\n\nid: x\nmode: nope\nsummand: k\nexpected: k\n", 4),
        ("version: 1\n\nid: x\nid: y\n", 4),
        (CORPUS + "\nid: one\nmode: gosper\nsummand: k\nexpected: k\n", 14),
        ("version: 1\n\nid: x\nmode: gosper\nsummand: k\n", 3),
        ("version: 1\n\nid: x\nmode: wz\nsummand: k\nexpected: k\nstrides: 2\n", 7),
    ],
)
def test_corpus_format_errors(text, line):
    with pytest.raises(CorpusFormatError) as info:
        parse_corpus(text)
    assert info.value.line == line


def test_corrupted_expected_is_mismatch():
    entry = parse_corpus(CORPUS.replace("(k-n)/n", "(k-n)/n+1"))[1]
    result = evaluate_entry(entry)
    assert result["status"] == "mismatch" and result["got"]


def test_vandermonde_fast():
    start = time.perf_counter()
    report = run_corpus(builtin_corpus_files(), "bailey.vandermonde", timeout_s=60)
    assert len(report.results) == 1 and report.ok
    assert time.perf_counter() - start < 5


def test_run_is_deterministic(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text(CORPUS)
    strip = lambda rep: [(r.id, r.status, r.got, r.verified) for r in rep.results]
    assert strip(run_corpus(path, isolate=False)) == strip(run_corpus(path, isolate=False))


def test_timeout_reported(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text(CORPUS)
    report = run_corpus(path, "two", timeout_s=0.0001)
    assert report.results[0].status == "timeout"


def test_builtin_files_parse():
    ids = [e.id for p in builtin_corpus_files() for e in load_corpus(p)]
    assert len(ids) == len(set(ids))
    assert {"gs.1.9", "gs.6.1", "bailey.dougall7", "app.01.gosper"} <= set(ids)
