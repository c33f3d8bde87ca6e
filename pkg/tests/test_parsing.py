import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtmlab import corpus
from qtmlab.errors import ParseError
from qtmlab.parsing import dump_qtm, format_amplitude, load_qtm, parse_amplitude, parse_superposition

MACHINES = Path(__file__).resolve().parent.parent / "machines"

HEADER = """qtm
alphabet: _ 1
states: q0 qf
source: q0
target: qf
initial: q0
final: qf
"""


@pytest.mark.parametrize("text, value", [
    ("1/sqrt(2)", 1 / math.sqrt(2)),
    ("-i*2", -2j),
    ("(1+2*i)/2", 0.5 + 1j),
    ("pi", math.pi),
    ("sqrt(-1)", 1j),
    ("- -3", 3),
    ("1.5e1", 15),
])
def test_amplitudes(text, value):
    assert parse_amplitude(text) == pytest.approx(value)


@pytest.mark.parametrize("text, column", [("2**3", 3), ("1/0", 3), ("1 +", 4), ("x", 1), ("1 # 2", 3)])
def test_amplitude_errors_carry_columns(text, column):
    with pytest.raises(ParseError) as info:
        parse_amplitude(text)
    assert info.value.column == column


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_format_amplitude_round_trip(a):
    assert parse_amplitude(format_amplitude(a)) == a


def test_superpositions():
    assert parse_superposition("|1>") == [(1, 1)]
    terms = parse_superposition("-1/sqrt(2)|0> - 1/sqrt(2)|3>")
    assert [n for _, n in terms] == [0, 3]
    assert all(a == pytest.approx(-1 / math.sqrt(2)) for a, _ in terms)
    assert parse_superposition("i|2>") == [(1j, 2)]


@pytest.mark.parametrize("text", ["1|2", "|a>", "|1> |2>", ""])
def test_bad_superpositions(text):
    with pytest.raises(ParseError):
        parse_superposition(text)


def test_bad_direction_reports_line_and_column():
    with pytest.raises(ParseError) as info:
        load_qtm(HEADER + "rule: q0 1 -> qf 1 X 1\n")
    assert (info.value.line, info.value.column) == (8, 20)
    assert str(info.value).startswith("line 8, column 20:")


@pytest.mark.parametrize("body", [
    "rule: q0 z -> qf 1 R 1\n",          # unknown symbol
    "rule: q0 1 -> nowhere 1 R 1\n",     # unknown state
    "rule: q0 1 -> qf 1 R 1/0\n",        # bad amplitude
    "rule: qf 1 -> q0 1 R 1\n",          # leaves a target, enters a source
    "rule: q0 1 -> qf 1 R 1\nrule: q0 1 -> qf 1 R 1\n",  # duplicate
    "bogus: 3\n",
])
def test_bad_machine_files(body):
    with pytest.raises(ParseError):
        load_qtm(HEADER + body)


def test_wrong_header_and_missing_field():
    with pytest.raises(ParseError):
        load_qtm(HEADER.replace("qtm", "bvqtm", 1))
    with pytest.raises(ParseError):
        load_qtm(HEADER.replace("final: qf\n", ""))


def test_comments_and_blank_lines_ignored():
    m = load_qtm(HEADER + "\n# comment\nrule: q0 1 -> qf 1 R 1  # trailing\n")
    assert len(m.rules) == 1


@pytest.mark.parametrize("m", corpus.build_corpus() + corpus.build_broken(), ids=str)
def test_dump_load_round_trip(m):
    again = load_qtm(dump_qtm(m), name=m.name)
    assert again.rules == m.rules
    assert again.states == m.states
    assert dump_qtm(again) == dump_qtm(m)


@pytest.mark.parametrize("stem", ["succ_finite", "coin", "succ_limit", "broken_norm"])
def test_shipped_files_match_corpus(stem):
    m = load_qtm((MACHINES / f"{stem}.qtm").read_text())
    reference = {**corpus.corpus_by_name(), "BROKEN_NORM": corpus.broken_norm()}[stem.upper()]
    assert m.rules == reference.rules
