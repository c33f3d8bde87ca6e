import dataclasses
import math
from pathlib import Path

import pytest

from qtmlab import corpus
from qtmlab.bvcompat import (
    BVInvalid, HaltKind, bounded_equiv, bv_input, bv_trajectory, convert, dump_bv, halt_detect, load_bv,
    validate_bv,
)
from qtmlab.errors import ParseError
from qtmlab.machine import Rule, check_local_unitarity
from qtmlab.tape import Direction, Symbol

MACHINES = Path(__file__).resolve().parent.parent / "machines"
H = 1 / math.sqrt(2)


def _without_loops(bv):
    return dataclasses.replace(bv, rules=tuple(r for r in bv.rules if r.from_state != bv.final))


@pytest.mark.parametrize("bv", [corpus.succ_finite_bv(), corpus.coin_bv()], ids=lambda b: b.name)
def test_corpus_bv_machines_convert(bv):
    assert validate_bv(bv).passed
    m = convert(bv)
    assert m.validated and check_local_unitarity(m).passed
    assert m.initial == bv.initial and m.final == bv.final
    assert all(r.from_state != bv.final for r in m.rules)


def test_missing_loops_are_reported_and_completed():
    bare = _without_loops(corpus.succ_finite_bv())
    lines = validate_bv(bare).render().splitlines()
    assert "violation missing loop row (qf,_) -> (q0,_,R) 1" in lines
    assert lines[-1] == "FAIL"
    with pytest.raises(BVInvalid):
        convert(bare)
    assert validate_bv(bare.with_loops()).passed


def test_transition_into_initial_state_rejected():
    bv = corpus.succ_finite_bv()
    rules = tuple(r if (r.from_state, r.read) != ("r", Symbol("1")) else
                  Rule("r", Symbol("1"), "q0", Symbol("1"), Direction.R, 1) for r in bv.rules)
    report = validate_bv(dataclasses.replace(bv, rules=rules))
    assert any(v.startswith("transition into initial state") for v in report.violations)


def test_halt_detect():
    bv = corpus.succ_finite_bv()
    for n in range(4):
        hd = halt_detect(bv, n, 50)
        assert hd.halted and hd.step == n + 2
        assert halt_detect(convert(bv), n, 50) == hd
    assert halt_detect(corpus.coin_bv(), 3, 30).kind is HaltKind.NONE
    mixed = halt_detect(corpus.coin_bv(), [(H, 1), (H, 3)], 30)
    assert mixed.kind is HaltKind.STATIONARITY_VIOLATION and mixed.step == 3


def test_bounded_equiv_and_mutation():
    bv = corpus.succ_finite_bv()
    m = convert(bv)
    assert all(bounded_equiv(bv, m, n, n + 2) for n in range(5))
    swapped = dataclasses.replace(m, rules=tuple(
        r._replace(write=Symbol("_")) if (r.from_state, r.read) == ("r", Symbol("1")) else r for r in m.rules
    ))
    assert not bounded_equiv(bv, swapped, 2, 4)


def test_independent_trajectory_keeps_norm():
    bv = corpus.coin_bv()
    for vec in bv_trajectory(bv, bv_input(bv, [(H, 1), (H, 3)]), 12):
        assert math.fsum(abs(a) ** 2 for a in vec.values()) == pytest.approx(1)


@pytest.mark.parametrize("stem", ["succ_finite", "coin"])
def test_files_round_trip(stem):
    text = (MACHINES / f"{stem}.bvqtm").read_text()
    bv = load_bv(text, name=stem.upper())
    assert dump_bv(bv) == text
    assert bv.rules == getattr(corpus, f"{stem}_bv")().rules


def test_load_bv_complete_loops():
    bare = dump_bv(_without_loops(corpus.succ_finite_bv()))
    assert not validate_bv(load_bv(bare)).passed
    assert validate_bv(load_bv(bare, complete_loops=True)).passed


@pytest.mark.parametrize("text", [
    "qtm\nalphabet: _ 1\nstates: a b\ninitial: a\nfinal: b\n",
    "bvqtm\nalphabet: _ 1\nstates: a b\nsource: a\ninitial: a\nfinal: b\n",
    "bvqtm\nalphabet: _ 1\nstates: a b\ninitial: a\nfinal: a\n",
    "bvqtm\nalphabet: _ 1\nstates: a b\ninitial: a\nfinal: b\nrule: a 1' -> b 1 R 1\n",
])
def test_bad_bv_files(text):
    with pytest.raises(ParseError):
        load_bv(text)
