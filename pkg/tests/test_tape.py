import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtmlab import corpus
from qtmlab.errors import ParseError, ProtocolViolation
from qtmlab.tape import (
    BLANK, ConfigClass, Direction, Symbol, canonicalize, classify, config, initial_configuration,
    mark_k, parse_configuration, render, reverse_step, reverse_symbols, step, val, well_formed,
)

R, L = Direction.R, Direction.L
glyphs = st.sampled_from(["_", "1", "$"])
words = st.lists(glyphs, max_size=5).map(lambda gs: tuple(Symbol(g) for g in gs))


def test_symbols_are_interned_with_marked_twins():
    one = Symbol("1")
    assert Symbol("1") is one
    assert one.mark() is Symbol("1", True)
    assert one.mark().unmark() is one
    assert one.mark().glyph == "1'"
    assert Symbol.parse("_'") == BLANK.mark()


@pytest.mark.parametrize("bad", ["", "a'", "a b"])
def test_bad_symbol(bad):
    with pytest.raises(ValueError):
        Symbol(bad)


def test_canonical_form_strips_only_unmarked_blanks():
    c = canonicalize((BLANK, Symbol("1")), "q", (Symbol("1"), BLANK, BLANK))
    assert render(c) == "1 | q | 1"
    kept = canonicalize((BLANK.mark(),), "q", (BLANK.mark(),))
    assert render(kept) == "_' | q | _'"


def test_render_parse_round_trip():
    text = "1 $ | r | 1' _ 1"
    assert render(parse_configuration(text)) == text
    assert parse_configuration("_ 1 | q | 1 _ _") == config("1", "q", "1")
    with pytest.raises(ParseError):
        parse_configuration("1 | q")


def test_step_examples():
    assert step(config("-", "q", "1"), "p", BLANK, R) == config("-", "p", "-")
    assert step(config("a", "q", "1"), "p", BLANK, L) == config("-", "p", "a")
    assert step(config("1", "q", "1 1"), "p", Symbol("$"), R) == config("1 $", "p", "1")
    assert step(config("1 $", "q", "1"), "p", Symbol("1"), L) == config("1", "p", "$ 1")


def test_reverse_symbols():
    assert reverse_symbols(config("1 $", "q", "1 _ 1")) == (Symbol("$"), BLANK)
    assert reverse_symbols(config("-", "q", "-")) == (BLANK, BLANK)


@given(words, words, glyphs, glyphs, st.sampled_from([R, L]))
def test_reverse_step_inverts_step(left, right, u, v, d):
    c = canonicalize(left, "q", right)
    u = Symbol(u)
    c = canonicalize(c.left, "q", (u,) + c.right[1:])  # make u the current symbol
    moved = step(c, "p", Symbol(v), d)
    assert reverse_step(moved, "q", c.current, d) == c


def test_val_counts_marked_ones():
    assert val(config("1 1'", "qf", "_ 1")) == 3
    assert val(initial_configuration(4, "q0")) == 5


def test_mark_k_examples():
    c = config("1", "qf", "1 _ 1")
    assert mark_k(c, 0) == c
    assert render(mark_k(c, 2)) == "1 1' _' | qf | 1"
    assert render(mark_k(c, 5)) == "1 1' _' 1' _' _' | qf | -"
    m = corpus.succ_finite()
    with pytest.raises(ProtocolViolation):
        mark_k(config("-", "q0", "1"), 1, m)
    with pytest.raises(ProtocolViolation):
        mark_k(mark_k(c, 1), 1)
    with pytest.raises(ValueError):
        mark_k(c, -1)


def test_well_formed_and_classify():
    m = corpus.succ_finite()
    assert classify(config("-", "q0", "1' 1"), m) is ConfigClass.Ss
    assert classify(config("1 1'", "qf", "1"), m) is ConfigClass.St
    assert classify(config("1", "r", "1"), m) is ConfigClass.S0
    assert not well_formed(config("1'", "q0", "1"), m)  # source marks live right of the head
    assert not well_formed(config("1", "qf", "1'"), m)  # target marks live left of the head
    assert not well_formed(config("1", "r", "1'"), m)
    assert not well_formed(config("-", "r", "$"), m)  # $ is not in SUCC_FINITE's alphabet
    with pytest.raises(ProtocolViolation):
        well_formed(config("-", "nowhere", "1"), m)


def test_initial_configuration():
    assert initial_configuration(0, "q0") == config("-", "q0", "1")
    with pytest.raises(ValueError):
        initial_configuration(-1, "q0")


def test_random_configurations_are_well_formed():
    import _support

    rng = random.Random(3)
    for m in corpus.build_corpus():
        for _ in range(50):
            assert well_formed(_support.random_configuration(m, rng), m)
