"""Reference machines.

SUCC_FINITE
    Classical reversible machine.  Erases the leading 1, walks right over the
    remaining 1s and writes a 1 on the first blank, entering the final state.
    On ``|n>`` it halts after ``n + 2`` steps with output ``n + 1``.

COIN
    Classical reversible machine counting the first three cells.  Exactly two
    1s lead to the final state (output 2, three steps); a third 1 sends the
    head into an endless walk over the blanks.  Input ``|1>`` halts with 2,
    input ``|3>`` diverges.

SUCC_LIMIT
    Walks to the end of the input like SUCC_FINITE, then flips a coin at each
    blank: amplitude 1/sqrt(2) writes the missing 1 and halts, amplitude
    1/sqrt(2) writes ``$`` and tries again one cell further right.  The
    output ``n + 1`` is reached with probability ``1 - 2**-k`` after ``k``
    rounds and with probability 1 only in the limit.

Each of the first two also exists as a B&V machine with the final-to-initial
loop rows written out.
"""
from __future__ import annotations

import math

from .machine import QTMDef, Rule, StateInfo, validate
from .tape import Direction, Symbol

R, L = Direction.R, Direction.L
S = Symbol
H = 1 / math.sqrt(2)


def _states(initial, final, neutral=()):
    return (
        StateInfo(initial, is_source=True, is_initial=True),
        *(StateInfo(q) for q in neutral),
        StateInfo(final, is_target=True, is_final=True),
    )


def _rules(table):
    return tuple(Rule(q, S(a), p, S(b), d, amp) for q, a, p, b, d, amp in table)


SUCC_FINITE_TABLE = [
    ("q0", "1", "r", "_", R, 1),
    ("q0", "_", "qf", "_", R, 1),
    ("r", "1", "r", "1", R, 1),
    ("r", "_", "qf", "1", R, 1),
]

COIN_TABLE = [
    ("q0", "1", "r1", "1", R, 1),
    ("q0", "_", "r1", "_", R, 1),
    ("r1", "1", "r2", "1", R, 1),
    ("r1", "_", "r2", "_", R, 1),
    ("r2", "_", "qf", "_", R, 1),
    ("r2", "1", "g", "_", R, 1),
    ("g", "1", "g", "1", R, 1),
    ("g", "_", "h", "1", R, 1),
    ("h", "_", "h", "_", R, 1),
    ("h", "1", "qf", "1", R, 1),
]

SUCC_LIMIT_TABLE = [
    ("q0", "1", "r", "_", R, 1),
    ("q0", "_", "qf", "_", R, 1),
    ("q0", "$", "qf", "$", R, 1),
    ("r", "1", "r", "1", R, 1),
    ("r", "_", "qf", "1", R, H),
    ("r", "_", "r", "$", R, H),
    ("r", "$", "qf", "1", R, H),
    ("r", "$", "r", "$", R, -H),
]


def succ_finite() -> QTMDef:
    m = QTMDef(("_", "1"), _states("q0", "qf", ["r"]), _rules(SUCC_FINITE_TABLE), name="SUCC_FINITE")
    return validate(m)


def coin() -> QTMDef:
    m = QTMDef(
        ("_", "1"), _states("q0", "qf", ["r1", "r2", "g", "h"]), _rules(COIN_TABLE), name="COIN"
    )
    return validate(m)


def succ_limit() -> QTMDef:
    m = QTMDef(("_", "1", "$"), _states("q0", "qf", ["r"]), _rules(SUCC_LIMIT_TABLE), name="SUCC_LIMIT")
    return validate(m)


def build_corpus() -> list[QTMDef]:
    return [succ_finite(), coin(), succ_limit()]


def corpus_by_name() -> dict[str, QTMDef]:
    return {m.name: m for m in build_corpus()}


def succ_limit_halting_step(n: int, rounds: int) -> int:
    """Step after which ``rounds`` coin flips have happened on input ``n``."""
    return n + 1 + rounds


# Inputs used throughout the tests, as ``[(amplitude, n), ...]``.
EXAMPLE1_INPUT = [(H, 1), (H, 3)]

CORPUS_INPUTS = {
    "SUCC_FINITE": [[(1, n)] for n in range(6)] + [[(H, 0), (-H * 1j, 4)]],
    "COIN": [[(1, 1)], [(1, 3)], EXAMPLE1_INPUT, [(0.6, 0), (0.8j, 3)]],
    "SUCC_LIMIT": [[(1, n)] for n in range(4)] + [[(H, 1), (H, 2)]],
}


# --- B&V versions -----------------------------------------------------------


def _bv_rules(table, alphabet, initial="q0", final="qf"):
    loops = [(final, a, initial, a, R, 1) for a in alphabet]
    return _rules(table) + _rules(loops)


def succ_finite_bv():
    from .bvcompat import BVQTM

    return BVQTM(("_", "1"), ("q0", "r", "qf"), "q0", "qf", _bv_rules(SUCC_FINITE_TABLE, "_1"), name="SUCC_FINITE")


def coin_bv():
    from .bvcompat import BVQTM

    return BVQTM(
        ("_", "1"), ("q0", "r1", "r2", "g", "h", "qf"), "q0", "qf", _bv_rules(COIN_TABLE, "_1"), name="COIN"
    )


# --- deliberately broken machines, one per violated condition ---------------


def broken_norm() -> QTMDef:
    """A row of squared norm 0.25 (condition 1 fails by 0.75)."""
    table = [t if t[:2] != ("r", "1") else ("r", "1", "r", "1", R, 0.5) for t in SUCC_FINITE_TABLE]
    return QTMDef(("_", "1"), _states("q0", "qf", ["r"]), _rules(table), name="BROKEN_NORM")


def broken_orth() -> QTMDef:
    """Two rows send all their weight to the same column (condition 2 fails by 1)."""
    table = [t if t[:2] != ("q0", "_") else ("q0", "_", "qf", "1", R, 1) for t in SUCC_FINITE_TABLE]
    return QTMDef(("_", "1"), _states("q0", "qf", ["r"]), _rules(table), name="BROKEN_ORTH")


def broken_sep() -> QTMDef:
    """State r is entered both from the left and from the right (condition 3 fails by 1)."""
    table = [t if t[:2] != ("q0", "_") else ("q0", "_", "r", "1", L, 1) for t in SUCC_FINITE_TABLE]
    return QTMDef(("_", "1"), _states("q0", "qf", ["r"]), _rules(table), name="BROKEN_SEP")


def broken_incomplete() -> QTMDef:
    table = [t for t in SUCC_FINITE_TABLE if t[:2] != ("r", "_")]
    return QTMDef(("_", "1"), _states("q0", "qf", ["r"]), _rules(table), name="BROKEN_INCOMPLETE")


def build_broken() -> list[QTMDef]:
    return [broken_norm(), broken_orth(), broken_sep()]
