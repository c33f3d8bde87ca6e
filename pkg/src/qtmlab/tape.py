"""Tape symbols and canonical machine configurations.

A configuration is a triple ``<left, state, right>``.  The head scans the
first symbol of ``right``; an empty ``right`` means the head is on a blank.
Configurations are kept in canonical form: ``left`` never starts with an
unmarked blank and ``right`` never ends with one.  Marked blanks are real
tape content and are never stripped.
"""
from __future__ import annotations

from enum import Enum
from typing import NamedTuple

from .errors import ParseError, ProtocolViolation

BLANK_GLYPH = "_"
ONE_GLYPH = "1"
MARK = "'"


class Symbol(str):
    """A tape symbol: a base glyph, possibly marked.

    Symbols are interned strings equal to their glyph (``"1"``, ``"1'"``).
    Strings cache their hash, which keeps hashing long tapes cheap.
    """

    _interned: dict = {}

    def __new__(cls, base: str, marked: bool = False):
        key = (base, bool(marked))
        sym = cls._interned.get(key)
        if sym is None:
            if not base or MARK in base or any(ch.isspace() for ch in base):
                raise ValueError(f"bad symbol base {base!r}")
            sym = super().__new__(cls, base + MARK if marked else base)
            sym.base = base
            sym.marked = bool(marked)
            cls._interned[key] = sym
            sym._twin = cls(base, not marked)
            sym._twin._twin = sym
        return sym

    @property
    def glyph(self) -> str:
        return str.__str__(self)

    def mark(self) -> "Symbol":
        return self._twin if not self.marked else self

    def unmark(self) -> "Symbol":
        return self._twin if self.marked else self

    def __repr__(self):
        return f"Symbol({self.base!r}, {self.marked})"

    def __reduce__(self):
        return (Symbol, (self.base, self.marked))

    @classmethod
    def parse(cls, glyph: str) -> "Symbol":
        if glyph.endswith(MARK):
            return cls(glyph[: -len(MARK)], True)
        return cls(glyph, False)


BLANK = Symbol(BLANK_GLYPH)
ONE = Symbol(ONE_GLYPH)


class Direction(str, Enum):
    L = "L"
    R = "R"

    def __str__(self):
        return self.value


L, R = Direction.L, Direction.R


class ConfigClass(str, Enum):
    S0 = "S0"
    Ss = "Ss"
    St = "St"


class Configuration(NamedTuple):
    left: tuple[Symbol, ...]
    state: str
    right: tuple[Symbol, ...]

    @property
    def current(self) -> Symbol:
        return self.right[0] if self.right else BLANK

    def marks(self) -> int:
        return sum(s.marked for s in self.left) + sum(s.marked for s in self.right)

    def __str__(self):
        return render(self)


def _strip(left, right):
    i = 0
    while i < len(left) and left[i] == BLANK:
        i += 1
    j = len(right)
    while j > 0 and right[j - 1] == BLANK:
        j -= 1
    return tuple(left[i:]), tuple(right[:j])


def canonicalize(left, state: str, right) -> Configuration:
    left, right = _strip(left, right)
    return Configuration(left, state, right)


def config(left: str, state: str, right: str) -> Configuration:
    """Build a configuration from whitespace-separated glyph strings.

    ``"-"`` or ``""`` denotes the empty string.
    """
    return canonicalize(_parse_seq(left), state, _parse_seq(right))


def _parse_seq(text: str) -> tuple[Symbol, ...]:
    text = text.strip()
    if text in ("", "-"):
        return ()
    return tuple(Symbol.parse(g) for g in text.split())


def _render_seq(seq) -> str:
    return " ".join(s.glyph for s in seq) if seq else "-"


def render(c: Configuration) -> str:
    """Canonical text form ``<alpha> | q | <beta>``; doubles as the hash key."""
    return f"{_render_seq(c.left)} | {c.state} | {_render_seq(c.right)}"


def parse_configuration(text: str) -> Configuration:
    parts = text.split("|")
    if len(parts) != 3 or not parts[1].strip():
        raise ParseError(f"expected '<alpha> | q | <beta>', got {text!r}")
    return canonicalize(_parse_seq(parts[0]), parts[1].strip(), _parse_seq(parts[2]))


def step(c: Configuration, p: str, v: Symbol, d: Direction) -> Configuration:
    """Write ``v`` under the head, move in direction ``d``, enter state ``p``."""
    left, right = c.left, c.right
    if d is Direction.R:
        new_left = left + (v,) if (left or v != BLANK) else ()
        new_right = right[1:]
        return Configuration(new_left, p, new_right)
    w = left[-1] if left else BLANK
    new_right = (w, v) + right[1:]
    if not right[1:]:
        # only the two new cells can introduce trailing blanks
        _, new_right = _strip((), new_right)
    return Configuration(left[:-1], p, new_right)


def reverse_step(c: Configuration, q: str, u: Symbol, d: Direction) -> Configuration:
    """Undo a ``d``-step, restoring state ``q`` and current symbol ``u``.

    An R-step is undone by moving back onto the cell left of the head (the
    current R-reverse symbol); an L-step by moving back onto the cell right
    of the head (the current L-reverse symbol).
    """
    left, right = c.left, c.right
    if d is Direction.R:
        new_right = (u,) + right
        if not right and u == BLANK:
            new_right = ()
        return Configuration(left[:-1], q, new_right)
    w = right[0] if right else BLANK
    new_left = left + (w,) if (left or w != BLANK) else ()
    new_right = (u,) + right[2:]
    if not right[2:] and u == BLANK:
        new_right = ()
    return Configuration(new_left, q, new_right)


def reverse_symbols(c: Configuration) -> tuple[Symbol, Symbol]:
    """The current R-reverse and L-reverse symbols ``(v_R, v_L)`` of ``c``."""
    v_r = c.left[-1] if c.left else BLANK
    v_l = c.right[1] if len(c.right) > 1 else BLANK
    return v_r, v_l


def val(c: Configuration) -> int:
    """Number of ``1`` symbols on the tape, marked or not."""
    return sum(s.base == ONE_GLYPH for s in c.left) + sum(s.base == ONE_GLYPH for s in c.right)


def mark_k(c: Configuration, k: int, machine=None) -> Configuration:
    """Mark the current cell and the ``k - 1`` cells to its right.

    The head ends just past the marked block, which is where ``k`` steps
    of a target state leave it.  Past the right content the tape is padded
    with marked blanks.  When ``machine`` is given, ``c`` must be in its
    final state.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if machine is not None and c.state != machine.final:
        raise ProtocolViolation(f"{render(c)} is not a final configuration")
    if c.marks():
        raise ProtocolViolation(f"{render(c)} already contains marked symbols")
    right = c.right
    block = tuple(s.mark() for s in right[:k]) + (BLANK.mark(),) * max(0, k - len(right))
    return Configuration(c.left + block, c.state, right[k:])


def initial_configuration(n: int, initial_state: str) -> Configuration:
    """``<lambda, q_i, 1^(n+1)>``, the unary encoding of ``n``."""
    if n < 0:
        raise ValueError("n must be a natural number")
    return Configuration((), initial_state, (ONE,) * (n + 1))


def _all_unmarked(seq) -> bool:
    return not any(s.marked for s in seq)


def _marked_then_unmarked(seq) -> bool:
    i = 0
    while i < len(seq) and seq[i].marked:
        i += 1
    return _all_unmarked(seq[i:])


def _unmarked_then_marked(seq) -> bool:
    j = len(seq)
    while j > 0 and seq[j - 1].marked:
        j -= 1
    return _all_unmarked(seq[:j])


def well_formed(c: Configuration, m) -> bool:
    """Check the placement rules for marked symbols against machine ``m``."""
    q = c.state
    if q not in m.state_ids:
        raise ProtocolViolation(f"unknown state {q!r}")
    if any(s.base not in m.alphabet for s in c.left + c.right):
        return False
    if m.is_source(q):
        return _all_unmarked(c.left) and _marked_then_unmarked(c.right)
    if m.is_target(q):
        return _all_unmarked(c.right) and _unmarked_then_marked(c.left)
    return _all_unmarked(c.left) and _all_unmarked(c.right)


def classify(c: Configuration, m) -> ConfigClass:
    """Which transition function applies to ``c``."""
    if not well_formed(c, m):
        raise ProtocolViolation(f"ill-formed configuration {render(c)}")
    q, u = c.state, c.current
    if m.is_target(q):
        if u.marked:
            raise ProtocolViolation(f"target state reading marked symbol: {render(c)}")
        return ConfigClass.St
    if u.marked:
        if m.is_source(q):
            return ConfigClass.Ss
        raise ProtocolViolation(f"neutral state reading marked symbol: {render(c)}")
    return ConfigClass.S0
