"""Text formats: amplitude expressions, machine files and input superpositions.

Amplitude grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := number | 'i' | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')' | '-' factor

Machine file (``qtm`` header)::

    qtm
    alphabet: _ 1 $
    states: q0 r qf
    source: q0
    target: qf
    initial: q0
    final: qf
    rule: q0 1 -> r 1 R  1/sqrt(2)

B&V machine files use the header ``bvqtm`` and omit ``source:``/``target:``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

from .errors import ParseError, StructureError
from .machine import QTMDef, Rule, StateInfo
from .tape import Direction, Symbol

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/()|>]))"
)


@dataclass
class _Tok:
    kind: str  # num, name, op, end
    text: str
    col: int  # 1-based


def _tokenize(text: str, line=None, col0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        mo = _TOKEN.match(text, pos)
        if not mo:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = mo.lastgroup
        toks.append(_Tok(kind, mo.group(kind), col0 + mo.start(kind)))
        pos = mo.end()
    toks.append(_Tok("end", "", col0 + len(text)))
    return toks


class _ExprParser:
    def __init__(self, toks: list[_Tok], line=None):
        self.toks = toks
        self.i = 0
        self.line = line

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, self.line, tok.col)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    def expr(self) -> complex:
        value = self.term()
        while True:
            if self.accept("+"):
                value += self.term()
            elif self.accept("-"):
                value -= self.term()
            else:
                return value

    def term(self) -> complex:
        value = self.factor()
        while True:
            if self.accept("*"):
                value *= self.factor()
            elif self.accept("/"):
                tok = self.tok
                divisor = self.factor()
                if divisor == 0:
                    self.error("division by zero", tok)
                value /= divisor
            else:
                return value

    def factor(self) -> complex:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return complex(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text == "i":
                return 1j
            if tok.text == "pi":
                return complex(math.pi)
            if tok.text == "sqrt":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                if arg.imag == 0 and arg.real >= 0:
                    return complex(math.sqrt(arg.real))
                # +0.0 clears a negative-zero imaginary part left by unary minus
                return cmath.sqrt(complex(arg.real, arg.imag + 0.0))
            self.error(f"unknown name {tok.text!r}", tok)
        if self.accept("("):
            value = self.expr()
            self.expect(")")
            return value
        if self.accept("-"):
            return -self.factor()
        found = tok.text or "end of input"
        self.error(f"expected a number, 'i', 'pi', 'sqrt' or '(', found {found!r}", tok)


def parse_amplitude(text: str, line=None, col0: int = 1) -> complex:
    """Evaluate an amplitude expression in double precision."""
    p = _ExprParser(_tokenize(text, line, col0), line)
    value = p.expr()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    return value


def parse_superposition(text: str) -> list[tuple[complex, int]]:
    """Parse ``amp|n> + amp|n> ...`` into ``[(amp, n), ...]``.

    A missing amplitude means 1; a leading or joining ``-`` negates it.
    """
    toks = _tokenize(text)
    p = _ExprParser(toks)
    terms = []
    sign = 1.0
    if p.accept("-"):
        sign = -1.0
    else:
        p.accept("+")
    while True:
        if p.tok.kind == "op" and p.tok.text == "|":
            amp = 1 + 0j
        else:
            amp = p.expr()
        p.expect("|")
        tok = p.tok
        if tok.kind != "num" or not tok.text.isdigit():
            p.error("expected a natural number after '|'")
        p.i += 1
        p.expect(">")
        terms.append((sign * amp, int(tok.text)))
        if p.tok.kind == "end":
            return terms
        if p.accept("+"):
            sign = 1.0
        elif p.accept("-"):
            sign = -1.0
        else:
            p.error(f"expected '+' or '-' between terms, found {p.tok.text!r}")


def parse_direction(text: str, line=None, col=None) -> Direction:
    try:
        return Direction(text)
    except ValueError:
        raise ParseError(f"direction must be L or R, found {text!r}", line, col) from None


# --- machine files -------------------------------------------------------

_KEYS = ("alphabet", "states", "source", "target", "initial", "final")


@dataclass
class RawMachine:
    """Line-level contents of a machine file before semantic checks."""

    header: str
    fields: dict
    rules: list  # (from, read, to, write, dir, amp, line)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _split_with_cols(text: str, col0: int):
    return [(m.group(), col0 + m.start()) for m in re.finditer(r"\S+", text)]


def parse_raw(text: str) -> RawMachine:
    header = None
    fields: dict = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if header is None:
            header = line.strip()
            if header not in ("qtm", "bvqtm"):
                raise ParseError(f"expected header 'qtm' or 'bvqtm', found {header!r}", lineno, 1)
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError("expected 'key: value'", lineno, 1)
        col0 = line.index(":") + 2
        if key == "rule":
            rules.append(_parse_rule(rest, lineno, col0))
        elif key in _KEYS:
            if key in fields:
                raise ParseError(f"duplicate '{key}:' line", lineno, 1)
            fields[key] = ([w for w, _ in _split_with_cols(rest, col0)], lineno)
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if header is None:
        raise ParseError("empty machine file", 1, 1)
    return RawMachine(header, fields, rules)


def _parse_rule(rest: str, lineno: int, col0: int):
    words = _split_with_cols(rest, col0)
    if len(words) < 6 or words[2][0] != "->":
        raise ParseError("rule must read '<q> <a> -> <p> <b> <L|R> <amplitude>'", lineno, col0)
    (q, _), (a, ca), _, (p, _), (b, cb), (d, cd) = words[:6]
    for glyph, col in ((a, ca), (b, cb)):
        if glyph.endswith("'"):
            raise ParseError("marked symbols cannot appear in rule files", lineno, col)
    direction = parse_direction(d, lineno, cd)
    amp_col = words[6][1] if len(words) > 6 else cd + len(d)
    amp_text = rest[amp_col - col0 :] if len(words) > 6 else ""
    if not amp_text.strip():
        raise ParseError("missing amplitude", lineno, amp_col)
    amp = parse_amplitude(amp_text, lineno, amp_col)
    return (q, Symbol(a), p, Symbol(b), direction, amp, lineno)


def _field(raw: RawMachine, key: str, required=True):
    if key not in raw.fields:
        if required:
            raise ParseError(f"missing '{key}:' line")
        return [], None
    return raw.fields[key]


def _single(raw: RawMachine, key: str) -> str:
    words, lineno = _field(raw, key)
    if len(words) != 1:
        raise ParseError(f"'{key}:' takes exactly one state", lineno, 1)
    return words[0]


def _check_states(raw, states, names, key):
    for name in names:
        if name not in states:
            _, lineno = raw.fields[key]
            raise ParseError(f"unknown state {name!r} in '{key}:'", lineno, 1)


def load_qtm(text: str, name: str = ""):
    """Parse a ``qtm`` file into an (unvalidated) :class:`QTMDef`."""
    raw = parse_raw(text)
    if raw.header != "qtm":
        raise ParseError(f"expected header 'qtm', found {raw.header!r}", 1, 1)
    alphabet, _ = _field(raw, "alphabet")
    states, _ = _field(raw, "states")
    sources, _ = _field(raw, "source")
    targets, _ = _field(raw, "target")
    initial = _single(raw, "initial")
    final = _single(raw, "final")
    for key, names in (("source", sources), ("target", targets), ("initial", [initial]), ("final", [final])):
        _check_states(raw, states, names, key)
    if set(sources) & set(targets):
        raise ParseError("a state cannot be both source and target", raw.fields["source"][1], 1)
    try:
        infos = [
            StateInfo(s, s in sources, s in targets, s == initial, s == final) for s in states
        ]
    except StructureError as exc:
        raise ParseError(str(exc)) from exc
    rules = []
    for q, a, p, b, d, amp, lineno in raw.rules:
        for s in (q, p):
            if s not in states:
                raise ParseError(f"unknown state {s!r}", lineno, 1)
        for sym in (a, b):
            if sym.base not in alphabet:
                raise ParseError(f"unknown symbol {sym.base!r}", lineno, 1)
        rules.append(Rule(q, a, p, b, d, amp))
    try:
        return QTMDef(tuple(alphabet), tuple(infos), tuple(rules), name=name)
    except StructureError as exc:
        raise ParseError(str(exc)) from exc


def format_amplitude(a: complex) -> str:
    """Render an amplitude so that :func:`parse_amplitude` reads it back exactly."""
    re_, im = a.real, a.imag
    if im == 0:
        return repr(re_)
    if re_ == 0:
        return f"{im!r}*i"
    sign = "-" if im < 0 else "+"
    return f"({re_!r} {sign} {abs(im)!r}*i)"


def dump_qtm(m) -> str:
    lines = ["qtm"]
    if m.name:
        lines.append(f"# {m.name}")
    lines.append("alphabet: " + " ".join(m.alphabet))
    lines.append("states: " + " ".join(s.id for s in m.states))
    src = [m.initial] + [s.id for s in m.states if s.is_source and s.id != m.initial]
    tgt = [m.final] + [s.id for s in m.states if s.is_target and s.id != m.final]
    lines.append("source: " + " ".join(src))
    lines.append("target: " + " ".join(tgt))
    lines.append(f"initial: {m.initial}")
    lines.append(f"final: {m.final}")
    for r in m.rules:
        lines.append(
            f"rule: {r.from_state} {r.read.glyph} -> {r.to_state} {r.write.glyph} {r.dir.value} "
            f"{format_amplitude(r.amp)}"
        )
    return "\n".join(lines) + "\n"
