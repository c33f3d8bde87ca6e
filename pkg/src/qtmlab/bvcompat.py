"""Bernstein-Vazirani style machines and their conversion.

A B&V machine has a total transition table on ``Q x Sigma``, no marked
symbols, and loop rows ``(qf, a) -> (q0, a, R)`` as the only way out of the
final state and the only way into the initial one.  Conversion drops the
loop rows and declares ``q0`` the single source state and ``qf`` the single
target state.  The implicit source/target rows then take over.

This module simulates B&V machines with its own stepper, so the two
formalisms can be checked against each other.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from .errors import ParseError, QTMError, StructureError
from .evolution import QSuperposition, apply_U
from .hilbert import SparseVector
from .machine import DEFAULT_EPS, QTMDef, Rule, StateInfo, validate
from .parsing import _field, _single, format_amplitude, parse_raw
from .tape import BLANK_GLYPH, ONE_GLYPH, Direction, Symbol, initial_configuration, step

R = Direction.R


@dataclass(frozen=True)
class BVQTM:
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    final: str
    rules: tuple[Rule, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        if BLANK_GLYPH not in self.alphabet or ONE_GLYPH not in self.alphabet:
            raise StructureError("alphabet must contain the blank '_' and '1'")
        for q in (self.initial, self.final):
            if q not in self.states:
                raise StructureError(f"unknown state {q!r}")
        if self.initial == self.final:
            raise StructureError("initial and final states must differ")
        rules = []
        for r in self.rules:
            r = Rule(r.from_state, r.read, r.to_state, r.write, Direction(r.dir), complex(r.amp))
            if r.amp == 0:
                continue
            if r.from_state not in self.states or r.to_state not in self.states:
                raise StructureError(f"rule mentions unknown state: {r}")
            if r.read.marked or r.write.marked:
                raise StructureError("B&V machines have no marked symbols")
            if r.read.base not in self.alphabet or r.write.base not in self.alphabet:
                raise StructureError(f"rule mentions unknown symbol: {r}")
            rules.append(r)
        object.__setattr__(self, "rules", tuple(rules))

    @cached_property
    def rows(self):
        acc = defaultdict(list)
        for r in self.rules:
            acc[(r.from_state, r.read)].append(r)
        return dict(acc)

    @cached_property
    def symbols(self):
        return tuple(Symbol(a) for a in self.alphabet)

    def with_loops(self) -> "BVQTM":
        """Add any missing ``(qf, a) -> (q0, a, R)`` rows."""
        have = {(r.from_state, r.read, r.to_state, r.write, r.dir) for r in self.rules}
        extra = [
            Rule(self.final, a, self.initial, a, R, 1)
            for a in self.symbols
            if (self.final, a, self.initial, a, R) not in have
        ]
        return BVQTM(self.alphabet, self.states, self.initial, self.final, self.rules + tuple(extra), self.name)


@dataclass
class BVReport:
    violations: list[str] = field(default_factory=list)
    max_dev_norm: float = 0.0
    max_dev_orth: float = 0.0
    max_dev_sep: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def render(self) -> str:
        lines = [
            f"cond1 max_dev={self.max_dev_norm:.12g}",
            f"cond2 max_dev={self.max_dev_orth:.12g}",
            f"cond3 max_dev={self.max_dev_sep:.12g}",
        ]
        lines += ["violation " + v for v in self.violations]
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def validate_bv(m: BVQTM, eps: float = DEFAULT_EPS) -> BVReport:
    report = BVReport()
    q0, qf = m.initial, m.final
    for a in m.symbols:
        row = m.rows.get((qf, a), [])
        loop = [r for r in row if (r.to_state, r.write, r.dir) == (q0, a, R)]
        if not loop or abs(loop[0].amp - 1) > eps:
            report.violations.append(f"missing loop row ({qf},{a.glyph}) -> ({q0},{a.glyph},R) 1")
        for r in row:
            if (r.to_state, r.write, r.dir) != (q0, a, R):
                report.violations.append(f"extra transition out of final state ({qf},{a.glyph}) -> "
                                         f"({r.to_state},{r.write.glyph},{r.dir.value})")
    for r in m.rules:
        if r.to_state == q0 and not (r.from_state == qf and r.write == r.read and r.dir is R):
            report.violations.append(
                f"transition into initial state from ({r.from_state},{r.read.glyph})"
            )
    for q in m.states:
        for a in m.symbols:
            if (q, a) not in m.rows:
                report.violations.append(f"missing row ({q},{a.glyph})")

    # local unitary conditions on the full table
    for (q, a), row in m.rows.items():
        dev = abs(math.fsum(abs(r.amp) ** 2 for r in row) - 1)
        report.max_dev_norm = max(report.max_dev_norm, dev)
    cols = defaultdict(list)
    for r in m.rules:
        cols[(r.to_state, r.write, r.dir)].append(r)
    pairs = defaultdict(complex)
    for entries in cols.values():
        for i, r1 in enumerate(entries):
            for r2 in entries[i + 1:]:
                pairs[((r1.from_state, r1.read), (r2.from_state, r2.read))] += r2.amp.conjugate() * r1.amp
    report.max_dev_orth = max((abs(s) for s in pairs.values()), default=0.0)
    seps = defaultdict(complex)
    for r1 in m.rules:
        if r1.dir is not R:
            continue
        for r2 in m.rules:
            if r2.dir is R or r2.to_state != r1.to_state:
                continue
            seps[(r1.from_state, r1.read, r1.write, r2.from_state, r2.read, r2.write)] += (
                r2.amp.conjugate() * r1.amp
            )
    report.max_dev_sep = max((abs(s) for s in seps.values()), default=0.0)
    for label, dev in (("cond1", report.max_dev_norm), ("cond2", report.max_dev_orth),
                       ("cond3", report.max_dev_sep)):
        if dev > eps:
            report.violations.append(f"{label} max_dev={dev:.12g}")
    return report


class BVInvalid(QTMError):
    def __init__(self, report: BVReport):
        super().__init__("B&V constraints violated\n" + report.render())
        self.report = report


def convert(bv: BVQTM, eps: float = DEFAULT_EPS) -> QTMDef:
    report = validate_bv(bv, eps)
    if not report.passed:
        raise BVInvalid(report)
    states = tuple(
        StateInfo(q, is_source=q == bv.initial, is_target=q == bv.final,
                  is_initial=q == bv.initial, is_final=q == bv.final)
        for q in bv.states
    )
    rules = tuple(r for r in bv.rules if r.from_state != bv.final)
    return validate(QTMDef(bv.alphabet, states, rules, name=bv.name), eps)


# --- independent B&V simulation --------------------------------------------


def bv_apply(m: BVQTM, vec: SparseVector) -> SparseVector:
    out: dict = {}
    for c, a in vec.items():
        for r in m.rows.get((c.state, c.current), ()):
            d = step(c, r.to_state, r.write, r.dir)
            out[d] = out.get(d, 0j) + a * r.amp
    return SparseVector({k: v for k, v in out.items() if v != 0})


def bv_input(m: BVQTM, terms) -> SparseVector:
    return SparseVector({initial_configuration(n, m.initial): d for d, n in terms})


def bv_trajectory(m: BVQTM, start: SparseVector, k: int) -> list[SparseVector]:
    out = [start]
    for _ in range(k):
        out.append(bv_apply(m, out[-1]))
    return out


class HaltKind(str, Enum):
    HALTED = "HALTED"
    STATIONARITY_VIOLATION = "STATIONARITY_VIOLATION"
    NONE = "NONE"


@dataclass(frozen=True)
class HaltResult:
    kind: HaltKind
    step: int | None = None

    @property
    def halted(self) -> bool:
        return self.kind is HaltKind.HALTED


def _as_terms(inp):
    if isinstance(inp, int):
        return [(1, inp)]
    return list(inp)


def halt_detect(mach, inp, max_steps: int) -> HaltResult:
    """Find the B&V halting step: the first step holding a final configuration.

    That step must be all-final, otherwise the run is not stationary.
    ``inp`` is a natural number or ``[(amplitude, n), ...]``.
    """
    if isinstance(mach, BVQTM):
        vec = bv_input(mach, _as_terms(inp))
        final = mach.final

        def advance(v):
            return bv_apply(mach, v)
    else:
        from .distribution import encode_input

        vec = encode_input(mach, _as_terms(inp)).vec
        final = mach.final

        def advance(v):
            return apply_U(QSuperposition(mach, v, check=False)).vec

    for k in range(max_steps + 1):
        if k:
            vec = advance(vec)
        states = [c.state == final for c in vec]
        if any(states):
            if all(states):
                return HaltResult(HaltKind.HALTED, k)
            return HaltResult(HaltKind.STATIONARITY_VIOLATION, k)
    return HaltResult(HaltKind.NONE)


def bounded_equiv(bv: BVQTM, m: QTMDef, n: int, k: int, tol: float = 1e-9) -> bool:
    """Do the two machines follow the same trajectory on ``|n>`` up to halting (at most ``k``)?"""
    start = bv_input(bv, [(1, n)])
    phi = QSuperposition(m, SparseVector({c: a for c, a in start.items()}), check=False)
    vec = start
    for i in range(k + 1):
        if i:
            vec = bv_apply(bv, vec)
            phi = apply_U(phi)
        if not _close(vec, phi.vec, tol):
            return False
        if vec and all(c.state == bv.final for c in vec):
            return True
    return True


def _close(x: SparseVector, y: SparseVector, tol: float) -> bool:
    keys = set(x) | set(y)
    return all(abs(x.get(c, 0j) - y.get(c, 0j)) <= tol for c in keys)


# --- file format ---------------------------------------------------------------


def load_bv(text: str, complete_loops: bool = False, name: str = "") -> BVQTM:
    raw = parse_raw(text)
    if raw.header != "bvqtm":
        raise ParseError(f"expected header 'bvqtm', found {raw.header!r}", 1, 1)
    for key in ("source", "target"):
        if key in raw.fields:
            raise ParseError(f"'{key}:' is not allowed in a bvqtm file", raw.fields[key][1], 1)
    alphabet, _ = _field(raw, "alphabet")
    states, _ = _field(raw, "states")
    initial = _single(raw, "initial")
    final = _single(raw, "final")
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
        bv = BVQTM(tuple(alphabet), tuple(states), initial, final, tuple(rules), name=name)
    except StructureError as exc:
        raise ParseError(str(exc)) from exc
    return bv.with_loops() if complete_loops else bv


def dump_bv(m: BVQTM) -> str:
    lines = ["bvqtm"]
    if m.name:
        lines.append(f"# {m.name}")
    lines += [
        "alphabet: " + " ".join(m.alphabet),
        "states: " + " ".join(m.states),
        f"initial: {m.initial}",
        f"final: {m.final}",
    ]
    for r in m.rules:
        lines.append(f"rule: {r.from_state} {r.read.glyph} -> {r.to_state} {r.write.glyph} "
                     f"{r.dir.value} {format_amplitude(r.amp)}")
    return "\n".join(lines) + "\n"
