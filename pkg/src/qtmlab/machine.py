"""Quantum Turing machine definitions and the local unitarity checker.

Only the main transition table is stored.  The source rows (unmark and move
right) and target rows (mark and move right) are fixed by the model and
produced on demand by :func:`delta`.
"""
from __future__ import annotations

import dataclasses
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

from .errors import CompletenessError, ProtocolViolation, StructureError, ValidationError
from .tape import BLANK_GLYPH, ONE_GLYPH, Direction, Symbol

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class StateInfo:
    id: str
    is_source: bool = False
    is_target: bool = False
    is_initial: bool = False
    is_final: bool = False

    def __post_init__(self):
        if self.is_source and self.is_target:
            raise StructureError(f"state {self.id!r} cannot be both source and target")
        if self.is_initial and not self.is_source:
            raise StructureError(f"initial state {self.id!r} must be a source state")
        if self.is_final and not self.is_target:
            raise StructureError(f"final state {self.id!r} must be a target state")


class Rule(NamedTuple):
    from_state: str
    read: Symbol
    to_state: str
    write: Symbol
    dir: Direction
    amp: complex


class Transition(NamedTuple):
    state: str
    write: Symbol
    dir: Direction
    amp: complex


@dataclass(frozen=True)
class QTMDef:
    alphabet: tuple[str, ...]
    states: tuple[StateInfo, ...]
    rules: tuple[Rule, ...]
    validated: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        if BLANK_GLYPH not in self.alphabet or ONE_GLYPH not in self.alphabet:
            raise StructureError("alphabet must contain the blank '_' and '1'")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise StructureError("duplicate alphabet symbols")
        ids = [s.id for s in self.states]
        if len(set(ids)) != len(ids):
            raise StructureError("duplicate state ids")
        if sum(s.is_initial for s in self.states) != 1:
            raise StructureError("exactly one initial state required")
        if sum(s.is_final for s in self.states) != 1:
            raise StructureError("exactly one final state required")
        rules = []
        seen = set()
        for r in self.rules:
            r = Rule(r.from_state, r.read, r.to_state, r.write, Direction(r.dir), complex(r.amp))
            if not math.isfinite(r.amp.real) or not math.isfinite(r.amp.imag):
                raise StructureError(f"non-finite amplitude in rule {r}")
            if r.amp == 0:
                continue
            self._check_signature(r)
            key = r[:5]
            if key in seen:
                raise StructureError(f"duplicate rule {r.from_state} {r.read} -> {r.to_state} {r.write} {r.dir}")
            seen.add(key)
            rules.append(r)
        object.__setattr__(self, "rules", tuple(rules))

    def _check_signature(self, r: Rule) -> None:
        info = self.info
        for q in (r.from_state, r.to_state):
            if q not in info:
                raise StructureError(f"rule mentions unknown state {q!r}")
        for s in (r.read, r.write):
            if s.marked:
                raise StructureError("marked symbols cannot appear in the main transition table")
            if s.base not in self.alphabet:
                raise StructureError(f"rule mentions unknown symbol {s.base!r}")
        if info[r.from_state].is_target:
            raise StructureError(f"rule leaves target state {r.from_state!r}")
        if info[r.to_state].is_source:
            raise StructureError(f"rule enters source state {r.to_state!r}")

    # state classes

    @cached_property
    def info(self) -> dict[str, StateInfo]:
        return {s.id: s for s in self.states}

    @cached_property
    def state_ids(self) -> frozenset[str]:
        return frozenset(self.info)

    @cached_property
    def initial(self) -> str:
        return next(s.id for s in self.states if s.is_initial)

    @cached_property
    def final(self) -> str:
        return next(s.id for s in self.states if s.is_final)

    def is_source(self, q: str) -> bool:
        return self.info[q].is_source

    def is_target(self, q: str) -> bool:
        return self.info[q].is_target

    @cached_property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(a) for a in self.alphabet)

    @cached_property
    def domain(self) -> tuple[tuple[str, Symbol], ...]:
        """(Q0 u Qs) x Sigma in declaration order."""
        return tuple((s.id, a) for s in self.states if not s.is_target for a in self.symbols)

    # indexes

    @cached_property
    def rows(self) -> dict[tuple[str, Symbol], tuple[Transition, ...]]:
        acc = defaultdict(list)
        for r in self.rules:
            acc[(r.from_state, r.read)].append(Transition(r.to_state, r.write, r.dir, r.amp))
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def by_target(self) -> dict[tuple[str, Symbol, Direction], tuple[tuple[str, Symbol, complex], ...]]:
        """Rules indexed by the (state, written symbol, direction) they produce."""
        acc = defaultdict(list)
        for r in self.rules:
            acc[(r.to_state, r.write, r.dir)].append((r.from_state, r.read, r.amp))
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def by_target_dir(self) -> tuple[dict, dict]:
        """``by_target`` split by direction and keyed ``(state, symbol)``: ``(R-index, L-index)``."""
        split = ({}, {})
        for (p, v, d), entries in self.by_target.items():
            split[d is Direction.L][(p, v)] = entries
        return split

    @cached_property
    def table(self) -> dict[tuple[str, Symbol], tuple[tuple[Transition, ...], bool]]:
        """``delta`` tabulated on every pair it accepts; the fast path of evolution.

        Values are ``(transitions, implicit)``.  ``implicit`` marks the source
        and target rows: their images cannot coincide with any other image.
        """
        out = {}
        for q, info in self.info.items():
            for a in self.symbols:
                for u in (a, a.mark()):
                    try:
                        ts = delta(self, q, u)
                    except (ProtocolViolation, CompletenessError):
                        continue
                    out[(q, u)] = (ts, info.is_target or (info.is_source and u.marked))
        return out

    def missing_rows(self) -> list[tuple[str, Symbol]]:
        return [k for k in self.domain if k not in self.rows]

    def __str__(self):
        return self.name or f"QTM({len(self.states)} states, {len(self.rules)} rules)"


def delta(m: QTMDef, q: str, u: Symbol) -> tuple[Transition, ...]:
    """Transitions out of ``(q, u)`` from whichever of the three parts owns it."""
    if q not in m.info:
        raise ProtocolViolation(f"unknown state {q!r}")
    if u.base not in m.alphabet:
        raise ProtocolViolation(f"unknown symbol {u.glyph!r}")
    info = m.info[q]
    if u.marked:
        if info.is_source:
            return (Transition(q, u.unmark(), Direction.R, 1 + 0j),)
        raise ProtocolViolation(f"no transition reads marked {u.glyph!r} in state {q!r}")
    if info.is_target:
        return (Transition(q, u.mark(), Direction.R, 1 + 0j),)
    try:
        return m.rows[(q, u)]
    except KeyError:
        raise CompletenessError(f"no transition defined for ({q}, {u.glyph})") from None


@dataclass
class UnitarityReport:
    max_dev_norm: float = 0.0
    max_dev_orth: float = 0.0
    max_dev_sep: float = 0.0
    worst_witnesses: list = field(default_factory=list)
    eps: float = DEFAULT_EPS

    @property
    def passed(self) -> bool:
        return max(self.max_dev_norm, self.max_dev_orth, self.max_dev_sep) <= self.eps

    def render(self) -> str:
        lines = [
            f"cond1 max_dev={_fmt(self.max_dev_norm)}",
            f"cond2 max_dev={_fmt(self.max_dev_orth)}",
            f"cond3 max_dev={_fmt(self.max_dev_sep)}",
        ]
        for w in self.worst_witnesses:
            lines.append("witness " + w)
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _row_label(row) -> str:
    q, a = row
    return f"({q},{a.glyph})"


def check_local_unitarity(m: QTMDef, eps: float = DEFAULT_EPS) -> UnitarityReport:
    """Evaluate the three local unitary conditions on the main transition table."""
    missing = m.missing_rows()
    if missing:
        raise CompletenessError(
            "missing transition rows: " + ", ".join(_row_label(k) for k in missing)
        )
    report = UnitarityReport(eps=eps)

    # (1) unit row norms
    worst1 = None
    for row in m.domain:
        total = math.fsum(abs(t.amp) ** 2 for t in m.rows[row])
        dev = abs(total - 1.0)
        if worst1 is None or dev > report.max_dev_norm:
            report.max_dev_norm, worst1 = dev, row

    # (2) distinct rows are orthogonal; only rows sharing a column interact
    pair_sums: dict = defaultdict(complex)
    for col in sorted(m.by_target, key=_col_key):
        entries = m.by_target[col]
        for i, (q1, a1, x1) in enumerate(entries):
            for q2, a2, x2 in entries[i + 1 :]:
                pair_sums[((q1, a1), (q2, a2))] += x2.conjugate() * x1
    worst2 = None
    for pair, s in pair_sums.items():
        if abs(s) > report.max_dev_orth:
            report.max_dev_orth, worst2 = abs(s), pair

    # (3) rows moving right and rows moving left into the same state are orthogonal
    right_in = defaultdict(list)
    left_in = defaultdict(list)
    for r in m.rules:
        (right_in if r.dir is Direction.R else left_in)[r.to_state].append(r)
    sep_sums: dict = defaultdict(complex)
    for p in sorted(right_in):
        for rr in right_in[p]:
            for rl in left_in.get(p, ()):
                key = ((rr.from_state, rr.read, rr.write), (rl.from_state, rl.read, rl.write))
                sep_sums[key] += rl.amp.conjugate() * rr.amp
    worst3 = None
    for key, s in sep_sums.items():
        if abs(s) > report.max_dev_sep:
            report.max_dev_sep, worst3 = abs(s), key

    if worst1 is not None and report.max_dev_norm > eps:
        report.worst_witnesses.append(f"cond1 {_row_label(worst1)}")
    if worst2 is not None and report.max_dev_orth > eps:
        report.worst_witnesses.append(f"cond2 {_row_label(worst2[0])} {_row_label(worst2[1])}")
    if worst3 is not None and report.max_dev_sep > eps:
        (q, a, b), (q2, a2, b2) = worst3
        report.worst_witnesses.append(
            f"cond3 ({q},{a.glyph},{b.glyph}) ({q2},{a2.glyph},{b2.glyph})"
        )
    return report


def _col_key(col):
    p, v, d = col
    return (p, v.glyph, d.value)


def validate(m: QTMDef, eps: float = DEFAULT_EPS) -> QTMDef:
    """Return ``m`` marked as validated, or raise with the failing report attached."""
    report = check_local_unitarity(m, eps)
    if not report.passed:
        raise ValidationError("local unitary conditions violated\n" + report.render(), report)
    return dataclasses.replace(m, validated=True, name=m.name)
