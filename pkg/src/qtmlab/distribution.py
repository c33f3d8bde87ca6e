"""Partial probability distributions and computed outputs.

The distribution read off a superposition counts only final configurations:
``p(n)`` is the total squared magnitude of final configurations holding
``n`` ones.  Whatever is missing from 1 is the bottom mass.  Along a
computation these distributions grow monotonically, and the computed output
is their limit.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

from .errors import InputError
from .evolution import QSuperposition, apply_U, is_final
from .hilbert import SparseVector
from .machine import QTMDef
from .tape import initial_configuration, val

LEQ_SLACK = 1e-12
NORM_TOL = 1e-9
SETTLE_WINDOW = 50
DEFAULT_SETTLE_EPS = 1e-6


@dataclass(frozen=True)
class PPD:
    mass: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for n, p in sorted(self.mass.items()):
            if n < 0:
                raise InputError(f"outcome {n} is not a natural number")
            if p < 0:
                raise InputError(f"negative probability {p} for outcome {n}")
            if p > 0:
                clean[int(n)] = float(p)
        if math.fsum(clean.values()) > 1 + LEQ_SLACK:
            raise InputError("total probability exceeds 1")
        object.__setattr__(self, "mass", clean)

    def __call__(self, n: int) -> float:
        return self.mass.get(n, 0.0)

    @property
    def total(self) -> float:
        return math.fsum(self.mass.values())

    @property
    def bottom(self) -> float:
        return max(0.0, 1.0 - self.total)

    def is_total(self, tol: float = 0.0) -> bool:
        return self.bottom <= tol

    def support(self) -> list[int]:
        return list(self.mass)

    def render(self) -> str:
        lines = [f"{n}\t{fmt_prob(p)}" for n, p in self.mass.items()]
        lines.append(f"BOTTOM\t{fmt_prob(self.bottom)}")
        return "\n".join(lines)

    def __str__(self):
        return self.render()


def fmt_prob(p: float) -> str:
    """Fixed point with 12 decimals, locale independent."""
    return f"{p:.12f}"


def ppd_of(phi: QSuperposition) -> PPD:
    final = phi.machine.final
    acc: dict[int, list[float]] = {}
    for c, a in phi.vec.items():
        if c.state == final:
            acc.setdefault(val(c), []).append(a.real * a.real + a.imag * a.imag)
    return PPD({n: math.fsum(ps) for n, ps in acc.items()})


def leq(p1: PPD, p2: PPD, slack: float = LEQ_SLACK) -> bool:
    return all(p <= p2(n) + slack for n, p in p1.mass.items())


class OutputKind(str, Enum):
    FINITARY = "FINITARY"
    CONVERGED_ESTIMATE = "CONVERGED"
    BUDGET_EXHAUSTED = "BUDGET"


@dataclass(frozen=True)
class OutputStatus:
    kind: OutputKind
    step: int | None = None
    residual: float = 0.0

    def render(self) -> str:
        if self.kind is OutputKind.FINITARY:
            return f"FINITARY {self.step}"
        return f"{self.kind.value} {fmt_prob(self.residual)}"


def computed_output(
    m: QTMDef,
    phi0: QSuperposition,
    max_steps: int,
    settle_eps: float = DEFAULT_SETTLE_EPS,
    window: int = SETTLE_WINDOW,
) -> tuple[PPD, OutputStatus]:
    """Approximate the limit of the per-step distributions.

    Stops early, with the exact answer, at the first all-final step.
    Otherwise the status says whether the mass gained over the last
    ``window`` steps stayed below ``settle_eps``.
    """
    if phi0.machine is not m:
        phi0 = QSuperposition(m, phi0.vec)
    if max_steps < 0:
        raise InputError("max_steps must be nonnegative")
    phi = phi0
    totals = []
    for k in range(max_steps + 1):
        if k:
            phi = apply_U(phi)
        ppd = ppd_of(phi)
        if phi.vec and is_final(phi):
            return ppd, OutputStatus(OutputKind.FINITARY, k, ppd.bottom)
        totals.append(ppd.total)
    residual = ppd.bottom
    if len(totals) > window and totals[-1] - totals[-1 - window] < settle_eps:
        return ppd, OutputStatus(OutputKind.CONVERGED_ESTIMATE, None, residual)
    return ppd, OutputStatus(OutputKind.BUDGET_EXHAUSTED, None, residual)


def ppd_trajectory(phi0: QSuperposition, k: int) -> list[PPD]:
    out = []
    phi = phi0
    for i in range(k + 1):
        if i:
            phi = apply_U(phi)
        out.append(ppd_of(phi))
    return out


def encode_input(m: QTMDef, terms: Iterable[tuple[complex, int]]) -> QSuperposition:
    """Map ``sum d_k n_k`` to ``sum d_k |<lambda, q_i, 1^(n_k + 1)>>``."""
    terms = [(complex(d), int(n)) for d, n in terms]
    ns = [n for _, n in terms]
    if len(set(ns)) != len(ns):
        raise InputError("duplicate natural numbers in input superposition")
    if any(n < 0 for n in ns):
        raise InputError("inputs must be natural numbers")
    total = math.fsum(abs(d) ** 2 for d, _ in terms)
    if abs(total - 1) > NORM_TOL:
        raise InputError(f"input superposition has squared norm {total:.12g}, expected 1")
    vec = SparseVector({initial_configuration(n, m.initial): d for d, n in terms})
    return QSuperposition(m, vec, check=False)
