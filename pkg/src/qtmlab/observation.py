"""Output measurements and observed runs.

An output measurement first asks whether the machine is in a final
configuration.  On "no" the superposition collapses onto its non-final part
and the observed value is bottom (``None`` here).  On "yes" one final
configuration ``C`` is read, the superposition collapses onto it, and the
observed value is ``val(C)``.

A schedule lists the steps at which such measurements happen.  Between
measurements the machine evolves unitarily.  A measurement at step ``h``
acts on the state at step ``h``, and its collapsed state is what the run
holds at ``h``.  The finite runs of length ``k`` form a tree.  Once a run has
read a number it sits on a single final configuration that only gains marks,
so it is followed without further branching.
"""
from __future__ import annotations

import math
import os
import re
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .distribution import PPD, fmt_prob
from .errors import InputError, ParseError, ResourceError
from .evolution import QSuperposition, apply_U
from .hilbert import SparseVector
from .machine import QTMDef
from .rng import SplitMix64, batch_seeds, uniform_batch
from .tape import render, val

DEFAULT_BRANCH_CAP = 100_000
NORM_TOL = 1e-9


def default_branch_cap() -> int:
    env = os.environ.get("QTMLAB_BRANCH_CAP")
    return int(env) if env else DEFAULT_BRANCH_CAP


# --- schedules ---------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    """Observe at ``offset + stride * i`` for ``i = 0, 1, ...``."""

    offset: int = 0
    stride: int = 1

    def __post_init__(self):
        if self.offset < 0 or self.stride < 1:
            raise InputError("affine schedule needs offset >= 0 and stride >= 1")

    def __contains__(self, h: int) -> bool:
        return h >= self.offset and (h - self.offset) % self.stride == 0

    def points(self, upto: int) -> list[int]:
        return list(range(self.offset, upto + 1, self.stride))

    def __str__(self):
        return f"{self.offset}+{self.stride}*i"


@dataclass(frozen=True)
class Explicit:
    steps: tuple[int, ...]

    def __post_init__(self):
        steps = tuple(int(s) for s in self.steps)
        if any(s < 0 for s in steps) or any(b <= a for a, b in zip(steps, steps[1:])):
            raise InputError("explicit schedule must be strictly increasing naturals")
        object.__setattr__(self, "steps", steps)

    def __contains__(self, h: int) -> bool:
        i = bisect_right(self.steps, h)
        return i > 0 and self.steps[i - 1] == h

    def points(self, upto: int) -> list[int]:
        return [s for s in self.steps if s <= upto]

    def __str__(self):
        return ",".join(map(str, self.steps))


Schedule = Affine | Explicit

_AFFINE = re.compile(r"^(?:(\d+)\s*\+\s*)?(?:(\d+)\s*\*\s*)?i$")


def parse_schedule(text: str) -> Schedule:
    """``a+b*i`` (affine; ``a+`` and ``b*`` optional) or ``0,3,7,20``."""
    s = text.strip()
    mo = _AFFINE.match(s)
    try:
        if mo:
            return Affine(int(mo.group(1) or 0), int(mo.group(2) or 1))
        if re.fullmatch(r"\d+(\s*,\s*\d+)*", s):
            return Explicit(tuple(int(x) for x in s.split(",")))
    except InputError as exc:
        raise ParseError(f"bad schedule {text!r}: {exc}") from None
    raise ParseError(f"bad schedule {text!r}: expected 'a+b*i' or a comma-separated list")


# --- single measurement --------------------------------------------------------


@dataclass(frozen=True)
class OutputObservation:
    outcome: int | None  # None is bottom
    collapsed: QSuperposition
    probability: float


def measure_output(phi: QSuperposition) -> list[OutputObservation]:
    """All outcomes of an output measurement, final readings first."""
    n2 = phi.norm_squared()
    if abs(math.sqrt(n2) - 1) > NORM_TOL:
        raise InputError(f"measurement needs a unit vector, norm is {math.sqrt(n2):.12g}")
    final = phi.machine.final
    finals = sorted((c for c in phi.vec if c.state == final), key=render)
    branches = []
    for c in finals:
        e = phi.vec[c]
        p = abs(e) ** 2
        branches.append(OutputObservation(val(c), QSuperposition.basis(phi.machine, c, e / abs(e)), p))
    rest = {c: a for c, a in phi.vec.items() if c.state != final}
    if rest:
        p = math.fsum(abs(a) ** 2 for a in rest.values())
        scale = 1 / math.sqrt(p)
        collapsed = phi.with_vec(SparseVector._trusted({c: a * scale for c, a in rest.items()}))
        branches.append(OutputObservation(None, collapsed, p))
    return branches


# --- runs --------------------------------------------------------------------


class FiniteRun:
    """The last node of a finite observed run; earlier states hang off ``parent``."""

    __slots__ = (
        "state", "step", "probability", "outcomes", "parent",
        "frozen", "branch_probability", "draws", "_children", "_cum",
    )

    def __init__(self, state, step, probability, outcomes, parent, frozen, branch_probability, draws):
        self.state = state
        self.step = step
        self.probability = probability
        self.outcomes = outcomes
        self.parent = parent
        self.frozen = frozen
        self.branch_probability = branch_probability
        self.draws = draws
        self._children = None
        self._cum = None

    @property
    def states(self) -> list[QSuperposition]:
        out = []
        node = self
        while node is not None:
            out.append(node.state)
            node = node.parent
        return out[::-1]

    @property
    def observed_output(self) -> int | None:
        for x in self.outcomes:
            if x is not None:
                return x
        return None

    def nodes(self) -> list["FiniteRun"]:
        out = []
        node = self
        while node is not None:
            out.append(node)
            node = node.parent
        return out[::-1]

    def __repr__(self):
        return f"FiniteRun(step={self.step}, p={self.probability:.6g}, outcomes={self.outcomes})"


class RunTree:
    """Lazily expanded tree of the observed runs of one machine and input.

    Children are cached, so exact enumeration and repeated sampling share
    the same evolution work.
    """

    def __init__(self, machine: QTMDef, phi0: QSuperposition, schedule: Schedule):
        if phi0.machine is not machine:
            phi0 = QSuperposition(machine, phi0.vec)
        self.machine = machine
        self.schedule = schedule
        self.roots = self._observe(None, phi0, 0)

    def _observe(self, parent: FiniteRun | None, state: QSuperposition, h: int) -> list[FiniteRun]:
        prob = parent.probability if parent else 1.0
        outcomes = parent.outcomes if parent else ()
        draws = parent.draws if parent else 0
        frozen = parent.frozen if parent else None
        if h not in self.schedule:
            return [FiniteRun(state, h, prob, outcomes, parent, frozen, 1.0, draws)]
        if frozen is not None:
            return [FiniteRun(state, h, prob, outcomes + (frozen,), parent, frozen, 1.0, draws)]
        branches = measure_output(state)
        if len(branches) > 1:
            draws += 1
        return [
            FiniteRun(b.collapsed, h, prob * b.probability, outcomes + (b.outcome,), parent,
                      b.outcome, b.probability, draws)
            for b in branches
        ]

    def children(self, node: FiniteRun) -> list[FiniteRun]:
        if node._children is None:
            node._children = self._observe(node, apply_U(node.state), node.step + 1)
        return node._children

    def _choose(self, siblings: list[FiniteRun], u: float) -> FiniteRun:
        parent = siblings[0].parent
        cum = _cumulative(siblings, parent)
        i = bisect_right(cum, u)
        return siblings[min(i, len(siblings) - 1)]

    def levels(self, depth: int, cap: int | None = None):
        """Yield the list of runs of length ``k`` for ``k = 0 .. depth``."""
        cap = default_branch_cap() if cap is None else cap
        level = self.roots
        for k in range(depth + 1):
            if k:
                level = [c for node in level for c in self.children(node)]
            if len(level) > cap:
                raise ResourceError(f"{len(level)} live branches at step {k} exceed the cap of {cap}")
            yield level


def _cumulative(siblings, parent):
    # cached on the parent so the scalar and batch samplers cut at identical points
    holder = parent
    if holder is not None and holder._cum is not None:
        return holder._cum
    cum = list(accumulate(s.branch_probability for s in siblings))
    if holder is not None:
        holder._cum = cum
    return cum


def enumerate_runs(m: QTMDef, phi0: QSuperposition, schedule: Schedule, depth: int,
                   cap: int | None = None) -> list[FiniteRun]:
    level = None
    for level in RunTree(m, phi0, schedule).levels(depth, cap):
        pass
    return level


def runs_distribution(runs: list[FiniteRun]) -> PPD:
    acc: dict[int, list[float]] = {}
    for r in runs:
        x = r.observed_output
        if x is not None:
            acc.setdefault(x, []).append(r.probability)
    return PPD({n: math.fsum(ps) for n, ps in acc.items()})


def _require_point(schedule: Schedule, k: int) -> None:
    if k not in schedule:
        raise InputError(f"step {k} is not an observation point of schedule {schedule}")


def observed_distribution_exact(m: QTMDef, phi0: QSuperposition, schedule: Schedule, k: int,
                                cap: int | None = None) -> PPD:
    _require_point(schedule, k)
    return runs_distribution(enumerate_runs(m, phi0, schedule, k, cap))


def observed_distributions(m: QTMDef, phi0: QSuperposition, schedule: Schedule, depth: int,
                           cap: int | None = None) -> dict[int, PPD]:
    """Observed distribution at every schedule point up to ``depth``, from one tree."""
    out = {}
    for k, level in enumerate(RunTree(m, phi0, schedule).levels(depth, cap)):
        if k in schedule:
            out[k] = runs_distribution(level)
    return out


def superpose_runs(runs: list[FiniteRun]) -> QSuperposition:
    """``sum_R sqrt(Pr(R)) |psi_R>`` over the given runs."""
    acc: dict = {}
    for r in runs:
        w = math.sqrt(r.probability)
        for c, a in r.state.vec.items():
            acc[c] = acc.get(c, 0j) + w * a
    machine = runs[0].state.machine
    return QSuperposition(machine, SparseVector(acc), check=False)


def reconstruct(m: QTMDef, phi0: QSuperposition, schedule: Schedule, k: int,
                cap: int | None = None) -> QSuperposition:
    _require_point(schedule, k)
    return superpose_runs(enumerate_runs(m, phi0, schedule, k, cap))


# --- sampling ------------------------------------------------------------------


@dataclass(frozen=True)
class TraceLine:
    step: int
    outcome: int | None
    probability: float

    def render(self) -> str:
        out = "BOT" if self.outcome is None else str(self.outcome)
        return f"step={self.step} outcome={out} p={fmt_prob(self.probability)}"


def _walk(tree: RunTree, depth: int, rng: SplitMix64):
    trace = []
    node = None
    for k in range(depth + 1):
        siblings = tree.roots if k == 0 else tree.children(node)
        if len(siblings) > 1:
            node = tree._choose(siblings, rng.random())
        else:
            node = siblings[0]
        if k in tree.schedule:
            trace.append(TraceLine(k, node.outcomes[-1], node.branch_probability))
            if node.frozen is not None:
                break
    return node.observed_output, trace


def sample_run(m: QTMDef, phi0: QSuperposition, schedule: Schedule, depth: int, seed: int,
               tree: RunTree | None = None):
    """Draw one observed run; returns ``(observed output, trace)``."""
    tree = tree or RunTree(m, phi0, schedule)
    return _walk(tree, depth, SplitMix64(seed))


def sample_counts(m: QTMDef, phi0: QSuperposition, schedule: Schedule, depth: int,
                  samples: int, seed: int, tree: RunTree | None = None) -> Counter:
    """Observed outputs of ``samples`` runs seeded ``seed, seed + 1, ...``.

    Sample ``i`` lands exactly where ``sample_run(..., seed + i)`` does; the
    batch just walks the tree once with all samples at the same node
    sharing the work.
    """
    tree = tree or RunTree(m, phi0, schedule)
    seeds = batch_seeds(seed, samples)
    counts: Counter = Counter()
    stack = [(0, None, np.arange(samples))]
    while stack:
        k, node, idx = stack.pop()
        siblings = tree.roots if k == 0 else tree.children(node)
        if len(siblings) == 1:
            groups = [(siblings[0], idx)]
        else:
            draw = siblings[0].draws
            u = uniform_batch(seeds[idx], draw)
            cum = np.asarray(_cumulative(siblings, siblings[0].parent))
            pick = np.minimum(np.searchsorted(cum, u, side="right"), len(siblings) - 1)
            groups = [(s, idx[pick == j]) for j, s in enumerate(siblings)]
        for child, sub in groups:
            if not len(sub):
                continue
            done = k == depth or (k in tree.schedule and child.frozen is not None)
            if done:
                counts[child.observed_output] += len(sub)
            else:
                stack.append((k + 1, child, sub))
    return counts
