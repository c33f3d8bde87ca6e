"""Time evolution of finite superpositions of configurations.

``apply_U`` applies one step of the machine to every configuration in the
support and sums the images; ``apply_U_adjoint`` walks each configuration
back to its possible predecessors with conjugated amplitudes.  Neither
normalizes nor prunes: the images are exact linear images, so structural
facts such as mark counts on final configurations are preserved exactly.
"""
from __future__ import annotations

import functools
import gc
from collections.abc import Iterator, Mapping

from .errors import InputError, ProtocolViolation
from .hilbert import SparseVector, inner_product, norm, norm_squared
from .machine import QTMDef, delta
from .tape import BLANK, Configuration, Direction, render, reverse_step, step, well_formed

R, L = Direction.R, Direction.L


class QSuperposition:
    """A finite superposition of configurations of one machine."""

    __slots__ = ("machine", "vec")

    def __init__(self, machine: QTMDef, vec, check: bool = True):
        if not isinstance(vec, SparseVector):
            vec = SparseVector(vec)
        if check:
            for c in vec:
                if not well_formed(c, machine):
                    raise ProtocolViolation(f"ill-formed configuration {render(c)}")
        self.machine = machine
        self.vec = vec

    @classmethod
    def basis(cls, machine: QTMDef, c: Configuration, amp: complex = 1.0) -> "QSuperposition":
        return cls(machine, SparseVector({c: amp}))

    def __len__(self):
        return len(self.vec)

    def __iter__(self):
        return iter(self.vec)

    def items(self):
        return self.vec.items()

    def __getitem__(self, c):
        return self.vec[c]

    def get(self, c, default=0j):
        return self.vec.get(c, default)

    def __eq__(self, other):
        if isinstance(other, QSuperposition):
            return self.machine is other.machine and self.vec == other.vec
        return NotImplemented

    __hash__ = None

    def norm(self) -> float:
        return norm(self.vec)

    def norm_squared(self) -> float:
        return norm_squared(self.vec)

    def with_vec(self, vec: SparseVector) -> "QSuperposition":
        return QSuperposition(self.machine, vec, check=False)

    def __repr__(self):
        terms = " + ".join(f"({a:.6g})|{render(c)}>" for c, a in self.vec.items())
        return f"QSuperposition({terms or '0'})"


def _finish(machine, out: dict) -> QSuperposition:
    # drop exact cancellations in place; rebuilding would rehash every key
    for k in [k for k, a in out.items() if a == 0]:
        del out[k]
    return QSuperposition(machine, SparseVector._trusted(out), check=False)


# The two loops below inline the R cases of step and reverse_step; they are
# the hot path of every computation, and long tapes make hashing the
# dominant cost.  Images under the source and target rows (and preimages
# through them) never coincide with any other image, so they are stored
# with a single assignment.  Everything else accumulates through setdefault,
# which hashes a new key once.

_new = tuple.__new__


def _gc_paused(fn):
    """Run ``fn`` with the cyclic collector off.

    The loops allocate many tuples, none of which can form cycles;
    generation-0 collections would otherwise rescan them over and over.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        if not gc.isenabled():
            return fn(*args, **kwargs)
        gc.disable()
        try:
            return fn(*args, **kwargs)
        finally:
            gc.enable()

    return wrapper


@_gc_paused
def apply_U(phi: QSuperposition) -> QSuperposition:
    m = phi.machine
    table = m.table
    out: dict = {}
    put = out.setdefault
    new, config, blank, right_dir = _new, Configuration, BLANK, R
    for c, a in phi.vec.items():
        left, q, right = c
        if right:
            u, rest = right[0], right[1:]
        else:
            u, rest = blank, ()
        entry = table.get((q, u))
        if entry is None:
            delta(m, q, u)  # raises the appropriate error
        ts, implicit = entry
        if implicit:
            (p, v, _, _), = ts
            out[new(config, (left + (v,) if (left or v != blank) else (), p, rest))] = a
            continue
        for p, v, d, amp in ts:
            if d is right_dir:
                key = new(config, (left + (v,) if (left or v != blank) else (), p, rest))
            else:
                key = step(c, p, v, d)
            x = a * amp
            n = len(out)
            prev = put(key, x)
            if len(out) == n:
                out[key] = prev + x
    return _finish(m, out)


@_gc_paused
def apply_U_adjoint(phi: QSuperposition) -> QSuperposition:
    m = phi.machine
    info = m.info
    into_r, into_l = m.by_target_dir
    out: dict = {}
    put = out.setdefault
    new, config, blank = _new, Configuration, BLANK
    for c, a in phi.vec.items():
        left, p, right = c
        v_r = left[-1] if left else blank
        head = left[:-1]
        flags = info[p]
        if flags.is_source:
            # only the source rows enter a source state: unmark then move right
            if v_r.marked:
                raise ProtocolViolation(f"ill-formed source configuration {render(c)}")
            out[new(config, (head, p, (v_r._twin,) + right))] = a
            continue
        if v_r.marked:
            if not flags.is_target:
                raise ProtocolViolation(f"neutral configuration with marks {render(c)}")
            u = v_r._twin
            out[new(config, (head, p, (u,) + right if (right or u != blank) else ()))] = a
            continue
        v_l = right[1] if len(right) > 1 else blank
        if v_l.marked:
            raise ProtocolViolation(f"marked symbol right of the head in {render(c)}")
        for q, u, amp in into_r.get((p, v_r), ()):
            key = new(config, (head, q, (u,) + right if (right or u != blank) else ()))
            x = amp.conjugate() * a
            n = len(out)
            prev = put(key, x)
            if len(out) == n:
                out[key] = prev + x
        for q, u, amp in into_l.get((p, v_l), ()):
            key = reverse_step(c, q, u, L)
            x = amp.conjugate() * a
            n = len(out)
            prev = put(key, x)
            if len(out) == n:
                out[key] = prev + x
    return _finish(m, out)


def evolve(phi0: QSuperposition, k: int) -> Iterator[QSuperposition]:
    """Yield ``phi_0, ..., phi_k`` lazily."""
    if k < 0:
        raise InputError("number of steps must be nonnegative")
    phi = phi0
    yield phi
    for _ in range(k):
        phi = apply_U(phi)
        yield phi


def evolve_to(phi0: QSuperposition, k: int) -> QSuperposition:
    phi = phi0
    for phi in evolve(phi0, k):
        pass
    return phi


def is_final_config(m: QTMDef, c: Configuration) -> bool:
    return c.state == m.final


def is_final(phi: QSuperposition) -> bool:
    f = phi.machine.final
    return all(c.state == f for c in phi.vec)


def final_part(phi: QSuperposition) -> QSuperposition:
    f = phi.machine.final
    return phi.with_vec(SparseVector._trusted({c: a for c, a in phi.vec.items() if c.state == f}))


def nonfinal_part(phi: QSuperposition) -> QSuperposition:
    f = phi.machine.final
    return phi.with_vec(SparseVector._trusted({c: a for c, a in phi.vec.items() if c.state != f}))


def overlap(phi: QSuperposition, psi: QSuperposition) -> complex:
    return inner_product(phi.vec, psi.vec)


def from_mapping(machine: QTMDef, entries: Mapping[Configuration, complex]) -> QSuperposition:
    return QSuperposition(machine, SparseVector(entries))
