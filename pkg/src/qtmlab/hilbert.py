"""Finite-support vectors of complex amplitudes over an arbitrary hashable basis.

A :class:`SparseVector` stands for an element of the span of a computational
basis: a finite linear combination ``sum_k a_k |k>``.  Vectors are immutable;
every operation returns a new vector.
"""
from __future__ import annotations

import cmath
import math
from types import MappingProxyType
from collections.abc import Hashable, Iterable, Iterator, Mapping
from typing import Generic, TypeVar

import numpy as np

from .errors import InputError

K = TypeVar("K", bound=Hashable)

# Entries whose magnitude drops below this after an addition are treated as
# cancelled.  Only `add` applies it.
CANCEL_EPS = 1e-15


def _check_finite(a: complex) -> None:
    if not (cmath.isfinite(a)):
        raise InputError(f"amplitude {a!r} is not finite")


class SparseVector(Mapping, Generic[K]):
    """Immutable mapping from basis keys to nonzero complex amplitudes."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[K, complex] | Iterable[tuple[K, complex]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[K, complex] = {}
        for key, amp in items:
            amp = complex(amp)
            _check_finite(amp)
            if key in data:
                amp += data[key]
            data[key] = amp
        self._entries = {k: a for k, a in data.items() if a != 0}

    @classmethod
    def _trusted(cls, entries: dict) -> "SparseVector":
        # no copy, no checks: callers guarantee nonzero finite complex values
        vec = cls.__new__(cls)
        vec._entries = entries
        return vec

    @classmethod
    def basis(cls, key: K, amp: complex = 1.0) -> "SparseVector[K]":
        return cls({key: amp})

    def __getitem__(self, key: K) -> complex:
        return self._entries[key]

    def get(self, key, default=0j):
        return self._entries.get(key, default)

    def __iter__(self) -> Iterator[K]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return key in self._entries

    # plain dict views; the Mapping defaults go through __getitem__ per key
    def keys(self):
        return self._entries.keys()

    def values(self):
        return self._entries.values()

    def items(self):
        return self._entries.items()

    def view(self) -> MappingProxyType:
        """Read-only view of the underlying dict (C-level lookups)."""
        return MappingProxyType(self._entries)

    def __eq__(self, other):
        if isinstance(other, SparseVector):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __repr__(self):
        body = ", ".join(f"{k!r}: {a:.6g}" for k, a in self._entries.items())
        return f"SparseVector({{{body}}})"

    def support(self) -> frozenset:
        return frozenset(self._entries)

    # arithmetic sugar
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __rmul__(self, a):
        return scale(a, self)

    def __neg__(self):
        return scale(-1, self)


def inner_product(x: SparseVector, y: SparseVector) -> complex:
    """<x|y>, conjugate-linear in ``x``."""
    if len(y) < len(x):
        total = 0j
        for k, b in y.items():
            a = x._entries.get(k)
            if a is not None:
                total += a.conjugate() * b
        return total
    total = 0j
    for k, a in x.items():
        b = y._entries.get(k)
        if b is not None:
            total += a.conjugate() * b
    return total


def norm_squared(x: SparseVector) -> float:
    amps = np.fromiter(x.values(), complex, len(x))
    return math.fsum((amps.real * amps.real + amps.imag * amps.imag).tolist())


def norm(x: SparseVector) -> float:
    return math.sqrt(norm_squared(x))


def add(x: SparseVector, y: SparseVector) -> SparseVector:
    out = dict(x._entries)
    for k, b in y.items():
        a = out.get(k)
        if a is None:
            out[k] = b
            continue
        s = a + b
        if abs(s) < CANCEL_EPS:
            del out[k]
        else:
            out[k] = s
    return SparseVector._trusted(out)


def scale(a: complex, x: SparseVector) -> SparseVector:
    a = complex(a)
    _check_finite(a)
    if a == 0:
        return SparseVector()
    return SparseVector._trusted({k: a * v for k, v in x.items() if a * v != 0})


def normalize(x: SparseVector) -> SparseVector:
    n = norm(x)
    if n == 0:
        raise InputError("cannot normalize the zero vector")
    return scale(1 / n, x)


def prune(x: SparseVector, eps: float) -> SparseVector:
    """Drop entries of magnitude below ``eps``.  Never applied implicitly."""
    return SparseVector._trusted({k: a for k, a in x.items() if abs(a) >= eps})


def distance(x: SparseVector, y: SparseVector) -> float:
    return norm(x - y)
