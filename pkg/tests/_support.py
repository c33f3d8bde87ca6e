"""Random well-formed configurations and superpositions for property checks."""
from __future__ import annotations

import math
import random

import numpy as np

from qtmlab.evolution import QSuperposition
from qtmlab.hilbert import SparseVector, distance
from qtmlab.tape import Symbol, canonicalize


def _word(rng: random.Random, alphabet, n: int, marked=False):
    return tuple(Symbol(rng.choice(alphabet), marked) for _ in range(n))


def random_configuration(m, rng: random.Random, max_len: int = 5):
    """A random configuration obeying the mark placement rules of ``m``."""
    q = rng.choice([s.id for s in m.states])
    alphabet = m.alphabet
    left = _word(rng, alphabet, rng.randint(0, max_len))
    right = _word(rng, alphabet, rng.randint(0, max_len))
    if m.is_source(q):
        right = _word(rng, alphabet, rng.randint(0, 3), marked=True) + right
    elif m.is_target(q):
        left = left + _word(rng, alphabet, rng.randint(0, 3), marked=True)
    return canonicalize(left, q, right)


def random_final_configuration(m, rng: random.Random, max_len: int = 6):
    left = _word(rng, m.alphabet, rng.randint(0, max_len))
    right = _word(rng, m.alphabet, rng.randint(0, max_len))
    return canonicalize(left, m.final, right)


def random_superposition(m, rng: random.Random, max_support: int = 32) -> QSuperposition:
    size = rng.randint(1, max_support)
    entries = {}
    while len(entries) < size:
        entries[random_configuration(m, rng)] = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    scale = 1 / math.sqrt(math.fsum(abs(a) ** 2 for a in entries.values()))
    return QSuperposition(m, SparseVector({c: a * scale for c, a in entries.items()}))


def vec_distance(x: QSuperposition, y: QSuperposition) -> float:
    return distance(x.vec, y.vec)


def round_trip_error(phi: QSuperposition, back: QSuperposition) -> float:
    """``||back - phi||`` without building the difference vector."""
    x, y = phi.vec.view(), back.vec.view()
    if x.keys() == y.keys():
        n = len(x)
        xs = np.fromiter(x.values(), complex, n)
        ys = np.fromiter(map(y.__getitem__, x), complex, n)
        return float(np.linalg.norm(ys - xs))
    total = math.fsum(abs(y.get(c, 0j) - a) ** 2 for c, a in x.items())
    total += math.fsum(abs(b) ** 2 for c, b in y.items() if c not in x)
    return math.sqrt(total)
