import math

import pytest

from qtmlab import corpus
from qtmlab.distribution import (
    PPD, OutputKind, computed_output, encode_input, fmt_prob, leq, ppd_of, ppd_trajectory,
)
from qtmlab.errors import InputError
from qtmlab.evolution import evolve_to

H = 1 / math.sqrt(2)


def test_ppd_basics():
    p = PPD({2: 0.25, 0: 0.5, 5: 0.0})
    assert p.support() == [0, 2]
    assert p(2) == 0.25 and p(7) == 0
    assert p.total == 0.75 and p.bottom == 0.25
    assert not p.is_total()
    assert p.render() == "0\t0.500000000000\n2\t0.250000000000\nBOTTOM\t0.250000000000"


@pytest.mark.parametrize("mass", [{-1: 0.1}, {1: -0.1}, {1: 0.7, 2: 0.7}])
def test_ppd_rejects_bad_mass(mass):
    with pytest.raises(InputError):
        PPD(mass)


def test_fmt_prob_is_fixed_point():
    assert fmt_prob(1.0) == "1.000000000000"
    assert fmt_prob(0.5) == "0.500000000000"
    assert fmt_prob(1e-15) == "0.000000000000"


def test_leq():
    small, big = PPD({1: 0.2}), PPD({1: 0.5, 2: 0.1})
    assert leq(small, big) and not leq(big, small)
    assert leq(PPD(), small)


def test_encode_input():
    m = corpus.coin()
    phi = encode_input(m, [(H, 1), (H, 3)])
    assert sorted(len(c.right) for c in phi.vec) == [2, 4]
    assert all(c.state == m.initial and not c.left for c in phi.vec)


@pytest.mark.parametrize("terms", [[(1, 1), (1, 1)], [(0.5, 1)], [(1, -1)], []])
def test_encode_input_errors(terms):
    with pytest.raises(InputError):
        encode_input(corpus.coin(), terms)


def test_example_one_distribution():
    m = corpus.coin()
    ppd = ppd_of(evolve_to(encode_input(m, [(H, 1), (H, 3)]), 10))
    assert ppd(2) == pytest.approx(0.5) and ppd.bottom == pytest.approx(0.5)
    assert ppd.support() == [2]


def test_trajectory_is_monotone():
    m = corpus.succ_limit()
    traj = ppd_trajectory(encode_input(m, [(1, 2)]), 60)
    assert all(leq(a, b) for a, b in zip(traj, traj[1:]))


def test_computed_output_statuses():
    m = corpus.succ_finite()
    ppd, status = computed_output(m, encode_input(m, [(1, 3)]), 100)
    assert status.kind is OutputKind.FINITARY and status.render() == "FINITARY 5"
    assert ppd(4) == 1

    m = corpus.succ_limit()
    ppd, status = computed_output(m, encode_input(m, [(1, 0)]), 200)
    assert status.kind is OutputKind.CONVERGED_ESTIMATE
    assert ppd(1) == pytest.approx(1, abs=1e-9)
    _, status = computed_output(m, encode_input(m, [(1, 0)]), 10)
    assert status.kind is OutputKind.BUDGET_EXHAUSTED
    assert status.render().startswith("BUDGET 0.00")

    with pytest.raises(InputError):
        computed_output(m, encode_input(m, [(1, 0)]), -1)


def test_divergent_input_converges_to_bottom():
    m = corpus.coin()
    ppd, status = computed_output(m, encode_input(m, [(1, 3)]), 100)
    assert status.kind is OutputKind.CONVERGED_ESTIMATE
    assert ppd.total == 0 and status.residual == 1
