import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from fractions import Fraction

import numpy as np
import pytest

from kirby import blocks, linalg
from kirby.errors import NotTorsion, RequiresAllMinus
from kirby.invariants import c_squared, change_vector, d3_surg, delta, epsilon, epsilon_parity, raw_delta
from kirby.surgery import LinkingData, is_integral_homology_sphere, linking_data, surgery_from_word

UNKNOT_MINUS = LinkingData(((-2,),), (0,), 1, 0)
UNKNOT_PLUS = LinkingData(((0,),), (0,), 1, 1)
CANCEL_PAIR = LinkingData(((0, -1), (-1, -2)), (0, 0), 2, 1)
LANTERN_LEFT = LinkingData(blocks.LANTERN_A, blocks.LANTERN_ROT, 3, 0)
LANTERN_RIGHT = LinkingData(blocks.LANTERN_A_PRIME, blocks.LANTERN_ROT_PRIME, 4, 0)


@pytest.mark.parametrize("data, d3, dlt", [
    (LinkingData.empty(), Fraction(0), Fraction(0)),
    (UNKNOT_MINUS, Fraction(1, 4), Fraction(1)),
    (UNKNOT_PLUS, Fraction(1, 2), Fraction(0)),
    (CANCEL_PAIR, Fraction(0), Fraction(0)),
])
def test_d3_and_delta(data, d3, dlt):
    assert d3_surg(data) == d3
    assert delta(data) == dlt


def test_lantern_sides_share_invariants():
    assert c_squared(LANTERN_LEFT) == Fraction(-1, 5)
    assert c_squared(LANTERN_RIGHT) == Fraction(-6, 5)
    assert d3_surg(LANTERN_LEFT) == d3_surg(LANTERN_RIGHT)
    assert raw_delta(LANTERN_LEFT) == raw_delta(LANTERN_RIGHT)
    assert change_vector(LANTERN_LEFT, LANTERN_RIGHT) == (1, -1, 0, -1)


def test_chain_sides_share_invariants():
    left = LinkingData(blocks.chain_A(), blocks.CHAIN_ROT, 12, 0)
    right = LinkingData(blocks.CHAIN_A_PRIME, blocks.CHAIN_ROT_PRIME, 2, 0)
    change = change_vector(left, right)
    assert change == (-10, 6, 0, -2)
    assert 3 * change.dsigma + 2 * change.dn == change.dc2
    assert d3_surg(left) == d3_surg(right)


def test_not_torsion():
    with pytest.raises(NotTorsion):
        d3_surg(LinkingData(((0,),), (2,), 1, 1))


def test_epsilon_requires_all_minus():
    assert epsilon(UNKNOT_MINUS) == 0
    assert epsilon(LANTERN_LEFT) == 0
    assert epsilon_parity(LANTERN_RIGHT) == 0
    with pytest.raises(RequiresAllMinus):
        epsilon(UNKNOT_PLUS)


def test_epsilon_is_half_integer_on_singular_all_minus_surgery():
    # tb = 1 trefoil with coefficient -1: Q = (0), so sigma + n = 1.
    data = linking_data(surgery_from_word("L1/L3/X2/X2/X2/R1/R1", [-1]))
    assert data == LinkingData(((0,),), (0,), 1, 0)
    assert d3_surg(data) == Fraction(-1, 2)
    assert raw_delta(data) == 0
    assert delta(data) == 0
    assert epsilon(data) == Fraction(-1, 2)
    assert epsilon_parity(data) == Fraction(3, 2)
    assert d3_surg(data) == raw_delta(data) / 4 + epsilon(data)


def test_d3_is_raw_delta_quarter_plus_epsilon():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 50:
        n = int(rng.integers(1, 5))
        upper = rng.integers(-3, 4, size=(n, n))
        Q = [[int(upper[min(i, j)][max(i, j)]) for j in range(n)] for i in range(n)]
        if linalg.determinant(Q) == 0:
            continue
        r = [Q[i][i] + 2 * int(rng.integers(-2, 3)) for i in range(n)]
        data = LinkingData(Q, r, n, 0)
        assert d3_surg(data) == raw_delta(data) / 4 + epsilon(data)
        checked += 1


def _elementary(n, i, j, c):
    m = [[int(a == b) for b in range(n)] for a in range(n)]
    m[i][j] = c
    return m


def test_unimodular_data_has_integral_d3():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        P = [[int(a == b) for b in range(n)] for a in range(n)]
        for _ in range(6):
            i, j = (int(v) for v in rng.integers(0, n, size=2))
            if i != j:
                P = linalg.mat_mul(P, _elementary(n, i, j, int(rng.integers(-2, 3))))
        D = [[int(rng.choice([-1, 1])) if a == b else 0 for b in range(n)] for a in range(n)]
        Q = linalg.congruence(D, P)
        r0 = [int(rng.choice([-3, -1, 1, 3])) for _ in range(n)]
        r = linalg.mat_vec(linalg.transpose(P), r0)
        data = LinkingData(Q, r, n, int(rng.integers(0, n + 1)))
        assert is_integral_homology_sphere(data)
        assert d3_surg(data).denominator == 1
        assert delta(data) == 0
