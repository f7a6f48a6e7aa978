import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from fractions import Fraction

import numpy as np
import pytest

from kirby import blocks, linalg
from kirby.errors import DimensionMismatch, NotSolvable, SingularBlock


def _eigen_signature(m):
    values = np.linalg.eigvalsh(np.array(m, dtype=float))
    return int(sum(1 for v in values if v > 1e-9) - sum(1 for v in values if v < -1e-9))


def test_determinant_and_inverse():
    assert linalg.determinant([[2, 1], [1, 2]]) == 3
    assert linalg.determinant([[0, 1], [1, 0]]) == -1
    assert linalg.determinant([]) == 1
    inv = linalg.inverse([[2, 1], [1, 2]])
    assert inv == [[Fraction(2, 3), Fraction(-1, 3)], [Fraction(-1, 3), Fraction(2, 3)]]
    with pytest.raises(SingularBlock):
        linalg.inverse([[1, 2], [2, 4]])


def test_determinant_and_rank_agree_with_numpy():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        m = rng.integers(-3, 4, size=(n, n)).tolist()
        det = linalg.determinant(m)
        assert abs(float(det) - np.linalg.det(np.array(m, dtype=float))) < 1e-6
        assert linalg.rank(m) == np.linalg.matrix_rank(np.array(m, dtype=float))
        assert (det == 0) == (linalg.rank(m) < n)


def test_rank_and_kernel():
    assert linalg.rank([[1, 2], [2, 4]]) == 1
    assert linalg.rank([[2, 0, 1, 0], [1, -1, 0, -1], [-10, 6, 0, -2]]) == 3
    basis = linalg.kernel_basis([[1, 2], [2, 4]])
    assert len(basis) == 1
    assert linalg.mat_vec([[1, 2], [2, 4]], basis[0]) == [0, 0]


def test_solve_reports_unsolvable_systems():
    assert linalg.solve([[2, 0], [0, 3]], [4, 3]).x == (2, 1)
    assert not linalg.solve([[0]], [2]).solvable
    with pytest.raises(NotSolvable):
        linalg.quadratic_value([[0]], [2])
    with pytest.raises(DimensionMismatch):
        linalg.solve([[1, 0], [0, 1]], [1])


def test_signature_handles_zero_diagonal():
    assert linalg.signature([[0, 1], [1, 0]]) == 0
    assert linalg.signature([[0, 1, 0], [1, 0, 0], [0, 0, -3]]) == -1
    assert linalg.signature([]) == 0
    assert linalg.signature([[0, 0], [0, 0]]) == 0


@pytest.mark.parametrize("matrix, expected", [
    (blocks.LANTERN_A, -3),
    (blocks.LANTERN_A_PRIME, -4),
    (blocks.CHAIN_A_PRIME, -2),
    (blocks.cancel_block(-1), 0),
    (blocks.cancel_block(-3, -1), 0),
])
def test_small_block_signatures_match_eigen_oracle(matrix, expected):
    assert linalg.signature(matrix) == expected
    assert _eigen_signature(matrix) == expected


def test_chain_block_signature():
    assert linalg.signature(blocks.chain_A()) == -8
    assert linalg.signature(blocks.chain_A()) - linalg.signature(blocks.CHAIN_A_PRIME) == -6


def test_schur_complement():
    assert linalg.schur_complement([[2, 1], [1, 2]], 1) == [[Fraction(3, 2)]]
    assert linalg.schur_complement([[2, 1], [1, 2]], 0) == [[2, 1], [1, 2]]
    with pytest.raises(SingularBlock):
        linalg.schur_complement([[0, 1], [1, 0]], 1)


def test_quadratic_value_independent_of_witness():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        k = int(rng.integers(1, n))
        B = [[int(v) for v in rng.integers(-3, 4, size=k)] for _ in range(n)]
        Q = linalg.mat_mul(B, linalg.transpose(B))
        y = [int(v) for v in rng.integers(-3, 4, size=n)]
        r = linalg.mat_vec(Q, y)
        witness = linalg.solve(Q, r).x
        other = list(witness)
        for v in linalg.kernel_basis(Q):
            c = int(rng.integers(-5, 6))
            other = [a + c * b for a, b in zip(other, v)]
        assert linalg.mat_vec(Q, other) == r
        assert linalg.dot(other, r) == linalg.dot(witness, r) == linalg.quadratic_value(Q, r)
        assert linalg.quadratic_value(Q, r) == linalg.dot(y, r)
