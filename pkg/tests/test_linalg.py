from fractions import Fraction as F

from selfcloseness import linalg


def test_rref_and_rank():
    R, piv = linalg.rref([[2, 4, 6], [1, 2, 3], [0, 1, 1]])
    assert piv == [0, 1]
    assert R == [[1, 0, 1], [0, 1, 1]]
    assert linalg.rank([[1, 2], [2, 4]]) == 1


def test_nullspace_is_annihilated():
    A = [[1, 2, 3], [4, 5, 6]]
    ns = linalg.nullspace(A, 3)
    assert len(ns) == 1
    assert linalg.mat_vec(A, ns[0]) == [0, 0]


def test_left_nullspace():
    A = [[1, 2], [2, 4], [0, 1]]
    for y in linalg.left_nullspace(A, 2):
        assert [sum(y[i] * A[i][j] for i in range(3)) for j in range(2)] == [0, 0]


def test_solve_exact_rationals():
    sol = linalg.solve([[3, 1], [1, 2]], [F(9), F(8)], 2)
    assert sol is not None
    assert sol[0] == [F(2), F(3)]
    assert linalg.solve([[1, 1], [1, 1]], [1, 2], 2) is None


def test_invertible():
    assert linalg.is_invertible([[1, 2], [3, 4]])
    assert not linalg.is_invertible([[1, 2], [2, 4]])


def test_smith_normal_form():
    # diag(2, 6) up to unimodular change: invariant factors 2, 6
    assert linalg.smith_normal_form([[2, 4], [6, 12 + 6]]) == [2, 6]
    assert linalg.smith_normal_form([[1, -1, 0], [0, 1, -1]]) == [1, 1]
