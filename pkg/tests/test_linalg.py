import random
from fractions import Fraction

import numpy as np
import pytest

from qfasim.linalg import (QI, LinAlgError, Matrix, SingularMatrixError, determinant, invert, kron,
                           leibniz_determinant, minor_determinant, nullspace, rank, solve, span,
                           subspace_equal, subspace_intersection, subspace_sum)


def rand_matrix(rng, n):
    return Matrix.exact([[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)])


def test_qi_arithmetic_and_collapse():
    i = QI(0, 1)
    assert i * i == -1
    assert QI.make(3, 0) == Fraction(3)
    assert isinstance(QI.make(1, 2), QI)
    z = QI(1, 2)
    assert z * z.conjugate() == 5


def test_bareiss_matches_leibniz():
    rng = random.Random(1)
    for n in range(1, 6):
        m = rand_matrix(rng, n)
        assert determinant(m) == leibniz_determinant(m)


def test_gaussian_integer_determinant():
    m = Matrix.exact([[QI(0, 1), 1], [1, QI(0, 1)]])
    assert determinant(m) == -2


def test_minor_and_inverse_agree():
    rng = random.Random(2)
    m = rand_matrix(rng, 4)
    d = determinant(m)
    inv = invert(m)
    for i in range(4):
        for j in range(4):
            assert inv.tolist()[j][i] == (-1) ** (i + j) * minor_determinant(m, i, j) / d


def test_solve_and_singular():
    m = Matrix.exact([[2, 1], [1, 1]])
    assert solve(m, [3, 2]) == (1, 1)
    with pytest.raises(SingularMatrixError):
        invert(Matrix.exact([[1, 2], [2, 4]]))


def test_float_backend_det():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 5))
    assert abs(complex(determinant(Matrix.floating(a))) - np.linalg.det(a)) < 1e-9


def test_kron_shape_and_entry():
    a = Matrix.exact([[1, 2], [3, 4]])
    b = Matrix.identity(3)
    k = kron(a, b)
    assert k.shape == (6, 6)
    assert k.tolist()[4][1] == 3


def test_nullspace_and_rank():
    m = Matrix.exact([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert rank(m) == 2
    ns = nullspace(m)
    assert ns.dim == 1
    v = ns.vectors[0]
    assert all(x == 0 for x in m.apply(v))


def test_subspace_ops():
    a = span(3, "EXACT", [(1, 0, 0), (0, 1, 0)])
    b = span(3, "EXACT", [(0, 1, 0), (0, 0, 1)])
    assert subspace_sum(a, b).dim == 3
    inter = subspace_intersection(a, b)
    assert inter.dim == 1 and inter.contains((0, 5, 0))
    assert subspace_equal(a, span(3, "EXACT", [(1, 1, 0), (1, -1, 0)]))


def test_ragged_rows_rejected():
    with pytest.raises(LinAlgError):
        Matrix.exact([[1, 2], [3]])
