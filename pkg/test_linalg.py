# ==============================================================================
# TESTS - ALGÈBRE LINÉAIRE DENSE
# ==============================================================================

import numpy as np
import pytest

from exceptions import DimensionError, NumericalError
from linalg import (
    as_matrix, as_vector, axpy, diag_apply, matvec, one_minus_squared,
    outer, tanh_map, transpose_matvec,
)


def test_matvec_identity_and_hand_values():
    assert np.array_equal(matvec(np.eye(2), np.array([3.0, 4.0])), [3.0, 4.0])
    assert np.array_equal(matvec(np.array([[1.0, 2.0], [3.0, 4.0]]), np.ones(2)), [3.0, 7.0])


def test_matvec_dimension_error():
    with pytest.raises(DimensionError):
        matvec(np.ones((2, 3)), np.ones(2))


def test_transpose_matvec_matches_explicit_transpose(rng):
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(transpose_matvec(M, np.array([1.0, 0.0])), [1.0, 2.0])
    assert np.array_equal(transpose_matvec(np.eye(3), np.array([1.0, -2.0, 5.0])), [1.0, -2.0, 5.0])

    for _ in range(20):
        rows, cols = rng.integers(1, 6, size=2)
        M = rng.normal(size=(rows, cols))
        v = rng.normal(size=rows)
        np.testing.assert_allclose(transpose_matvec(M, v), matvec(M.T.copy(), v), atol=1e-12)

    with pytest.raises(DimensionError):
        transpose_matvec(np.ones((2, 3)), np.ones(3))


def test_diag_apply_equals_dense_diagonal(rng):
    assert np.array_equal(diag_apply(np.array([2.0, 0.0]), np.array([3.0, 5.0])), [6.0, 0.0])
    v = np.array([0.3, -1.2, 7.0])
    assert np.array_equal(diag_apply(np.ones(3), v), v)

    for _ in range(20):
        size = int(rng.integers(1, 8))
        u, v = rng.normal(size=size), rng.normal(size=size)
        np.testing.assert_allclose(diag_apply(u, v), matvec(np.diag(u), v), atol=1e-12)

    with pytest.raises(DimensionError):
        diag_apply(np.ones(2), np.ones(3))


def test_tanh_outer_axpy():
    assert np.array_equal(tanh_map(np.array([0.0])), [0.0])
    assert np.array_equal(outer(np.array([1.0, 2.0]), np.array([3.0])), [[3.0], [6.0]])
    x, y = np.array([1.0, 2.0]), np.array([5.0, -1.0])
    assert np.array_equal(axpy(0.0, x, y), y)
    assert np.array_equal(axpy(2.0, x, y), [7.0, 3.0])
    with pytest.raises(DimensionError):
        axpy(1.0, np.ones(2), np.ones(3))


def test_tanh_stays_strictly_inside_unit_interval():
    out = tanh_map(np.array([-1e3, -25.0, 0.5, 25.0, 1e3]))
    assert np.all(np.abs(out) < 1.0)


def test_one_minus_squared():
    np.testing.assert_allclose(one_minus_squared(np.array([0.0, 0.5, -1.0])), [1.0, 0.75, 0.0])


def test_operations_do_not_modify_inputs():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    v = np.array([1.0, -1.0])
    M_copy, v_copy = M.copy(), v.copy()
    matvec(M, v)
    transpose_matvec(M, v)
    diag_apply(v, v)
    axpy(3.0, v, v)
    tanh_map(v)
    assert np.array_equal(M, M_copy) and np.array_equal(v, v_copy)


def test_constructors_reject_bad_values():
    with pytest.raises(DimensionError):
        as_vector([])
    with pytest.raises(DimensionError):
        as_matrix([1.0, 2.0])
    with pytest.raises(NumericalError):
        as_vector([1.0, np.nan])
    with pytest.raises(NumericalError):
        as_matrix([[np.inf]])
