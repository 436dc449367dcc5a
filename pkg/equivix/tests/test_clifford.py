# equivix/tests/test_clifford.py
"""Tests for the Clifford algebra tables."""

import numpy as np
import pytest

from equivix.clifford import (
    clifford_basis,
    graded_blocks,
    left_mult_matrix,
    so_action_matrix,
    twisted_right_mult_matrix,
)
from equivix.errors import InvalidDimensionError, PreconditionError
from equivix.isometry import block_rotation, rotation_matrix


class TestBasis:
    """Graded basis layout."""

    def test_n_half_one_layout(self):
        alg = clifford_basis(1)
        assert alg.basis == ((), (1, 2), (1,), (2,))
        assert alg.dim == 4
        assert alg.half_dim == 2

    def test_even_block_first(self):
        alg = clifford_basis(2)
        degrees = alg.degrees()
        assert np.all(degrees[alg.even_slice] % 2 == 0)
        assert np.all(degrees[alg.odd_slice] % 2 == 1)
        assert alg.dim == 16

    @pytest.mark.parametrize("n_half", [0, -1, 1.5])
    def test_invalid_n_half(self, n_half):
        with pytest.raises(InvalidDimensionError):
            clifford_basis(n_half)

    def test_generator_index_checked(self):
        with pytest.raises(InvalidDimensionError):
            left_mult_matrix(clifford_basis(1), 3)

    def test_cached_tables_are_read_only(self):
        matrix = left_mult_matrix(clifford_basis(1), 1)
        assert not matrix.flags.writeable


class TestRelations:
    """Anticommutation relations for x x = +|x|^2."""

    @pytest.mark.parametrize("n_half", [1, 2, 3])
    def test_left_and_twisted_right(self, n_half):
        alg = clifford_basis(n_half)
        identity = np.eye(alg.dim)
        m = alg.ambient_dim
        for i in range(1, m + 1):
            ci = left_mult_matrix(alg, i)
            hi = twisted_right_mult_matrix(alg, i)
            for j in range(1, m + 1):
                cj = left_mult_matrix(alg, j)
                hj = twisted_right_mult_matrix(alg, j)
                delta = 1.0 if i == j else 0.0
                np.testing.assert_allclose(ci @ cj + cj @ ci, 2 * delta * identity, atol=1e-14)
                np.testing.assert_allclose(hi @ hj + hj @ hi, -2 * delta * identity, atol=1e-14)
                np.testing.assert_allclose(ci @ hj + hj @ ci, 0 * identity, atol=1e-14)

    def test_generators_are_odd(self):
        alg = clifford_basis(2)
        for i in (1, 2, 3, 4):
            for matrix in (left_mult_matrix(alg, i), twisted_right_mult_matrix(alg, i)):
                even_blocks = graded_blocks(alg, matrix)
                assert np.all(even_blocks[0] == 0)
                assert np.all(even_blocks[1] == 0)


class TestMatrices:
    """Explicit tables on the basis (1, e12 | e1, e2)."""

    def test_left_multiplication(self):
        alg = clifford_basis(1)
        np.testing.assert_array_equal(
            left_mult_matrix(alg, 1),
            [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
        )
        np.testing.assert_array_equal(
            left_mult_matrix(alg, 2),
            [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
        )

    def test_twisted_right_multiplication(self):
        alg = clifford_basis(1)
        np.testing.assert_array_equal(
            twisted_right_mult_matrix(alg, 1),
            [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        )
        np.testing.assert_array_equal(
            twisted_right_mult_matrix(alg, 2),
            [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
        )

    @pytest.mark.parametrize("theta", [0.3, np.pi / 2, 2.2])
    def test_rotation_blocks(self, theta):
        alg = clifford_basis(1)
        even, odd = graded_blocks(alg, so_action_matrix(alg, rotation_matrix(theta)))
        np.testing.assert_allclose(even, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(odd, rotation_matrix(theta), atol=1e-14)


class TestElements:
    """Element arithmetic."""

    def test_products_of_generators(self):
        alg = clifford_basis(1)
        e1, e2 = alg.monomial(1), alg.monomial(2)
        assert (e1 * e1).allclose(alg.one())
        assert (e1 * e2).allclose(alg.monomial(1, 2))
        assert (e2 * e1).allclose(-1 * alg.monomial(1, 2))

    def test_vector_squares_to_norm(self):
        alg = clifford_basis(2)
        coefficients = np.array([0.3, -1.2, 0.5, 2.0])
        v = sum((float(c) * alg.monomial(i + 1) for i, c in enumerate(coefficients)), start=0 * alg.one())
        assert (v * v).allclose(float(coefficients @ coefficients) * alg.one())

    def test_even_and_odd_parts(self):
        alg = clifford_basis(1)
        w = alg.one() + alg.monomial(1) + 2 * alg.monomial(1, 2)
        assert (w.even_part() + w.odd_part()).allclose(w)
        assert w.grading_involution().allclose(w.even_part() - w.odd_part())

    def test_monomials_are_orthonormal(self):
        alg = clifford_basis(2)
        monomials = [alg.monomial(*mono) for mono in alg.basis]
        gram = np.array([[alg.inner(u, v) for v in monomials] for u in monomials])
        np.testing.assert_array_equal(gram, np.eye(alg.dim))
        w = alg.one() + 2j * alg.monomial(1, 3)
        assert alg.inner(w, w) == pytest.approx(5.0)

    def test_element_shape_checked(self):
        with pytest.raises(InvalidDimensionError):
            clifford_basis(1).element([1.0, 2.0])


class TestSOAction:
    """Extension of g in SO(2n) to the algebra."""

    def test_identity(self):
        alg = clifford_basis(1)
        np.testing.assert_allclose(so_action_matrix(alg, np.eye(2)), np.eye(4), atol=1e-14)

    def test_unitary_and_grading_preserving(self):
        alg = clifford_basis(2)
        action = so_action_matrix(alg, block_rotation([0.4, 1.3]))
        np.testing.assert_allclose(action.conj().T @ action, np.eye(16), atol=1e-12)
        assert np.allclose(action[alg.even_slice, alg.odd_slice], 0)
        assert np.allclose(action[alg.odd_slice, alg.even_slice], 0)

    def test_homomorphism(self):
        alg = clifford_basis(1)
        g1, g2 = rotation_matrix(0.3), rotation_matrix(1.1)
        np.testing.assert_allclose(
            so_action_matrix(alg, g1 @ g2),
            so_action_matrix(alg, g1) @ so_action_matrix(alg, g2),
            atol=1e-12,
        )

    def test_intertwines_left_multiplication(self):
        alg = clifford_basis(1)
        g = rotation_matrix(0.8)
        action = so_action_matrix(alg, g)
        for i in (1, 2):
            moved = sum(g[j, i - 1] * left_mult_matrix(alg, j + 1) for j in range(2))
            np.testing.assert_allclose(action @ left_mult_matrix(alg, i), moved @ action, atol=1e-12)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(PreconditionError):
            so_action_matrix(clifford_basis(1), np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_rejects_wrong_shape(self):
        with pytest.raises(InvalidDimensionError):
            so_action_matrix(clifford_basis(1), np.eye(3))
