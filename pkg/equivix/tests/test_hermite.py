# equivix/tests/test_hermite.py
"""Tests for the truncated Hermite basis and the group representation on it."""

import numpy as np
import pytest

from equivix.deformation.hermite import (
    HermiteBasisConfig,
    derivative_operator,
    gauss_hermite_plain,
    group_rep_matrix,
    hermite_functions,
    ladder_matrices,
    level_projection,
    multi_indices,
    oscillator_levels,
    position_operator,
    truncation_edge_energy,
)
from equivix.errors import InvalidDimensionError, PreconditionError
from equivix.isometry import analyze_isometry, block_diagonal, rotation_matrix


def _rotation(theta: float):
    return analyze_isometry(rotation_matrix(theta), description=f"rotation:{theta}")


class TestBasisFunctions:
    """Hermite functions and the plain Gauss-Hermite rule."""

    def test_orthonormal(self):
        u, w = gauss_hermite_plain(60)
        psi = hermite_functions(20, u)
        gram = psi.T @ (psi * w[:, np.newaxis])
        np.testing.assert_allclose(gram, np.eye(20), atol=1e-12)

    def test_ground_state(self):
        x = np.array([0.0, 1.0])
        psi = hermite_functions(3, x)
        np.testing.assert_allclose(psi[:, 0], np.pi ** -0.25 * np.exp(-x ** 2 / 2))
        np.testing.assert_allclose(psi[:, 1], np.sqrt(2) * x * psi[:, 0])

    def test_plain_rule_integrates_gaussian(self):
        u, w = gauss_hermite_plain(40)
        assert np.sum(w * np.exp(-2 * u ** 2)) == pytest.approx(np.sqrt(np.pi / 2), rel=1e-12)


class TestLadder:
    """Position and derivative matrices."""

    def test_symmetry(self):
        X, D = ladder_matrices(12)
        np.testing.assert_array_equal(X, X.T)
        np.testing.assert_array_equal(D, -D.T)

    def test_canonical_commutator_below_edge(self):
        N = 15
        X, D = ladder_matrices(N)
        commutator = D @ X - X @ D
        np.testing.assert_allclose(commutator[:N - 1, :N - 1], np.eye(N - 1), atol=1e-13)

    def test_matches_quadrature(self):
        N = 10
        u, w = gauss_hermite_plain(50)
        psi = hermite_functions(N, u)
        X, _ = ladder_matrices(N)
        np.testing.assert_allclose(psi.T @ (u[:, np.newaxis] * psi * w[:, np.newaxis]), X, atol=1e-12)

    def test_tensor_embedding(self):
        basis = HermiteBasisConfig(n=2, N=5)
        X, D = ladder_matrices(5)
        np.testing.assert_array_equal(position_operator(basis, 0), np.kron(X, np.eye(5)))
        np.testing.assert_array_equal(derivative_operator(basis, 1), np.kron(np.eye(5), D))

    def test_coordinate_out_of_range(self):
        basis = HermiteBasisConfig(n=1, N=5)
        with pytest.raises(InvalidDimensionError):
            position_operator(basis, 1)
        with pytest.raises(InvalidDimensionError):
            derivative_operator(basis, -1)


class TestLevels:
    def test_coordinate_one_is_slowest(self):
        basis = HermiteBasisConfig(n=2, N=4)
        indices = multi_indices(basis)
        assert tuple(indices[1]) == (0, 1)
        assert tuple(indices[4]) == (1, 0)

    def test_level_projection(self):
        basis = HermiteBasisConfig(n=2, N=4)
        P = level_projection(basis, 1)
        assert np.trace(P) == 2
        assert set(np.flatnonzero(np.diag(P))) == {1, 4}
        assert oscillator_levels(basis).max() == 6


class TestGroupRepresentation:
    """Rotations of R^2 on the truncated tensor basis."""

    def test_identity(self):
        basis = HermiteBasisConfig(n=2, N=6)
        np.testing.assert_array_equal(group_rep_matrix(_rotation(0.0), basis), np.eye(36))

    def test_orthogonal(self):
        basis = HermiteBasisConfig(n=2, N=8)
        G = group_rep_matrix(_rotation(0.9), basis)
        np.testing.assert_allclose(G.T @ G, np.eye(64), atol=1e-12)
        assert G[0, 0] == pytest.approx(1.0)

    def test_quarter_turn_moves_first_excited_state(self):
        N = 6
        basis = HermiteBasisConfig(n=2, N=N)
        G = group_rep_matrix(_rotation(np.pi / 2), basis)
        expected = np.zeros(N * N)
        expected[1] = 1.0
        np.testing.assert_allclose(G[:, N], expected, atol=1e-12)

    def test_homomorphism(self):
        basis = HermiteBasisConfig(n=2, N=8)
        first = group_rep_matrix(_rotation(0.4), basis)
        second = group_rep_matrix(_rotation(0.3), basis)
        both = group_rep_matrix(_rotation(0.7), basis)
        np.testing.assert_allclose(first @ second, both, atol=1e-11)

    @pytest.mark.parametrize("turns", [1, 2, 3])
    def test_quarter_turns_are_exact_on_the_box(self, turns):
        basis = HermiteBasisConfig(n=2, N=7)
        G = group_rep_matrix(_rotation(turns * np.pi / 2), basis)
        np.testing.assert_array_equal(np.linalg.matrix_power(G, 4), np.eye(49))
        np.testing.assert_array_equal(G.T @ G, np.eye(49))

    def test_quarter_turn_matches_exponential_on_complete_levels(self):
        N = 7
        basis = HermiteBasisConfig(n=2, N=N)
        eighth = group_rep_matrix(_rotation(np.pi / 4), basis)
        quarter = group_rep_matrix(_rotation(np.pi / 2), basis)
        complete = np.flatnonzero(oscillator_levels(basis) < N)
        block = np.ix_(complete, complete)
        np.testing.assert_allclose((eighth @ eighth)[block], quarter[block], atol=1e-12)

    def test_preserves_levels(self):
        basis = HermiteBasisConfig(n=2, N=6)
        G = group_rep_matrix(_rotation(1.1), basis)
        levels = oscillator_levels(basis)
        leak = G[levels[:, np.newaxis] != levels[np.newaxis, :]]
        assert np.max(np.abs(leak)) == 0.0

    def test_rotates_a_function(self):
        N, theta = 12, 0.7
        basis = HermiteBasisConfig(n=2, N=N)
        G = group_rep_matrix(_rotation(theta), basis)
        coefficients = np.zeros(N * N)
        coefficients[N] = 1.0  # psi_1(x_1) psi_0(x_2)
        rotated = G @ coefficients
        point = np.array([0.4, -0.3])
        pulled = rotation_matrix(-theta) @ point
        psi = hermite_functions(N, point)
        value = np.einsum("ij,i,j->", rotated.reshape(N, N), psi[0], psi[1])
        expected = hermite_functions(N, pulled[:1])[0, 1] * hermite_functions(N, pulled[1:])[0, 0]
        assert value == pytest.approx(expected, abs=1e-12)

    def test_commutes_with_level_projections(self):
        basis = HermiteBasisConfig(n=2, N=6)
        G = group_rep_matrix(_rotation(np.pi / 2), basis)
        for level in range(2 * basis.N - 1):
            P = level_projection(basis, level)
            np.testing.assert_array_equal(G @ P, P @ G)

    def test_fixed_coordinate_is_untouched(self):
        basis = HermiteBasisConfig(n=3, N=6)
        g = block_diagonal(np.eye(1), rotation_matrix(0.7))
        G = group_rep_matrix(analyze_isometry(g), basis)
        np.testing.assert_allclose(G.T @ G, np.eye(basis.dim), atol=1e-12)
        for operator in (position_operator(basis, 0), derivative_operator(basis, 0)):
            np.testing.assert_allclose(G @ operator, operator @ G, atol=1e-12)

    def test_plane_factor_matches_two_dimensional_rotation(self):
        N = 5
        g = block_diagonal(np.eye(1), rotation_matrix(0.7))
        G = group_rep_matrix(analyze_isometry(g), HermiteBasisConfig(n=3, N=N))
        plane = group_rep_matrix(_rotation(0.7), HermiteBasisConfig(n=2, N=N))
        np.testing.assert_allclose(G, np.kron(np.eye(N), plane), atol=1e-14)

    def test_needs_plane(self):
        g = np.eye(3)
        g[:2, :2] = rotation_matrix(0.5)
        with pytest.raises(PreconditionError):
            group_rep_matrix(analyze_isometry(g), HermiteBasisConfig(n=3, N=4))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            group_rep_matrix(_rotation(0.5), HermiteBasisConfig(n=1, N=6))


class TestConfig:
    def test_invalid_dimension(self):
        with pytest.raises(InvalidDimensionError):
            HermiteBasisConfig(n=0, N=10)

    def test_cutoff_too_small(self):
        with pytest.raises(InvalidDimensionError):
            HermiteBasisConfig(n=1, N=3)

    def test_quadrature_order(self):
        assert HermiteBasisConfig(n=1, N=20).quadrature_order == 120
        assert HermiteBasisConfig(n=1, N=100).quadrature_order == 300
        assert HermiteBasisConfig(n=1, N=20, quad_nodes=50).quadrature_order == 50

    def test_from_settings(self):
        basis = HermiteBasisConfig.from_settings(2)
        assert basis.N == 40
        assert basis.dim == 1600


class TestEdgeEnergy:
    def test_identity(self):
        basis = HermiteBasisConfig(n=1, N=16)
        assert truncation_edge_energy(np.eye(16), basis) == pytest.approx(0.25)

    def test_away_from_edge(self):
        basis = HermiteBasisConfig(n=1, N=8)
        T = np.zeros((8, 8))
        T[0, 0] = 1.0
        assert truncation_edge_energy(T, basis) == 0.0
        assert truncation_edge_energy(np.zeros((8, 8)), basis) == 0.0
