# equivix/tests/test_cocycles.py
"""Tests for the operator-side cocycles, the idempotent pairing and g-averaging."""

import numpy as np
import pytest

from equivix.deformation.cocycles import (
    OmegaCocycle,
    cochain_b_and_cyclicity_check,
    g_average,
    idempotent_trace_pairing,
    omega_g,
)
from equivix.deformation.gaussians import TestFunction, random_test_function
from equivix.deformation.hermite import HermiteBasisConfig, group_rep_matrix
from equivix.deformation.operators import DeformedOperator, rho_hbar
from equivix.errors import BasisMismatchError, InvalidDimensionError, NonIdempotentError
from equivix.isometry import analyze_isometry, rotation_matrix

HBAR = 0.5


def _projector(N: int, rank: int) -> DeformedOperator:
    matrix = np.zeros((N, N), dtype=complex)
    matrix[:rank, :rank] = np.eye(rank)
    return DeformedOperator(matrix, HBAR, HermiteBasisConfig(n=1, N=N))


class TestOmega:
    """Evaluation of omega_g."""

    def test_isolated_fixed_point_is_twisted_trace(self):
        A = analyze_isometry(rotation_matrix(0.8))
        basis = HermiteBasisConfig(n=2, N=8)
        T = rho_hbar(TestFunction.gaussian(2, xi_powers=[1, 0]), HBAR, basis)
        G = group_rep_matrix(A, basis)
        assert omega_g(A, [T]) == pytest.approx(np.trace(G @ T.matrix), abs=1e-14)

    def test_degree(self):
        assert OmegaCocycle(analyze_isometry(np.eye(1))).degree == 2
        assert OmegaCocycle(analyze_isometry(rotation_matrix(1.0))).degree == 0

    def test_operator_count(self):
        A = analyze_isometry(np.eye(1))
        with pytest.raises(InvalidDimensionError):
            omega_g(A, [_projector(10, 1)])

    def test_shared_basis(self):
        A = analyze_isometry(np.eye(1))
        with pytest.raises(BasisMismatchError):
            omega_g(A, [_projector(10, 1), _projector(10, 1), _projector(12, 1)])

    def test_precomputed_group_matrix(self):
        A = analyze_isometry(rotation_matrix(np.pi / 2))
        basis = HermiteBasisConfig(n=2, N=6)
        T = rho_hbar(TestFunction.gaussian(2), HBAR, basis)
        G = group_rep_matrix(A, basis)
        assert omega_g(A, [T], group_matrix=G) == omega_g(A, [T])


class TestIdempotentPairing:
    """The pairing of an idempotent with omega reproduces its trace."""

    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_low_level_projectors(self, rank):
        result = idempotent_trace_pairing(_projector(40, rank), 1)
        assert result.pairing == pytest.approx(rank, abs=1e-10)
        assert result.trace == pytest.approx(rank)
        assert result.edge_energy == 0.0

    def test_rejects_non_idempotent(self):
        T = _projector(20, 2) * 0.5
        with pytest.raises(NonIdempotentError):
            idempotent_trace_pairing(T, 1)

    def test_dimension(self):
        with pytest.raises(InvalidDimensionError):
            idempotent_trace_pairing(_projector(20, 1), 2)


class TestCochainCheck:
    """b omega = 0 and cyclicity on rho_hbar images."""

    def test_random_operators(self):
        phi = OmegaCocycle(analyze_isometry(np.eye(1)))
        basis = HermiteBasisConfig(n=1, N=30)
        rng = np.random.default_rng(11)
        tuples = [[rho_hbar(random_test_function(rng, 1), HBAR, basis) for _ in range(4)] for _ in range(3)]
        report = cochain_b_and_cyclicity_check(phi, tuples)
        assert report.tuples == 3
        assert report.passed(1e-8)

    def test_detects_a_non_cocycle(self):
        basis = HermiteBasisConfig(n=1, N=10)
        rng = np.random.default_rng(5)
        tuples = [[DeformedOperator(rng.normal(size=(10, 10)), HBAR, basis) for _ in range(2)]]
        # T -> Tr(T^2 diag(1..N)) is not a trace
        weight = np.diag(np.arange(1.0, 11.0))
        report = cochain_b_and_cyclicity_check(lambda T: complex(np.trace(T.matrix @ T.matrix @ weight)), tuples)
        assert not report.passed(1e-8)


class TestGAverage:
    """Averaging makes an operator commute with the truncated group action."""

    def setup_method(self):
        self.basis = HermiteBasisConfig(n=2, N=6)
        self.T = rho_hbar(TestFunction.gaussian(2, x_center=[0.3, -0.2], xi_powers=[1, 0]), HBAR, self.basis)

    def test_cyclic_group(self):
        A = analyze_isometry(rotation_matrix(np.pi / 2))
        result = g_average(self.T, A)
        assert result.method == "cyclic group of order 4"
        assert result.residual_before > 1e-3
        assert result.residual_after < 1e-12

    def test_eigenspace_compression(self):
        A = analyze_isometry(rotation_matrix(1.0))
        result = g_average(self.T, A)
        assert result.method == "eigenspace compression"
        assert result.residual_after < 1e-8 * result.residual_before

    def test_average_is_idempotent(self):
        A = analyze_isometry(rotation_matrix(np.pi / 2))
        once = g_average(self.T, A).operator
        twice = g_average(once, A).operator
        np.testing.assert_allclose(twice.matrix, once.matrix, atol=1e-12)

    def test_identity(self):
        basis = HermiteBasisConfig(n=1, N=6)
        T = rho_hbar(TestFunction.gaussian(1), HBAR, basis)
        result = g_average(T, analyze_isometry(np.eye(1)))
        assert result.method == "identity"
        assert result.operator is T
