# equivix/tests/test_isometry.py
"""Tests for group elements and their fixed-point data."""

import json

import numpy as np
import pytest

from equivix.config import DATA_DIR
from equivix.errors import InvalidDimensionError, PreconditionError, UsageError
from equivix.isometry import (
    analyze_isometry,
    block_diagonal,
    block_rotation,
    parse_group_element,
    phase_space_pullback,
    rotation_matrix,
)


class TestAnalyzeIsometry:
    """Fixed space, aligning rotation and normal determinant."""

    def test_identity(self):
        A = analyze_isometry(np.eye(3))
        assert A.n_g == 3
        assert A.is_identity
        assert A.det_normal == 1.0

    @pytest.mark.parametrize("theta", [0.7, np.pi / 2, 2.5])
    def test_plane_rotation(self, theta):
        A = analyze_isometry(rotation_matrix(theta))
        assert A.n_g == 0
        assert A.det_normal == pytest.approx(2 - 2 * np.cos(theta))

    def test_block_rotation_with_fixed_plane(self):
        A = analyze_isometry(block_rotation([np.pi / 2, 0.0]))
        assert A.n_g == 2
        assert A.det_normal == pytest.approx(2.0)
        fixed = A.fixed_basis
        np.testing.assert_allclose(A.g @ fixed, fixed, atol=1e-12)
        # the fixed plane is span(e3, e4)
        np.testing.assert_allclose(np.abs(fixed[:2]), 0, atol=1e-12)
        np.testing.assert_allclose(A.Q.T @ A.Q, np.eye(4), atol=1e-12)

    def test_normal_block_has_no_fixed_vectors(self):
        A = analyze_isometry(block_rotation([1.1, 0.0]))
        h = A.normal_block
        assert np.min(np.abs(np.linalg.eigvals(h) - 1)) > 1e-3

    def test_rejects_non_orthogonal(self):
        with pytest.raises(PreconditionError):
            analyze_isometry(np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_rejects_reflections(self):
        with pytest.raises(PreconditionError):
            analyze_isometry(np.diag([1.0, -1.0]))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidDimensionError):
            analyze_isometry(np.ones((2, 3)))

    def test_rejects_non_unitary_representation(self):
        with pytest.raises(PreconditionError):
            analyze_isometry(np.eye(2), rep_v=2 * np.eye(2))


class TestFiberRepresentation:
    def test_trivial_when_unset(self):
        A = analyze_isometry(rotation_matrix(0.3))
        np.testing.assert_allclose(A.fiber_rep_for(5), np.eye(5))

    def test_block_diagonal(self):
        rep_v, rep_w = np.eye(1), rotation_matrix(0.3)
        A = analyze_isometry(np.eye(2), rep_v=rep_v, rep_w=rep_w)
        G = A.fiber_rep_for(3)
        np.testing.assert_allclose(G[1:, 1:], rep_w)
        with pytest.raises(InvalidDimensionError):
            A.fiber_rep_for(4)


class TestPhaseSpace:
    def test_pullback_uses_inverse(self):
        g = rotation_matrix(np.pi / 2)
        A = analyze_isometry(g)
        z = np.array([1.0, 0.0, 0.0, 2.0])
        moved = phase_space_pullback(A, z)
        np.testing.assert_allclose(moved[:2], g.T @ z[:2], atol=1e-15)
        np.testing.assert_allclose(moved[2:], g.T @ z[2:], atol=1e-15)

    def test_tangential_directions_and_embedding(self):
        A = analyze_isometry(np.eye(2))
        directions = A.tangential_directions()
        assert directions.shape == (4, 4)
        t = np.array([[0.1, 0.2, 0.3, 0.4]])
        z = A.embed_tangential(t)
        # x' and xi' of each fixed direction interleave in t
        np.testing.assert_allclose(z @ directions.T, t, atol=1e-14)

    def test_normal_directions_complete_the_frame(self):
        g = block_rotation([np.pi / 2, 0.0])
        A = analyze_isometry(g)
        normal = A.normal_directions()
        assert normal.shape == (4, 8)
        frame = np.vstack([A.tangential_directions(), normal])
        np.testing.assert_allclose(frame @ frame.T, np.eye(8), atol=1e-12)
        # diag(g, g) keeps the normal span
        moved = normal @ block_diagonal(g, g).T
        np.testing.assert_allclose(moved @ normal.T @ normal, moved, atol=1e-12)

    def test_reversed_pair_swaps_rows(self):
        A = analyze_isometry(np.eye(1))
        plain = A.tangential_directions()
        swapped = A.tangential_directions(reversed_pairs=(0,))
        np.testing.assert_allclose(swapped, plain[::-1])

    def test_embedding_dimension_checked(self):
        with pytest.raises(InvalidDimensionError):
            analyze_isometry(np.eye(2)).embed_tangential(np.zeros(3))


class TestParseGroupElement:
    def test_named_forms(self):
        g, description = parse_group_element("rotation:0.5")
        np.testing.assert_allclose(g, rotation_matrix(0.5))
        assert description == "rotation:0.5"
        g, _ = parse_group_element("blockrot:0.5,0")
        assert g.shape == (4, 4)
        g, _ = parse_group_element("identity", n=3)
        np.testing.assert_allclose(g, np.eye(3))

    def test_identity_needs_dimension(self):
        with pytest.raises(UsageError):
            parse_group_element("identity")

    def test_bad_angles(self):
        with pytest.raises(UsageError):
            parse_group_element("rotation:abc")
        with pytest.raises(UsageError):
            parse_group_element("rotation:1,2")

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            parse_group_element("rotation:0.5", n=4)

    def test_bundled_json_file(self):
        g, description = parse_group_element(str(DATA_DIR / "groups" / "quarter-turn.json"))
        np.testing.assert_allclose(g, rotation_matrix(np.pi / 2), atol=1e-15)
        assert description == "quarter turn of R^2"

    def test_text_matrix_file(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("0 -1\n1 0\n")
        g, description = parse_group_element(str(path))
        np.testing.assert_allclose(g, [[0, -1], [1, 0]])
        assert description == "g.txt"

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps({"matrix": [[1, 0]]}))
        with pytest.raises(UsageError):
            parse_group_element(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(UsageError):
            parse_group_element(str(tmp_path / "absent.json"))
