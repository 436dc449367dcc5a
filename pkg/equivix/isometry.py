# equivix/isometry.py
"""
Group elements g in SO(n), their fiber representations and fixed-point data.

The fixed space (R^n)^g is found from the singular value decomposition of
g - I and rotated onto the leading coordinates by an orthogonal Q, so that
Q^T g Q = I_{n_g} (+) h. The normal determinant is det(h - I).
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from equivix.config import settings
from equivix.errors import (
    IllConditionedError,
    InvalidDimensionError,
    PreconditionError,
    UsageError,
)
from equivix.schemas.GroupElementFile import GroupElementFile

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-10
UNITARITY_TOL = 1e-10


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_rotation(thetas: Sequence[float]) -> np.ndarray:
    """Block diagonal of 2x2 rotations; a zero angle gives an identity block."""
    size = 2 * len(thetas)
    g = np.eye(size)
    for block, theta in enumerate(thetas):
        g[2 * block:2 * block + 2, 2 * block:2 * block + 2] = rotation_matrix(theta)
    return g


def block_diagonal(*blocks: np.ndarray) -> np.ndarray:
    size = sum(b.shape[0] for b in blocks)
    result = np.zeros((size, size), dtype=complex)
    offset = 0
    for b in blocks:
        k = b.shape[0]
        result[offset:offset + k, offset:offset + k] = b
        offset += k
    return result


@dataclass(frozen=True, eq=False)
class IsometryAction:
    """
    An orthogonal g with fiber representations and fixed-space data.

    rep_v / rep_w left as None mean the trivial representation on fibers of
    any size (scalar test functions, symbols without a fiber action).
    """

    g: np.ndarray
    rep_v: Optional[np.ndarray]
    rep_w: Optional[np.ndarray]
    n_g: int
    Q: np.ndarray
    det_normal: float
    description: str = ""

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def is_identity(self) -> bool:
        return self.n_g == self.n

    @property
    def normal_block(self) -> np.ndarray:
        N = self.Q[:, self.n_g:]
        return N.T @ self.g @ N

    @property
    def fixed_basis(self) -> np.ndarray:
        return self.Q[:, :self.n_g]

    @property
    def normal_basis(self) -> np.ndarray:
        return self.Q[:, self.n_g:]

    def fiber_rep_for(self, size: int) -> np.ndarray:
        """diag(g^V, g^W) for a field of matrix size ``size``."""
        if self.rep_v is None and self.rep_w is None:
            return np.eye(size, dtype=complex)
        rep_v = self.rep_v if self.rep_v is not None else np.eye(0)
        rep_w = self.rep_w if self.rep_w is not None else np.eye(0)
        if rep_v.shape[0] + rep_w.shape[0] != size:
            raise InvalidDimensionError(
                f"fiber representations act on {rep_v.shape[0]}+{rep_w.shape[0]} dimensions, "
                f"field has size {size}"
            )
        return block_diagonal(rep_v, rep_w)

    def tangential_directions(self, reversed_pairs: Sequence[int] = ()) -> np.ndarray:
        """
        Phase-space unit vectors of T*(R^n)^g in the order x'_1, xi'_1, x'_2, xi'_2, ...

        Pairs listed in ``reversed_pairs`` (0-based) are taken as (xi'_j, x'_j),
        which reverses the orientation once per pair.
        """
        n = self.n
        directions = []
        for j in range(self.n_g):
            q = self.Q[:, j]
            x_dir = np.concatenate([q, np.zeros(n)])
            xi_dir = np.concatenate([np.zeros(n), q])
            pair = [xi_dir, x_dir] if j in reversed_pairs else [x_dir, xi_dir]
            directions.extend(pair)
        return np.array(directions).reshape(2 * self.n_g, 2 * n)

    def normal_directions(self) -> np.ndarray:
        n = self.n
        directions = []
        for j in range(self.n_g, n):
            q = self.Q[:, j]
            directions.append(np.concatenate([q, np.zeros(n)]))
            directions.append(np.concatenate([np.zeros(n), q]))
        return np.array(directions).reshape(2 * (n - self.n_g), 2 * n)

    def embed_tangential(self, t: np.ndarray) -> np.ndarray:
        """Map points (x'_1, xi'_1, ...) of R^{2 n_g} into phase space, normal coordinates 0."""
        t = np.atleast_2d(np.asarray(t, dtype=float))
        if t.shape[-1] != 2 * self.n_g:
            raise InvalidDimensionError(f"expected {2 * self.n_g} tangential coordinates, got {t.shape[-1]}")
        F = self.fixed_basis
        x = t[:, 0::2] @ F.T
        xi = t[:, 1::2] @ F.T
        return np.concatenate([x, xi], axis=1)


def _check_unitary(rep: Optional[np.ndarray], name: str) -> Optional[np.ndarray]:
    if rep is None:
        return None
    rep = np.asarray(rep, dtype=complex)
    if rep.ndim != 2 or rep.shape[0] != rep.shape[1]:
        raise InvalidDimensionError(f"{name} must be square, got shape {rep.shape}")
    if np.linalg.norm(rep.conj().T @ rep - np.eye(rep.shape[0])) > UNITARITY_TOL:
        raise PreconditionError(f"{name} is not unitary")
    return rep


def analyze_isometry(
    g: np.ndarray,
    rep_v: Optional[np.ndarray] = None,
    rep_w: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
    description: str = "",
) -> IsometryAction:
    """
    Compute n_g, the aligning rotation Q and det(g - 1) on the normal space.

    Raises:
        InvalidDimensionError: g not square
        PreconditionError: g not orthogonal, det(g) != 1, or non-unitary reps
        IllConditionedError: eigenvalue-1 count disagrees with the numerical null space
    """
    tol = settings.EIGEN_TOL if tol is None else tol
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
        raise InvalidDimensionError(f"g must be a non-empty square matrix, got shape {g.shape}")
    n = g.shape[0]
    if np.linalg.norm(g.T @ g - np.eye(n)) > ORTHOGONALITY_TOL:
        raise PreconditionError("g is not orthogonal")
    if np.linalg.det(g) < 0:
        raise PreconditionError("orientation-reversing g (det = -1) is not supported")

    rep_v = _check_unitary(rep_v, "repV")
    rep_w = _check_unitary(rep_w, "repW")

    _, sigma, vt = np.linalg.svd(g - np.eye(n))
    n_g = int(np.sum(sigma < tol))
    eigen_count = int(np.sum(np.abs(np.linalg.eigvals(g) - 1.0) < tol))
    if eigen_count != n_g:
        raise IllConditionedError(
            f"{eigen_count} eigenvalues within {tol:g} of 1 but fixed space has dimension {n_g}"
        )

    fixed = vt[n - n_g:].T
    normal = vt[:n - n_g].T
    Q = np.concatenate([fixed, normal], axis=1)

    if n_g and np.linalg.norm(g @ fixed - fixed) > 10 * tol * n:
        raise IllConditionedError("eigenvalue-1 eigenvectors are not fixed to tolerance")
    if n_g and n_g < n and np.linalg.norm(fixed.T @ g @ normal) > 10 * tol * n:
        raise IllConditionedError("fixed and normal spaces are not invariant")

    if n_g < n:
        h = normal.T @ g @ normal
        det_normal = float(np.linalg.det(h - np.eye(n - n_g)))
    else:
        det_normal = 1.0

    logger.debug(f"Analyzed g ({description or 'matrix'}): n_g={n_g}, det_normal={det_normal:.6g}")
    return IsometryAction(
        g=g,
        rep_v=rep_v,
        rep_w=rep_w,
        n_g=n_g,
        Q=Q,
        det_normal=det_normal,
        description=description,
    )


def phase_space_pullback(A: IsometryAction, z: np.ndarray) -> np.ndarray:
    """(x, xi) -> (g^-1 x, g^-1 xi) for one point or a batch of shape (P, 2n)."""
    z = np.asarray(z, dtype=float)
    n = A.n
    if z.shape[-1] != 2 * n:
        raise InvalidDimensionError(f"phase points need {2 * n} coordinates, got {z.shape[-1]}")
    # g^-1 = g^T, acting on row vectors as v @ g
    x = z[..., :n] @ A.g
    xi = z[..., n:] @ A.g
    return np.concatenate([x, xi], axis=-1)


def _parse_angles(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse angles from {text!r}") from exc


def load_group_element_file(path: Path) -> tuple[np.ndarray, str]:
    """Read g from a JSON ``{"matrix": ...}`` file or a whitespace-separated text matrix."""
    if not path.exists():
        raise UsageError(f"group element file not found: {path}")
    if path.suffix == ".json":
        try:
            data = GroupElementFile.model_validate(json.loads(path.read_text()))
        except (ValidationError, json.JSONDecodeError) as exc:
            raise UsageError(f"invalid group element file {path}: {exc}") from exc
        return np.array(data.matrix, dtype=float), data.description or path.name
    try:
        matrix = np.loadtxt(path, ndmin=2)
    except ValueError as exc:
        raise UsageError(f"invalid matrix file {path}: {exc}") from exc
    return matrix, path.name


def parse_group_element(text: str, n: Optional[int] = None) -> tuple[np.ndarray, str]:
    """
    Parse "identity", "rotation:θ", "blockrot:θ1,θ2,..." or a matrix file path.

    ``n`` is the base dimension the element must act on; "identity" needs it.
    """
    text = text.strip()
    if text == "identity":
        if n is None:
            raise UsageError("'identity' needs the base dimension")
        matrix, description = np.eye(n), "identity"
    elif text.startswith("rotation:"):
        angles = _parse_angles(text.split(":", 1)[1])
        if len(angles) != 1:
            raise UsageError(f"rotation takes one angle, got {text!r}")
        matrix, description = rotation_matrix(angles[0]), text
    elif text.startswith("blockrot:"):
        angles = _parse_angles(text.split(":", 1)[1])
        if not angles:
            raise UsageError(f"blockrot needs at least one angle, got {text!r}")
        matrix, description = block_rotation(angles), text
    else:
        matrix, description = load_group_element_file(Path(text))

    if n is not None and matrix.shape != (n, n):
        raise InvalidDimensionError(f"g is {matrix.shape[0]}x{matrix.shape[1]} but the symbol lives on R^{n}")
    return matrix, description
