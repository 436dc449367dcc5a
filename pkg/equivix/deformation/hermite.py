# equivix/deformation/hermite.py
"""
Truncated Hermite tensor basis of L^2(R^n).

Basis index (j_1, ..., j_n) is flattened with coordinate 1 varying slowest,
matching numpy.kron(A_1, A_2, ...). In this basis multiplication by x and
d/dx are tridiagonal:

    x psi_k  = sqrt(k/2) psi_{k-1} + sqrt((k+1)/2) psi_{k+1}
    d psi_k  = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}
"""

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import expm
from scipy.special import roots_hermite

from equivix.config import settings
from equivix.errors import InvalidDimensionError, PreconditionError
from equivix.isometry import IsometryAction
from equivix.services.cache import cached

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HermiteBasisConfig:
    n: int
    N: int
    quad_nodes: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidDimensionError(f"dimension must be positive, got {self.n}")
        if self.N < 4:
            raise InvalidDimensionError(f"cutoff N must be at least 4, got {self.N}")

    @classmethod
    def from_settings(cls, n: int, N: int = 0) -> "HermiteBasisConfig":
        return cls(n=n, N=N or settings.HERMITE_N, quad_nodes=settings.HERMITE_QUAD_NODES)

    @property
    def dim(self) -> int:
        return self.N ** self.n

    @property
    def quadrature_order(self) -> int:
        """Gauss-Hermite nodes per axis for kernel matrix elements."""
        if self.quad_nodes:
            return self.quad_nodes
        return min(settings.HERMITE_QUAD_MAX, 3 * self.N + 60)


@cached("hermite", key_func=lambda N: f"ladder:{N}")
def ladder_matrices(N: int) -> tuple[np.ndarray, np.ndarray]:
    """(X, D): matrices of x and d/dx on span(psi_0, ..., psi_{N-1})."""
    off = np.sqrt(np.arange(1, N) / 2.0)
    X = np.diag(off, 1) + np.diag(off, -1)
    D = np.diag(off, 1) - np.diag(off, -1)
    return X, D


def hermite_functions(N: int, x: np.ndarray) -> np.ndarray:
    """psi_0..psi_{N-1} at points x, shape (len(x), N), by the stable three-term recurrence."""
    x = np.asarray(x, dtype=float)
    psi = np.zeros((x.size, N))
    psi[:, 0] = np.pi ** -0.25 * np.exp(-x ** 2 / 2.0)
    if N > 1:
        psi[:, 1] = np.sqrt(2.0) * x * psi[:, 0]
    for k in range(1, N - 1):
        psi[:, k + 1] = np.sqrt(2.0 / (k + 1)) * x * psi[:, k] - np.sqrt(k / (k + 1)) * psi[:, k - 1]
    return psi


@cached("quadrature", key_func=lambda Q: f"gauss-hermite:{Q}")
def gauss_hermite_plain(Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int g(u) du, i.e. Gauss-Hermite weights times exp(u^2)."""
    u, w = roots_hermite(Q)
    return u, np.exp(np.log(w) + u ** 2)


def _embed(matrix: np.ndarray, coordinate: int, n: int, N: int) -> np.ndarray:
    factors = [np.eye(N)] * n
    factors[coordinate] = matrix
    return reduce(np.kron, factors)


def position_operator(basis: HermiteBasisConfig, coordinate: int) -> np.ndarray:
    """x_j on the tensor basis (0-based coordinate)."""
    if not 0 <= coordinate < basis.n:
        raise InvalidDimensionError(f"coordinate {coordinate} outside 0..{basis.n - 1}")
    return _embed(ladder_matrices(basis.N)[0], coordinate, basis.n, basis.N)


def derivative_operator(basis: HermiteBasisConfig, coordinate: int) -> np.ndarray:
    """d/dx_j on the tensor basis (0-based coordinate)."""
    if not 0 <= coordinate < basis.n:
        raise InvalidDimensionError(f"coordinate {coordinate} outside 0..{basis.n - 1}")
    return _embed(ladder_matrices(basis.N)[1], coordinate, basis.n, basis.N)


def multi_indices(basis: HermiteBasisConfig) -> np.ndarray:
    """(dim, n) array of (j_1, ..., j_n) for every basis vector."""
    grids = np.meshgrid(*([np.arange(basis.N)] * basis.n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def oscillator_levels(basis: HermiteBasisConfig) -> np.ndarray:
    """Oscillator level j_1 + ... + j_n of every basis vector."""
    return multi_indices(basis).sum(axis=1)


def level_projection(basis: HermiteBasisConfig, level: int) -> np.ndarray:
    return np.diag((oscillator_levels(basis) == level).astype(float))


QUARTER_TURN_TOL = 1e-12


def _quarter_turn_matrix(turns: int, basis: HermiteBasisConfig) -> np.ndarray:
    """Exact action of a rotation by turns * pi/2: psi_{j1 j2} -> signed psi with swapped or kept indices."""
    indices = multi_indices(basis)
    j1, j2 = indices[:, 0], indices[:, 1]
    N = basis.N
    if turns == 1:
        # phi(x_2, -x_1)
        target, sign = j2 * N + j1, (-1.0) ** j2
    elif turns == 2:
        target, sign = j1 * N + j2, (-1.0) ** (j1 + j2)
    else:
        # phi(-x_2, x_1)
        target, sign = j2 * N + j1, (-1.0) ** j1
    result = np.zeros((basis.dim, basis.dim))
    result[target, np.arange(basis.dim)] = sign
    return result


PLANE_TOL = 1e-10


def plane_rotation_angle(A: IsometryAction) -> float:
    """Angle theta of g = I_{n-2} (+) R(theta), a rotation of the last two coordinates."""
    g = A.g
    n = A.n
    if n < 2:
        raise PreconditionError(f"a plane rotation needs n >= 2, got n = {n}")
    outside = g.copy()
    outside[n - 2 :, n - 2 :] = 0.0
    outside[: n - 2, : n - 2] -= np.eye(n - 2)
    if np.max(np.abs(outside), initial=0.0) > PLANE_TOL:
        raise PreconditionError("group representation needs g to rotate only the last two coordinates")
    return float(np.arctan2(g[n - 1, n - 2], g[n - 2, n - 2]))


def group_rep_matrix(A: IsometryAction, basis: HermiteBasisConfig) -> np.ndarray:
    """
    Matrix of (g phi)(x) = phi(g^-1 x) on the truncated basis.

    g must be I_{n-2} (+) R(theta). The rotation acts on the two fastest
    tensor factors; the leading coordinates carry the identity.

    Multiples of a quarter turn map the box onto itself and are built exactly.
    Other angles use expm(theta L) with L = x_2 d_1 - x_1 d_2, which
    preserves oscillator levels. Each level block is exponentiated on its
    own, so the result is exactly orthogonal; it is exact on the levels
    below N that the box contains completely.
    """
    if A.n != basis.n:
        raise InvalidDimensionError(f"g acts on R^{A.n}, basis lives on R^{basis.n}")
    if A.is_identity:
        return np.eye(basis.dim)

    theta = plane_rotation_angle(A)
    plane = HermiteBasisConfig(n=2, N=basis.N, quad_nodes=basis.quad_nodes)
    turns = theta / (np.pi / 2)
    if abs(turns - round(turns)) < QUARTER_TURN_TOL:
        result = _quarter_turn_matrix(int(round(turns)) % 4, plane)
    else:
        X, D = ladder_matrices(basis.N)
        generator = np.kron(D, X) - np.kron(X, D)
        levels = oscillator_levels(plane)
        result = np.zeros((plane.dim, plane.dim))
        for level in np.unique(levels):
            index = np.flatnonzero(levels == level)
            block = generator[np.ix_(index, index)]
            result[np.ix_(index, index)] = expm(theta * block)
        logger.debug(f"Built rotation by {theta:.6g} on {plane.dim} basis functions")
    if basis.n > 2:
        result = np.kron(np.eye(basis.N ** (basis.n - 2)), result)
    return result


def truncation_edge_energy(T: np.ndarray, basis: HermiteBasisConfig) -> float:
    """Share of the Frobenius norm of T on rows or columns touching index N-1 in some coordinate."""
    T = np.asarray(T)
    total = np.linalg.norm(T)
    if total == 0:
        return 0.0
    edge = np.any(multi_indices(basis) == basis.N - 1, axis=1)
    mask = edge[:, np.newaxis] | edge[np.newaxis, :]
    return float(np.linalg.norm(T[mask]) / total)
