# equivix/deformation/operators.py
"""
The semiclassical representation rho_hbar on a truncated Hermite basis.

    rho_hbar(f_hat) phi(x) = (2 pi)^-n int f_hat(x, y) phi(x + hbar y) dy

has the kernel K(x, x') = (2 pi hbar)^-n f_hat(x, (x' - x)/hbar). Matrix
elements <psi_i, rho psi_j> are computed by Gauss-Hermite quadrature in
(x, x'). Separable test functions give Kronecker products of 1D matrices.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Protocol, Union

import numpy as np

from equivix.config import settings
from equivix.deformation.gaussians import GaussianFactor, TestFunction
from equivix.deformation.hermite import (
    HermiteBasisConfig,
    derivative_operator,
    gauss_hermite_plain,
    hermite_functions,
    position_operator,
    truncation_edge_energy,
)
from equivix.errors import (
    BasisMismatchError,
    InvalidDimensionError,
    PreconditionError,
    QuadratureError,
)
from equivix.services.cache import cached
from equivix.services.executor import ordered_map

logger = logging.getLogger(__name__)

EDGE_WARNING = 1e-6
RESOLUTION_TOL = 1e-6


class TransformEvaluator(Protocol):
    n: int
    y_width: float

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class DeformedOperator:
    """A truncated matrix of an operator at a fixed hbar."""

    matrix: np.ndarray
    hbar: float
    basis: HermiteBasisConfig

    @classmethod
    def identity(cls, basis: HermiteBasisConfig, hbar: float) -> "DeformedOperator":
        return cls(np.eye(basis.dim, dtype=complex), hbar, basis)

    @classmethod
    def zero(cls, basis: HermiteBasisConfig, hbar: float) -> "DeformedOperator":
        return cls(np.zeros((basis.dim, basis.dim), dtype=complex), hbar, basis)

    def _compatible(self, other: "DeformedOperator") -> None:
        if other.basis != self.basis or other.hbar != self.hbar:
            raise BasisMismatchError(
                f"operators differ in basis or hbar ({self.basis}, {self.hbar}) vs ({other.basis}, {other.hbar})"
            )

    def _like(self, matrix: np.ndarray) -> "DeformedOperator":
        return DeformedOperator(matrix, self.hbar, self.basis)

    def __matmul__(self, other: "DeformedOperator") -> "DeformedOperator":
        self._compatible(other)
        return self._like(self.matrix @ other.matrix)

    def __add__(self, other: "DeformedOperator") -> "DeformedOperator":
        self._compatible(other)
        return self._like(self.matrix + other.matrix)

    def __sub__(self, other: "DeformedOperator") -> "DeformedOperator":
        self._compatible(other)
        return self._like(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "DeformedOperator":
        return self._like(self.matrix * scalar)

    __rmul__ = __mul__

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def edge_energy(self) -> float:
        return truncation_edge_energy(self.matrix, self.basis)


def _check_hbar(hbar: float) -> None:
    if not hbar > 0:
        raise PreconditionError(f"hbar must be positive, got {hbar}")


def _hermite_table(N: int, Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and psi values times the plain weights."""
    u, w = gauss_hermite_plain(Q)
    return u, hermite_functions(N, u) * w[:, np.newaxis]


def _kernel_matrix(kernel: np.ndarray, weighted_psi: np.ndarray) -> np.ndarray:
    return weighted_psi.T @ kernel @ weighted_psi


@cached(
    "kernels",
    key_func=lambda factor, hbar, N, Q: f"factor:{factor!r}:{hbar!r}:{N}:{Q}",
)
def factor_matrix(factor: GaussianFactor, hbar: float, N: int, Q: int) -> np.ndarray:
    """1D matrix of rho_hbar for one coordinate factor."""
    u, weighted_psi = _hermite_table(N, Q)
    x = u[:, np.newaxis]
    y = (u[np.newaxis, :] - x) / hbar
    kernel = factor.transform(x, y) / (2.0 * np.pi * hbar)
    return _kernel_matrix(kernel, weighted_psi)


def _rho_matrix(f: TestFunction, hbar: float, basis: HermiteBasisConfig, Q: int) -> np.ndarray:
    def term_matrix(term) -> np.ndarray:
        blocks = [factor_matrix(factor, hbar, basis.N, Q) for factor in term.factors]
        return term.coefficient * reduce(np.kron, blocks)

    matrices = ordered_map(term_matrix, list(f.terms))
    total = np.zeros((basis.dim, basis.dim), dtype=complex)
    for matrix in matrices:
        total += matrix
    return total


def rho_hbar(
    f: TestFunction,
    hbar: float,
    basis: HermiteBasisConfig,
    check_resolution: bool = False,
) -> DeformedOperator:
    """
    Truncated matrix of rho_hbar(f_hat).

    With ``check_resolution`` the trace is recomputed on a finer rule and a
    discrepancy raises QuadratureError.
    """
    _check_hbar(hbar)
    if f.n != basis.n:
        raise InvalidDimensionError(f"function lives on R^{f.n}, basis on R^{basis.n}")
    Q = basis.quadrature_order
    matrix = _rho_matrix(f, hbar, basis, Q)
    if check_resolution:
        finer = min(Q + 40, 320)
        reference = np.trace(_rho_matrix(f, hbar, basis, finer))
        discrepancy = abs(np.trace(matrix) - reference)
        if discrepancy > RESOLUTION_TOL * (1.0 + abs(reference)):
            raise QuadratureError(
                f"rho_hbar matrix elements under-resolved with {Q} nodes",
                diagnostics={"nodes": Q, "refined_nodes": finer, "trace_discrepancy": discrepancy},
            )
    logger.debug(f"rho_hbar at hbar={hbar} on {basis.dim} basis functions ({Q} nodes per axis)")
    return DeformedOperator(matrix, hbar, basis)


def rho_hbar_transform(
    transform: TransformEvaluator, hbar: float, basis: HermiteBasisConfig
) -> DeformedOperator:
    """rho_hbar of an arbitrary transform evaluator on R (n = 1)."""
    _check_hbar(hbar)
    if basis.n != 1 or transform.n != 1:
        raise PreconditionError("generic transforms are supported for n = 1 only")
    u, weighted_psi = _hermite_table(basis.N, basis.quadrature_order)
    Q = len(u)
    x = np.broadcast_to(u[:, np.newaxis], (Q, Q))[..., np.newaxis]
    y = ((u[np.newaxis, :] - u[:, np.newaxis]) / hbar)[..., np.newaxis]
    kernel = np.asarray(transform(x, y)) / (2.0 * np.pi * hbar)
    return DeformedOperator(_kernel_matrix(kernel, weighted_psi), hbar, basis)


# ─── The product *_H ──────────────────────────────────────────


@dataclass(frozen=True)
class StarProduct:
    """
    (f1 *_H f2)(x, y) = (2 pi)^-n int f1(x, z) f2(x + hbar z, y - z) dz

    evaluated by Gauss-Hermite quadrature in z, shifted and scaled to the
    product of the two Gaussian envelopes in y.
    """

    first: TransformEvaluator
    second: TransformEvaluator
    hbar: float
    nodes: int

    @property
    def n(self) -> int:
        return self.first.n

    @property
    def y_width(self) -> float:
        return float(np.hypot(self.first.y_width, self.second.y_width))

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        n = self.n
        s1, s2 = self.first.y_width, self.second.y_width
        center = y * s1 ** 2 / (s1 ** 2 + s2 ** 2)
        sigma = s1 * s2 / np.hypot(s1, s2)
        scale = np.sqrt(2.0) * sigma

        u, w = gauss_hermite_plain(self.nodes)
        grids = np.meshgrid(*([np.arange(self.nodes)] * n), indexing="ij")
        index = np.stack([g.ravel() for g in grids], axis=1)
        offsets = u[index]
        weights = np.prod(w[index], axis=1) * scale ** n

        lead = x.shape[:-1]
        z = center[..., np.newaxis, :] + scale * offsets.reshape((1,) * len(lead) + offsets.shape)
        xs = np.broadcast_to(x[..., np.newaxis, :], z.shape)
        ys = np.broadcast_to(y[..., np.newaxis, :], z.shape)
        values = self.first(xs, z) * self.second(xs + self.hbar * z, ys - z)
        return np.sum(values * weights, axis=-1) / (2.0 * np.pi) ** n


def star_H(
    f1: Union[TestFunction, TransformEvaluator],
    f2: Union[TestFunction, TransformEvaluator],
    hbar: float,
    nodes: Optional[int] = None,
) -> TransformEvaluator:
    """The product making rho_hbar multiplicative; the pointwise product at hbar = 0."""
    if hbar < 0:
        raise PreconditionError(f"hbar must be non-negative, got {hbar}")
    if hbar == 0 and isinstance(f1, TestFunction) and isinstance(f2, TestFunction):
        return (f1 * f2).hat
    first = f1.hat if isinstance(f1, TestFunction) else f1
    second = f2.hat if isinstance(f2, TestFunction) else f2
    if first.n != second.n:
        raise InvalidDimensionError("factors live on different dimensions")
    return StarProduct(first, second, float(hbar), nodes or settings.STAR_QUAD_NODES)


# ─── Derivations ──────────────────────────────────────────────


def derivation_operator(j: int, basis: HermiteBasisConfig) -> np.ndarray:
    """d/dx_k for odd j = 2k-1, x_k for even j = 2k (1-based)."""
    if not 1 <= j <= 2 * basis.n:
        raise InvalidDimensionError(f"derivation index {j} outside 1..{2 * basis.n}")
    coordinate = (j - 1) // 2
    if j % 2:
        return derivative_operator(basis, coordinate)
    return position_operator(basis, coordinate)


def derivation_delta(j: int, T: DeformedOperator) -> DeformedOperator:
    """[d/dx_k, T] for j = 2k-1 and [x_k, T] for j = 2k, truncated to the basis."""
    op = derivation_operator(j, T.basis)
    energy = T.edge_energy()
    if energy > EDGE_WARNING:
        logger.debug(f"delta_{j}: {energy:.2e} of the operator norm sits on the truncation edge")
    return DeformedOperator(op @ T.matrix - T.matrix @ op, T.hbar, T.basis)
