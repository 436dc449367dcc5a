# equivix/clifford.py
"""
Complex Clifford algebra of R^{2n} with the relation x x = +|x|^2.

The monomial basis e_{i1}...e_{ik} (i1 < ... < ik, 1-based generators) is
ordered even degrees first, then odd, by degree and lexicographically inside
each degree. For n_half = 1 this gives (1, e1e2 | e1, e2).

With this sign convention c(e_i)^2 = +I and c_hat(e_i)^2 = -I. References
using x x = -|x|^2 swap these signs.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from equivix.errors import InvalidDimensionError, PreconditionError
from equivix.services.cache import cached

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]

ORTHOGONALITY_TOL = 1e-10


def _graded_monomials(ambient_dim: int) -> tuple[Monomial, ...]:
    generators = range(1, ambient_dim + 1)
    even = [m for k in range(0, ambient_dim + 1, 2) for m in combinations(generators, k)]
    odd = [m for k in range(1, ambient_dim + 1, 2) for m in combinations(generators, k)]
    return tuple(even + odd)


def _left_generator(mono: Monomial, i: int) -> tuple[int, Monomial]:
    """e_i * mono = sign * result."""
    passed = sum(1 for j in mono if j < i)
    sign = -1 if passed % 2 else 1
    if i in mono:
        return sign, tuple(j for j in mono if j != i)
    return sign, tuple(sorted(mono + (i,)))


def _right_generator(mono: Monomial, i: int) -> tuple[int, Monomial]:
    """mono * e_i = sign * result."""
    passed = sum(1 for j in mono if j > i)
    sign = -1 if passed % 2 else 1
    if i in mono:
        return sign, tuple(j for j in mono if j != i)
    return sign, tuple(sorted(mono + (i,)))


@dataclass(frozen=True)
class CliffordAlgebra:
    """Cliff_C(R^{2n}) with its graded monomial basis."""

    n_half: int
    basis: tuple[Monomial, ...]
    index: dict[Monomial, int] = field(repr=False, compare=False)

    @property
    def ambient_dim(self) -> int:
        return 2 * self.n_half

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def half_dim(self) -> int:
        return self.dim // 2

    @property
    def even_slice(self) -> slice:
        return slice(0, self.half_dim)

    @property
    def odd_slice(self) -> slice:
        return slice(self.half_dim, self.dim)

    def degrees(self) -> np.ndarray:
        return np.array([len(m) for m in self.basis])

    def grading(self) -> np.ndarray:
        """Matrix of the grading involution w -> (-1)^deg w."""
        return np.diag((-1.0) ** self.degrees()).astype(complex)

    def inner(self, u: "CliffordElement", v: "CliffordElement") -> complex:
        """Hermitian inner product making the monomials orthonormal."""
        return complex(np.vdot(u.coefficients, v.coefficients))

    def element(self, coefficients: Sequence[complex]) -> "CliffordElement":
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.shape != (self.dim,):
            raise InvalidDimensionError(
                f"expected {self.dim} coefficients, got shape {coefficients.shape}"
            )
        return CliffordElement(self, coefficients)

    def monomial(self, *indices: int) -> "CliffordElement":
        """The basis monomial e_{i1}...e_{ik} for increasing indices."""
        key = tuple(indices)
        if key not in self.index:
            raise InvalidDimensionError(f"{key} is not an increasing index set in 1..{self.ambient_dim}")
        coefficients = np.zeros(self.dim, dtype=complex)
        coefficients[self.index[key]] = 1.0
        return CliffordElement(self, coefficients)

    def one(self) -> "CliffordElement":
        return self.monomial()


@dataclass(frozen=True, eq=False)
class CliffordElement:
    algebra: CliffordAlgebra
    coefficients: np.ndarray

    def even_part(self) -> "CliffordElement":
        coefficients = self.coefficients.copy()
        coefficients[self.algebra.odd_slice] = 0
        return CliffordElement(self.algebra, coefficients)

    def odd_part(self) -> "CliffordElement":
        coefficients = self.coefficients.copy()
        coefficients[self.algebra.even_slice] = 0
        return CliffordElement(self.algebra, coefficients)

    def grading_involution(self) -> "CliffordElement":
        return CliffordElement(self.algebra, self.algebra.grading() @ self.coefficients)

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        return CliffordElement(self.algebra, self.coefficients + other.coefficients)

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return CliffordElement(self.algebra, self.coefficients - other.coefficients)

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            return CliffordElement(self.algebra, _product(self, other))
        return CliffordElement(self.algebra, self.coefficients * complex(other))

    def __rmul__(self, scalar) -> "CliffordElement":
        return CliffordElement(self.algebra, self.coefficients * complex(scalar))

    def allclose(self, other: "CliffordElement", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coefficients, other.coefficients, atol=atol))


def _product(u: CliffordElement, v: CliffordElement) -> np.ndarray:
    alg = u.algebra
    left = [left_mult_matrix(alg, i) for i in range(1, alg.ambient_dim + 1)]
    result = np.zeros(alg.dim, dtype=complex)
    for position, coefficient in enumerate(u.coefficients):
        if coefficient == 0:
            continue
        term = v.coefficients
        # e_{i1}...e_{ik} v = c(e_{i1}) ... c(e_{ik}) v
        for i in reversed(alg.basis[position]):
            term = left[i - 1] @ term
        result += coefficient * term
    return result


@cached("clifford", key_func=lambda n_half: f"basis:{n_half}")
def clifford_basis(n_half: int) -> CliffordAlgebra:
    """Build Cliff_C(R^{2 n_half}) with the graded monomial basis."""
    if not isinstance(n_half, (int, np.integer)) or n_half < 1:
        raise InvalidDimensionError(f"n_half must be a positive integer, got {n_half!r}")
    basis = _graded_monomials(2 * int(n_half))
    index = {mono: position for position, mono in enumerate(basis)}
    logger.debug(f"Built Clifford algebra n_half={n_half} with {len(basis)} monomials")
    return CliffordAlgebra(n_half=int(n_half), basis=basis, index=index)


def _check_generator(alg: CliffordAlgebra, i: int) -> None:
    if not 1 <= i <= alg.ambient_dim:
        raise InvalidDimensionError(f"generator index {i} outside 1..{alg.ambient_dim}")


@cached("clifford", key_func=lambda alg, i: f"left:{alg.n_half}:{i}")
def left_mult_matrix(alg: CliffordAlgebra, i: int) -> np.ndarray:
    """Matrix of c(e_i): w -> e_i w. Cached and read-only."""
    _check_generator(alg, i)
    matrix = np.zeros((alg.dim, alg.dim), dtype=complex)
    for column, mono in enumerate(alg.basis):
        sign, image = _left_generator(mono, i)
        matrix[alg.index[image], column] = sign
    return matrix


@cached("clifford", key_func=lambda alg, i: f"right:{alg.n_half}:{i}")
def right_mult_matrix(alg: CliffordAlgebra, i: int) -> np.ndarray:
    """Matrix of the plain right multiplication w -> w e_i."""
    _check_generator(alg, i)
    matrix = np.zeros((alg.dim, alg.dim), dtype=complex)
    for column, mono in enumerate(alg.basis):
        sign, image = _right_generator(mono, i)
        matrix[alg.index[image], column] = sign
    return matrix


@cached("clifford", key_func=lambda alg, i: f"twisted:{alg.n_half}:{i}")
def twisted_right_mult_matrix(alg: CliffordAlgebra, i: int) -> np.ndarray:
    """Matrix of c_hat(e_i): w -> (-1)^deg(w) w e_i."""
    _check_generator(alg, i)
    parity = (-1.0) ** alg.degrees()
    return right_mult_matrix(alg, i) * parity[np.newaxis, :]


def so_action_matrix(alg: CliffordAlgebra, g: np.ndarray) -> np.ndarray:
    """
    Automorphism extension g.(e_{i1}...e_{ik}) = (g e_{i1})...(g e_{ik}).

    The result is block diagonal for the even/odd grading and unitary.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (alg.ambient_dim, alg.ambient_dim):
        raise InvalidDimensionError(
            f"g must be {alg.ambient_dim}x{alg.ambient_dim}, got {g.shape}"
        )
    if np.linalg.norm(g.T @ g - np.eye(alg.ambient_dim)) > ORTHOGONALITY_TOL:
        raise PreconditionError("g is not orthogonal")

    right = [right_mult_matrix(alg, j) for j in range(1, alg.ambient_dim + 1)]
    images = [sum(g[j, i] * right[j] for j in range(alg.ambient_dim)) for i in range(alg.ambient_dim)]
    action = np.zeros((alg.dim, alg.dim), dtype=complex)
    unit = np.zeros(alg.dim, dtype=complex)
    unit[0] = 1.0
    for column, mono in enumerate(alg.basis):
        vector = unit
        for i in mono:
            vector = images[i - 1] @ vector
        action[:, column] = vector
    return action


def graded_blocks(alg: CliffordAlgebra, matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Even and odd diagonal blocks of a grading-preserving matrix."""
    return matrix[alg.even_slice, alg.even_slice], matrix[alg.odd_slice, alg.odd_slice]
