# equivix/chern_index.py
"""
Equivariant index formulas on the symbol side.

    fixed space of positive dimension:
        ind_g = 1/((2 pi i)^k k! det(g-1)) * int_{T*(R^n)^g} tr[G e (de)^{2k}]
    isolated fixed point:
        ind_g = tr[G e(0, 0)] / det(g-1)

with G = diag(g^V, g^W), e the hat graph projection and k = n_g. The
2k-form is read off in the orientation dx'_1 dxi'_1 ... dx'_k dxi'_k of the
Q-aligned tangential coordinates; normal coordinates are frozen at 0.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Protocol, Sequence

import numpy as np

from equivix.alternating import alternating_product, twisted_trace
from equivix.config import settings
from equivix.errors import (
    IllConditionedError,
    InvalidDimensionError,
    NonIdempotentError,
    PreconditionError,
    WrongMethodError,
)
from equivix.isometry import IsometryAction, phase_space_pullback
from equivix.quadrature import LevelRow, QuadratureConfig, integrate
from equivix.symbols import ProjectionField, SymbolField, equivariance_check

logger = logging.getLogger(__name__)

IDEMPOTENCY_TOL = 1e-10
INVARIANCE_TOL = 1e-8


class MatrixField(Protocol):
    """A smooth matrix function on T*R^n with directional derivatives."""

    n: int
    size: int

    def value(self, z: np.ndarray) -> np.ndarray: ...

    def directional(self, z: np.ndarray, v: np.ndarray) -> np.ndarray: ...


class ConstantField:
    def __init__(self, matrix: np.ndarray, n: int):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        self.n = n
        self.size = self.matrix.shape[0]

    def value(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(z)
        return np.broadcast_to(self.matrix, (z.shape[0],) + self.matrix.shape).copy()

    def directional(self, z: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.zeros_like(self.value(z))

    def projection(self, z: np.ndarray) -> np.ndarray:
        return self.value(z)


class ProductField:
    """Pointwise product of matrix fields; derivatives by the Leibniz rule."""

    def __init__(self, left: MatrixField, right: MatrixField):
        if left.n != right.n or left.size != right.size:
            raise InvalidDimensionError("factors must share base dimension and matrix size")
        self.left, self.right = left, right
        self.n = left.n
        self.size = left.size

    def value(self, z: np.ndarray) -> np.ndarray:
        return self.left.value(z) @ self.right.value(z)

    def directional(self, z: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (
            self.left.directional(z, v) @ self.right.value(z)
            + self.left.value(z) @ self.right.directional(z, v)
        )


def multiply_fields(left: MatrixField, right: MatrixField) -> MatrixField:
    """Product used by coboundary checks; closed form when the field type defines ``*``."""
    if type(left) is type(right) and hasattr(type(left), "__mul__"):
        return left * right
    return ProductField(left, right)


def _value_and_directionals(f: MatrixField, z: np.ndarray, directions: np.ndarray):
    if hasattr(f, "value_and_directionals"):
        return f.value_and_directionals(z, directions)
    return f.value(z), [f.directional(z, v) for v in directions]


def alternating_trace(
    G: np.ndarray, fields: Sequence[MatrixField], z: np.ndarray, directions: np.ndarray
) -> np.ndarray:
    """
    sum_s sgn(s) tr[G f_0 d_{s(1)} f_1 ... d_{s(m)} f_m] at phase points z (P, 2n).

    With m = 0 this is tr[G f_0].
    """
    f0 = fields[0].value(z)
    if len(fields) == 1:
        return twisted_trace(G, f0, np.broadcast_to(np.eye(f0.shape[-1]), f0.shape))
    partials = []
    cache: dict[int, list[np.ndarray]] = {}
    for f in fields[1:]:
        # the same field object in several slots shares one evaluation
        if id(f) not in cache:
            cache[id(f)] = _value_and_directionals(f, z, directions)[1]
        partials.append(cache[id(f)])
    return twisted_trace(G, f0, alternating_product(partials))


def chern_integrand(
    a: SymbolField,
    A: IsometryAction,
    t: np.ndarray,
    finite_differences: bool = False,
    reversed_pairs: Sequence[int] = (),
) -> np.ndarray:
    """
    Coefficient of dx'_1 dxi'_1 ... of tr[G e (de)^{2 n_g}] at tangential points t.

    ``t`` has shape (2 n_g,) or (P, 2 n_g) in the order (x'_1, xi'_1, x'_2, ...).
    """
    if A.n_g < 1:
        raise WrongMethodError("the Chern integrand needs a fixed space of positive dimension")
    if A.n != a.n:
        raise InvalidDimensionError(f"g acts on R^{A.n} but the symbol lives on R^{a.n}")
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    field_ = ProjectionField(a, hat=True, finite_differences=finite_differences)
    z = A.embed_tangential(t)
    directions = A.tangential_directions(reversed_pairs)
    G = A.fiber_rep_for(field_.size)
    value, derivatives = field_.value_and_directionals(z, directions)
    integrand = twisted_trace(G, value, alternating_product([derivatives] * len(directions)))
    return integrand[0] if single else integrand


@dataclass(frozen=True)
class IndexResult:
    value: complex
    error_estimate: float
    evaluations: int
    seconds: float
    method: str
    converged: bool = True
    refinement: tuple[LevelRow, ...] = field(default_factory=tuple)

    @property
    def nearest_integer(self) -> int:
        return int(round(self.value.real))

    @property
    def integrality_gap(self) -> float:
        return abs(self.value - self.nearest_integer)


def _cells_for(size: int, config: QuadratureConfig) -> int:
    # cell_size is tuned for 4x4 matrices
    return max(64, config.cell_size * 16 // max(size, 4) ** 2)


def _index_prefactor(A: IsometryAction) -> complex:
    k = A.n_g
    return 1.0 / ((2j * np.pi) ** k * math.factorial(k) * A.det_normal)


def equivariant_index_integral(
    a: SymbolField,
    A: IsometryAction,
    q: Optional[QuadratureConfig] = None,
    check: bool = True,
    finite_differences: bool = False,
) -> IndexResult:
    """
    Integral formula for n_g >= 1.

    Raises:
        WrongMethodError: n_g = 0
        PreconditionError: order not positive, or the symbol is not invariant under g
        QuadratureError: refinement stopped improving
    """
    if A.n_g < 1:
        raise WrongMethodError("g has an isolated fixed point; use the fixed-point formula")
    if a.order <= 0:
        raise PreconditionError(f"symbol order must be positive for the integral to converge, got {a.order}")
    if check and not A.is_identity:
        outcome = equivariance_check(a, A)
        if outcome.status == "fail":
            raise PreconditionError(outcome.message)

    q = q or QuadratureConfig.from_settings()
    k = A.n_g
    logger.info(f"Integrating the Chern form of {a.name} over R^{2 * k} (det_normal={A.det_normal:.6g})")
    result = integrate(
        lambda t: chern_integrand(a, A, t, finite_differences=finite_differences),
        2 * k,
        q,
        cell_size=_cells_for(a.dim_v + a.dim_w, q),
    )
    prefactor = _index_prefactor(A)
    rows = tuple(
        LevelRow(r.level, r.nodes_per_axis, prefactor * r.value,
                 None if r.difference is None else abs(prefactor) * r.difference)
        for r in result.levels
    )
    index = IndexResult(
        value=complex(prefactor * result.value),
        error_estimate=float(abs(prefactor) * result.error),
        evaluations=result.evaluations,
        seconds=result.seconds,
        method="integral",
        converged=result.converged,
        refinement=rows,
    )
    logger.info(f"Index of {a.name}: {index.value:.10g} +/- {index.error_estimate:.2e}")
    return index


def index_convergence_table(
    a: SymbolField, A: IsometryAction, q: Optional[QuadratureConfig] = None
) -> list[LevelRow]:
    """Per-level index values, for plotting refinement behaviour."""
    q = q or QuadratureConfig.from_settings()
    # run every level, independent of the stopping tolerance
    q = replace(q, abs_tol=1e-300, rel_tol=1e-300)
    try:
        return list(equivariant_index_integral(a, A, q).refinement)
    except Exception as exc:
        diagnostics = getattr(exc, "diagnostics", {})
        if "levels" not in diagnostics:
            raise
        prefactor = _index_prefactor(A)
        return [
            LevelRow(level, nodes, prefactor * value, None if diff is None else abs(prefactor) * diff)
            for level, nodes, value, diff in diagnostics["levels"]
        ]


def _check_conditioning(A: IsometryAction, floor: Optional[float]) -> None:
    floor = settings.CONDITIONING_FLOOR if floor is None else floor
    if abs(A.det_normal) < floor:
        raise IllConditionedError(
            f"|det(g-1)| = {abs(A.det_normal):.3e} is below the conditioning floor {floor:g}"
        )


def fixed_point_index(a: SymbolField, A: IsometryAction, floor: Optional[float] = None) -> IndexResult:
    """
    tr[diag(g^V, g^W) e(0, 0)] / det(g-1) for an isolated fixed point.

    Raises:
        WrongMethodError: n_g > 0
        IllConditionedError: |det(g-1)| below the conditioning floor
    """
    if A.n_g > 0:
        raise WrongMethodError(
            f"fixed space has dimension {A.n_g}; use the integral formula"
        )
    _check_conditioning(A, floor)
    start = time.perf_counter()
    field_ = ProjectionField(a, hat=True)
    G = A.fiber_rep_for(field_.size)
    e0 = field_.value(np.zeros((1, a.phase_dim)))[0]
    value = complex(np.trace(G @ e0) / A.det_normal)
    logger.info(f"Fixed-point index of {a.name} at {A.description or 'g'}: {value:.12g}")
    return IndexResult(
        value=value,
        error_estimate=0.0,
        evaluations=1,
        seconds=time.perf_counter() - start,
        method="fixed-point",
    )


# ─── Cocycles and pairing ─────────────────────────────────────


def _check_invariant(f: MatrixField, A: IsometryAction, G: np.ndarray, seed: int) -> None:
    if A.is_identity:
        return
    rng = np.random.default_rng(seed)
    z = rng.normal(scale=1.5, size=(16, 2 * A.n))
    moved = G @ f.value(phase_space_pullback(A, z)) @ np.linalg.inv(G)
    here = f.value(z)
    error = np.max(np.abs(moved - here)) / (1.0 + np.max(np.abs(here)))
    if error > INVARIANCE_TOL:
        raise PreconditionError(f"argument is not g-invariant (sampled error {error:.2e})")


@dataclass(frozen=True)
class EpsilonCocycle:
    """
    The symbol-side cocycle for g, evaluated on matrix fields.

    ``scale`` multiplies every value; ``scaled()`` returns the version
    multiplied by (2 pi i)^k k!, whose pairing with a projection is the index.
    """

    action: IsometryAction
    config: QuadratureConfig
    scale: complex = 1.0
    check_invariance: bool = True

    @property
    def degree(self) -> int:
        return 2 * self.action.n_g

    def scaled(self) -> "EpsilonCocycle":
        k = self.action.n_g
        return replace(self, scale=self.scale * (2j * np.pi) ** k * math.factorial(k))

    def evaluate(self, *fields: MatrixField) -> tuple[complex, float]:
        """Value and quadrature error estimate."""
        A = self.action
        k = A.n_g
        if len(fields) != 2 * k + 1:
            raise InvalidDimensionError(f"expected {2 * k + 1} arguments, got {len(fields)}")
        size = fields[0].size
        if any(f.size != size or f.n != A.n for f in fields):
            raise InvalidDimensionError("arguments must share matrix size and base dimension")
        G = A.fiber_rep_for(size)
        if self.check_invariance:
            for position, f in enumerate(fields):
                _check_invariant(f, A, G, settings.SEED + position)

        if k == 0:
            _check_conditioning(A, None)
            origin = np.zeros((1, 2 * A.n))
            value = alternating_trace(G, fields, origin, np.zeros((0, 2 * A.n)))[0]
            return complex(self.scale * value / A.det_normal), 0.0

        directions = A.tangential_directions()
        result = integrate(
            lambda t: alternating_trace(G, fields, A.embed_tangential(t), directions),
            2 * k,
            self.config,
            cell_size=_cells_for(size, self.config),
        )
        prefactor = self.scale * _index_prefactor(A)
        return complex(prefactor * result.value), float(abs(prefactor) * result.error)

    def __call__(self, *fields: MatrixField) -> complex:
        return self.evaluate(*fields)[0]


def epsilon_cocycle(
    A: IsometryAction, fields: Sequence[MatrixField], q: Optional[QuadratureConfig] = None
) -> complex:
    """Evaluate the cocycle for g on (f_0, ..., f_{2 n_g}); twisted trace when n_g = 0."""
    return EpsilonCocycle(A, q or QuadratureConfig.from_settings())(*fields)


def _check_idempotent(e, seed: int) -> None:
    rng = np.random.default_rng(seed)
    z = rng.normal(scale=2.0, size=(32, 2 * e.n))
    z[0] = 0.0
    P = e.projection(z) if hasattr(e, "projection") else e.value(z)
    defect = float(np.max(np.linalg.norm(P @ P - P, axis=(1, 2))))
    if defect > IDEMPOTENCY_TOL:
        raise NonIdempotentError(f"argument is not idempotent (sampled defect {defect:.2e})")


def k_pairing(phi, e: MatrixField, seed: Optional[int] = None) -> complex:
    """
    (2 pi i)^-l (l!)^-1 phi(e, ..., e) for a cocycle of degree 2l.

    ``e`` is checked for idempotency through its ``projection`` (the hat
    projection differs from e_a by a constant and pairs the same way).
    """
    _check_idempotent(e, settings.SEED if seed is None else seed)
    degree = phi.degree
    if degree % 2:
        raise InvalidDimensionError("pairing needs an even-degree cocycle")
    l = degree // 2
    value = phi(*([e] * (degree + 1)))
    return complex(value / ((2j * np.pi) ** l * math.factorial(l)))
