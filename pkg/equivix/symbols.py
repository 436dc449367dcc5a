# equivix/symbols.py
"""
Matrix-valued phase-space symbols a(x, xi) and their graph projections.

Phase points are stored as z = (x_1..x_n, xi_1..xi_n). Every evaluator is
vectorised: a batch of shape (P, 2n) maps to matrices of shape (P, W, V).
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Literal, Optional

import numpy as np
from pydantic import ValidationError

from equivix.clifford import (
    clifford_basis,
    graded_blocks,
    left_mult_matrix,
    so_action_matrix,
    twisted_right_mult_matrix,
)
from equivix.config import settings
from equivix.errors import (
    IllConditionedError,
    InvalidDimensionError,
    UnsupportedShapeError,
    UsageError,
)
from equivix.schemas.SymbolFile import SymbolFile
from equivix.schemas.VerifyReport import CheckOutcome

if TYPE_CHECKING:
    from equivix.isometry import IsometryAction

logger = logging.getLogger(__name__)

MatrixFn = Callable[[np.ndarray], np.ndarray]
DerivativeFn = Callable[[np.ndarray, int], np.ndarray]
RepresentationFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

EQUIVARIANCE_TOL = 1e-10


def _as_batch(z: np.ndarray, phase_dim: int) -> tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    if z.shape[-1] != phase_dim:
        raise InvalidDimensionError(f"phase points need {phase_dim} coordinates, got {z.shape[-1]}")
    return z, single


@dataclass(frozen=True)
class SymbolField:
    """
    A symbol of declared order m with an optional exact derivative oracle.

    ``derivative(z, k)`` returns the partial derivative along storage
    coordinate k. ``fiber_representation(g)`` returns (g^V, g^W) for an
    orthogonal g acting on the base.
    """

    n: int
    dim_v: int
    dim_w: int
    order: float
    evaluator: MatrixFn = field(repr=False)
    derivative: Optional[DerivativeFn] = field(default=None, repr=False)
    fiber_representation: Optional[RepresentationFn] = field(default=None, repr=False)
    name: str = "symbol"

    def __post_init__(self):
        if self.n < 1 or self.dim_v < 1 or self.dim_w < 1:
            raise InvalidDimensionError(
                f"dimensions must be positive (n={self.n}, dimV={self.dim_v}, dimW={self.dim_w})"
            )

    @property
    def phase_dim(self) -> int:
        return 2 * self.n

    @property
    def is_square(self) -> bool:
        return self.dim_v == self.dim_w

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        batch, single = _as_batch(z, self.phase_dim)
        values = np.asarray(self.evaluator(batch), dtype=complex)
        return values[0] if single else values

    def partial(self, z: np.ndarray, k: int) -> np.ndarray:
        if not 0 <= k < self.phase_dim:
            raise InvalidDimensionError(f"coordinate index {k} outside 0..{self.phase_dim - 1}")
        direction = np.zeros(self.phase_dim)
        direction[k] = 1.0
        return self.directional_derivative(z, direction)

    def directional_derivative(
        self, z: np.ndarray, v: np.ndarray, step: Optional[float] = None
    ) -> np.ndarray:
        """Derivative along phase-space vector v; exact oracle if present, else 4th-order central differences."""
        batch, single = _as_batch(z, self.phase_dim)
        v = np.asarray(v, dtype=float)
        if self.derivative is not None and step is None:
            result = sum(
                v[k] * np.asarray(self.derivative(batch, k), dtype=complex)
                for k in np.flatnonzero(v)
            )
            if np.isscalar(result):
                result = np.zeros((batch.shape[0], self.dim_w, self.dim_v), dtype=complex)
        else:
            result = self._finite_difference(batch, v, settings.FD_STEP if step is None else step)
        return result[0] if single else result

    def _finite_difference(self, z: np.ndarray, v: np.ndarray, step: float) -> np.ndarray:
        h = step * (1.0 + np.linalg.norm(z, axis=1))[:, np.newaxis]
        shift = h * v[np.newaxis, :]
        if np.any(np.all(z + shift == z, axis=1) & np.any(v != 0)):
            raise IllConditionedError("finite-difference step underflow")
        f = lambda s: np.asarray(self.evaluator(z + s * shift), dtype=complex)
        hh = h[:, :, np.newaxis]
        return (-f(2.0) + 8.0 * f(1.0) - 8.0 * f(-1.0) + f(-2.0)) / (12.0 * hh)

    def representations(self, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(g^V, g^W); trivial when the symbol carries no fiber action."""
        if self.fiber_representation is None:
            return np.eye(self.dim_v, dtype=complex), np.eye(self.dim_w, dtype=complex)
        return self.fiber_representation(np.asarray(g, dtype=float))


@dataclass(frozen=True, eq=False)
class PointMatrix:
    matrix: np.ndarray
    point: np.ndarray
    role: Literal["graph-projection", "hat-projection", "integrand-factor"]


def bott_dirac_symbol(n_half: int) -> SymbolField:
    """
    The Bott-Dirac symbol on R^{2 n_half}: the odd <- even block of
    sum_j c_hat(e_j) i xi_j + c(e_j) x_j acting on the Clifford algebra.
    """
    alg = clifford_basis(n_half)
    ambient = alg.ambient_dim
    even, odd = alg.even_slice, alg.odd_slice
    x_coefficients = [left_mult_matrix(alg, j)[odd, even] for j in range(1, ambient + 1)]
    xi_coefficients = [1j * twisted_right_mult_matrix(alg, j)[odd, even] for j in range(1, ambient + 1)]
    coefficients = np.stack(x_coefficients + xi_coefficients)
    half = alg.half_dim

    def evaluator(z: np.ndarray) -> np.ndarray:
        return np.einsum("pk,kwv->pwv", z, coefficients)

    def derivative(z: np.ndarray, k: int) -> np.ndarray:
        return np.broadcast_to(coefficients[k], (z.shape[0], half, half)).copy()

    def fiber_representation(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return graded_blocks(alg, so_action_matrix(alg, g))

    return SymbolField(
        n=ambient,
        dim_v=half,
        dim_w=half,
        order=1.0,
        evaluator=evaluator,
        derivative=derivative,
        fiber_representation=fiber_representation,
        name=f"bott-dirac:{n_half}",
    )


def oscillator_symbol() -> SymbolField:
    """Scalar symbol a(x, xi) = x + i xi on T*R (the annihilation operator)."""
    coefficients = np.array([[[1.0]], [[1j]]], dtype=complex)

    def evaluator(z: np.ndarray) -> np.ndarray:
        return np.einsum("pk,kwv->pwv", z, coefficients)

    def derivative(z: np.ndarray, k: int) -> np.ndarray:
        return np.broadcast_to(coefficients[k], (z.shape[0], 1, 1)).copy()

    return SymbolField(
        n=1, dim_v=1, dim_w=1, order=1.0,
        evaluator=evaluator, derivative=derivative, name="oscillator",
    )


def polynomial_symbol(spec: SymbolFile) -> SymbolField:
    """Build a symbol with polynomial entries and an exact derivative oracle."""
    entries = []
    for entry in spec.entries:
        if not entry.terms:
            continue
        coefficients = np.array([t.coefficient for t in entry.terms], dtype=complex)
        powers = np.array([t.powers for t in entry.terms], dtype=int)
        entries.append((entry.row, entry.col, coefficients, powers))

    shape = (spec.dim_w, spec.dim_v)

    def evaluator(z: np.ndarray) -> np.ndarray:
        out = np.zeros((z.shape[0],) + shape, dtype=complex)
        for row, col, coefficients, powers in entries:
            monomials = np.prod(z[:, np.newaxis, :] ** powers[np.newaxis, :, :], axis=-1)
            out[:, row, col] += monomials @ coefficients
        return out

    def derivative(z: np.ndarray, k: int) -> np.ndarray:
        out = np.zeros((z.shape[0],) + shape, dtype=complex)
        for row, col, coefficients, powers in entries:
            p = powers[:, k]
            mask = p > 0
            if not np.any(mask):
                continue
            lowered = powers[mask].copy()
            lowered[:, k] -= 1
            monomials = np.prod(z[:, np.newaxis, :] ** lowered[np.newaxis, :, :], axis=-1)
            out[:, row, col] += monomials @ (coefficients[mask] * p[mask])
        return out

    return SymbolField(
        n=spec.n,
        dim_v=spec.dim_v,
        dim_w=spec.dim_w,
        order=spec.order,
        evaluator=evaluator,
        derivative=derivative,
        name=spec.name or "polynomial",
    )


def load_symbol_file(path: Path) -> SymbolField:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"symbol file not found: {path}")
    try:
        spec = SymbolFile.model_validate(json.loads(path.read_text()))
    except (ValidationError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid symbol file {path}: {exc}") from exc
    logger.info(f"Loaded symbol {spec.name or path.name} (n={spec.n}, {spec.dim_w}x{spec.dim_v}, order {spec.order})")
    return polynomial_symbol(spec.model_copy(update={"name": spec.name or path.stem}))


# ─── Graph projections ────────────────────────────────────────


def _hpd_solve(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve M X = B for batched Hermitian positive definite M via Cholesky."""
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError("1 + a*a is not numerically positive definite") from exc
    Y = np.linalg.solve(L, B)
    return np.linalg.solve(np.conj(np.swapaxes(L, -1, -2)), Y)


def _assemble(top_left, top_right, bottom_left, bottom_right) -> np.ndarray:
    top = np.concatenate([top_left, top_right], axis=-1)
    bottom = np.concatenate([bottom_left, bottom_right], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


class ProjectionField:
    """
    e_a (or the hat version e_a - diag(0, I_W)) as a matrix field with
    derivatives along arbitrary phase-space directions.

    With M = 1 + a*a, X = M^-1 and Y = X a*:
        e_a = [[X, Y], [aX, aY]]
    and the derivatives follow from dX = -X dM X.
    """

    def __init__(self, symbol: SymbolField, hat: bool = True, finite_differences: bool = False):
        self.symbol = symbol
        self.hat = hat
        self.finite_differences = finite_differences
        self.n = symbol.n
        self.size = symbol.dim_v + symbol.dim_w

    def _pieces(self, z: np.ndarray):
        a = self.symbol.evaluate(z)
        ah = np.conj(np.swapaxes(a, -1, -2))
        V = self.symbol.dim_v
        eye_v = np.broadcast_to(np.eye(V), (a.shape[0], V, V))
        M = eye_v + ah @ a
        solved = _hpd_solve(M, np.concatenate([eye_v, ah], axis=-1))
        X, Y = solved[..., :V], solved[..., V:]
        return a, ah, X, Y

    def _value(self, a, X, Y) -> np.ndarray:
        E = _assemble(X, Y, a @ X, a @ Y)
        if self.hat:
            W = self.symbol.dim_w
            E[..., -W:, -W:] -= np.eye(W)
        return E

    def value(self, z: np.ndarray) -> np.ndarray:
        z, _ = _as_batch(z, self.symbol.phase_dim)
        a, _, X, Y = self._pieces(z)
        return self._value(a, X, Y)

    def projection(self, z: np.ndarray) -> np.ndarray:
        """The idempotent e_a regardless of ``hat``."""
        z, _ = _as_batch(z, self.symbol.phase_dim)
        a, _, X, Y = self._pieces(z)
        return _assemble(X, Y, a @ X, a @ Y)

    def _derivative(self, z, a, ah, X, Y, v) -> np.ndarray:
        step = settings.FD_STEP if self.finite_differences else None
        da = self.symbol.directional_derivative(z, v, step=step)
        dah = np.conj(np.swapaxes(da, -1, -2))
        dM = dah @ a + ah @ da
        dX = -X @ dM @ X
        dY = dX @ ah + X @ dah
        return _assemble(dX, dY, da @ X + a @ dX, da @ Y + a @ dY)

    def directional(self, z: np.ndarray, v: np.ndarray) -> np.ndarray:
        z, _ = _as_batch(z, self.symbol.phase_dim)
        a, ah, X, Y = self._pieces(z)
        return self._derivative(z, a, ah, X, Y, np.asarray(v, dtype=float))

    def value_and_directionals(
        self, z: np.ndarray, directions: np.ndarray
    ) -> tuple[np.ndarray, list[np.ndarray]]:
        """Value and derivatives along each row of ``directions``, sharing one factorisation."""
        z, _ = _as_batch(z, self.symbol.phase_dim)
        a, ah, X, Y = self._pieces(z)
        value = self._value(a, X, Y)
        return value, [self._derivative(z, a, ah, X, Y, v) for v in np.asarray(directions, dtype=float)]


def graph_projection(a: SymbolField, z: np.ndarray) -> PointMatrix:
    z = np.asarray(z, dtype=float)
    matrix = ProjectionField(a, hat=False).value(z)[0]
    return PointMatrix(matrix=matrix, point=z, role="graph-projection")


def hat_projection(a: SymbolField, z: np.ndarray) -> PointMatrix:
    z = np.asarray(z, dtype=float)
    matrix = ProjectionField(a, hat=True).value(z)[0]
    return PointMatrix(matrix=matrix, point=z, role="hat-projection")


# ─── Sampling checks ──────────────────────────────────────────


@dataclass(frozen=True)
class SamplingConfig:
    """Radial shells times random directions, plus the signed coordinate axes."""

    shells: int
    per_shell: int
    min_radius: float = 1.0
    max_radius: float = 1e3
    seed: int = 0

    @classmethod
    def from_settings(cls, **overrides) -> "SamplingConfig":
        values = {
            "shells": settings.ELLIPTICITY_SHELLS,
            "per_shell": settings.ELLIPTICITY_PER_SHELL,
            "seed": settings.SEED,
        }
        values.update(overrides)
        return cls(**values)

    def points(self, phase_dim: int) -> tuple[np.ndarray, np.ndarray]:
        """Sample points and the shell index of each."""
        rng = np.random.default_rng(self.seed)
        radii = np.geomspace(self.min_radius, self.max_radius, self.shells)
        axes = np.concatenate([np.eye(phase_dim), -np.eye(phase_dim)])
        points, shells = [], []
        for shell, r in enumerate(radii):
            directions = rng.standard_normal((self.per_shell, phase_dim))
            directions /= np.linalg.norm(directions, axis=1, keepdims=True)
            directions = np.concatenate([directions, axes])
            points.append(r * directions)
            shells.append(np.full(directions.shape[0], shell))
        return np.concatenate(points), np.concatenate(shells)


def ellipticity_check(
    a: SymbolField, C: float, R: float, samples: Optional[SamplingConfig] = None
) -> CheckOutcome:
    """Sampled check of min eig(a*a) >= C |z|^{2m} for |z|^2 >= R."""
    if not a.is_square:
        raise UnsupportedShapeError(f"ellipticity needs a square symbol, got {a.dim_w}x{a.dim_v}")
    samples = samples or SamplingConfig.from_settings()
    samples = SamplingConfig(
        shells=samples.shells,
        per_shell=samples.per_shell,
        min_radius=max(samples.min_radius, float(np.sqrt(R))),
        max_radius=max(samples.max_radius, float(np.sqrt(R))),
        seed=samples.seed,
    )
    z, _ = samples.points(a.phase_dim)
    values = a.evaluate(z)
    gram = np.conj(np.swapaxes(values, -1, -2)) @ values
    lowest = np.linalg.eigvalsh(gram)[:, 0]
    bound = C * np.sum(z ** 2, axis=1) ** a.order
    margins = lowest / bound - 1.0
    worst = int(np.argmin(margins))
    passed = bool(margins[worst] >= -1e-9)
    logger.debug(f"Ellipticity of {a.name}: worst margin {margins[worst]:.3e} over {len(z)} points")
    return CheckOutcome(
        name="ellipticity",
        status="pass" if passed else "fail",
        worst_margin=float(margins[worst]),
        samples=len(z),
        message="" if passed else f"a*a below C|z|^(2m) at z={z[worst].tolist()}",
        details={"C": C, "R": R, "order": a.order},
    )


def equivariance_check(
    a: SymbolField, A: "IsometryAction", samples: Optional[SamplingConfig] = None
) -> CheckOutcome:
    """Sampled check of g^W a(g^-1 x, g^-1 xi) (g^V)^-1 = a(x, xi)."""
    from equivix.isometry import phase_space_pullback

    if A.n != a.n:
        raise InvalidDimensionError(f"g acts on R^{A.n} but the symbol lives on R^{a.n}")
    rep = A.fiber_rep_for(a.dim_v + a.dim_w)
    rep_v, rep_w = rep[:a.dim_v, :a.dim_v], rep[a.dim_v:, a.dim_v:]
    samples = samples or SamplingConfig.from_settings(min_radius=0.1, max_radius=10.0, shells=4, per_shell=16)
    z, _ = samples.points(a.phase_dim)
    lhs = rep_w @ a.evaluate(phase_space_pullback(A, z)) @ np.linalg.inv(rep_v)
    rhs = a.evaluate(z)
    errors = np.linalg.norm(lhs - rhs, axis=(1, 2)) / (1.0 + np.linalg.norm(rhs, axis=(1, 2)))
    worst = float(np.max(errors))
    passed = worst <= EQUIVARIANCE_TOL
    return CheckOutcome(
        name="equivariance",
        status="pass" if passed else "fail",
        worst_margin=worst,
        samples=len(z),
        message="" if passed else f"symbol is not invariant under {A.description or 'g'}",
    )


def order_check(a: SymbolField, samples: Optional[SamplingConfig] = None) -> CheckOutcome:
    """
    Growth of ||a(z)|| / (1+|z|^2)^{m/2} and ||da(z)|| / (1+|z|^2)^{(m-1)/2}.

    Passes when the outermost shell does not exceed twice the largest
    constant seen on the inner shells.
    """
    samples = samples or SamplingConfig.from_settings(min_radius=1.0, max_radius=1e3)
    z, shells = samples.points(a.phase_dim)
    weight = 1.0 + np.sum(z ** 2, axis=1)
    value_ratio = np.linalg.norm(a.evaluate(z), ord=2, axis=(1, 2)) / weight ** (a.order / 2)
    derivative_norm = np.zeros(len(z))
    for k in range(a.phase_dim):
        derivative_norm = np.maximum(derivative_norm, np.linalg.norm(a.partial(z, k), ord=2, axis=(1, 2)))
    derivative_ratio = derivative_norm / weight ** ((a.order - 1) / 2)

    outer = shells == shells.max()
    inner = ~outer if np.any(~outer) else outer
    growth = []
    for ratio in (value_ratio, derivative_ratio):
        reference = max(float(np.max(ratio[inner])), 1e-300)
        growth.append(float(np.max(ratio[outer])) / reference)
    worst = max(growth)
    passed = worst <= 2.0
    return CheckOutcome(
        name="order",
        status="pass" if passed else "fail",
        worst_margin=worst,
        samples=len(z),
        message="" if passed else f"symbol grows faster than order {a.order}",
        details={
            "value_constant": float(np.max(value_ratio)),
            "derivative_constant": float(np.max(derivative_ratio)),
        },
    )


def resolve_symbol(text: str, base_dir: Optional[Path] = None) -> SymbolField:
    """Parse "bott-dirac:K", "oscillator" or a symbol file path."""
    text = text.strip()
    if text.startswith("bott-dirac:"):
        try:
            n_half = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"cannot parse {text!r}; expected bott-dirac:<n_half>") from exc
        return bott_dirac_symbol(n_half)
    if text == "oscillator":
        return oscillator_symbol()
    path = Path(text)
    if base_dir is not None and not path.is_absolute() and (base_dir / path).exists():
        path = base_dir / path
    return load_symbol_file(path)
