# equivix/deformation/gaussians.py
"""
Gaussian-times-monomial test functions on T*R^n with closed-form transforms.

A function is a finite sum of separable terms

    coefficient * prod_k x_k^a xi_k^b exp(-alpha (x_k - c)^2 - beta (xi_k - d)^2)

and its partial Fourier transform in xi uses the convention

    f_hat(x, y) = int f(x, xi) exp(-i y . xi) d xi.

The family is closed under sums, products, exact partial derivatives and
pull-back by signed permutations.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from equivix.errors import InvalidDimensionError, PreconditionError
from equivix.schemas.ExperimentFile import FunctionSpec

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class GaussianFactor:
    """x^a xi^b exp(-alpha (x-c)^2 - beta (xi-d)^2) in one coordinate pair."""

    x_power: int = 0
    xi_power: int = 0
    x_decay: float = 1.0
    xi_decay: float = 1.0
    x_center: float = 0.0
    xi_center: float = 0.0

    def __post_init__(self):
        if self.x_decay <= 0 or self.xi_decay <= 0:
            raise PreconditionError("Gaussian decays must be positive")
        if self.x_power < 0 or self.xi_power < 0:
            raise PreconditionError("monomial powers must be non-negative")

    def x_part(self, x: np.ndarray) -> np.ndarray:
        return x ** self.x_power * np.exp(-self.x_decay * (x - self.x_center) ** 2)

    def xi_part(self, xi: np.ndarray) -> np.ndarray:
        return xi ** self.xi_power * np.exp(-self.xi_decay * (xi - self.xi_center) ** 2)

    def evaluate(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return self.x_part(x) * self.xi_part(xi)

    @cached_property
    def _transform_polynomial(self) -> Polynomial:
        # xi^b under the transform becomes (i d/dy)^b; P_{k+1} = i (P_k' + P_k u')
        u_prime = Polynomial([-1j * self.xi_center, -1.0 / (2.0 * self.xi_decay)])
        p = Polynomial([1.0 + 0j])
        for _ in range(self.xi_power):
            p = 1j * (p.deriv() + p * u_prime)
        return p

    def xi_transform(self, y: np.ndarray) -> np.ndarray:
        beta, d = self.xi_decay, self.xi_center
        envelope = np.sqrt(np.pi / beta) * np.exp(-1j * y * d - y ** 2 / (4.0 * beta))
        return self._transform_polynomial(y) * envelope

    def transform(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.x_part(x) * self.xi_transform(y)

    @property
    def y_width(self) -> float:
        """Standard deviation of the transform envelope in y."""
        return float(np.sqrt(2.0 * self.xi_decay))

    def d_x(self) -> list[tuple[float, "GaussianFactor"]]:
        return self._derivative("x")

    def d_xi(self) -> list[tuple[float, "GaussianFactor"]]:
        return self._derivative("xi")

    def _derivative(self, variable: str) -> list[tuple[float, "GaussianFactor"]]:
        power = getattr(self, f"{variable}_power")
        decay = getattr(self, f"{variable}_decay")
        center = getattr(self, f"{variable}_center")
        key = f"{variable}_power"
        pieces = []
        if power > 0:
            pieces.append((float(power), _with(self, **{key: power - 1})))
        pieces.append((-2.0 * decay, _with(self, **{key: power + 1})))
        if center != 0.0:
            pieces.append((2.0 * decay * center, self))
        return pieces

    def times(self, other: "GaussianFactor") -> tuple[float, "GaussianFactor"]:
        """Pointwise product as (constant, factor)."""
        alpha = self.x_decay + other.x_decay
        beta = self.xi_decay + other.xi_decay
        c = (self.x_decay * self.x_center + other.x_decay * other.x_center) / alpha
        d = (self.xi_decay * self.xi_center + other.xi_decay * other.xi_center) / beta
        constant = np.exp(
            -self.x_decay * other.x_decay * (self.x_center - other.x_center) ** 2 / alpha
            - self.xi_decay * other.xi_decay * (self.xi_center - other.xi_center) ** 2 / beta
        )
        product = GaussianFactor(
            x_power=self.x_power + other.x_power,
            xi_power=self.xi_power + other.xi_power,
            x_decay=alpha,
            xi_decay=beta,
            x_center=c,
            xi_center=d,
        )
        return float(constant), product

    def reflected(self) -> tuple[float, "GaussianFactor"]:
        """phi(-x, -xi) as (sign, factor)."""
        sign = -1.0 if (self.x_power + self.xi_power) % 2 else 1.0
        return sign, _with(self, x_center=-self.x_center, xi_center=-self.xi_center)


def _with(factor: GaussianFactor, **changes) -> GaussianFactor:
    values = {
        "x_power": factor.x_power,
        "xi_power": factor.xi_power,
        "x_decay": factor.x_decay,
        "xi_decay": factor.xi_decay,
        "x_center": factor.x_center,
        "xi_center": factor.xi_center,
    }
    values.update(changes)
    return GaussianFactor(**values)


@dataclass(frozen=True)
class GaussianTerm:
    coefficient: complex
    factors: tuple[GaussianFactor, ...]


@dataclass(frozen=True)
class TestFunction:
    """
    A scalar Schwartz function in the Gaussian family.

    Also a matrix field of size 1, so it can be fed to the symbol-side
    cocycle directly.
    """

    __test__ = False

    n: int
    terms: tuple[GaussianTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidDimensionError(f"dimension must be positive, got {self.n}")
        for term in self.terms:
            if len(term.factors) != self.n:
                raise InvalidDimensionError(f"every term needs {self.n} factors")

    # ─── Construction ─────────────────────────────────────────

    @classmethod
    def gaussian(
        cls,
        n: int,
        x_decay: float = 1.0,
        xi_decay: float = 1.0,
        coefficient: Scalar = 1.0,
        x_center: Sequence[float] = (),
        xi_center: Sequence[float] = (),
        x_powers: Sequence[int] = (),
        xi_powers: Sequence[int] = (),
    ) -> "TestFunction":
        """coefficient * x^p xi^q exp(-x_decay |x - c|^2 - xi_decay |xi - d|^2)."""
        pad = lambda values, default: list(values) + [default] * (n - len(values))
        factors = tuple(
            GaussianFactor(
                x_power=p, xi_power=q, x_decay=x_decay, xi_decay=xi_decay, x_center=c, xi_center=d,
            )
            for p, q, c, d in zip(pad(x_powers, 0), pad(xi_powers, 0), pad(x_center, 0.0), pad(xi_center, 0.0))
        )
        return cls(n, (GaussianTerm(complex(coefficient), factors),))

    @classmethod
    def zero(cls, n: int) -> "TestFunction":
        return cls(n, ())

    @classmethod
    def from_spec(cls, spec: FunctionSpec, n: int) -> "TestFunction":
        terms = tuple(
            GaussianTerm(
                complex(term.coefficient),
                tuple(GaussianFactor(**factor.model_dump()) for factor in term.factors),
            )
            for term in spec.terms
        )
        return cls(n, terms)

    # ─── Evaluation ───────────────────────────────────────────

    @property
    def is_zero(self) -> bool:
        return all(term.coefficient == 0 for term in self.terms)

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """f at phase points z = (x, xi) of shape (..., 2n)."""
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != 2 * self.n:
            raise InvalidDimensionError(f"phase points need {2 * self.n} coordinates")
        total = np.zeros(z.shape[:-1], dtype=complex)
        for term in self.terms:
            product = np.full(z.shape[:-1], term.coefficient, dtype=complex)
            for k, factor in enumerate(term.factors):
                product = product * factor.evaluate(z[..., k], z[..., self.n + k])
            total += product
        return total

    def transform(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """f_hat(x, y) for x, y of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        total = np.zeros(x.shape[:-1], dtype=complex)
        for term in self.terms:
            product = np.full(x.shape[:-1], term.coefficient, dtype=complex)
            for k, factor in enumerate(term.factors):
                product = product * factor.transform(x[..., k], y[..., k])
            total += product
        return total

    @property
    def hat(self) -> "PartialFourierTransform":
        return PartialFourierTransform(self)

    def value_at_origin(self) -> complex:
        return complex(self.evaluate(np.zeros(2 * self.n)))

    @property
    def y_width(self) -> float:
        widths = [f.y_width for term in self.terms for f in term.factors]
        return max(widths) if widths else 1.0

    # ─── Algebra ──────────────────────────────────────────────

    def _check(self, other: "TestFunction") -> None:
        if other.n != self.n:
            raise InvalidDimensionError(f"cannot combine functions on R^{self.n} and R^{other.n}")

    def __add__(self, other: "TestFunction") -> "TestFunction":
        self._check(other)
        return TestFunction(self.n, self.terms + other.terms)

    def __neg__(self) -> "TestFunction":
        return self.scale(-1.0)

    def __sub__(self, other: "TestFunction") -> "TestFunction":
        return self + (-other)

    def scale(self, scalar: Scalar) -> "TestFunction":
        return TestFunction(
            self.n, tuple(GaussianTerm(term.coefficient * scalar, term.factors) for term in self.terms)
        )

    def __mul__(self, other: Union["TestFunction", Scalar]) -> "TestFunction":
        if not isinstance(other, TestFunction):
            return self.scale(other)
        self._check(other)
        terms = []
        for left in self.terms:
            for right in other.terms:
                coefficient = left.coefficient * right.coefficient
                factors = []
                for a, b in zip(left.factors, right.factors):
                    constant, factor = a.times(b)
                    coefficient *= constant
                    factors.append(factor)
                terms.append(GaussianTerm(coefficient, tuple(factors)))
        return TestFunction(self.n, tuple(terms))

    def __rmul__(self, scalar: Scalar) -> "TestFunction":
        return self.scale(scalar)

    def partial(self, k: int) -> "TestFunction":
        """Exact derivative along storage coordinate k (x_1..x_n, xi_1..xi_n)."""
        if not 0 <= k < 2 * self.n:
            raise InvalidDimensionError(f"coordinate index {k} outside 0..{2 * self.n - 1}")
        coordinate, in_xi = k % self.n, k >= self.n
        terms = []
        for term in self.terms:
            factor = term.factors[coordinate]
            pieces = factor.d_xi() if in_xi else factor.d_x()
            for constant, replaced in pieces:
                factors = term.factors[:coordinate] + (replaced,) + term.factors[coordinate + 1:]
                terms.append(GaussianTerm(term.coefficient * constant, factors))
        return TestFunction(self.n, tuple(terms))

    def pullback(self, g: np.ndarray) -> "TestFunction":
        """
        (g.f)(x, xi) = f(g^-1 x, g^-1 xi) for a signed permutation matrix g.
        """
        g = np.asarray(g, dtype=float)
        if g.shape != (self.n, self.n):
            raise InvalidDimensionError(f"g must be {self.n}x{self.n}")
        rows, signs = [], []
        for k in range(self.n):
            column = g[:, k]
            j = int(np.argmax(np.abs(column)))
            if abs(abs(column[j]) - 1.0) > 1e-12 or np.sum(np.abs(column) > 1e-12) != 1:
                raise PreconditionError("pull-back is only available for signed permutation matrices")
            rows.append(j)
            signs.append(np.sign(column[j]))
        terms = []
        for term in self.terms:
            coefficient = term.coefficient
            moved: list[GaussianFactor] = [None] * self.n  # type: ignore[list-item]
            # (g^-1 x)_k = s_k x_{rows[k]}
            for k, factor in enumerate(term.factors):
                if signs[k] < 0:
                    sign, factor = factor.reflected()
                    coefficient *= sign
                moved[rows[k]] = factor
            terms.append(GaussianTerm(coefficient, tuple(moved)))
        return TestFunction(self.n, tuple(terms))

    # ─── Matrix-field interface ───────────────────────────────

    @property
    def size(self) -> int:
        return 1

    @cached_property
    def partials(self) -> tuple["TestFunction", ...]:
        return tuple(self.partial(k) for k in range(2 * self.n))

    def value(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return self.evaluate(z)[:, np.newaxis, np.newaxis]

    def directional(self, z: np.ndarray, v: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        total = np.zeros(z.shape[0], dtype=complex)
        for k in np.flatnonzero(v):
            total += v[k] * self.partials[k].evaluate(z)
        return total[:, np.newaxis, np.newaxis]


@dataclass(frozen=True)
class PartialFourierTransform:
    """The evaluator (x, y) -> f_hat(x, y) of a test function."""

    function: TestFunction

    @property
    def n(self) -> int:
        return self.function.n

    @property
    def y_width(self) -> float:
        return self.function.y_width

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.function.transform(x, y)


def random_test_function(rng: np.random.Generator, n: int, terms: int = 1) -> TestFunction:
    """A random member of the family with moderate decays, small centers and low powers."""
    result = TestFunction.zero(n)
    for _ in range(terms):
        factors = tuple(
            GaussianFactor(
                x_power=int(rng.integers(0, 2)),
                xi_power=int(rng.integers(0, 2)),
                x_decay=float(rng.uniform(0.7, 1.3)),
                xi_decay=float(rng.uniform(0.7, 1.3)),
                x_center=float(rng.uniform(-0.5, 0.5)),
                xi_center=float(rng.uniform(-0.5, 0.5)),
            )
            for _ in range(n)
        )
        coefficient = complex(rng.normal(), rng.normal())
        result = result + TestFunction(n, (GaussianTerm(coefficient, factors),))
    return result
