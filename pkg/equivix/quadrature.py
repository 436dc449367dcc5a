# equivix/quadrature.py
"""
Tensor Gauss-Legendre quadrature over R^d after the substitution z = tan(u).

Level L splits (-pi/2, pi/2) into 2^L panels per axis with ``nodes`` points
each. The refinement error is the difference between consecutive levels.
Cells of flat point indices are evaluated on the shared pool and combined by
pairwise summation in index order, so the result does not depend on
scheduling.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from equivix.config import settings
from equivix.errors import PreconditionError, QuadratureError
from equivix.services.cache import cached
from equivix.services.executor import ordered_map

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 10
    compactification: str = "tan"
    levels: int = 2
    abs_tol: float = 1e-8
    rel_tol: float = 1e-5
    cell_size: int = 16384

    def __post_init__(self):
        if self.nodes < 8:
            raise PreconditionError(f"node count must be at least 8, got {self.nodes}")
        if self.levels < 1:
            raise PreconditionError("at least one refinement level is needed for an error estimate")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise PreconditionError("tolerances must be positive")
        if self.compactification != "tan":
            raise PreconditionError(f"unknown compactification {self.compactification!r}")
        if self.cell_size < 1:
            raise PreconditionError("cell size must be positive")

    @classmethod
    def from_settings(cls, **overrides) -> "QuadratureConfig":
        values = {
            "nodes": settings.QUAD_NODES,
            "compactification": settings.QUAD_MAP,
            "levels": settings.QUAD_LEVELS,
            "abs_tol": settings.QUAD_ABS_TOL,
            "rel_tol": settings.QUAD_REL_TOL,
            "cell_size": settings.QUAD_CELL_SIZE,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class LevelRow:
    level: int
    nodes_per_axis: int
    value: complex
    difference: Optional[float]


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    evaluations: int
    converged: bool
    seconds: float
    levels: tuple[LevelRow, ...] = field(default_factory=tuple)


@cached("quadrature", key_func=lambda n: f"gauss-legendre:{n}")
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@cached("quadrature", key_func=lambda nodes, panels: f"tan-rule:{nodes}:{panels}")
def compactified_rule(nodes: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """1D rule on R: composite Gauss-Legendre in u, mapped by z = tan(u)."""
    x, w = gauss_legendre(nodes)
    edges = np.linspace(-np.pi / 2, np.pi / 2, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, np.newaxis] + half[:, np.newaxis] * x[np.newaxis, :]).ravel()
    wu = (half[:, np.newaxis] * w[np.newaxis, :]).ravel()
    return np.tan(u), wu / np.cos(u) ** 2


def pairwise_sum(values: list[complex]) -> complex:
    """Tree summation in list order."""
    if not values:
        return 0j
    layer = list(values)
    while len(layer) > 1:
        paired = [layer[i] + layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            paired.append(layer[-1])
        layer = paired
    return complex(layer[0])


def tensor_sum(func: Integrand, dim: int, nodes: np.ndarray, weights: np.ndarray, cell_size: int) -> complex:
    """Sum of w_i f(z_i) over the full tensor grid, cell by cell."""
    m = len(nodes)
    total = m ** dim
    shape = (m,) * dim
    starts = list(range(0, total, cell_size))

    def cell(start: int) -> complex:
        flat = np.arange(start, min(start + cell_size, total))
        index = np.unravel_index(flat, shape)
        points = np.stack([nodes[i] for i in index], axis=1)
        w = np.prod(np.stack([weights[i] for i in index], axis=1), axis=1)
        values = np.asarray(func(points))
        return complex(np.sum(w * values))

    return pairwise_sum(ordered_map(cell, starts))


def integrate(
    func: Integrand,
    dim: int,
    config: Optional[QuadratureConfig] = None,
    cell_size: Optional[int] = None,
) -> QuadratureResult:
    """
    Integrate ``func`` (batch of points (P, dim) -> values (P,)) over R^dim.

    Refines until consecutive levels agree to the configured tolerance or the
    levels run out. Returns ``converged=False`` when the error is still
    shrinking at the last level.

    Raises:
        QuadratureError: the refinement difference stopped decreasing
    """
    config = config or QuadratureConfig.from_settings()
    cell_size = cell_size or config.cell_size
    start = time.perf_counter()

    rows: list[LevelRow] = []
    evaluations = 0
    previous: Optional[complex] = None
    differences: list[float] = []
    converged = False
    for level in range(config.levels + 1):
        panels = 2 ** level
        nodes, weights = compactified_rule(config.nodes, panels)
        value = tensor_sum(func, dim, nodes, weights, cell_size)
        evaluations += len(nodes) ** dim
        difference = None if previous is None else abs(value - previous)
        rows.append(LevelRow(level, len(nodes), value, difference))
        logger.debug(f"Level {level}: {len(nodes)}^{dim} points, value {value:.12g}, difference {difference}")
        if difference is not None:
            differences.append(difference)
            if difference <= max(config.abs_tol, config.rel_tol * abs(value)):
                converged = True
                break
            if len(differences) >= 2 and differences[-1] >= differences[-2]:
                raise QuadratureError(
                    f"refinement difference stopped decreasing at level {level}",
                    diagnostics={
                        "levels": [(r.level, r.nodes_per_axis, r.value, r.difference) for r in rows],
                    },
                )
        previous = value

    seconds = time.perf_counter() - start
    final = rows[-1]
    error = differences[-1] if differences else float("inf")
    logger.info(
        f"Quadrature over R^{dim}: {final.nodes_per_axis} nodes/axis, error {error:.3e}, "
        f"{'converged' if converged else 'not converged'} in {seconds:.2f}s"
    )
    return QuadratureResult(
        value=final.value,
        error=error,
        evaluations=evaluations,
        converged=converged,
        seconds=seconds,
        levels=tuple(rows),
    )
