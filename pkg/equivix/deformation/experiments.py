# equivix/deformation/experiments.py
"""
Desk-scale runs connecting the operator side with the symbol side.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from equivix.chern_index import epsilon_cocycle
from equivix.config import settings
from equivix.deformation.cocycles import g_average, omega_g
from equivix.deformation.gaussians import TestFunction
from equivix.deformation.hermite import HermiteBasisConfig, group_rep_matrix
from equivix.deformation.operators import rho_hbar
from equivix.errors import InvalidDimensionError, PreconditionError, WrongMethodError
from equivix.isometry import IsometryAction
from equivix.quadrature import QuadratureConfig, integrate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceFormulaResult:
    lhs: complex
    rhs: complex
    rhs_error: float = 0.0

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_err(self) -> float:
        return self.abs_err / abs(self.rhs) if self.rhs != 0 else self.abs_err


def equivariant_trace_formula(
    f: TestFunction,
    hbar: float,
    A: IsometryAction,
    basis: HermiteBasisConfig,
    q: Optional[QuadratureConfig] = None,
) -> TraceFormulaResult:
    """
    Tr(rho_hbar(f) g) from matrices against
    (hbar^n (2 pi)^n)^-1 int f_hat(x, (gx - x)/hbar) dx by quadrature.
    """
    if not hbar > 0:
        raise PreconditionError(f"hbar must be positive, got {hbar}")
    if not f.n == A.n == basis.n:
        raise InvalidDimensionError("function, group element and basis must share the dimension")
    if f.is_zero:
        return TraceFormulaResult(0j, 0j)

    n = f.n
    rho = rho_hbar(f, hbar, basis)
    G = group_rep_matrix(A, basis)
    lhs = complex(np.einsum("ij,ji->", rho.matrix, G))

    def integrand(x: np.ndarray) -> np.ndarray:
        y = (x @ A.g.T - x) / hbar
        return f.transform(x, y)

    result = integrate(integrand, n, q or QuadratureConfig.from_settings())
    normalisation = (hbar * 2.0 * np.pi) ** n
    rhs = result.value / normalisation
    logger.info(f"Trace formula at hbar={hbar}, N={basis.N}: lhs {lhs:.10g}, rhs {rhs:.10g}")
    return TraceFormulaResult(lhs, complex(rhs), result.error / normalisation)


@dataclass(frozen=True)
class ConvergenceRow:
    hbar: float
    N: int
    lhs: complex
    target: complex
    abs_err: float
    rel_err: float
    seconds: float
    edge_energy: float = 0.0


@dataclass(frozen=True)
class ConvergenceTable:
    kind: str
    rows: tuple[ConvergenceRow, ...]
    target: complex
    monotone: bool
    notes: dict = field(default_factory=dict)

    @property
    def final_rel_err(self) -> float:
        return self.rows[-1].rel_err if self.rows else float("nan")


def schedule_cutoffs(hbar_sequence: Sequence[float], constant: Optional[float] = None, minimum: int = 4) -> list[int]:
    """N = ceil(c / hbar) per step."""
    c = constant or settings.HBAR_SCHEDULE_C
    return [max(minimum, math.ceil(c / h)) for h in hbar_sequence]


def _check_schedule(hbar_sequence: Sequence[float], n_schedule: Sequence[int]) -> None:
    if not hbar_sequence:
        raise PreconditionError("empty hbar schedule")
    if len(n_schedule) != len(hbar_sequence):
        raise PreconditionError("cutoff schedule must match the hbar schedule")
    if any(not 0 < h <= 1 for h in hbar_sequence):
        raise PreconditionError("hbar values must lie in (0, 1]")
    if any(b >= a for a, b in zip(hbar_sequence, hbar_sequence[1:])):
        raise PreconditionError("hbar schedule must be strictly decreasing")


def _is_monotone(rows: Sequence[ConvergenceRow]) -> bool:
    return all(b.abs_err < a.abs_err for a, b in zip(rows, rows[1:]))


def semiclassical_limit_experiment(
    A: IsometryAction,
    functions: Sequence[TestFunction],
    hbar_sequence: Sequence[float],
    n_schedule: Optional[Sequence[int]] = None,
    q: Optional[QuadratureConfig] = None,
    average: bool = False,
) -> ConvergenceTable:
    """
    omega_g(rho_hbar(f_0), ..., rho_hbar(f_2k)) along a decreasing hbar
    schedule, against the symbol-side value epsilon_g(f_0, ..., f_2k).

    A non-monotone error sequence is flagged and logged, never raised.
    """
    hbar_sequence = list(hbar_sequence)
    n_schedule = list(n_schedule) if n_schedule is not None else schedule_cutoffs(hbar_sequence)
    _check_schedule(hbar_sequence, n_schedule)
    k = A.n_g
    if len(functions) != 2 * k + 1:
        raise InvalidDimensionError(f"expected {2 * k + 1} functions, got {len(functions)}")
    if any(f.n != A.n for f in functions):
        raise InvalidDimensionError("functions must live on the same R^n as g")

    if all(f.is_zero for f in functions):
        target = 0j
    else:
        target = epsilon_cocycle(A, functions, q or QuadratureConfig.from_settings())
    logger.info(f"Limit target for {A.description or 'g'}: {target:.10g}")

    rows = []
    for hbar, N in zip(hbar_sequence, n_schedule):
        start = time.perf_counter()
        basis = HermiteBasisConfig.from_settings(A.n, N)
        G = group_rep_matrix(A, basis)
        operators = [rho_hbar(f, hbar, basis) for f in functions]
        if average:
            operators = [g_average(T, A, basis).operator for T in operators]
        value = omega_g(A, operators, group_matrix=G)
        abs_err = abs(value - target)
        rel_err = abs_err / abs(target) if target != 0 else abs_err
        edge = max(T.edge_energy() for T in operators)
        row = ConvergenceRow(hbar, N, value, target, abs_err, rel_err, time.perf_counter() - start, edge)
        rows.append(row)
        logger.info(f"hbar={hbar} N={N}: omega {value:.10g}, |difference| {abs_err:.3e} ({row.seconds:.2f}s)")
        if edge > 1e-3:
            logger.warning(f"hbar={hbar} N={N}: {edge:.2e} of the operator weight on the truncation edge")

    monotone = _is_monotone(rows)
    if not monotone:
        logger.warning("differences are not monotonically decreasing along the hbar schedule")
    return ConvergenceTable(kind="limit", rows=tuple(rows), target=target, monotone=monotone)


def isolated_limit_experiment(
    A: IsometryAction,
    f: TestFunction,
    hbar_sequence: Sequence[float],
    n_schedule: Optional[Sequence[int]] = None,
    average: bool = False,
) -> ConvergenceTable:
    """Tr(g rho_hbar(f)) against f(0, 0) / det(g-1) for an isolated fixed point."""
    if A.n_g != 0:
        raise WrongMethodError("the isolated limit needs n_g = 0")
    table = semiclassical_limit_experiment(A, [f], hbar_sequence, n_schedule, average=average)
    return ConvergenceTable(kind="isolated-limit", rows=table.rows, target=table.target, monotone=table.monotone)


def trace_formula_table(
    f: TestFunction,
    A: IsometryAction,
    hbar_sequence: Sequence[float],
    n_schedule: Sequence[int],
    q: Optional[QuadratureConfig] = None,
) -> ConvergenceTable:
    """Trace formula rows for each (hbar, N); hbar may repeat to study N alone."""
    if not hbar_sequence or len(hbar_sequence) != len(n_schedule):
        raise PreconditionError("hbar and cutoff schedules must be non-empty and of equal length")
    rows = []
    target = 0j
    for hbar, N in zip(hbar_sequence, n_schedule):
        start = time.perf_counter()
        basis = HermiteBasisConfig.from_settings(A.n, N)
        result = equivariant_trace_formula(f, hbar, A, basis, q)
        target = result.rhs
        rows.append(
            ConvergenceRow(hbar, N, result.lhs, result.rhs, result.abs_err, result.rel_err,
                           time.perf_counter() - start)
        )
    monotone = _is_monotone(rows)
    if not monotone:
        logger.warning("trace formula errors are not monotonically decreasing")
    return ConvergenceTable(kind="trace-formula", rows=tuple(rows), target=target, monotone=monotone)
