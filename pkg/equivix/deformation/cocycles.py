# equivix/deformation/cocycles.py
"""
Operator-side cyclic cocycles on truncated matrices.

    omega_g(T_0, ..., T_2k) = ((-1)^k / k!) sum_s sgn(s) Tr(g T_0 d_{s(1)} T_1 ... d_{s(2k)} T_2k)

with k = n_g, d_{2j-1} = [d/dx_j, .] and d_{2j} = [x_j, .]. For k = 0 this is
the twisted trace Tr(g T).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import schur

from equivix.alternating import alternating_product, cyclic_defect, hochschild_coboundary
from equivix.deformation.hermite import HermiteBasisConfig, group_rep_matrix, plane_rotation_angle
from equivix.deformation.operators import DeformedOperator, derivation_delta
from equivix.errors import BasisMismatchError, InvalidDimensionError, NonIdempotentError
from equivix.isometry import IsometryAction, analyze_isometry

logger = logging.getLogger(__name__)

IDEMPOTENCY_TOL = 1e-8
EIGENVALUE_CLUSTER_TOL = 1e-9
MAX_GROUP_ORDER = 64
CLOSURE_TOL = 1e-10


def _check_shared(operators: Sequence[DeformedOperator]) -> None:
    first = operators[0]
    for op in operators[1:]:
        if op.basis != first.basis or op.hbar != first.hbar:
            raise BasisMismatchError("all operators must share basis and hbar")


def omega_g(
    A: IsometryAction,
    operators: Sequence[DeformedOperator],
    group_matrix: Optional[np.ndarray] = None,
) -> complex:
    """
    Evaluate the cocycle for g on (T_0, ..., T_{2 n_g}).

    Derivations run over the tangential coordinates 1..n_g; ``group_matrix``
    can pass a precomputed representation of g.
    """
    k = A.n_g
    if len(operators) != 2 * k + 1:
        raise InvalidDimensionError(f"expected {2 * k + 1} operators, got {len(operators)}")
    _check_shared(operators)
    basis = operators[0].basis
    G = group_rep_matrix(A, basis) if group_matrix is None else group_matrix
    T0 = operators[0].matrix
    if k == 0:
        return complex(np.einsum("ij,ji->", G, T0))

    partials = []
    for T in operators[1:]:
        partials.append([derivation_delta(j, T).matrix for j in range(1, 2 * k + 1)])
    product = alternating_product(partials)
    value = np.einsum("ij,ji->", G @ T0, product)
    return complex((-1) ** k / math.factorial(k) * value)


@dataclass(frozen=True)
class OmegaCocycle:
    """omega_g bound to g, usable wherever a cochain evaluator is expected."""

    action: IsometryAction

    @property
    def degree(self) -> int:
        return 2 * self.action.n_g

    def __call__(self, *operators: DeformedOperator) -> complex:
        return omega_g(self.action, operators)


@dataclass(frozen=True)
class PairingResult:
    pairing: complex
    trace: complex
    edge_energy: float


def idempotent_trace_pairing(T: DeformedOperator, n: int) -> PairingResult:
    """
    Pair an idempotent with (2 pi i)^n n! omega over 2n+1 slots. The pairing
    carries the inverse factor (2 pi i)^-n (n!)^-1, so the result is
    omega(T, ..., T) itself; it should match Tr(T).
    """
    if T.basis.n != n:
        raise InvalidDimensionError(f"operator lives on R^{T.basis.n}, not R^{n}")
    defect = float(np.linalg.norm(T.matrix @ T.matrix - T.matrix))
    if defect > IDEMPOTENCY_TOL:
        raise NonIdempotentError(f"|T^2 - T| = {defect:.2e}")
    energy = T.edge_energy()
    if energy > 1e-6:
        logger.warning(f"idempotent has {energy:.2e} of its weight on the truncation edge")
    identity = analyze_isometry(np.eye(n), description="identity")
    pairing = omega_g(identity, [T] * (2 * n + 1))
    return PairingResult(pairing=complex(pairing), trace=T.trace(), edge_energy=energy)


@dataclass(frozen=True)
class CochainReport:
    max_coboundary: float
    max_relative_coboundary: float
    max_cyclic_defect: float
    max_relative_cyclic_defect: float
    tuples: int

    def passed(self, tolerance: float) -> bool:
        return self.max_relative_coboundary <= tolerance and self.max_relative_cyclic_defect <= tolerance


def _operand_scale(args: Sequence, norm: Callable) -> float:
    scale = 1.0
    for arg in args:
        scale *= max(norm(arg), 1e-300)
    return scale


def cochain_b_and_cyclicity_check(
    phi: Callable[..., complex],
    tuples: Sequence[Sequence],
    multiply: Callable = lambda a, b: a @ b,
    norm: Callable = lambda a: a.norm(),
) -> CochainReport:
    """
    Hochschild coboundary and cyclic defect of ``phi`` over sampled tuples.

    Each tuple has degree+2 entries; the coboundary uses all of them and the
    cyclic defect the first degree+1.
    """
    max_b = max_rel_b = max_c = max_rel_c = 0.0
    for args in tuples:
        args = list(args)
        b = abs(hochschild_coboundary(phi, args, multiply))
        c = abs(cyclic_defect(phi, args[:-1]))
        max_b = max(max_b, b)
        max_c = max(max_c, c)
        max_rel_b = max(max_rel_b, b / _operand_scale(args, norm))
        max_rel_c = max(max_rel_c, c / _operand_scale(args[:-1], norm))
    logger.info(f"Cochain check over {len(tuples)} tuples: |b phi| <= {max_b:.2e}, cyclic defect <= {max_c:.2e}")
    return CochainReport(max_b, max_rel_b, max_c, max_rel_c, len(tuples))


@dataclass(frozen=True)
class AveragedOperator:
    operator: DeformedOperator
    residual_before: float
    residual_after: float
    method: str


def _rotation_order(theta: float) -> Optional[int]:
    ratio = Fraction(theta / (2 * np.pi)).limit_denominator(MAX_GROUP_ORDER)
    if abs(float(ratio) - theta / (2 * np.pi)) > 1e-12:
        return None
    return ratio.denominator


def g_average(T: DeformedOperator, A: IsometryAction, basis: Optional[HermiteBasisConfig] = None) -> AveragedOperator:
    """
    Make T commute with the truncated representation of g.

    Rational rotations whose truncated action closes up average over the
    finite cyclic group; otherwise T is
    compressed onto the eigenspaces of g (the commutant projection).
    """
    basis = basis or T.basis
    G = group_rep_matrix(A, basis)
    residual = lambda M: float(np.linalg.norm(G @ M - M @ G))
    before = residual(T.matrix)
    if A.is_identity:
        return AveragedOperator(T, before, before, "identity")

    order = _rotation_order(plane_rotation_angle(A))
    if order is not None and np.linalg.norm(np.linalg.matrix_power(G, order) - np.eye(basis.dim)) > CLOSURE_TOL:
        # the truncated action of g is not periodic on levels the box cuts
        logger.debug(f"g^{order} is not the identity on the truncated basis")
        order = None
    if order is not None:
        total = np.zeros_like(T.matrix, dtype=complex)
        power = np.eye(basis.dim)
        for _ in range(order):
            total += power @ T.matrix @ power.T
            power = G @ power
        averaged = total / order
        method = f"cyclic group of order {order}"
    else:
        S, Z = schur(G.astype(complex), output="complex")
        eigenvalues = np.diag(S)
        same = np.abs(eigenvalues[:, np.newaxis] - eigenvalues[np.newaxis, :]) < EIGENVALUE_CLUSTER_TOL
        inner = Z.conj().T @ T.matrix @ Z
        averaged = Z @ (inner * same) @ Z.conj().T
        method = "eigenspace compression"
    after = residual(averaged)
    logger.info(f"g-average ({method}): commutator norm {before:.2e} -> {after:.2e}")
    return AveragedOperator(DeformedOperator(averaged, T.hbar, T.basis), before, after, method)
