# equivix/verification.py
"""
The ``verify`` battery: structural checks on the Clifford tables, the group
element, the symbol and both cocycles, each reported as a CheckOutcome.
"""

import logging
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from equivix.chern_index import EpsilonCocycle
from equivix.clifford import clifford_basis, left_mult_matrix, twisted_right_mult_matrix
from equivix.config import settings
from equivix.deformation.cocycles import OmegaCocycle, cochain_b_and_cyclicity_check
from equivix.deformation.gaussians import random_test_function
from equivix.deformation.hermite import HermiteBasisConfig
from equivix.deformation.operators import rho_hbar
from equivix.errors import EquivixError
from equivix.isometry import IsometryAction, analyze_isometry, parse_group_element
from equivix.quadrature import QuadratureConfig
from equivix.schemas.RunManifest import RunManifest
from equivix.schemas.VerifyReport import CheckOutcome, VerifyReport
from equivix.symbols import (
    ProjectionField,
    SamplingConfig,
    SymbolField,
    ellipticity_check,
    equivariance_check,
    order_check,
    resolve_symbol,
)

logger = logging.getLogger(__name__)

CLIFFORD_TOL = 1e-12
PROJECTION_TOL = 1e-10
EPSILON_COCHAIN_TOL = 1e-5
OMEGA_COCHAIN_TOL = 1e-8
OMEGA_CUTOFF = 30


def _outcome(name: str, worst: float, tolerance: float, samples: int, message: str, **details) -> CheckOutcome:
    passed = worst <= tolerance
    return CheckOutcome(
        name=name,
        status="pass" if passed else "fail",
        worst_margin=float(worst),
        samples=samples,
        message="" if passed else message,
        details={"tolerance": tolerance, **details},
    )


def _skip(name: str, message: str) -> CheckOutcome:
    return CheckOutcome(name=name, status="skip", message=message)


def _failure(name: str, exc: Exception) -> CheckOutcome:
    return CheckOutcome(name=name, status="fail", message=f"{type(exc).__name__}: {exc}")


# ─── Individual checks ────────────────────────────────────────


def check_clifford_relations(n_halves: list[int]) -> CheckOutcome:
    """c_i c_j + c_j c_i = 2 delta_ij, cHat_i cHat_j + cHat_j cHat_i = -2 delta_ij, and c_i cHat_j = -cHat_j c_i."""
    worst, samples = 0.0, 0
    for n_half in n_halves:
        alg = clifford_basis(n_half)
        identity = np.eye(alg.dim)
        m = alg.ambient_dim
        left = [left_mult_matrix(alg, i) for i in range(1, m + 1)]
        right = [twisted_right_mult_matrix(alg, i) for i in range(1, m + 1)]
        for i in range(m):
            for j in range(m):
                target = 2.0 * identity if i == j else 0.0 * identity
                worst = max(
                    worst,
                    float(np.max(np.abs(left[i] @ left[j] + left[j] @ left[i] - target))),
                    float(np.max(np.abs(right[i] @ right[j] + right[j] @ right[i] + target))),
                    float(np.max(np.abs(left[i] @ right[j] + right[j] @ left[i]))),
                )
                samples += 1
    return _outcome(
        "clifford-relations", worst, CLIFFORD_TOL, samples,
        "Clifford multiplication tables violate the anticommutation relations",
        n_half=list(n_halves),
    )


def check_projection(a: SymbolField, samples: int, seed: int) -> CheckOutcome:
    """e^2 = e and e* = e for the graph projection at random points."""
    rng = np.random.default_rng(seed)
    radii = rng.exponential(scale=3.0, size=(samples, 1))
    directions = rng.standard_normal((samples, a.phase_dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    z = radii * directions
    P = ProjectionField(a, hat=False).projection(z)
    idempotency = np.linalg.norm(P @ P - P, axis=(1, 2))
    adjoint = np.linalg.norm(P - np.conj(np.swapaxes(P, -1, -2)), axis=(1, 2))
    worst = float(max(np.max(idempotency), np.max(adjoint)))
    return _outcome(
        "projection", worst, PROJECTION_TOL, samples,
        "graph projection is not a self-adjoint idempotent",
        idempotency=float(np.max(idempotency)),
        self_adjointness=float(np.max(adjoint)),
    )


def _sup_norm(points: np.ndarray) -> Callable:
    return lambda f: float(np.max(np.abs(f.evaluate(points))))


def check_epsilon_cocycle(tuples: int, seed: int, q: Optional[QuadratureConfig] = None) -> CheckOutcome:
    """b epsilon = 0 and cyclicity for g = 1 on R^1, on random Gaussian tuples."""
    identity = analyze_isometry(np.eye(1), description="identity")
    phi = EpsilonCocycle(identity, q or QuadratureConfig.from_settings(), check_invariance=False)
    rng = np.random.default_rng(seed)
    arity = phi.degree + 2
    arguments = [[random_test_function(rng, 1) for _ in range(arity)] for _ in range(tuples)]
    grid = np.stack(np.meshgrid(np.linspace(-3, 3, 25), np.linspace(-3, 3, 25)), axis=-1).reshape(-1, 2)
    report = cochain_b_and_cyclicity_check(phi, arguments, multiply=lambda f, h: f * h, norm=_sup_norm(grid))
    worst = max(report.max_relative_coboundary, report.max_relative_cyclic_defect)
    return _outcome(
        "epsilon-cocycle", worst, EPSILON_COCHAIN_TOL, tuples,
        "symbol-side cocycle fails the coboundary or cyclicity identity",
        max_coboundary=report.max_coboundary,
        max_cyclic_defect=report.max_cyclic_defect,
    )


def check_omega_cocycle(tuples: int, seed: int, hbar: float, N: int) -> CheckOutcome:
    """b omega = 0 and cyclicity for g = 1 on R^1, on random rho_hbar operators."""
    identity = analyze_isometry(np.eye(1), description="identity")
    phi = OmegaCocycle(identity)
    basis = HermiteBasisConfig.from_settings(1, N)
    rng = np.random.default_rng(seed)
    arity = phi.degree + 2
    arguments = [
        [rho_hbar(random_test_function(rng, 1), hbar, basis) for _ in range(arity)]
        for _ in range(tuples)
    ]
    report = cochain_b_and_cyclicity_check(phi, arguments)
    worst = max(report.max_relative_coboundary, report.max_relative_cyclic_defect)
    return _outcome(
        "omega-cocycle", worst, OMEGA_COCHAIN_TOL, tuples,
        "operator-side cocycle fails the coboundary or cyclicity identity",
        hbar=hbar,
        N=N,
        max_coboundary=report.max_coboundary,
        max_cyclic_defect=report.max_cyclic_defect,
    )


# ─── Battery ──────────────────────────────────────────────────


def _resolve_action(manifest: RunManifest, a: SymbolField, base_dir: Path) -> IsometryAction:
    text = manifest.g or "identity"
    if ":" not in text and text != "identity" and not Path(text).is_absolute():
        text = str(base_dir / text)
    g, description = parse_group_element(text, n=a.n)
    analyze_isometry(g, description=description)
    rep_v, rep_w = a.representations(g)
    return analyze_isometry(g, rep_v, rep_w, description=description)


def run_verification(manifest: RunManifest, base_dir: Optional[Path] = None) -> VerifyReport:
    """
    Run every check named by the manifest and collect the outcomes.

    Checks never raise on a failed property; the outcome carries the reason.
    Problems with the inputs themselves (a missing symbol file) still raise.
    """
    base_dir = base_dir or Path.cwd()
    seed = settings.SEED if manifest.seed is None else manifest.seed
    a = resolve_symbol(manifest.symbol or "bott-dirac:1", base_dir)
    checks: list[CheckOutcome] = [check_clifford_relations(manifest.clifford_n_half)]

    try:
        A = _resolve_action(manifest, a, base_dir)
        checks.append(
            CheckOutcome(
                name="isometry",
                status="pass",
                samples=1,
                details={"n_g": A.n_g, "det_normal": A.det_normal, "description": A.description},
            )
        )
    except EquivixError as exc:
        A = None
        checks.append(_failure("isometry", exc))

    checks.append(check_projection(a, manifest.projection_samples, seed))

    samples = SamplingConfig.from_settings(seed=seed)
    if a.is_square:
        checks.append(ellipticity_check(a, manifest.ellipticity.C, manifest.ellipticity.R, samples))
    else:
        checks.append(_skip("ellipticity", f"symbol is {a.dim_w}x{a.dim_v}"))

    if A is None:
        checks.append(_skip("equivariance", "no valid group element"))
    else:
        checks.append(equivariance_check(a, A))

    checks.append(order_check(a, samples))

    checks.append(check_epsilon_cocycle(manifest.cocycle_tuples, seed))
    checks.append(
        check_omega_cocycle(manifest.cocycle_tuples, seed, manifest.basis.hbar, manifest.basis.N or OMEGA_CUTOFF)
    )

    report = VerifyReport(seed=seed, checks=checks, defaults=settings.defaults_snapshot())
    for check in report.checks:
        if check.status == "fail":
            logger.error(f"check {check.name} failed: {check.message}")
        else:
            logger.info(f"check {check.name}: {check.status}")
    return report
