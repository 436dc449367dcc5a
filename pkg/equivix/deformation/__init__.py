# deformation/__init__.py

from .cocycles import (
    OmegaCocycle,
    cochain_b_and_cyclicity_check,
    g_average,
    idempotent_trace_pairing,
    omega_g,
)
from .experiments import (
    ConvergenceTable,
    equivariant_trace_formula,
    isolated_limit_experiment,
    semiclassical_limit_experiment,
    trace_formula_table,
)
from .gaussians import GaussianFactor, TestFunction
from .hermite import HermiteBasisConfig, group_rep_matrix, ladder_matrices, truncation_edge_energy
from .operators import DeformedOperator, derivation_delta, rho_hbar, rho_hbar_transform, star_H

__all__ = [
    "ConvergenceTable",
    "DeformedOperator",
    "GaussianFactor",
    "HermiteBasisConfig",
    "OmegaCocycle",
    "TestFunction",
    "cochain_b_and_cyclicity_check",
    "derivation_delta",
    "equivariant_trace_formula",
    "g_average",
    "group_rep_matrix",
    "idempotent_trace_pairing",
    "isolated_limit_experiment",
    "ladder_matrices",
    "omega_g",
    "rho_hbar",
    "rho_hbar_transform",
    "semiclassical_limit_experiment",
    "star_H",
    "trace_formula_table",
    "truncation_edge_energy",
]
