# equivix/__init__.py
"""Numerical equivariant index theory for invariant elliptic symbols on R^n."""

from equivix.chern_index import equivariant_index_integral, fixed_point_index
from equivix.isometry import analyze_isometry
from equivix.symbols import bott_dirac_symbol, oscillator_symbol

__version__ = "0.1.0"

__all__ = [
    "analyze_isometry",
    "bott_dirac_symbol",
    "equivariant_index_integral",
    "fixed_point_index",
    "oscillator_symbol",
]
