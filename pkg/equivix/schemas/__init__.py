# schemas/__init__.py

from .ComplexValue import ComplexValue
from .ConvergenceRow import ConvergenceRow
from .ExperimentFile import ExperimentFile, FactorSpec, FunctionSpec, TermSpec
from .GroupElementFile import GroupElementFile
from .IndexReport import IndexReport, RefinementRow
from .RunManifest import BasisOverrides, EllipticitySpec, QuadratureOverrides, RunManifest
from .SymbolFile import SymbolEntry, SymbolFile, SymbolTerm
from .VerifyReport import CheckOutcome, VerifyReport

__all__ = [
    "BasisOverrides",
    "CheckOutcome",
    "ComplexValue",
    "ConvergenceRow",
    "EllipticitySpec",
    "ExperimentFile",
    "FactorSpec",
    "FunctionSpec",
    "GroupElementFile",
    "IndexReport",
    "QuadratureOverrides",
    "RefinementRow",
    "RunManifest",
    "SymbolEntry",
    "SymbolFile",
    "SymbolTerm",
    "TermSpec",
    "VerifyReport",
]
