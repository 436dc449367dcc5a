from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from equivix.schemas.ComplexValue import ComplexValue


class FactorSpec(BaseModel):
    """One coordinate factor x^a xi^b exp(-alpha (x-c)^2 - beta (xi-d)^2)."""

    x_power: int = Field(default=0, ge=0)
    xi_power: int = Field(default=0, ge=0)
    x_decay: float = Field(default=1.0, gt=0)
    xi_decay: float = Field(default=1.0, gt=0)
    x_center: float = 0.0
    xi_center: float = 0.0


class TermSpec(BaseModel):
    coefficient: ComplexValue = 1.0
    factors: list[FactorSpec]


class FunctionSpec(BaseModel):
    name: Optional[str] = None
    terms: list[TermSpec] = Field(default_factory=list)


class ExperimentFile(BaseModel):
    """
    A semiclassical run: one row per (hbar, N) pair.

    kind:
        limit          omega_g of the rho_hbar images against epsilon_g
        isolated-limit the n_g = 0 variant against f(0,0)/det(g-1)
        trace-formula  Tr(rho_hbar(f) g) against the fixed-point integral
    """

    name: Optional[str] = None
    kind: Literal["limit", "isolated-limit", "trace-formula"]
    n: int = Field(ge=1, le=2)
    g: str = "identity"
    functions: list[FunctionSpec] = Field(min_length=1)
    hbar: list[float] = Field(min_length=1)
    cutoffs: Optional[list[int]] = None
    schedule_constant: Optional[float] = Field(default=None, gt=0)
    tolerance: float = Field(default=0.05, gt=0)
    average: bool = False

    @model_validator(mode="after")
    def _check_schedule(self) -> "ExperimentFile":
        if any(h <= 0 or h > 1 for h in self.hbar):
            raise ValueError("hbar values must lie in (0, 1]")
        if self.cutoffs is not None and len(self.cutoffs) != len(self.hbar):
            raise ValueError("cutoffs must have one entry per hbar value")
        for function in self.functions:
            for term in function.terms:
                if len(term.factors) != self.n:
                    raise ValueError(f"every term needs {self.n} factors")
        return self
