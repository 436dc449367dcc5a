from typing import Optional

from pydantic import BaseModel, Field, model_validator

from equivix.schemas.ComplexValue import ComplexValue


class SymbolTerm(BaseModel):
    coefficient: ComplexValue
    powers: list[int] = Field(
        description="Exponents of (x_1..x_n, xi_1..xi_n); length 2n."
    )


class SymbolEntry(BaseModel):
    row: int = Field(ge=0)
    col: int = Field(ge=0)
    terms: list[SymbolTerm] = Field(default_factory=list)


class SymbolFile(BaseModel):
    """
    Polynomial matrix symbol a(x, xi): dim_w x dim_v entries, each a sum of
    monomials coefficient * x^p xi^q. Entries not listed are zero.
    """

    name: Optional[str] = None
    n: int = Field(ge=1)
    dim_v: int = Field(ge=1)
    dim_w: int = Field(ge=1)
    order: float
    entries: list[SymbolEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_entries(self) -> "SymbolFile":
        for entry in self.entries:
            if entry.row >= self.dim_w or entry.col >= self.dim_v:
                raise ValueError(
                    f"entry ({entry.row}, {entry.col}) outside a {self.dim_w}x{self.dim_v} symbol"
                )
            for term in entry.terms:
                if len(term.powers) != 2 * self.n or min(term.powers, default=0) < 0:
                    raise ValueError(
                        f"powers {term.powers} must be {2 * self.n} non-negative integers"
                    )
        return self
