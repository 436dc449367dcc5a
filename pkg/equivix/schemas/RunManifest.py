from typing import Literal, Optional

from pydantic import BaseModel, Field


class QuadratureOverrides(BaseModel):
    nodes: Optional[int] = Field(default=None, ge=8)
    levels: Optional[int] = Field(default=None, ge=1)
    abs_tol: Optional[float] = Field(default=None, gt=0)
    rel_tol: Optional[float] = Field(default=None, gt=0)
    cell_size: Optional[int] = Field(default=None, ge=64)


class BasisOverrides(BaseModel):
    N: Optional[int] = Field(default=None, ge=4)
    hbar: float = Field(default=0.5, gt=0, le=1)
    quad_nodes: Optional[int] = Field(default=None, ge=8)


class EllipticitySpec(BaseModel):
    C: float = Field(default=1.0, gt=0)
    R: float = Field(default=1.0, gt=0)


class RunManifest(BaseModel):
    """
    Everything one CLI run needs. Command-line flags override these fields;
    relative paths resolve against the manifest's directory.
    """

    command: Optional[Literal["index", "verify", "converge"]] = None
    symbol: Optional[str] = None
    g: Optional[str] = None
    method: Literal["auto", "integral", "fixed-point"] = "auto"
    experiment: Optional[str] = None
    out: Optional[str] = None
    table: Optional[str] = None
    seed: Optional[int] = None
    tol: Optional[float] = Field(default=None, gt=0)
    nodes: Optional[int] = Field(default=None, ge=8)
    quadrature: QuadratureOverrides = Field(default_factory=QuadratureOverrides)
    basis: BasisOverrides = Field(default_factory=BasisOverrides)
    ellipticity: EllipticitySpec = Field(default_factory=EllipticitySpec)
    clifford_n_half: list[int] = Field(default_factory=lambda: [1, 2])
    projection_samples: int = Field(default=1000, ge=1)
    cocycle_tuples: int = Field(default=20, ge=1)
