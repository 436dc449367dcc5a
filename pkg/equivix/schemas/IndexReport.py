from typing import Any, Optional

from pydantic import BaseModel, Field


class RefinementRow(BaseModel):
    level: int
    nodes: int
    value_re: float
    value_im: float
    difference: Optional[float] = None


class IndexReport(BaseModel):
    method: str
    symbol: str
    g_description: str
    n_g: int
    det_normal: float
    value_re: float
    value_im: float
    error_estimate: float
    evaluations: int
    seconds: float
    converged: bool
    nearest_integer: int
    refinement: list[RefinementRow] = Field(default_factory=list)
    defaults: dict[str, Any] = Field(default_factory=dict)
