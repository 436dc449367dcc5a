from typing import Optional

from pydantic import BaseModel


class ConvergenceRow(BaseModel):
    hbar: float
    N: int
    lhs: complex
    target: complex
    abs_err: float
    rel_err: float
    seconds: float
    warning: Optional[str] = None
