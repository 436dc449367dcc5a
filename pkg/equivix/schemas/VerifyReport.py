from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class CheckOutcome(BaseModel):
    name: str
    status: Literal["pass", "fail", "skip"]
    worst_margin: Optional[float] = None
    samples: int = 0
    message: str = ""
    details: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"


class VerifyReport(BaseModel):
    seed: int
    checks: list[CheckOutcome]
    defaults: dict[str, Any] = Field(default_factory=dict)

    @property
    def failed(self) -> list[str]:
        return [check.name for check in self.checks if check.status == "fail"]

    @property
    def all_passed(self) -> bool:
        return not self.failed
