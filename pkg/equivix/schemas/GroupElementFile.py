from typing import Optional

from pydantic import BaseModel, Field, field_validator


class GroupElementFile(BaseModel):
    matrix: list[list[float]] = Field(description="Row-major n x n orthogonal matrix.")
    description: Optional[str] = None

    @field_validator("matrix")
    @classmethod
    def _square(cls, value: list[list[float]]) -> list[list[float]]:
        if not value or any(len(row) != len(value) for row in value):
            raise ValueError("matrix must be square and non-empty")
        return value
