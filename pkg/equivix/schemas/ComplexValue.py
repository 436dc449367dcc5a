from typing import Annotated, Any

from pydantic import BeforeValidator, PlainSerializer


def _to_complex(value: Any) -> complex:
    """Accept a number or a ``[re, im]`` pair."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"expected a number or [re, im], got {value!r}")


ComplexValue = Annotated[
    complex,
    BeforeValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
]
