# equivix/alternating.py
"""
Multilinear helpers shared by the symbol-side and operator-side cocycles.
"""

from typing import Any, Callable, Sequence

import numpy as np


def alternating_product(partials: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """
    sum over permutations s of sgn(s) * partials[0][s(0)] @ ... @ partials[m-1][s(m-1)].

    ``partials[slot][mu]`` is the derivative of the slot's argument along
    direction mu; arrays may carry leading batch axes. Built over subsets of
    used directions, which costs m 2^(m-1) products instead of m! m.
    """
    m = len(partials)
    if m == 0:
        raise ValueError("need at least one slot")
    layer: dict[int, np.ndarray] = {1 << mu: partials[0][mu] for mu in range(m)}
    for slot in range(1, m):
        following: dict[int, np.ndarray] = {}
        for mask, product in layer.items():
            for mu in range(m):
                bit = 1 << mu
                if mask & bit:
                    continue
                # inversions added by placing mu after the directions in mask
                sign = -1.0 if bin(mask >> (mu + 1)).count("1") % 2 else 1.0
                term = sign * (product @ partials[slot][mu])
                key = mask | bit
                following[key] = following[key] + term if key in following else term
        layer = following
    return layer[(1 << m) - 1]


def twisted_trace(G: np.ndarray, f0: np.ndarray, rest: np.ndarray) -> np.ndarray:
    """tr(G f0 rest) over the trailing two axes."""
    return np.einsum("...ij,...ji->...", G @ f0, rest)


def hochschild_coboundary(
    phi: Callable[..., complex],
    arguments: Sequence[Any],
    multiply: Callable[[Any, Any], Any],
) -> complex:
    """
    (b phi)(a_0, ..., a_{m+1}) = sum_i (-1)^i phi(.., a_i a_{i+1}, ..)
                                 + (-1)^{m+1} phi(a_{m+1} a_0, a_1, .., a_m).
    """
    args = list(arguments)
    last = len(args) - 1
    total = 0j
    for i in range(last):
        merged = args[:i] + [multiply(args[i], args[i + 1])] + args[i + 2:]
        total += (-1) ** i * phi(*merged)
    wrapped = [multiply(args[last], args[0])] + args[1:last]
    total += (-1) ** last * phi(*wrapped)
    return complex(total)


def cyclic_defect(phi: Callable[..., complex], arguments: Sequence[Any]) -> complex:
    """phi(a_0, .., a_m) - (-1)^m phi(a_m, a_0, .., a_{m-1})."""
    args = list(arguments)
    m = len(args) - 1
    return complex(phi(*args) - (-1) ** m * phi(args[m], *args[:m]))
