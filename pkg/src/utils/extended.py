"""Extended-real arithmetic on [0, +inf] penalties.

Penalties are plain floats with ``math.inf`` standing for +inf. The only rule
that differs from IEEE arithmetic is ``0 * inf = 0``.
"""
from __future__ import annotations
import math
from typing import Iterable


INF = math.inf


def ext_mul(a: float, b: float) -> float:
    if (a == 0.0 and math.isinf(b)) or (b == 0.0 and math.isinf(a)):
        return 0.0
    return a * b


def ext_add(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
        raise ValueError("inf - inf is undefined")
    return a + b


def ext_min(values: Iterable[float]) -> float:
    best = INF
    for v in values:
        if v < best:
            best = v
    return best


def is_finite(x: float) -> bool:
    return math.isfinite(x)
