"""Bracketed golden-section maximization of a concave function of one variable."""
from __future__ import annotations
from dataclasses import dataclass
from typing import Callable, Tuple
import math

import config
from utils.errors import ConvergenceError


# Golden ratio constant
PHI = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class DualOptimum:
    eta: float
    value: float
    iterations: int
    bracket: Tuple[float, float]


def expand_bracket(
    g: Callable[[float], float],
    a: float,
    b: float,
    max_doublings: int = config.BRACKET_MAX_DOUBLINGS,
) -> Tuple[float, float]:
    """Widen [a, b] until its midpoint is at least as high as both ends.

    For a concave g that test guarantees the maximizer lies in [a, b]. Each
    failing side is pushed out by the current width, so the width doubles.
    """
    for _ in range(max_doublings + 1):
        m = 0.5 * (a + b)
        ga, gm, gb = g(a), g(m), g(b)
        left_ok = gm >= ga
        right_ok = gm >= gb
        if left_ok and right_ok:
            return a, b
        width = b - a
        if not left_ok:
            a -= width
        if not right_ok:
            b += width
    raise ConvergenceError(
        f"could not bracket the dual maximizer after {max_doublings} doublings (last bracket [{a:g}, {b:g}])"
    )


def golden_section_maximize(
    g: Callable[[float], float],
    a: float,
    b: float,
    tol: float = config.GOLDEN_TOL,
    max_iter: int = config.GOLDEN_MAX_ITER,
) -> DualOptimum:
    """Derivative-free 1D maximization via golden section search on [a, b]."""
    lo, hi = a, b
    c = b - (b - a) / PHI
    d = a + (b - a) / PHI
    fc = g(c)
    fd = g(d)

    it = 0
    while abs(b - a) > tol and it < max_iter:
        it += 1
        if fc < fd:  # Maximizing, so move toward higher value
            a = c
            c = d
            fc = fd
            d = a + (b - a) / PHI
            fd = g(d)
        else:
            b = d
            d = c
            fd = fc
            c = b - (b - a) / PHI
            fc = g(c)

    # Best of the final evaluation points; the midpoint alone can sit below a flat top.
    candidates = [(fc, c), (fd, d)]
    mid = 0.5 * (a + b)
    candidates.append((g(mid), mid))
    value, eta = max(candidates)
    return DualOptimum(eta=eta, value=value, iterations=it, bracket=(lo, hi))


def maximize_concave(
    g: Callable[[float], float],
    a: float,
    b: float,
) -> DualOptimum:
    lo, hi = expand_bracket(g, a, b)
    return golden_section_maximize(g, lo, hi)
