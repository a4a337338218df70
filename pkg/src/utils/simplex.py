"""Projected-gradient minimization over the probability simplex.

Used for every convex_hull evaluation: a mixture of structured models is
parametrized by its weight vector w, and the objectives handled here
(divergence to the mixture, multiplier value at the mixture) are convex in w.
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import Callable
import math

import numpy as np

import config
from utils.logging import get_logger


logger = get_logger('simplex')


@dataclass(frozen=True)
class SimplexResult:
    weights: np.ndarray
    value: float
    iterations: int
    converged: bool


def project_to_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = 1} (sort-based)."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    theta = css[cond][-1] / float(rho)
    w = np.maximum(y - theta, 0.0)
    return w / w.sum()


def minimize_on_simplex(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    w0: np.ndarray,
    tol: float = config.MIXTURE_TOL,
    max_iter: int = config.MIXTURE_MAX_ITER,
) -> SimplexResult:
    """Projected gradient with backtracking on the descent-lemma condition.

    Stops when the gradient mapping (w - w_new) / t of the accepted step is at
    most `tol` in sup norm, or when an accepted step no longer decreases the
    objective beyond rounding.
    Steps landing on +inf objective values are rejected by the backtracking, so
    the iterates stay in the finite region of the starting point.
    """
    w = project_to_simplex(w0)
    f = float(objective(w))
    if not math.isfinite(f):
        return SimplexResult(weights=w, value=f, iterations=0, converged=False)

    step = 1.0
    for it in range(1, max_iter + 1):
        g = np.asarray(gradient(w), dtype=float)
        if not np.all(np.isfinite(g)):
            logger.warning(f"Non-finite gradient at iteration {it}; stopping at current mixture")
            return SimplexResult(weights=w, value=f, iterations=it, converged=False)

        t = step
        while True:
            w_new = project_to_simplex(w - t * g)
            d = w_new - w
            f_new = float(objective(w_new))
            bound = f + float(g @ d) + float(d @ d) / (2.0 * t)
            if math.isfinite(f_new) and f_new <= bound + 1e-15 and f_new <= f + 1e-15:
                break
            t *= 0.5
            if t < 1e-30:
                return SimplexResult(weights=w, value=f, iterations=it, converged=True)

        mapping = float(np.max(np.abs(d))) / t if d.size else 0.0
        stalled = f - f_new <= 4.0 * np.finfo(float).eps * max(1.0, abs(f))
        if f_new <= f:
            w, f = w_new, f_new
        if mapping <= tol or stalled:
            return SimplexResult(weights=w, value=f, iterations=it, converged=True)
        step = min(t * 2.0, 1e12)

    logger.warning(f"Mixture optimizer hit the iteration cap ({max_iter}); value={f:.12g}")
    return SimplexResult(weights=w, value=f, iterations=max_iter, converged=False)
