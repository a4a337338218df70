"""Brute-force primal evaluation of min_p {E_p[u] + lam * D_phi(p||q)}.

Independent of the dual machinery: it only evaluates the primal objective on
grids over the simplex restricted to supp(q). Grids are refined around the best
point found so far until their step equals the requested resolution. Every
returned value is the objective at a feasible p, hence an upper bound on the
true minimum.
"""
from __future__ import annotations
import itertools

import numpy as np

import config
from divergences.divergence import DivergenceSpec
from model_space.model_space import Act, Model, certainty_equivalent_utility, require_same_space
from utils.errors import DomainError
from utils.logging import get_logger


logger = get_logger('oracle')

_COARSE_STEP = 0.02
_REFINE_FACTOR = 8
_ZOOM_CELLS = 4
_MAX_RECENTER = 50


def _objective(P: np.ndarray, u: np.ndarray, q: np.ndarray, spec: DivergenceSpec) -> np.ndarray:
    """Row-wise E_p[u] + lam * D_phi(p||q) for p in the support of q."""
    lam = float(spec.lam)
    t = P / q
    return P @ u + lam * np.sum(q * spec.phi(t), axis=1)


def _grid(center: np.ndarray, half_width: float, step: float) -> np.ndarray:
    """Points of a box grid around `center` with x >= 0 and sum(x) <= 1 + d*step.

    Points past the face sum(x) = 1 are rescaled onto it by the caller.
    """
    d = center.shape[0]
    k = int(round(half_width / step))
    axes = []
    for c in center:
        lo = max(0.0, c - k * step)
        axes.append(np.arange(lo, c + (k + 0.5) * step, step))
    pts = np.array(list(itertools.product(*axes))) if d > 1 else axes[0].reshape(-1, 1)
    pts = pts[np.all(pts >= 0.0, axis=1) & (pts.sum(axis=1) <= 1.0 + d * step)]
    return pts


def primal_oracle(act: Act, q: Model, spec: DivergenceSpec, resolution: float) -> float:
    require_same_space(act, q)
    if act.n > config.ORACLE_MAX_STATES:
        raise DomainError(f"primal oracle supports at most {config.ORACLE_MAX_STATES} states, got {act.n}")
    lo, hi = config.ORACLE_RESOLUTION_RANGE
    if not lo <= resolution <= hi:
        raise DomainError(f"resolution must lie in [{lo:g}, {hi:g}], got {resolution:g}")
    if spec.is_neutral:
        return certainty_equivalent_utility(act, q)

    mask = q.weights > 0
    u = act.utils[mask]
    qs = q.weights[mask]
    if qs.size == 1:
        return float(u[0])
    d = qs.size - 1

    def evaluate(X: np.ndarray) -> np.ndarray:
        last = np.clip(1.0 - X.sum(axis=1, keepdims=True), 0.0, None)
        P = np.hstack([X, last])
        P = P / P.sum(axis=1, keepdims=True)
        return _objective(P, u, qs, spec)

    # p = q is always feasible and carries no penalty
    best_x = qs[:-1].copy()
    best = float(evaluate(best_x.reshape(1, -1))[0])

    step = max(_COARSE_STEP, resolution)
    pts = _grid(np.full(d, 0.5), 0.5 + step, step)
    vals = evaluate(pts)
    i = int(np.argmin(vals))
    if vals[i] < best:
        best_x, best = pts[i], float(vals[i])

    while step > resolution:
        new_step = max(step / _REFINE_FACTOR, resolution)
        half_width = _ZOOM_CELLS * step
        for _ in range(_MAX_RECENTER):
            pts = _grid(best_x, half_width, new_step)
            vals = evaluate(pts)
            i = int(np.argmin(vals))
            if not vals[i] < best:
                break
            moved = float(np.max(np.abs(pts[i] - best_x)))
            best_x, best = pts[i], float(vals[i])
            # an interior minimum of the window ends the level
            if moved < half_width - 0.5 * new_step:
                break
        step = new_step

    logger.debug(f"{act.name}: primal grid minimum {best:.12g} at resolution {resolution:g}")
    return best
