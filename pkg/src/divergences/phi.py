from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import xlogy

import config
from utils.errors import DomainError
from utils.logging import get_logger


logger = get_logger('divergences')

ArrayFn = Callable[[np.ndarray], np.ndarray]


class PhiKind(str, Enum):
    RELATIVE_ENTROPY = "relative_entropy"
    GINI = "gini"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PhiFunction:
    """A convex generator phi of a phi-divergence together with its conjugate.

    All callables are vectorized over numpy arrays. phi is +inf for t < 0, so
    phi_conjugate(y) = sup_{t >= 0} {t*y - phi(t)} is nondecreasing.
    `phi_derivative` is optional; it only speeds up convex_hull evaluations.
    """
    kind: PhiKind
    phi: ArrayFn
    phi_conjugate: ArrayFn
    conjugate_derivative: ArrayFn
    phi_derivative: Optional[ArrayFn] = None

    def __call__(self, t):
        return self.phi(np.asarray(t, dtype=float))

    def conjugate(self, y):
        return self.phi_conjugate(np.asarray(y, dtype=float))

    def conjugate_prime(self, y):
        return self.conjugate_derivative(np.asarray(y, dtype=float))

    def derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.phi_derivative is not None:
            return self.phi_derivative(t)
        h = 1e-6
        lo = np.maximum(t - h, 0.0)
        hi = t + h
        return (self.phi(hi) - self.phi(lo)) / (hi - lo)


@dataclass(frozen=True)
class ConjugateReport:
    kind: PhiKind
    max_deviation: float
    worst_y: float
    grid_size: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def _entropy_phi(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid='ignore'):
        val = xlogy(t, t) - t + 1.0
    return np.where(t < 0, np.inf, val)


def _entropy_phi_prime(t):
    with np.errstate(divide='ignore'):
        return np.log(np.asarray(t, dtype=float))


def _gini_phi(t):
    t = np.asarray(t, dtype=float)
    return np.where(t < 0, np.inf, 0.5 * (t - 1.0) ** 2)


def _gini_conjugate(y):
    y = np.asarray(y, dtype=float)
    return np.where(y >= -1.0, y + 0.5 * y * y, -0.5)


def _gini_conjugate_prime(y):
    return np.maximum(1.0 + np.asarray(y, dtype=float), 0.0)


def default_conjugate_grid() -> np.ndarray:
    lo, hi, n = config.CONJUGATE_Y_GRID
    return np.linspace(lo, hi, int(n))


def _grid_supremum(phi: PhiFunction, y: float) -> float:
    """max_t {t*y - phi(t)} on a step grid, widening [0, T] while the maximum sits on T."""
    t_max = config.CONJUGATE_T_MAX
    while True:
        ts = np.arange(0.0, t_max + 0.5 * config.CONJUGATE_T_STEP, config.CONJUGATE_T_STEP)
        phi_t = np.asarray(phi(ts), dtype=float)
        if not np.all(np.isfinite(phi_t)):
            raise DomainError(f"{phi.kind.value}: phi is not finite on [0, {t_max:g}]")
        values = ts * y - phi_t
        best = int(np.argmax(values))
        if best < ts.size - 1 or t_max >= config.CONJUGATE_T_CAP:
            return float(values[best])
        t_max *= 2.0


def conjugate_self_test(phi: PhiFunction, grid: Optional[Sequence[float]] = None) -> ConjugateReport:
    """Compare phi_conjugate against the grid supremum of t*y - phi(t) over t >= 0.

    The t-window starts at [0, 50] and doubles for any y whose maximizer lies past it.
    """
    ys = default_conjugate_grid() if grid is None else np.asarray(list(grid), dtype=float)
    if ys.size == 0 or not np.all(np.isfinite(ys)):
        raise DomainError("conjugate self test needs a finite, nonempty y grid")
    claimed = np.asarray(phi.conjugate(ys), dtype=float)
    if not np.all(np.isfinite(claimed)):
        raise DomainError(f"{phi.kind.value}: phi_conjugate is not finite on the y grid")

    deviations = np.array([abs(claimed[i] - _grid_supremum(phi, float(y))) for i, y in enumerate(ys)])
    worst = int(np.argmax(deviations))
    report = ConjugateReport(
        kind=phi.kind,
        max_deviation=float(deviations[worst]),
        worst_y=float(ys[worst]),
        grid_size=int(ys.size),
        tolerance=config.CONJUGATE_SELF_TEST_TOL,
    )
    logger.debug(f"{phi.kind.value}: conjugate deviation {report.max_deviation:.3e} at y={report.worst_y:g}")
    return report


def validate_phi(phi: PhiFunction, seed: int = 0) -> PhiFunction:
    """Build-time checks: phi(1)=0, spot convexity, conjugate self test, monotone conjugate."""
    if abs(float(phi(1.0))) > 1e-12:
        raise DomainError(f"{phi.kind.value}: phi(1) must be 0, got {float(phi(1.0))!r}")

    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 10.0, 200)
    b = rng.uniform(0.0, 10.0, 200)
    alpha = rng.uniform(0.0, 1.0, 200)
    lhs = phi(alpha * a + (1 - alpha) * b)
    rhs = alpha * phi(a) + (1 - alpha) * phi(b)
    if np.any(lhs > rhs + 1e-12):
        raise DomainError(f"{phi.kind.value}: phi fails the convexity spot check")

    report = conjugate_self_test(phi)
    if not report.passed:
        raise DomainError(
            f"{phi.kind.value}: conjugate deviates by {report.max_deviation:.3e} at y={report.worst_y:g}"
        )
    values = phi.conjugate(default_conjugate_grid())
    if np.any(np.diff(values) < -1e-12):
        raise DomainError(f"{phi.kind.value}: phi_conjugate must be nondecreasing")
    return phi


@lru_cache(maxsize=None)
def relative_entropy() -> PhiFunction:
    """phi(t) = t ln t - t + 1, phi*(y) = e^y - 1."""
    return validate_phi(PhiFunction(
        kind=PhiKind.RELATIVE_ENTROPY,
        phi=_entropy_phi,
        phi_conjugate=np.expm1,
        conjugate_derivative=np.exp,
        phi_derivative=_entropy_phi_prime,
    ))


@lru_cache(maxsize=None)
def gini() -> PhiFunction:
    """phi(t) = (t - 1)^2 / 2; the conjugate is clamped at -1/2 below y = -1."""
    return validate_phi(PhiFunction(
        kind=PhiKind.GINI,
        phi=_gini_phi,
        phi_conjugate=_gini_conjugate,
        conjugate_derivative=_gini_conjugate_prime,
        phi_derivative=lambda t: np.asarray(t, dtype=float) - 1.0,
    ))


def custom_phi(
    phi: ArrayFn,
    phi_conjugate: ArrayFn,
    conjugate_derivative: ArrayFn,
    phi_derivative: Optional[ArrayFn] = None,
) -> PhiFunction:
    """A user-supplied generator; rejected unless it passes validate_phi."""
    return validate_phi(PhiFunction(
        kind=PhiKind.CUSTOM,
        phi=phi,
        phi_conjugate=phi_conjugate,
        conjugate_derivative=conjugate_derivative,
        phi_derivative=phi_derivative,
    ))


def phi_by_kind(kind: str) -> PhiFunction:
    kind = PhiKind(kind)
    if kind is PhiKind.RELATIVE_ENTROPY:
        return relative_entropy()
    if kind is PhiKind.GINI:
        return gini()
    raise DomainError("custom phi functions are built with custom_phi(), not by name")
