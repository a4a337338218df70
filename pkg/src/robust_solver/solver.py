from __future__ import annotations
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

import config
from divergences.divergence import (
    DivergenceSpec, Lambda, lambda_order, parse_lambda,
)
from divergences.phi import PhiFunction, PhiKind
from model_space.model_space import (
    Act, HullMode, Model, ModelSet, certainty_equivalent_utility, require_same_space,
)
from robust_solver.dual import maximize_concave
from utils.errors import DomainError
from utils.logging import get_logger
from utils.parallel import ordered_map
from utils.simplex import minimize_on_simplex


logger = get_logger('solver')


class Method(str, Enum):
    ENTROPIC_CLOSED_FORM = "entropic_closed_form"
    GINI_CLOSED_FORM = "gini_closed_form"
    GENERIC_DUAL = "generic_dual"
    PRIMAL_GRID = "primal_grid"
    MAXMIN = "maxmin"


@dataclass(frozen=True)
class EvaluationResult:
    """V together with the models that attain it.

    `binding_model_index` points into Q; `worst_case_model` is the inner
    minimizer p* when it could be recovered.
    """
    value: float
    binding_model_index: int
    worst_case_model: Optional[Model]
    method: Method
    mixture_weights: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class _Multiplier:
    value: float
    worst_case: Optional[np.ndarray]
    method: Method
    eta: float  # dual maximizer, on the eta scale of the dual formula


def _entropic(u: np.ndarray, q: np.ndarray, lam: float) -> _Multiplier:
    mask = q > 0
    a = -u[mask] / lam
    # logsumexp shifts by max(a) before exponentiating
    lse = float(logsumexp(a, b=q[mask]))
    p = np.zeros_like(q)
    p[mask] = q[mask] * np.exp(a - lse)
    return _Multiplier(-lam * lse, p, Method.ENTROPIC_CLOSED_FORM, -lse)


def _gini_closed_form(u: np.ndarray, q: np.ndarray, lam: float) -> Optional[_Multiplier]:
    """E_q[u] - Var_q(u)/(2 lam), valid when the mean-variance tilt stays positive."""
    mask = q > 0
    mean = float(q @ u)
    centered = u - mean
    tilt = q * (1.0 - centered / lam)
    if not np.all(tilt[mask] > 0):
        return None
    var = float(q @ (centered * centered))
    p = np.where(mask, tilt, 0.0)
    return _Multiplier(mean - var / (2.0 * lam), p, Method.GINI_CLOSED_FORM, mean / lam)


def _generic_dual(u: np.ndarray, q: np.ndarray, lam: float, phi: PhiFunction) -> _Multiplier:
    """lam * sup_eta {eta - sum_s q_s phi*(eta - u_s/lam)} over the support of q."""
    mask = q > 0
    qm = q[mask]
    scaled = u[mask] / lam

    def g(eta: float) -> float:
        return float(eta - np.sum(qm * phi.conjugate(eta - scaled)))

    opt = maximize_concave(g, float(scaled.min()) - 1.0, float(scaled.max()) + 1.0)
    p = np.zeros_like(q)
    p[mask] = qm * phi.conjugate_prime(opt.eta - scaled)
    total = float(p.sum())
    if abs(total - 1.0) <= config.RECOVERY_TOL and total > 0:
        worst = p / total
    else:
        logger.warning(f"worst-case model not recoverable (mass {total:.9g}); reporting value only")
        worst = None
    return _Multiplier(lam * opt.value, worst, Method.GENERIC_DUAL, opt.eta)


def _multiplier(u: np.ndarray, q: np.ndarray, spec: DivergenceSpec, prefer_closed_form: bool) -> _Multiplier:
    lam = float(spec.lam)
    kind = spec.phi.kind
    if prefer_closed_form and kind is PhiKind.RELATIVE_ENTROPY:
        return _entropic(u, q, lam)
    if prefer_closed_form and kind is PhiKind.GINI:
        closed = _gini_closed_form(u, q, lam)
        if closed is not None:
            return closed
    return _generic_dual(u, q, lam, spec.phi)


def multiplier_value(
    act: Act,
    q: Model,
    spec: DivergenceSpec,
    prefer_closed_form: bool = True,
) -> EvaluationResult:
    """V_{lam,q}(f) = min_p {E_p[u(f)] + lam * D_phi(p||q)} for a single reference model."""
    require_same_space(act, q)
    if spec.is_neutral:
        return EvaluationResult(certainty_equivalent_utility(act, q), 0, q, Method.MAXMIN)
    if not float(spec.lam) > 0:
        raise DomainError(f"lambda must be > 0, got {spec.lam!r}")

    core = _multiplier(act.utils, q.weights, spec, prefer_closed_form)
    worst = Model(core.worst_case, q.space) if core.worst_case is not None else None
    return EvaluationResult(core.value, 0, worst, core.method)


def maxmin_value(act: Act, Q: ModelSet) -> EvaluationResult:
    """min_{q in Q} E_q[u(f)]; the hull adds nothing to a linear objective."""
    require_same_space(act, Q[0])
    values = [certainty_equivalent_utility(act, q) for q in Q]
    best = int(np.argmin(values))
    return EvaluationResult(values[best], best, Q[best], Method.MAXMIN)


def _hull_gradient(u: np.ndarray, q: np.ndarray, spec: DivergenceSpec, prefer: bool) -> np.ndarray:
    """Danskin gradient of q -> V_{lam,q}: -lam * phi*(eta* - u/lam), all states."""
    lam = float(spec.lam)
    core = _multiplier(u, q, spec, prefer)
    return -lam * spec.phi.conjugate(core.eta - u / lam)


def criterion_value(
    act: Act,
    Q: ModelSet,
    spec: DivergenceSpec,
    prefer_closed_form: bool = True,
) -> EvaluationResult:
    """V(f) = min_{q in Q} V_{lam,q}(f), exchanging the two minimizations."""
    require_same_space(act, Q[0])
    if spec.is_neutral:
        return maxmin_value(act, Q)

    results = ordered_map(lambda q: multiplier_value(act, q, spec, prefer_closed_form), Q.models)
    values = [r.value for r in results]
    best = int(np.argmin(values))  # lowest index on ties
    vertex = replace(results[best], binding_model_index=best)
    if Q.hull_mode is HullMode.EXTREME_POINTS_ONLY or len(Q) == 1:
        return vertex

    mat = Q.matrix
    k = len(Q)
    u = act.utils

    def objective(w):
        return _multiplier(u, w @ mat, spec, prefer_closed_form).value

    def gradient(w):
        return mat @ _hull_gradient(u, w @ mat, spec, prefer_closed_form)

    res = minimize_on_simplex(objective, gradient, np.eye(k)[best])
    if not res.value < vertex.value:
        return replace(vertex, mixture_weights=tuple(float(x) for x in np.eye(k)[best]))

    mixed = Model(res.weights @ mat, Q.space)
    inner = multiplier_value(act, mixed, spec, prefer_closed_form)
    logger.debug(f"{act.name}: hull improves {vertex.value:.12g} -> {inner.value:.12g}")
    return EvaluationResult(
        value=inner.value,
        binding_model_index=int(np.argmax(res.weights)),
        worst_case_model=inner.worst_case_model,
        method=inner.method,
        mixture_weights=tuple(float(x) for x in res.weights),
    )


def lambda_sweep(
    act: Act,
    Q: ModelSet,
    phi: PhiFunction,
    lambdas: Sequence[Lambda],
) -> List[Tuple[Lambda, float]]:
    """Criterion values along ascending lambdas; the inf entry is the max-min value."""
    if not lambdas:
        raise DomainError("lambda sweep needs at least one lambda")
    parsed = [parse_lambda(lam) for lam in lambdas]
    order = [lambda_order(lam) for lam in parsed]
    if any(b <= a for a, b in zip(order, order[1:])):
        raise DomainError(f"lambdas must be strictly ascending, got {parsed}")

    values = ordered_map(lambda lam: criterion_value(act, Q, DivergenceSpec(phi, lam)).value, parsed)
    sweep = list(zip(parsed, values))
    for (l1, v1), (l2, v2) in zip(sweep, sweep[1:]):
        if v2 < v1 - 1e-12:
            logger.warning(f"sweep not monotone between lambda={l1!r} ({v1:.12g}) and {l2!r} ({v2:.12g})")
    return sweep
