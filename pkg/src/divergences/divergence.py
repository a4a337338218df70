from __future__ import annotations
from dataclasses import dataclass
from typing import Optional, Protocol, Tuple, Union
import math

import numpy as np
import pulp

import config
from divergences.phi import PhiFunction, gini, relative_entropy
from model_space.model_space import HullMode, Model, ModelSet, require_same_space
from utils.errors import DomainError
from utils.extended import INF, ext_mul
from utils.logging import get_logger
from utils.simplex import minimize_on_simplex


logger = get_logger('divergences')


class InfiniteLambda:
    """The lambda = +inf sentinel: the misspecification-neutral penalty delta_Q."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __float__(self) -> float:
        return math.inf

    def __reduce__(self):
        return (InfiniteLambda, ())


INF_LAMBDA = InfiniteLambda()

Lambda = Union[float, InfiniteLambda]


def parse_lambda(value) -> Lambda:
    """Accept a positive number, math.inf, or the string 'inf'."""
    if value is INF_LAMBDA:
        return INF_LAMBDA
    if isinstance(value, str):
        if value.strip().lower() == "inf":
            return INF_LAMBDA
        try:
            value = float(value)
        except ValueError:
            raise DomainError(f"lambda must be a positive number or 'inf', got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise DomainError(f"lambda must be a positive number or 'inf', got {value!r}")
    value = float(value)
    if math.isnan(value) or value <= 0:
        raise DomainError(f"lambda must be > 0, got {value!r}")
    if math.isinf(value):
        return INF_LAMBDA
    return value


def lambda_order(lam: Lambda) -> float:
    return math.inf if lam is INF_LAMBDA else float(lam)


@dataclass(frozen=True)
class DivergenceSpec:
    """The penalty c = lam * D_phi, or the indicator delta_Q when phi is None.

    phi=None and lam=INF_LAMBDA denote the same neutral index and evaluate
    identically everywhere.
    """
    phi: Optional[PhiFunction]
    lam: Lambda = INF_LAMBDA

    def __post_init__(self):
        lam = INF_LAMBDA if self.phi is None else parse_lambda(self.lam)
        object.__setattr__(self, 'lam', lam)

    @property
    def is_indicator(self) -> bool:
        return self.phi is None

    @property
    def is_neutral(self) -> bool:
        return self.phi is None or self.lam is INF_LAMBDA

    @property
    def kind(self) -> str:
        return "indicator" if self.phi is None else self.phi.kind.value

    def with_lambda(self, lam: Lambda) -> "DivergenceSpec":
        if self.phi is None:
            return self
        return DivergenceSpec(self.phi, lam)

    @classmethod
    def entropic(cls, lam: Lambda) -> "DivergenceSpec":
        return cls(relative_entropy(), lam)

    @classmethod
    def gini(cls, lam: Lambda) -> "DivergenceSpec":
        return cls(gini(), lam)

    @classmethod
    def indicator(cls) -> "DivergenceSpec":
        return cls(None)

    def __repr__(self) -> str:
        return f"DivergenceSpec({self.kind}, lambda={self.lam!r})"


@dataclass(frozen=True)
class IndexResult:
    value: float
    binding_index: Optional[int]
    mixture_weights: Optional[Tuple[float, ...]] = None


def divergence_weights(p: np.ndarray, q: np.ndarray, phi: PhiFunction) -> float:
    """D_phi(p||q) on raw weight vectors; +inf unless supp(p) is inside supp(q)."""
    pos = q > 0
    if np.any(p[~pos] > 0):
        return INF
    t = p[pos] / q[pos]
    return float(np.sum(q[pos] * phi(t)))


def phi_divergence(p: Model, q: Model, phi: PhiFunction) -> float:
    """D_phi(p||q) = sum_s q_s phi(p_s/q_s), with 0/0 = 0 and +inf off support."""
    require_same_space(p, q)
    return divergence_weights(p.weights, q.weights, phi)


def _divergence_gradient_in_q(p: np.ndarray, q: np.ndarray, phi: PhiFunction) -> np.ndarray:
    """d/dq_s of q_s phi(p_s/q_s) = phi(t) - t phi'(t), t = p_s/q_s (phi(0) where q_s = 0)."""
    grad = np.full(q.shape, float(phi(0.0)))
    pos = q > 0
    t = p[pos] / q[pos]
    with np.errstate(invalid='ignore', divide='ignore'):
        tprime = np.where(t > 0, t * phi.derivative(t), 0.0)
    grad[pos] = phi(t) - tprime
    return grad


def hull_residual(p: Model, Q: ModelSet) -> Tuple[float, np.ndarray]:
    """L1 distance from p to co(Q), solved as an LP with pulp/CBC."""
    require_same_space(p, Q[0])
    k, n = len(Q), Q.n
    mat = Q.matrix
    prob = pulp.LpProblem("HullMembership", pulp.LpMinimize)
    w = [pulp.LpVariable(f"w_{i}", lowBound=0) for i in range(k)]
    e_pos = [pulp.LpVariable(f"ep_{s}", lowBound=0) for s in range(n)]
    e_neg = [pulp.LpVariable(f"en_{s}", lowBound=0) for s in range(n)]

    prob += pulp.lpSum(e_pos) + pulp.lpSum(e_neg)
    prob += pulp.lpSum(w) == 1
    for s in range(n):
        prob += (pulp.lpSum(float(mat[i, s]) * w[i] for i in range(k)) - float(p.weights[s])
                 == e_pos[s] - e_neg[s])

    prob.solve(pulp.PULP_CBC_CMD(msg=False))
    weights = np.array([max(0.0, pulp.value(v) or 0.0) for v in w])
    total = weights.sum()
    weights = weights / total if total > 0 else np.full(k, 1.0 / k)
    residual = float(pulp.value(prob.objective) or 0.0)
    return residual, weights


def _neutral_index(p: Model, Q: ModelSet) -> IndexResult:
    i = Q.index_of(p, config.MEMBERSHIP_TOL)
    if i is not None:
        return IndexResult(0.0, i)
    if Q.hull_mode is HullMode.CONVEX_HULL and len(Q) > 1:
        residual, w = hull_residual(p, Q)
        if residual <= config.HULL_LP_TOL:
            return IndexResult(0.0, int(np.argmax(w)), tuple(float(x) for x in w))
    return IndexResult(INF, None)


def misspecification_argmin(p: Model, Q: ModelSet, spec: DivergenceSpec) -> IndexResult:
    """c_Q(p) = min_{q in Q} c(p, q) together with the binding structured model."""
    require_same_space(p, Q[0])
    if spec.is_neutral:
        return _neutral_index(p, Q)

    lam = float(spec.lam)
    values = [ext_mul(lam, divergence_weights(p.weights, q.weights, spec.phi)) for q in Q]
    best = int(np.argmin(values))  # first occurrence on ties
    if Q.hull_mode is HullMode.EXTREME_POINTS_ONLY or len(Q) == 1:
        return IndexResult(values[best], best if math.isfinite(values[best]) else None)

    mat = Q.matrix
    k = len(Q)
    if math.isfinite(values[best]):
        w0 = np.eye(k)[best]
    else:
        w0 = np.full(k, 1.0 / k)

    def objective(w):
        return divergence_weights(p.weights, w @ mat, spec.phi)

    def gradient(w):
        return mat @ _divergence_gradient_in_q(p.weights, w @ mat, spec.phi)

    res = minimize_on_simplex(objective, gradient, w0)
    if not math.isfinite(res.value):
        return IndexResult(INF, None)
    value = min(lam * res.value, values[best])
    if value == values[best] and math.isfinite(values[best]):
        return IndexResult(values[best], best, tuple(float(x) for x in np.eye(k)[best]))
    return IndexResult(value, int(np.argmax(res.weights)), tuple(float(x) for x in res.weights))


def misspecification_index(p: Model, Q: ModelSet, spec: DivergenceSpec) -> float:
    return misspecification_argmin(p, Q, spec).value


class SetDistance(Protocol):
    """A statistical distance C(p, Q) between a model and a structured set."""

    def __call__(self, p: Model, Q: ModelSet) -> float:
        ...


@dataclass(frozen=True)
class PairwiseSetDistance:
    """The set distance induced by a pairwise penalty: C(p, Q) = min_q c(p, q)."""
    spec: DivergenceSpec

    def __call__(self, p: Model, Q: ModelSet) -> float:
        return misspecification_index(p, Q, self.spec)
