from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

import numpy as np

import config
from divergences.divergence import DivergenceSpec
from model_space.model_space import Act, HullMode, Model, ModelSet, mix_models, require_same_space
from robust_solver.solver import multiplier_value
from utils.errors import DomainError
from utils.logging import get_logger
from utils.parallel import ordered_map


logger = get_logger('dominance')


class Relation(str, Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class ModelProfile:
    """Multiplier values V_{lam,q}(f) of one act across the structured models.

    `mixtures` holds values on the segment grid between every pair of models
    (convex_hull mode only), in a fixed order shared by all acts.
    """
    act_name: str
    extreme: np.ndarray
    mixtures: np.ndarray


@dataclass(frozen=True)
class DominanceVerdict:
    relation: Relation
    per_model_gaps: Tuple[Tuple[int, float], ...]
    uniform_gap: float
    mixture_gaps: Tuple[float, ...] = ()

    @property
    def strict(self) -> bool:
        return self.relation is Relation.DOMINATES


def hull_grid(Q: ModelSet) -> List[Model]:
    """Interior points of the 21-point segment grid between each pair of models."""
    if Q.hull_mode is not HullMode.CONVEX_HULL or len(Q) < 2:
        return []
    alphas = np.linspace(0.0, 1.0, config.HULL_GRID_POINTS)[1:-1]
    grid = []
    for i in range(len(Q)):
        for j in range(i + 1, len(Q)):
            grid.extend(mix_models(Q[i], Q[j], float(a)) for a in alphas)
    return grid


def multiplier_profile(act: Act, Q: ModelSet, spec: DivergenceSpec) -> ModelProfile:
    require_same_space(act, Q[0])
    extreme = ordered_map(lambda q: multiplier_value(act, q, spec).value, Q.models)
    mixtures = ordered_map(lambda q: multiplier_value(act, q, spec).value, hull_grid(Q))
    return ModelProfile(act.name, np.array(extreme, dtype=float), np.array(mixtures, dtype=float))


def classify(gaps: Iterable[float], tol: float = config.COMPARISON_TOL) -> Relation:
    gaps = np.asarray(list(gaps), dtype=float)
    if np.all(np.abs(gaps) <= tol):
        return Relation.EQUIVALENT
    if np.all(gaps >= -tol):
        return Relation.DOMINATES
    if np.all(gaps <= tol):
        return Relation.DOMINATED
    return Relation.INCOMPARABLE


def verdict_from_profiles(pf: ModelProfile, pg: ModelProfile) -> DominanceVerdict:
    gaps = pf.extreme - pg.extreme
    mixture_gaps = pf.mixtures - pg.mixtures
    every = np.concatenate([gaps, mixture_gaps])
    relation = classify(every)
    if relation is not classify(gaps):
        logger.debug(f"{pf.act_name} vs {pg.act_name}: hull grid changes verdict to {relation.value}")
    return DominanceVerdict(
        relation=relation,
        per_model_gaps=tuple((i, float(g)) for i, g in enumerate(gaps)),
        uniform_gap=float(every.min()),
        mixture_gaps=tuple(float(g) for g in mixture_gaps),
    )


def dominance(f: Act, g: Act, Q: ModelSet, spec: DivergenceSpec) -> DominanceVerdict:
    """f >=* g iff V_{lam,q}(f) >= V_{lam,q}(g) for every structured q."""
    require_same_space(f, g)
    return verdict_from_profiles(multiplier_profile(f, Q, spec), multiplier_profile(g, Q, spec))


def is_strong(verdict: DominanceVerdict, epsilon: float) -> bool:
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return verdict.relation is Relation.DOMINATES and verdict.uniform_gap >= epsilon


def strong_dominance(f: Act, g: Act, Q: ModelSet, spec: DivergenceSpec, epsilon: float) -> bool:
    """f >>* g: every per-model gap is at least epsilon."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return is_strong(dominance(f, g, Q, spec), epsilon)


def mixture_robust(
    f: Act,
    g: Act,
    Q: ModelSet,
    spec: DivergenceSpec,
    perturbations: Sequence[Tuple[Act, Act]],
    delta: float,
) -> bool:
    """Whether (1-delta)f + delta*h strictly dominates (1-delta)g + delta*l for every (h, l)."""
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    for h, l in perturbations:
        fh = f.mix(h, 1.0 - delta)
        gl = g.mix(l, 1.0 - delta)
        verdict = dominance(fh, gl, Q, spec)
        if not verdict.strict:
            logger.debug(f"mixture with ({h.name}, {l.name}) at delta={delta:g}: {verdict.relation.value}")
            return False
    return True
