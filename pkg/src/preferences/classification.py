from __future__ import annotations
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

import config
from divergences.divergence import DivergenceSpec, misspecification_index
from model_space.model_space import Act, Model, ModelSet, bet_act
from robust_solver.solver import criterion_value, maxmin_value
from utils.errors import DomainError
from utils.logging import get_logger


logger = get_logger('classification')


@dataclass(frozen=True)
class BetViolation:
    event_a: Tuple[str, ...]
    event_b: Tuple[str, ...]
    gap: float


@dataclass
class BetConsistencyReport:
    trials: int
    attempts: int
    violations: List[BetViolation] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.violations


def _labels(Q: ModelSet, mask: np.ndarray) -> Tuple[str, ...]:
    return tuple(s for s, m in zip(Q.space.labels, mask) if m)


def bet_consistency_check(Q: ModelSet, spec: DivergenceSpec, trials: int, seed: int) -> BetConsistencyReport:
    """Bets on events every structured model ranks as more likely must be weakly preferred."""
    if spec.is_neutral:
        raise DomainError("bet consistency is checked for phi-divergence penalties with finite lambda")
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")

    rng = np.random.default_rng(seed)
    mat = Q.matrix
    report = BetConsistencyReport(trials=0, attempts=0)
    max_attempts = 50 * trials
    while report.trials < trials and report.attempts < max_attempts:
        report.attempts += 1
        a = rng.random(Q.n) < 0.5
        b = rng.random(Q.n) < 0.5
        pa, pb = mat @ a, mat @ b
        if np.all(pa >= pb):
            pass
        elif np.all(pb >= pa):
            a, b = b, a
        else:
            continue

        high = float(rng.uniform(0.5, 5.0))
        low = high - float(rng.uniform(0.1, 5.0))
        bet_a = bet_act(Q.space, np.flatnonzero(a).tolist(), high, low, name="xAy")
        bet_b = bet_act(Q.space, np.flatnonzero(b).tolist(), high, low, name="xBy")
        gap = criterion_value(bet_a, Q, spec).value - criterion_value(bet_b, Q, spec).value
        report.trials += 1
        if gap < -config.COMPARISON_TOL:
            report.violations.append(BetViolation(_labels(Q, a), _labels(Q, b), gap))

    logger.info(f"bet consistency: {report.trials} qualifying pairs, {len(report.violations)} violations")
    return report


def _random_acts(Q: ModelSet, trials: int, seed: int) -> List[Act]:
    rng = np.random.default_rng(seed)
    return [Act(rng.uniform(-5.0, 5.0, Q.n), f"act{i}", Q.space) for i in range(trials)]


def neutrality_check(Q: ModelSet, spec: DivergenceSpec, trials: int, seed: int) -> bool:
    """True iff the criterion coincides with max-min on every sampled act."""
    worst = 0.0
    for act in _random_acts(Q, trials, seed):
        gap = abs(criterion_value(act, Q, spec).value - maxmin_value(act, Q).value)
        worst = max(worst, gap)
    logger.info(f"neutrality: {spec!r} max |V - maxmin| = {worst:.3e} over {trials} acts")
    return worst <= config.COMPARISON_TOL


@dataclass(frozen=True)
class AversionComparison:
    index_ordered: bool
    values_ordered: bool
    samples: int

    @property
    def more_averse(self) -> bool:
        return self.index_ordered and self.values_ordered


def compare_misspecification_aversion(
    Q: ModelSet,
    spec1: DivergenceSpec,
    spec2: DivergenceSpec,
    trials: int,
    seed: int,
) -> AversionComparison:
    """Is spec1 more averse to misspecification than spec2 on Q (c1_Q <= c2_Q)?

    A lower index keeps more unstructured models in play, which can only lower
    the criterion; both halves of that statement are checked on samples.
    """
    rng = np.random.default_rng(seed)
    samples = [Model(rng.dirichlet(np.ones(Q.n)), Q.space) for _ in range(trials)] + list(Q.models)
    index_ordered = all(
        misspecification_index(p, Q, spec1) <= misspecification_index(p, Q, spec2) + config.COMPARISON_TOL
        for p in samples
    )
    acts = _random_acts(Q, trials, seed + 1)
    values_ordered = all(
        criterion_value(f, Q, spec1).value <= criterion_value(f, Q, spec2).value + config.COMPARISON_TOL
        for f in acts
    )
    return AversionComparison(index_ordered, values_ordered, len(samples))
