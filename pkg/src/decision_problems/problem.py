from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import config
from divergences.divergence import DivergenceSpec, Lambda
from model_space.model_space import Act, ModelSet, require_same_space
from preferences.dominance import (
    ModelProfile, Relation, is_strong, multiplier_profile, verdict_from_profiles,
)
from robust_solver.solver import criterion_value
from utils.errors import DomainError
from utils.logging import get_logger
from utils.parallel import ordered_map


logger = get_logger('problems')


@dataclass(frozen=True, eq=False)
class DecisionProblem:
    """A finite choice set F evaluated against a structured set Q under one penalty."""
    acts: Tuple[Act, ...]
    Q: ModelSet
    spec: DivergenceSpec
    name: str = "problem"

    def __post_init__(self):
        acts = tuple(self.acts)
        if not acts:
            raise DomainError("a decision problem needs at least one act")
        names = [a.name for a in acts]
        if len(set(names)) != len(names):
            raise DomainError(f"act names must be unique, got {names}")
        for a in acts:
            require_same_space(a, self.Q[0])
        object.__setattr__(self, 'acts', acts)

    def act(self, name: str) -> Act:
        for a in self.acts:
            if a.name == name:
                return a
        raise DomainError(f"unknown act {name!r}; choices are {[a.name for a in self.acts]}")

    def with_structured_set(self, Q: ModelSet, spec: Optional[DivergenceSpec] = None) -> "DecisionProblem":
        return DecisionProblem(self.acts, Q, spec or self.spec, self.name)


@dataclass
class AdmissibilityReport:
    optimal: List[str]
    weakly_admissible: List[str]
    admissible: List[str]
    value: float
    values: Dict[str, float] = field(default_factory=dict)


def _values(problem: DecisionProblem) -> Dict[str, float]:
    results = ordered_map(lambda a: criterion_value(a, problem.Q, problem.spec).value, problem.acts)
    return {a.name: v for a, v in zip(problem.acts, results)}


def solve(problem: DecisionProblem) -> AdmissibilityReport:
    """Value, optimal acts, and the (weakly) admissible subsets of the choice set."""
    values = _values(problem)
    v = max(values.values())
    optimal = [name for name, val in values.items() if val >= v - config.COMPARISON_TOL]

    profiles: List[ModelProfile] = ordered_map(
        lambda a: multiplier_profile(a, problem.Q, problem.spec), problem.acts
    )
    strictly_dominated = set()
    strongly_dominated = set()
    for i, pf in enumerate(profiles):
        for j, pg in enumerate(profiles):
            if i == j:
                continue
            verdict = verdict_from_profiles(pf, pg)
            if verdict.relation is Relation.DOMINATES:
                strictly_dominated.add(pg.act_name)
                if is_strong(verdict, config.STRONG_DOMINANCE_EPS):
                    strongly_dominated.add(pg.act_name)

    names = [a.name for a in problem.acts]
    report = AdmissibilityReport(
        optimal=optimal,
        weakly_admissible=[n for n in names if n not in strongly_dominated],
        admissible=[n for n in names if n not in strictly_dominated],
        value=v,
        values=values,
    )
    logger.info(
        f"{problem.name}: v={v:.12g}, optimal={report.optimal}, "
        f"weakly admissible={len(report.weakly_admissible)}/{len(names)}, "
        f"admissible={len(report.admissible)}/{len(names)}"
    )
    if not set(report.optimal) <= set(report.weakly_admissible):
        logger.warning(f"{problem.name}: an optimal act is strongly dominated on the hull grid")
    return report


def rank_acts(problem: DecisionProblem) -> List[Tuple[str, float]]:
    """The complete ranking induced by the criterion, best first (stable on ties)."""
    values = _values(problem)
    return sorted(values.items(), key=lambda kv: -kv[1])


@dataclass(frozen=True)
class ComparativeStatics:
    value: float
    value_prime: float
    monotone: bool
    lambda_prime: Optional[Lambda] = None


def value_comparative_statics(
    problem: DecisionProblem,
    Q_prime: ModelSet,
    lambda_prime: Optional[Lambda] = None,
) -> ComparativeStatics:
    """v(Q) against v(Q') for Q inside Q'; smaller structured sets are worth more.

    With `lambda_prime` the superset is evaluated under that lambda instead, and
    `monotone` is only reported.
    """
    if not problem.Q.is_subset_of(Q_prime):
        raise DomainError("the first structured set must be contained in the second")
    spec_prime = problem.spec if lambda_prime is None else problem.spec.with_lambda(lambda_prime)
    v = solve(problem).value
    v_prime = solve(problem.with_structured_set(Q_prime, spec_prime)).value
    monotone = v >= v_prime - config.COMPARISON_TOL
    if lambda_prime is None and not monotone:
        logger.warning(f"{problem.name}: v(Q)={v:.12g} < v(Q')={v_prime:.12g}")
    return ComparativeStatics(v, v_prime, monotone, lambda_prime)


def restricted_value_check(problem: DecisionProblem, report: Optional[AdmissibilityReport] = None) -> bool:
    """The value is attained on the weakly admissible acts alone."""
    report = report or solve(problem)
    restricted = max(report.values[name] for name in report.weakly_admissible)
    return abs(restricted - report.value) <= config.COMPARISON_TOL
