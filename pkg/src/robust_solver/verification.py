"""Seeded numerical suites cross-checking the solver paths against each other.

Each suite draws small random instances (2-3 states, full-support q, utilities
in [-5, 5], lam in {0.3, 1, 3}) and records the worst deviation it sees.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Iterator, List, Tuple

import numpy as np

from divergences.divergence import DivergenceSpec
from divergences.phi import gini, relative_entropy
from model_space.model_space import Act, Model
from robust_solver.oracle import primal_oracle
from robust_solver.solver import multiplier_value
from utils.logging import get_logger


logger = get_logger('verification')

SUITE_LAMBDAS = (0.3, 1.0, 3.0)
DEFAULT_SEED = 20240607


@dataclass
class SuiteReport:
    name: str
    tolerance: float
    instances: int = 0
    max_deviation: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, label: str, deviation: float) -> None:
        self.instances += 1
        self.max_deviation = max(self.max_deviation, deviation)
        if not deviation <= self.tolerance:
            self.failures.append(f"{label}: deviation {deviation:.3e}")


def random_instances(count: int, seed: int) -> Iterator[Tuple[int, Act, Model, float]]:
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(2, 4))
        u = rng.uniform(-5.0, 5.0, n)
        q = rng.dirichlet(np.ones(n))
        q = np.maximum(q, 1e-3)
        lam = float(rng.choice(SUITE_LAMBDAS))
        yield i, Act(u, name=f"u{i}"), Model(q / q.sum()), lam


def duality_gap_suite(count: int = 100, seed: int = DEFAULT_SEED, resolution: float = 1e-5) -> SuiteReport:
    """|generic dual - primal grid oracle| for relative entropy and gini."""
    report = SuiteReport("duality_gap", tolerance=1e-4)
    for i, act, q, lam in random_instances(count, seed):
        for phi in (relative_entropy(), gini()):
            spec = DivergenceSpec(phi, lam)
            dual = multiplier_value(act, q, spec, prefer_closed_form=False).value
            primal = primal_oracle(act, q, spec, resolution)
            report.record(f"#{i} {phi.kind.value} lam={lam:g}", abs(dual - primal))
    logger.info(f"duality gap: {report.instances} checks, max deviation {report.max_deviation:.3e}")
    return report


def closed_form_agreement_suite(count: int = 100, seed: int = DEFAULT_SEED) -> SuiteReport:
    """Entropic closed form against the generic dual with the entropy conjugate."""
    report = SuiteReport("closed_form_agreement", tolerance=1e-9)
    for i, act, q, lam in random_instances(count, seed):
        spec = DivergenceSpec.entropic(lam)
        closed = multiplier_value(act, q, spec).value
        dual = multiplier_value(act, q, spec, prefer_closed_form=False).value
        report.record(f"#{i} lam={lam:g}", abs(closed - dual))
    logger.info(f"closed form agreement: max deviation {report.max_deviation:.3e}")
    return report


def gini_identity_suite(count: int = 100, seed: int = DEFAULT_SEED) -> SuiteReport:
    """Generic gini dual against E_q[u] - Var_q(u)/(2 lam) where p* stays positive."""
    report = SuiteReport("gini_mean_variance", tolerance=1e-9)
    for i, act, q, lam in random_instances(count, seed):
        result = multiplier_value(act, q, DivergenceSpec.gini(lam), prefer_closed_form=False)
        p = result.worst_case_model
        if p is None or not np.all(p.weights[q.weights > 0] > 0):
            continue
        mean = float(q.weights @ act.utils)
        var = float(q.weights @ (act.utils - mean) ** 2)
        report.record(f"#{i} lam={lam:g}", abs(result.value - (mean - var / (2.0 * lam))))
    logger.info(f"gini identity: {report.instances} eligible, max deviation {report.max_deviation:.3e}")
    return report
