from __future__ import annotations
import json
import math
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

import config
from cli_io.document import model_name
from decision_problems.problem import AdmissibilityReport, ComparativeStatics
from divergences.divergence import INF_LAMBDA, Lambda
from divergences.phi import ConjugateReport
from model_space.model_space import Act, ModelSet
from preferences.dominance import DominanceVerdict
from robust_solver.solver import EvaluationResult
from robust_solver.verification import SuiteReport


def sig(x: float) -> Any:
    """A float rounded to OUTPUT_SIGNIFICANT_DIGITS; infinities become "inf"."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{config.OUTPUT_SIGNIFICANT_DIGITS}g}")


def lambda_label(lam: Lambda) -> Any:
    return "inf" if lam is INF_LAMBDA else sig(float(lam))


def evaluation_record(act: Act, result: EvaluationResult, Q: ModelSet) -> Dict[str, Any]:
    binding = Q[result.binding_model_index]
    worst = result.worst_case_model
    return {
        "act": act.name,
        "value": sig(result.value),
        "method": result.method.value,
        "binding_model_index": result.binding_model_index,
        "binding_model": model_name(binding, result.binding_model_index),
        "worst_case_model": None if worst is None else [sig(w) for w in worst.weights],
        "mixture_weights": None if result.mixture_weights is None else [sig(w) for w in result.mixture_weights],
    }


def verdict_record(f: str, g: str, verdict: DominanceVerdict, Q: ModelSet) -> Dict[str, Any]:
    return {
        "f": f,
        "g": g,
        "relation": verdict.relation.value,
        "per_model_gaps": [
            {"model_index": i, "model": model_name(Q[i], i), "gap": sig(gap)}
            for i, gap in verdict.per_model_gaps
        ],
        "uniform_gap": sig(verdict.uniform_gap),
        "mixture_gaps": [sig(g) for g in verdict.mixture_gaps],
    }


def report_record(report: AdmissibilityReport) -> Dict[str, Any]:
    return {
        "value": sig(report.value),
        "optimal": report.optimal,
        "weakly_admissible": report.weakly_admissible,
        "admissible": report.admissible,
        "values": {name: sig(v) for name, v in report.values.items()},
    }


def statics_record(statics: ComparativeStatics) -> Dict[str, Any]:
    return {
        "value": sig(statics.value),
        "value_prime": sig(statics.value_prime),
        "monotone": statics.monotone,
        "lambda_prime": None if statics.lambda_prime is None else lambda_label(statics.lambda_prime),
    }


def conjugate_record(report: ConjugateReport) -> Dict[str, Any]:
    return {
        "kind": report.kind.value,
        "max_deviation": sig(report.max_deviation),
        "worst_y": sig(report.worst_y),
        "passed": report.passed,
    }


def suite_record(report: SuiteReport) -> Dict[str, Any]:
    return {
        "suite": report.name,
        "instances": report.instances,
        "max_deviation": sig(report.max_deviation),
        "tolerance": report.tolerance,
        "passed": report.passed,
        "failures": report.failures[:10],
    }


def sweep_frame(sweep: List[Tuple[Lambda, float]]) -> pd.DataFrame:
    return pd.DataFrame({
        "lambda": [lambda_label(lam) for lam, _ in sweep],
        "value": [sig(v) for _, v in sweep],
    })


def write_sweep_csv(sweep: List[Tuple[Lambda, float]], path: str) -> None:
    sweep_frame(sweep).to_csv(path, index=False, float_format=f"%.{config.OUTPUT_SIGNIFICANT_DIGITS}g")


def plot_sweep(sweep: List[Tuple[Lambda, float]], path: str, act_name: str, maxmin: Optional[float] = None) -> None:
    """Criterion value against lambda (log axis), max-min level as a reference line."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    finite = [(float(lam), v) for lam, v in sweep if lam is not INF_LAMBDA]
    fig, ax = plt.subplots(figsize=(7, 4))
    if finite:
        ax.plot([l for l, _ in finite], [v for _, v in finite], marker="o", label=f"V_lambda({act_name})")
        ax.set_xscale("log")
    if maxmin is not None:
        ax.axhline(maxmin, linestyle="--", color="gray", label="max-min")
    ax.set_xlabel("lambda")
    ax.set_ylabel("criterion value (utils)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)
