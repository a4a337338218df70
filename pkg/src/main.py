from __future__ import annotations
import argparse
import sys
from pathlib import Path
from typing import List, Optional

import config
from cli_io.document import parse_problem
from cli_io.output import (
    conjugate_record, dumps, evaluation_record, lambda_label, plot_sweep, report_record,
    sig, statics_record, suite_record, verdict_record, write_sweep_csv,
)
from decision_problems.problem import DecisionProblem, solve, value_comparative_statics
from divergences.divergence import INF_LAMBDA, parse_lambda
from divergences.phi import conjugate_self_test, gini, phi_by_kind, relative_entropy
from preferences.dominance import dominance
from robust_solver.solver import criterion_value, lambda_sweep, maxmin_value
from robust_solver.verification import (
    closed_form_agreement_suite, duality_gap_suite, gini_identity_suite,
)
from telemetry.influx_writer import InfluxWriter
from utils.errors import ConvergenceError, DimensionError, DomainError, ParseError
from utils.logging import get_logger, log_table


logger = get_logger('cli')

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_NO_CONVERGENCE = 3


def load_problem(path: str) -> DecisionProblem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text)


def cmd_evaluate(args, telemetry: InfluxWriter) -> int:
    problem = load_problem(args.problem)
    acts = [problem.act(args.act)] if args.act else list(problem.acts)
    records = []
    for act in acts:
        result = criterion_value(act, problem.Q, problem.spec)
        records.append(evaluation_record(act, result, problem.Q))
        telemetry.write_evaluation(problem.name, act.name, result.value, result.method.value,
                                   result.binding_model_index)
    print(dumps({"problem": problem.name, "divergence": problem.spec.kind,
                 "lambda": lambda_label(problem.spec.lam), "evaluations": records}))
    return EXIT_OK


def cmd_dominance(args, telemetry: InfluxWriter) -> int:
    problem = load_problem(args.problem)
    f, g = problem.act(args.f), problem.act(args.g)
    verdict = dominance(f, g, problem.Q, problem.spec)
    print(dumps(verdict_record(f.name, g.name, verdict, problem.Q)))
    return EXIT_OK


def cmd_solve(args, telemetry: InfluxWriter) -> int:
    problem = load_problem(args.problem)
    report = solve(problem)
    telemetry.write_admissibility(problem.name, {
        'value': report.value,
        'optimal': len(report.optimal),
        'weakly_admissible': len(report.weakly_admissible),
        'admissible': len(report.admissible),
    })
    print(dumps(report_record(report)))
    return EXIT_OK


def _parse_lambdas(raw: str) -> list:
    try:
        return [parse_lambda(tok.strip()) for tok in raw.split(",") if tok.strip()]
    except DomainError as exc:
        raise DomainError(f"--lambdas: {exc}") from None


def cmd_sweep(args, telemetry: InfluxWriter) -> int:
    problem = load_problem(args.problem)
    act = problem.act(args.act)
    if args.phi:
        phi = phi_by_kind(args.phi)
    elif problem.spec.phi is not None:
        phi = problem.spec.phi
    else:
        phi = relative_entropy()
    lambdas = _parse_lambdas(args.lambdas)
    if INF_LAMBDA not in lambdas:
        logger.info("Appending lambda=inf so the sweep ends at the max-min value")
        lambdas.append(INF_LAMBDA)
    sweep = lambda_sweep(act, problem.Q, phi, lambdas)
    for lam, value in sweep:
        telemetry.write_sweep_point(problem.name, act.name, float(lam), value)

    if args.csv:
        write_sweep_csv(sweep, args.csv)
        logger.info(f"Sweep saved to {args.csv}")
    if args.plot:
        plot_sweep(sweep, args.plot, act.name, maxmin_value(act, problem.Q).value)
        logger.info(f"Sweep plot saved to {args.plot}")
    print(dumps({
        "act": act.name,
        "phi": phi.kind.value,
        "sweep": [{"lambda": lambda_label(lam), "value": sig(v)} for lam, v in sweep],
    }))
    return EXIT_OK


def cmd_compare(args, telemetry: InfluxWriter) -> int:
    problem = load_problem(args.problem)
    superset = load_problem(args.superset)
    lam = parse_lambda(args.lambda_prime) if args.lambda_prime else None
    statics = value_comparative_statics(problem, superset.Q, lam)
    print(dumps(statics_record(statics)))
    return EXIT_OK


def cmd_selftest(args, telemetry: InfluxWriter) -> int:
    conjugates = [conjugate_self_test(phi) for phi in (relative_entropy(), gini())]
    suites = [
        duality_gap_suite(args.instances, args.seed),
        closed_form_agreement_suite(args.instances, args.seed),
        gini_identity_suite(args.instances, args.seed),
    ]
    passed = all(r.passed for r in conjugates) and all(s.passed for s in suites)
    log_table(logger, {
        **{f"conjugate {r.kind.value}": f"{r.max_deviation:.3e}" for r in conjugates},
        **{s.name: f"{s.max_deviation:.3e} over {s.instances}" for s in suites},
        "result": "PASS" if passed else "FAIL",
    })
    print(dumps({
        "passed": passed,
        "conjugates": [conjugate_record(r) for r in conjugates],
        "suites": [suite_record(s) for s in suites],
    }))
    return EXIT_OK if passed else EXIT_SELFTEST_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="robust-choice",
        description="Decisions under model misspecification over finite state spaces.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="criterion value of each act")
    p.add_argument("problem")
    p.add_argument("--act", help="evaluate only this act")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("dominance", help="dominance verdict between two acts")
    p.add_argument("problem")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(handler=cmd_dominance)

    p = sub.add_parser("solve", help="value, optimal and admissible acts")
    p.add_argument("problem")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("sweep", help="criterion value along a lambda grid")
    p.add_argument("problem")
    p.add_argument("--act", required=True)
    p.add_argument("--lambdas", default=config.DEFAULT_SWEEP_LAMBDAS)
    p.add_argument("--phi", choices=["relative_entropy", "gini"],
                   help="divergence family (defaults to the document's)")
    p.add_argument("--csv", help="write (lambda,value) rows to this file")
    p.add_argument("--plot", help="write a PNG of the sweep to this file")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare", help="v(Q) against v(Q') for a superset document")
    p.add_argument("problem")
    p.add_argument("superset")
    p.add_argument("--lambda-prime", dest="lambda_prime",
                   help="evaluate the superset under this lambda instead")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("selftest", help="conjugate and duality checks")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=20240607)
    p.set_defaults(handler=cmd_selftest)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    telemetry = InfluxWriter()
    try:
        config.thread_cap()
        return args.handler(args, telemetry)
    except (ParseError, DomainError, DimensionError) as exc:
        logger.error(str(exc))
        return EXIT_INVALID_INPUT
    except ConvergenceError as exc:
        logger.error(str(exc))
        return EXIT_NO_CONVERGENCE
    finally:
        telemetry.close()


if __name__ == "__main__":
    sys.exit(main())
