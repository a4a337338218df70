"""Problem documents: JSON in, DecisionProblem out (and back).

Shape of a version "1" document::

    {
      "schema_version": "1",
      "name": "optional label",
      "states": ["rain", "sun"],
      "models": {"wet": [0.9, 0.1], "dry": [0.1, 0.9]},
      "structured_set": {"models": ["wet", "dry"], "hull_mode": "extreme_points_only"},
      "divergence": {"kind": "relative_entropy", "lambda": 1.0},
      "acts": {"umbrella": [1, 0], "picnic": [0, 1]}
    }

Structural problems raise ParseError; well-typed but invalid values (negative
weights, bad lambda, unknown model names, wrong vector lengths) raise
ValidationError. Both carry a JSON pointer to the offending node.
"""
from __future__ import annotations
import json
import math
from typing import Any, Dict, List

from decision_problems.problem import DecisionProblem
from divergences.divergence import INF_LAMBDA, DivergenceSpec, parse_lambda
from divergences.phi import phi_by_kind
from model_space.model_space import Act, HullMode, Model, ModelSet, StateSpace
from utils.errors import DomainError, ParseError, ValidationError


SCHEMA_VERSION = "1"
DIVERGENCE_KINDS = ("relative_entropy", "gini", "indicator")


def _reject_constant(name: str):
    raise ParseError(f"non-standard JSON constant {name}")


def _pointer(*parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def _require(obj: Dict[str, Any], key: str, kind, *path) -> Any:
    if key not in obj:
        raise ParseError(f"missing required member {key!r}", _pointer(*path))
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        expected = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"expected {expected}, got {type(value).__name__}", _pointer(*path, key))
    return value


def _vector(values: Any, n: int, *path) -> List[float]:
    if not isinstance(values, list):
        raise ParseError(f"expected array, got {type(values).__name__}", _pointer(*path))
    out = []
    for i, x in enumerate(values):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ParseError(f"expected number, got {type(x).__name__}", _pointer(*path, i))
        out.append(float(x))
    if len(out) != n:
        raise ValidationError(f"expected {n} entries (one per state), got {len(out)}", _pointer(*path))
    return out


def _divergence(doc: Dict[str, Any]) -> DivergenceSpec:
    div = _require(doc, "divergence", dict)
    kind = _require(div, "kind", str, "divergence")
    if kind not in DIVERGENCE_KINDS:
        raise ValidationError(f"unknown divergence kind {kind!r}; expected one of {DIVERGENCE_KINDS}",
                              _pointer("divergence", "kind"))
    raw = div.get("lambda", "inf" if kind == "indicator" else None)
    if raw is None:
        raise ParseError("missing required member 'lambda'", _pointer("divergence"))
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ParseError(f"expected number or \"inf\", got {type(raw).__name__}", _pointer("divergence", "lambda"))
    if isinstance(raw, str) and raw != "inf":
        raise ValidationError(f"the only string lambda is \"inf\", got {raw!r}", _pointer("divergence", "lambda"))
    if isinstance(raw, float) and not math.isfinite(raw):
        raise ValidationError("numeric lambda must be finite; write \"inf\" for the neutral penalty",
                              _pointer("divergence", "lambda"))
    try:
        lam = parse_lambda(raw)
    except DomainError as exc:
        raise ValidationError(str(exc), _pointer("divergence", "lambda")) from None
    if kind == "indicator":
        if lam is not INF_LAMBDA:
            raise ValidationError("the indicator penalty only admits lambda \"inf\"", _pointer("divergence", "lambda"))
        return DivergenceSpec.indicator()
    return DivergenceSpec(phi_by_kind(kind), lam)


def parse_problem(text: str) -> DecisionProblem:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"expected object, got {type(doc).__name__}")

    version = _require(doc, "schema_version", str)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}", _pointer("schema_version"))

    states = _require(doc, "states", list)
    if not all(isinstance(s, str) for s in states):
        raise ParseError("state names must be strings", _pointer("states"))
    try:
        space = StateSpace(tuple(states))
    except DomainError as exc:
        raise ValidationError(str(exc), _pointer("states")) from None

    models: Dict[str, Model] = {}
    for name, weights in _require(doc, "models", dict).items():
        vec = _vector(weights, space.n, "models", name)
        try:
            models[name] = Model(vec, space, name)
        except DomainError as exc:
            raise ValidationError(str(exc), _pointer("models", name)) from None

    structured = _require(doc, "structured_set", dict)
    names = _require(structured, "models", list, "structured_set")
    hull = structured.get("hull_mode", HullMode.EXTREME_POINTS_ONLY.value)
    if hull not in [m.value for m in HullMode]:
        raise ValidationError(f"unknown hull_mode {hull!r}", _pointer("structured_set", "hull_mode"))
    chosen = []
    for i, name in enumerate(names):
        if not isinstance(name, str):
            raise ParseError("model references must be strings", _pointer("structured_set", "models", i))
        if name not in models:
            raise ValidationError(f"unknown model {name!r}", _pointer("structured_set", "models", i))
        chosen.append(models[name])
    try:
        Q = ModelSet(tuple(chosen), HullMode(hull))
    except DomainError as exc:
        raise ValidationError(str(exc), _pointer("structured_set", "models")) from None

    spec = _divergence(doc)

    acts = []
    for name, utils in _require(doc, "acts", dict).items():
        vec = _vector(utils, space.n, "acts", name)
        try:
            acts.append(Act(vec, name, space))
        except DomainError as exc:
            raise ValidationError(str(exc), _pointer("acts", name)) from None
    try:
        return DecisionProblem(tuple(acts), Q, spec, str(doc.get("name", "problem")))
    except DomainError as exc:
        raise ValidationError(str(exc), _pointer("acts")) from None


def model_name(model: Model, index: int) -> str:
    return model.name or f"q{index}"


def problem_document(problem: DecisionProblem) -> Dict[str, Any]:
    names = [model_name(q, i) for i, q in enumerate(problem.Q)]
    spec = problem.spec
    return {
        "schema_version": SCHEMA_VERSION,
        "name": problem.name,
        "states": list(problem.Q.space.labels),
        "models": {n: [float(w) for w in q.weights] for n, q in zip(names, problem.Q)},
        "structured_set": {"models": names, "hull_mode": problem.Q.hull_mode.value},
        "divergence": {
            "kind": spec.kind,
            "lambda": "inf" if spec.lam is INF_LAMBDA else float(spec.lam),
        },
        "acts": {a.name: [float(x) for x in a.utils] for a in problem.acts},
    }


def emit_problem(problem: DecisionProblem) -> str:
    return json.dumps(problem_document(problem), indent=2)
