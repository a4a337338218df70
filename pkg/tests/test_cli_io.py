import copy
import json
import math
from pathlib import Path

import pandas as pd
import pytest

import main as cli
from cli_io.document import emit_problem, parse_problem
from cli_io.output import lambda_label, sig
from divergences.divergence import INF_LAMBDA
from model_space.model_space import HullMode
from utils.errors import ConvergenceError, ParseError, ValidationError

FIXTURES = Path(__file__).parent / "fixtures"
UMBRELLA = FIXTURES / "umbrella.json"


def umbrella_doc():
    return json.loads(UMBRELLA.read_text())


def write_doc(tmp_path, doc, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestParseProblem:
    def test_fixture(self):
        problem = parse_problem(UMBRELLA.read_text())
        assert problem.name == "umbrella"
        assert [a.name for a in problem.acts] == ["umbrella", "picnic", "stay_home"]
        assert len(problem.Q) == 2
        assert problem.Q.hull_mode is HullMode.EXTREME_POINTS_ONLY
        assert problem.spec.kind == "relative_entropy"
        assert problem.spec.lam == 1.0

    def test_nearly_normalized_weights(self):
        doc = umbrella_doc()
        doc["models"]["wet"] = [0.9, 0.1 + 1e-10]
        problem = parse_problem(json.dumps(doc))
        assert problem.Q[0].weights.sum() == pytest.approx(1.0, abs=1e-15)

    def test_indicator_defaults_to_infinite_lambda(self):
        doc = umbrella_doc()
        doc["divergence"] = {"kind": "indicator"}
        assert parse_problem(json.dumps(doc)).spec.is_indicator

    @pytest.mark.parametrize("lam", [-1, 0, "abc"])
    def test_invalid_lambda(self, lam):
        doc = umbrella_doc()
        doc["divergence"]["lambda"] = lam
        with pytest.raises(ValidationError) as exc:
            parse_problem(json.dumps(doc))
        assert exc.value.pointer == "/divergence/lambda"

    def test_infinite_lambda_string(self):
        doc = umbrella_doc()
        doc["divergence"]["lambda"] = "inf"
        assert parse_problem(json.dumps(doc)).spec.lam is INF_LAMBDA

    def test_overflowing_numeric_lambda_is_not_the_sentinel(self):
        text = json.dumps(umbrella_doc()).replace('"lambda": 1.0', '"lambda": 1e400')
        assert "1e400" in text
        with pytest.raises(ValidationError) as exc:
            parse_problem(text)
        assert exc.value.pointer == "/divergence/lambda"

    def test_indicator_rejects_finite_lambda(self):
        doc = umbrella_doc()
        doc["divergence"] = {"kind": "indicator", "lambda": 2.0}
        with pytest.raises(ValidationError):
            parse_problem(json.dumps(doc))

    def test_missing_member(self):
        doc = umbrella_doc()
        del doc["states"]
        with pytest.raises(ParseError) as exc:
            parse_problem(json.dumps(doc))
        assert exc.value.pointer == ""

    def test_wrong_type_in_weights(self):
        doc = umbrella_doc()
        doc["models"]["wet"] = ["0.9", 0.1]
        with pytest.raises(ParseError) as exc:
            parse_problem(json.dumps(doc))
        assert exc.value.pointer == "/models/wet/0"

    def test_wrong_length(self):
        doc = umbrella_doc()
        doc["acts"]["picnic"] = [0, 1, 2]
        with pytest.raises(ValidationError) as exc:
            parse_problem(json.dumps(doc))
        assert exc.value.pointer == "/acts/picnic"

    def test_weights_that_do_not_sum_to_one(self):
        doc = umbrella_doc()
        doc["models"]["dry"] = [0.2, 0.9]
        with pytest.raises(ValidationError) as exc:
            parse_problem(json.dumps(doc))
        assert exc.value.pointer == "/models/dry"

    def test_unknown_model_reference(self):
        doc = umbrella_doc()
        doc["structured_set"]["models"] = ["wet", "humid"]
        with pytest.raises(ValidationError) as exc:
            parse_problem(json.dumps(doc))
        assert exc.value.pointer == "/structured_set/models/1"

    @pytest.mark.parametrize("text", ["not json", "[]", '{"schema_version": "2"}',
                                      '{"schema_version": "1", "states": [NaN]}'])
    def test_malformed_documents(self, text):
        with pytest.raises(ParseError):
            parse_problem(text)

    def test_emit_then_parse(self):
        problem = parse_problem(UMBRELLA.read_text())
        again = parse_problem(emit_problem(problem))
        assert again.name == problem.name
        assert again.Q.is_subset_of(problem.Q) and problem.Q.is_subset_of(again.Q)
        assert again.spec.kind == problem.spec.kind and again.spec.lam == problem.spec.lam
        for a, b in zip(again.acts, problem.acts):
            assert a.name == b.name and a.utils.tolist() == b.utils.tolist()


class TestOutputFormatting:
    def test_significant_digits(self):
        assert sig(1.0 / 3.0) == 0.333333333333
        assert sig(math.inf) == "inf"
        assert sig(-math.inf) == "-inf"

    def test_lambda_label(self):
        assert lambda_label(INF_LAMBDA) == "inf"
        assert lambda_label(2.5) == 2.5


class TestCommandLine:
    def test_evaluate(self, capsys):
        code, out = run(capsys, "evaluate", str(UMBRELLA))
        assert code == 0
        values = {e["act"]: e for e in out["evaluations"]}
        assert values["stay_home"]["value"] == 0.4
        assert values["umbrella"]["binding_model"] == "dry"
        assert values["umbrella"]["method"] == "entropic_closed_form"
        assert out["lambda"] == 1.0

    def test_evaluate_single_act(self, capsys):
        code, out = run(capsys, "evaluate", str(UMBRELLA), "--act", "picnic")
        assert code == 0
        assert [e["act"] for e in out["evaluations"]] == ["picnic"]

    def test_constant_act(self, capsys, tmp_path):
        doc = umbrella_doc()
        doc["acts"] = {"sure": [2.5, 2.5]}
        doc["divergence"] = {"kind": "gini", "lambda": 0.3}
        code, out = run(capsys, "evaluate", write_doc(tmp_path, doc))
        assert code == 0
        assert out["evaluations"][0]["value"] == 2.5

    def test_dominance(self, capsys):
        code, out = run(capsys, "dominance", str(UMBRELLA), "--f", "umbrella", "--g", "picnic")
        assert code == 0
        assert out["relation"] == "incomparable"
        assert [g["model"] for g in out["per_model_gaps"]] == ["wet", "dry"]

    def test_solve_agrees_with_evaluate(self, capsys):
        code, solved = run(capsys, "solve", str(UMBRELLA))
        assert code == 0
        assert solved["optimal"] == ["stay_home"]
        _, evaluated = run(capsys, "evaluate", str(UMBRELLA))
        for e in evaluated["evaluations"]:
            assert solved["values"][e["act"]] == e["value"]

    def test_solve_excludes_translated_act(self, capsys, tmp_path):
        doc = umbrella_doc()
        doc["acts"] = {"f": [0.5, 0.3], "g": [0.4, 0.2]}
        code, out = run(capsys, "solve", write_doc(tmp_path, doc))
        assert code == 0
        assert out["optimal"] == ["f"]
        assert out["weakly_admissible"] == ["f"]
        assert out["admissible"] == ["f"]

    def test_sweep_ends_at_maxmin(self, capsys, tmp_path):
        csv = tmp_path / "sweep.csv"
        code, out = run(capsys, "sweep", str(UMBRELLA), "--act", "picnic", "--csv", str(csv))
        assert code == 0
        values = [row["value"] for row in out["sweep"]]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert out["sweep"][-1]["lambda"] == "inf"

        frame = pd.read_csv(csv)
        assert len(frame) == 4
        assert frame["value"].tolist() == pytest.approx(values, abs=1e-12)

        doc = umbrella_doc()
        doc["divergence"] = {"kind": "indicator"}
        _, neutral = run(capsys, "evaluate", write_doc(tmp_path, doc), "--act", "picnic")
        assert neutral["evaluations"][0]["value"] == values[-1]

    @pytest.mark.parametrize("phi", ["relative_entropy", "gini"])
    def test_sweep_matches_evaluate_at_finite_lambda(self, capsys, tmp_path, phi):
        code, out = run(capsys, "sweep", str(UMBRELLA), "--act", "umbrella", "--phi", phi,
                        "--lambdas", "0.5,2,inf")
        assert code == 0
        rows = {row["lambda"]: row["value"] for row in out["sweep"]}
        for lam in (0.5, 2.0):
            doc = umbrella_doc()
            doc["divergence"] = {"kind": phi, "lambda": lam}
            _, evaluated = run(capsys, "evaluate", write_doc(tmp_path, doc, f"{phi}-{lam}.json"), "--act", "umbrella")
            assert json.dumps(evaluated["evaluations"][0]["value"]) == json.dumps(rows[lam])

    def test_sweep_always_ends_with_maxmin_row(self, capsys, tmp_path):
        csv = tmp_path / "sweep.csv"
        code, out = run(capsys, "sweep", str(UMBRELLA), "--act", "picnic", "--lambdas", "0.5,2", "--csv", str(csv))
        assert code == 0
        assert [row["lambda"] for row in out["sweep"]] == [0.5, 2.0, "inf"]
        frame = pd.read_csv(csv)
        assert len(frame) == 3
        assert frame["value"].iloc[-1] == pytest.approx(out["sweep"][-1]["value"], abs=1e-12)

    def test_sweep_plot(self, capsys, tmp_path):
        png = tmp_path / "sweep.png"
        code, out = run(capsys, "sweep", str(UMBRELLA), "--act", "umbrella", "--phi", "gini",
                        "--lambdas", "0.5,2,inf", "--plot", str(png))
        assert code == 0
        assert out["phi"] == "gini"
        assert png.exists() and png.stat().st_size > 0

    def test_sweep_rejects_unordered_lambdas(self, capsys):
        code, _ = run(capsys, "sweep", str(UMBRELLA), "--act", "picnic", "--lambdas", "2,1")
        assert code == cli.EXIT_INVALID_INPUT

    def test_compare(self, capsys):
        code, out = run(capsys, "compare", str(UMBRELLA), str(FIXTURES / "umbrella_wide.json"))
        assert code == 0
        assert out["monotone"] is True
        assert out["value"] >= out["value_prime"]
        assert out["lambda_prime"] is None

    def test_compare_requires_superset(self, capsys):
        code, _ = run(capsys, "compare", str(FIXTURES / "umbrella_wide.json"), str(UMBRELLA))
        assert code == cli.EXIT_INVALID_INPUT

    def test_selftest(self, capsys):
        code, out = run(capsys, "selftest", "--instances", "5")
        assert code == 0
        assert out["passed"] is True
        assert {s["suite"] for s in out["suites"]} == {"duality_gap", "closed_form_agreement", "gini_mean_variance"}

    def test_missing_file(self, capsys, tmp_path):
        code, out = run(capsys, "evaluate", str(tmp_path / "nope.json"))
        assert code == cli.EXIT_INVALID_INPUT
        assert out is None

    def test_invalid_document(self, capsys, tmp_path):
        doc = copy.deepcopy(umbrella_doc())
        doc["divergence"]["lambda"] = -1
        code, _ = run(capsys, "solve", write_doc(tmp_path, doc))
        assert code == cli.EXIT_INVALID_INPUT

    def test_invalid_thread_setting(self, capsys, monkeypatch):
        monkeypatch.setenv("ROBUST_CHOICE_THREADS", "zero")
        code, _ = run(capsys, "evaluate", str(UMBRELLA))
        assert code == cli.EXIT_INVALID_INPUT

    def test_convergence_failure(self, capsys, monkeypatch):
        def fail(*args, **kwargs):
            raise ConvergenceError("no bracket")

        monkeypatch.setattr(cli, "criterion_value", fail)
        code, _ = run(capsys, "evaluate", str(UMBRELLA))
        assert code == cli.EXIT_NO_CONVERGENCE
