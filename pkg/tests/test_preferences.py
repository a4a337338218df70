import numpy as np
import pytest

from conftest import random_act, random_model, random_model_set
from divergences.divergence import DivergenceSpec
from model_space.model_space import Act, HullMode, Model, ModelSet, StateSpace
from preferences.classification import (
    bet_consistency_check, compare_misspecification_aversion, neutrality_check,
)
from preferences.dominance import (
    ModelProfile, Relation, dominance, hull_grid, is_strong, mixture_robust,
    strong_dominance, verdict_from_profiles,
)
from robust_solver.solver import criterion_value
from utils.errors import DimensionError, DomainError


class TestDominance:
    def test_pointwise_better_act_dominates(self, symmetric_q, two_states, entropic):
        f = Act([1.0, 2.0], "f", two_states)
        g = Act([0.5, 2.0], "g", two_states)
        assert dominance(f, g, symmetric_q, entropic).relation is Relation.DOMINATES
        assert dominance(g, f, symmetric_q, entropic).relation is Relation.DOMINATED

    def test_act_is_equivalent_to_itself(self, symmetric_q, two_states, gini_spec):
        f = Act([0.3, -1.0], "f", two_states)
        verdict = dominance(f, f, symmetric_q, gini_spec)
        assert verdict.relation is Relation.EQUIVALENT
        assert verdict.uniform_gap == 0.0

    def test_incomparable_acts_can_still_be_ranked(self, symmetric_q, two_states, entropic):
        f = Act([1.0, 0.0], "f", two_states)
        g = Act([0.0, 0.8], "g", two_states)
        verdict = dominance(f, g, symmetric_q, entropic)
        assert verdict.relation is Relation.INCOMPARABLE
        gaps = dict(verdict.per_model_gaps)
        assert gaps[0] > 0 > gaps[1]
        # the criterion still ranks them
        assert criterion_value(f, symmetric_q, entropic).value > criterion_value(g, symmetric_q, entropic).value

    def test_dimension_mismatch(self, symmetric_q, entropic):
        with pytest.raises(DimensionError):
            dominance(Act([0.0, 1.0]), Act([0.0, 1.0, 2.0]), symmetric_q, entropic)

    def test_singleton_set_is_complete(self, rng, two_states, entropic):
        Q = ModelSet((Model([0.3, 0.7], two_states),))
        for _ in range(100):
            f, g = random_act(rng, two_states), random_act(rng, two_states, "g")
            assert dominance(f, g, Q, entropic).relation is not Relation.INCOMPARABLE

    def test_transitive(self, rng):
        space = StateSpace.default(3)
        spec = DivergenceSpec.gini(1.0)
        Q = random_model_set(rng, space, 3)
        acts = [random_act(rng, space, f"a{i}") for i in range(12)]
        dominates = {
            (i, j): dominance(acts[i], acts[j], Q, spec).relation is Relation.DOMINATES
            for i in range(len(acts)) for j in range(len(acts)) if i != j
        }
        for (i, j), ij in dominates.items():
            for k in range(len(acts)):
                if ij and k not in (i, j) and dominates[(j, k)]:
                    assert dominates[(i, k)]

    def test_indicator_is_expected_utility_unanimity(self, rng, symmetric_q, two_states):
        for _ in range(50):
            f, g = random_act(rng, two_states), random_act(rng, two_states, "g")
            verdict = dominance(f, g, symmetric_q, DivergenceSpec.indicator())
            eu_gaps = symmetric_q.matrix @ (f.utils - g.utils)
            assert [gap for _, gap in verdict.per_model_gaps] == pytest.approx(eu_gaps.tolist(), abs=1e-12)

    def test_hull_grid_points(self, rng):
        space = StateSpace.default(3)
        Q = random_model_set(rng, space, 3)
        assert hull_grid(Q) == []
        assert len(hull_grid(Q.with_hull_mode(HullMode.CONVEX_HULL))) == 3 * 19

    def test_mixture_gap_can_break_dominance(self):
        pf = ModelProfile("f", np.array([0.2, 0.1]), np.array([0.15, -0.05]))
        pg = ModelProfile("g", np.array([0.0, 0.0]), np.array([0.0, 0.0]))
        verdict = verdict_from_profiles(pf, pg)
        assert verdict.relation is Relation.INCOMPARABLE
        assert verdict.uniform_gap == pytest.approx(-0.05)
        assert verdict.mixture_gaps == pytest.approx((0.15, -0.05))

    def test_hull_mode_reports_mixture_gaps(self, symmetric_q, two_states, gini_spec):
        hull = symmetric_q.with_hull_mode(HullMode.CONVEX_HULL)
        f = Act([1.0, 2.0], "f", two_states)
        g = Act([0.5, 2.0], "g", two_states)
        verdict = dominance(f, g, hull, gini_spec)
        assert verdict.relation is Relation.DOMINATES
        assert len(verdict.mixture_gaps) == 19


class TestStrongDominance:
    def test_translated_act(self, symmetric_q, two_states, entropic):
        g = Act([0.2, -0.4], "g", two_states)
        f = g.shifted(0.1, "f")
        assert strong_dominance(f, g, symmetric_q, entropic, 0.05)
        assert not strong_dominance(f, g, symmetric_q, entropic, 0.2)
        assert not strong_dominance(g, g, symmetric_q, entropic, 0.05)

    def test_incomparable_is_never_strong(self, symmetric_q, two_states, entropic):
        f = Act([1.0, 0.0], "f", two_states)
        g = Act([0.0, 0.8], "g", two_states)
        assert not strong_dominance(f, g, symmetric_q, entropic, 1e-6)

    @pytest.mark.parametrize("eps", [0.0, -1.0])
    def test_epsilon_must_be_positive(self, symmetric_q, two_states, entropic, eps):
        f = Act([1.0, 0.0], "f", two_states)
        with pytest.raises(DomainError):
            strong_dominance(f, f, symmetric_q, entropic, eps)

    def test_strong_implies_strict(self, rng):
        space = StateSpace.default(3)
        spec = DivergenceSpec.entropic(0.8)
        Q = random_model_set(rng, space, 2)
        for _ in range(100):
            f, g = random_act(rng, space), random_act(rng, space, "g")
            verdict = dominance(f, g, Q, spec)
            if is_strong(verdict, 1e-6):
                assert verdict.strict
                assert criterion_value(f, Q, spec).value > criterion_value(g, Q, spec).value

    @pytest.mark.parametrize("spec", [DivergenceSpec.entropic(0.8), DivergenceSpec.gini(1.5)], ids=["entropy", "gini"])
    def test_dominating_act_has_the_higher_value(self, rng, spec):
        space = StateSpace.default(3)
        Q = random_model_set(rng, space, 2)
        seen = 0
        for _ in range(200):
            g = random_act(rng, space, "g")
            f = Act(g.utils + rng.uniform(-0.3, 1.0, 3), "f", space)
            verdict = dominance(f, g, Q, spec)
            if verdict.relation is Relation.DOMINATES:
                seen += 1
                assert criterion_value(f, Q, spec).value >= criterion_value(g, Q, spec).value - 1e-9
            elif verdict.relation is Relation.DOMINATED:
                assert criterion_value(g, Q, spec).value >= criterion_value(f, Q, spec).value - 1e-9
        assert seen > 0


class TestMixtureRobustness:
    def test_translation_survives_small_perturbations(self, rng, symmetric_q, two_states, entropic):
        g = random_act(rng, two_states, "g")
        f = g.shifted(0.5, "f")
        perturbations = [(random_act(rng, two_states, "h"), random_act(rng, two_states, "l")) for _ in range(5)]
        assert mixture_robust(f, g, symmetric_q, entropic, perturbations, 0.01)

    def test_full_weight_on_perturbation(self, symmetric_q, two_states, entropic):
        g = Act([0.0, 0.0], "g", two_states)
        f = g.shifted(0.5, "f")
        h, l = Act([0.0, 0.0], "h", two_states), Act([1.0, 1.0], "l", two_states)
        assert not mixture_robust(f, g, symmetric_q, entropic, [(h, l)], 1.0)

    def test_delta_range(self, symmetric_q, two_states, entropic):
        f = Act([1.0, 1.0], "f", two_states)
        with pytest.raises(DomainError):
            mixture_robust(f, f, symmetric_q, entropic, [], 1.5)


class TestClassification:
    @pytest.mark.parametrize("spec", [DivergenceSpec.entropic(1.0), DivergenceSpec.gini(1.0)], ids=["entropy", "gini"])
    def test_bets_follow_unanimous_likelihood(self, rng, spec):
        space = StateSpace.default(4)
        Q = random_model_set(rng, space, 3)
        report = bet_consistency_check(Q, spec, trials=500, seed=7)
        assert report.trials > 0
        assert report.consistent, report.violations[:3]

    def test_bet_check_needs_finite_penalty(self, symmetric_q):
        with pytest.raises(DomainError):
            bet_consistency_check(symmetric_q, DivergenceSpec.indicator(), trials=10, seed=0)

    def test_neutrality(self, symmetric_q, two_states):
        assert neutrality_check(symmetric_q, DivergenceSpec.indicator(), trials=50, seed=1)
        assert neutrality_check(symmetric_q, DivergenceSpec.gini("inf"), trials=50, seed=1)
        assert not neutrality_check(ModelSet((Model([0.5, 0.5], two_states),)),
                                    DivergenceSpec.entropic(1.0), trials=50, seed=1)

    def test_smaller_lambda_is_more_averse(self, rng):
        space = StateSpace.default(3)
        Q = random_model_set(rng, space, 2)
        comparison = compare_misspecification_aversion(
            Q, DivergenceSpec.entropic(0.5), DivergenceSpec.entropic(2.0), trials=50, seed=3)
        assert comparison.more_averse
        reverse = compare_misspecification_aversion(
            Q, DivergenceSpec.entropic(2.0), DivergenceSpec.entropic(0.5), trials=50, seed=3)
        assert not reverse.index_ordered
        assert not reverse.more_averse

    def test_neutral_is_least_averse(self, rng):
        space = StateSpace.default(3)
        Q = random_model_set(rng, space, 2)
        comparison = compare_misspecification_aversion(
            Q, DivergenceSpec.gini(1.0), DivergenceSpec.indicator(), trials=30, seed=4)
        assert comparison.more_averse
        assert comparison.samples == 32
