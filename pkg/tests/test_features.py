"""Feature functions for the linear Q model."""

import math

from hypothesis import given, settings

from coreq.features import (
    ACCESSIBILITY_TIERS,
    FeatureId,
    atomic_accessibility,
    basic_rule_filter,
    feature_vector,
    format_feature_set,
    major_complexity_score,
    parse_feature_set,
    priority_index,
    rule_ordering,
    shortest_path_score,
    weighted_major_complexity_score,
)
from coreq.formula import parse_formula, parse_sequent
from coreq.graph import build_graph
from coreq.kernel import Action, RuleId, applicable_actions

from conftest import sequents


def seq(text):
    return parse_sequent(text)


def f(text):
    return parse_formula(text)


FIG_SEQ = seq("A(a), A(a) -> (B(a) | C(a)), ~C(a) |- B(a)")


class TestFeatureSets:
    def test_primitives_always_enabled(self):
        enabled = parse_feature_set("")
        assert enabled == (FeatureId.RULE_ORDERING, FeatureId.BASIC_RULE_FILTER)

    def test_letters_roundtrip(self):
        enabled = parse_feature_set("C,A")
        assert format_feature_set(enabled) == "A,C"
        assert FeatureId.WEIGHTED_MAJOR_COMPLEXITY in enabled


class TestRuleOrdering:
    def test_hypothesis_top(self):
        assert rule_ordering(seq("A(a) |- A(a)"), Action(RuleId.HYPOTHESIS)) == 1.0

    def test_or_intro_bottom(self):
        s = seq("|- A(a) | B(a)")
        assert rule_ordering(s, Action(RuleId.OR_INTRO_L)) == 0.0
        assert rule_ordering(s, Action(RuleId.OR_INTRO_R)) == 0.0

    def test_depends_on_rule_only(self):
        s = seq("A(a) -> B(a), C(a) -> B(a) |- B(a)")
        a1 = Action(RuleId.IMP_ELIM, major=f("A(a) -> B(a)"))
        a2 = Action(RuleId.IMP_ELIM, major=f("C(a) -> B(a)"))
        assert rule_ordering(s, a1) == rule_ordering(s, a2)

    def test_priority_table_order(self):
        assert priority_index(RuleId.HYPOTHESIS) < priority_index(RuleId.NEG_ELIM)
        assert priority_index(RuleId.AND_INTRO) < priority_index(RuleId.OR_INTRO_L)
        assert priority_index(RuleId.IMP_ELIM) < priority_index(RuleId.IMP_INTRO)


class TestBasicRuleFilter:
    def test_matching_intro_passes(self):
        assert basic_rule_filter(seq("|- A(a) & B(a)"), Action(RuleId.AND_INTRO)) == 1.0

    def test_mismatched_intro_rejected(self):
        assert basic_rule_filter(seq("|- A(a) | B(a)"), Action(RuleId.AND_INTRO)) == -1.0

    def test_neg_elim_on_falsum_goal(self):
        s = seq("~A(a) |- bot")
        assert basic_rule_filter(s, Action(RuleId.NEG_ELIM, major=f("~A(a)"))) == 1.0


class TestAtomicAccessibility:
    def test_non_atomic_goal_scores_zero(self):
        s = seq("C(a) |- A(a) -> B(a)")
        assert atomic_accessibility(s, Action(RuleId.IMP_INTRO)) == 0.0

    def test_falsum_goal_scores_zero(self):
        assert atomic_accessibility(seq("~A(a) |- bot"), Action(RuleId.NEG_INTRO)) == 0.0

    def test_negative_only_occurrence_scores_minus_one(self):
        s = seq("C(a), ~B(a) |- B(a)")
        assert atomic_accessibility(s, Action(RuleId.HYPOTHESIS)) == -1.0

    def test_goal_as_premise_scores_top(self):
        s = seq("B(a), C(a) |- B(a)")
        assert atomic_accessibility(s, Action(RuleId.HYPOTHESIS)) == 1.0

    def test_tier_ordering(self):
        direct = atomic_accessibility(seq("A(a) & B(a) |- B(a)"), Action(RuleId.HYPOTHESIS))
        under_or = atomic_accessibility(seq("A(a) | B(a) |- B(a)"), Action(RuleId.HYPOTHESIS))
        under_q = atomic_accessibility(seq("forall x. B(x) |- B(a)"), Action(RuleId.HYPOTHESIS))
        assert direct == ACCESSIBILITY_TIERS["direct"]
        assert under_or == ACCESSIBILITY_TIERS["under_or"]
        assert under_q == ACCESSIBILITY_TIERS["under_quantifier"]
        assert 1.0 > direct > under_or > under_q > 0.0

    def test_consequent_occurrence_counts_as_direct(self):
        s = seq("A(a) -> B(a) |- B(a)")
        assert atomic_accessibility(s, Action(RuleId.HYPOTHESIS)) == ACCESSIBILITY_TIERS["direct"]

    def test_double_flip_is_positive_but_blocked(self):
        s = seq("(B(a) -> C(a)) -> D(a) |- B(a)")
        assert atomic_accessibility(s, Action(RuleId.HYPOTHESIS)) == ACCESSIBILITY_TIERS["blocked"]


class TestMajorComplexity:
    S = seq("A(a), A(a) -> B(a), (A(a) -> B(a)) -> C(a) |- C(a)")

    def test_mid_complexity_major(self):
        a = Action(RuleId.IMP_ELIM, major=f("A(a) -> B(a)"))
        assert major_complexity_score(self.S, a) == 0.5

    def test_max_complexity_major_scores_zero(self):
        a = Action(RuleId.IMP_ELIM, major=f("(A(a) -> B(a)) -> C(a)"))
        assert major_complexity_score(self.S, a) == 0.0

    def test_no_major_scores_zero(self):
        assert major_complexity_score(self.S, Action(RuleId.HYPOTHESIS)) == 0.0

    def test_all_atomic_premises_score_zero(self):
        s = seq("A(a), B(a) |- A(a)")
        assert major_complexity_score(s, Action(RuleId.HYPOTHESIS)) == 0.0


class TestWeightedMajorComplexity:
    def test_equal_weighted_complexities_tie_at_zero(self):
        s = seq("A(a) & B(a), A(a) -> B(a) |- B(a)")
        for major in ("A(a) & B(a)", "A(a) -> B(a)"):
            rule = RuleId.AND_ELIM if "&" in major else RuleId.IMP_ELIM
            assert weighted_major_complexity_score(s, Action(rule, major=f(major))) == 0.0

    def test_light_major_against_heavy_premise(self):
        s = seq("~(A(a) & B(a)), A(a) -> B(a) |- B(a)")
        a = Action(RuleId.IMP_ELIM, major=f("A(a) -> B(a)"))
        assert weighted_major_complexity_score(s, a) == 0.75

    def test_no_major_scores_zero(self):
        s = seq("~(A(a) & B(a)) |- A(a) -> B(a)")
        assert weighted_major_complexity_score(s, Action(RuleId.IMP_INTRO)) == 0.0


class TestShortestPathScore:
    def test_major_equal_to_conclusion_scores_one(self):
        s = seq("A(a) -> B(a) |- A(a) -> B(a)")
        g = build_graph(s)
        a = Action(RuleId.IMP_ELIM, major=f("A(a) -> B(a)"))
        assert shortest_path_score(s, a, g) == 1.0

    def test_fig_conditional_scores_one_third(self):
        g = build_graph(FIG_SEQ)
        a = Action(RuleId.IMP_ELIM, major=f("A(a) -> (B(a) | C(a))"))
        assert shortest_path_score(FIG_SEQ, a, g) == 1.0 / 3.0

    def test_unreachable_major_scores_zero(self):
        g = build_graph(FIG_SEQ)
        a = Action(RuleId.NEG_ELIM, major=f("~C(a)"))
        assert shortest_path_score(FIG_SEQ, a, g) == 0.0

    def test_no_major_scores_zero(self):
        g = build_graph(FIG_SEQ)
        assert shortest_path_score(FIG_SEQ, Action(RuleId.OR_INTRO_L), g) == 0.0


class TestFeatureVector:
    def test_primitive_pair_has_length_two(self):
        s = seq("A(a) |- A(a)")
        v = feature_vector(s, Action(RuleId.HYPOTHESIS), parse_feature_set(""), build_graph(s))
        assert len(v) == 2

    def test_all_six_within_ranges(self):
        enabled = parse_feature_set("A,B,C,D")
        assert len(enabled) == 6
        g = build_graph(FIG_SEQ)
        for a in applicable_actions(FIG_SEQ):
            v = feature_vector(FIG_SEQ, a, enabled, g)
            assert len(v) == 6
            _assert_ranges(dict(zip(enabled, v)))

    def test_pure(self):
        g = build_graph(FIG_SEQ)
        enabled = parse_feature_set("A,B,C,D")
        a = applicable_actions(FIG_SEQ)[0]
        assert feature_vector(FIG_SEQ, a, enabled, g) == feature_vector(FIG_SEQ, a, enabled, g)


def _assert_ranges(values):
    for fid, v in values.items():
        assert math.isfinite(v)
        if fid == FeatureId.BASIC_RULE_FILTER:
            assert v in (-1.0, 1.0)
        elif fid == FeatureId.ATOMIC_ACCESSIBILITY:
            assert v == -1.0 or 0.0 <= v <= 1.0
            assert not (-1.0 < v < 0.0)
        else:
            assert 0.0 <= v <= 1.0


@given(sequents(max_depth=3))
@settings(max_examples=300, deadline=None)
def test_feature_ranges_fuzz(s):
    g = build_graph(s)
    enabled = parse_feature_set("A,B,C,D")
    actions = list(applicable_actions(s)) + [
        Action(RuleId.AND_INTRO),
        Action(RuleId.HYPOTHESIS),
    ]
    for a in actions:
        _assert_ranges(dict(zip(enabled, feature_vector(s, a, enabled, g))))


@given(sequents(max_depth=3))
@settings(max_examples=300, deadline=None)
def test_complexity_order_reversal_fuzz(s):
    from coreq.formula import complexity, weighted_complexity

    actions = [a for a in applicable_actions(s) if a.major is not None]
    for score, measure in (
        (major_complexity_score, complexity),
        (weighted_major_complexity_score, weighted_complexity),
    ):
        for a in actions:
            for b in actions:
                if measure(a.major) < measure(b.major):
                    assert score(s, a) > score(s, b)


@given(sequents(max_depth=3))
@settings(max_examples=300, deadline=None)
def test_shortest_path_antitone_fuzz(s):
    from coreq.graph import shortest_distance

    g = build_graph(s)
    actions = [a for a in applicable_actions(s) if a.major is not None]
    scored = []
    for a in actions:
        d = shortest_distance(g, g.node_of(a.major), g.conclusion_node)
        scored.append((d, shortest_path_score(s, a, g)))
    for d1, s1 in scored:
        for d2, s2 in scored:
            if d1 < d2:
                assert s1 > s2
