"""State/action features feeding the linear Q model.

Two primitive features (rule ordering, basic rule filter) are enabled in
every configuration; the four selectable ones are keyed by the letters
A (atomic accessibility), B (major complexity), C (weighted major
complexity) and D (shortest path to goal).
"""

from __future__ import annotations

import enum
import functools

from .formula import (
    FALSUM,
    And,
    Atom,
    Exists,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    Sequent,
    complexity,
    weighted_complexity,
)
from .graph import INFINITY, ProblemGraph, shortest_distance
from .kernel import Action, RuleId, is_applicable


class FeatureId(enum.Enum):
    RULE_ORDERING = "RuleOrdering"
    BASIC_RULE_FILTER = "BasicRuleFilter"
    ATOMIC_ACCESSIBILITY = "AtomicAccessibility"
    MAJOR_COMPLEXITY = "MajorComplexity"
    WEIGHTED_MAJOR_COMPLEXITY = "WeightedMajorComplexity"
    SHORTEST_PATH_TO_GOAL = "ShortestPathToGoal"


ALWAYS_ENABLED = (FeatureId.RULE_ORDERING, FeatureId.BASIC_RULE_FILTER)

FEATURE_LETTER = {
    FeatureId.ATOMIC_ACCESSIBILITY: "A",
    FeatureId.MAJOR_COMPLEXITY: "B",
    FeatureId.WEIGHTED_MAJOR_COMPLEXITY: "C",
    FeatureId.SHORTEST_PATH_TO_GOAL: "D",
}
LETTER_FEATURE = {v: k for k, v in FEATURE_LETTER.items()}


def parse_feature_set(text: str) -> tuple[FeatureId, ...]:
    """Letters like "A,C" -> canonical enabled tuple (primitives always included)."""
    selected = set(ALWAYS_ENABLED)
    for part in text.split(","):
        letter = part.strip()
        if not letter:
            continue
        if letter not in LETTER_FEATURE:
            raise ValueError(f"unknown feature letter {letter!r} (known: A,B,C,D)")
        selected.add(LETTER_FEATURE[letter])
    return tuple(f for f in FeatureId if f in selected)


def format_feature_set(enabled: tuple[FeatureId, ...]) -> str:
    return ",".join(FEATURE_LETTER[f] for f in enabled if f in FEATURE_LETTER)


# Approximation of the classical ordering-of-choices heuristic: deterministic
# goal-closing moves first, information-losing disjunction introductions last.
RULE_PRIORITY: tuple[tuple[RuleId, ...], ...] = (
    (RuleId.HYPOTHESIS,),
    (RuleId.NEG_ELIM,),
    (RuleId.AND_ELIM,),
    (RuleId.IMP_ELIM,),
    (RuleId.OR_ELIM,),
    (RuleId.AND_INTRO,),
    (RuleId.NEG_INTRO,),
    (RuleId.IMP_INTRO,),
    (RuleId.FORALL_INTRO,),
    (RuleId.EXISTS_ELIM,),
    (RuleId.FORALL_ELIM,),
    (RuleId.EXISTS_INTRO,),
    (RuleId.OR_INTRO_L, RuleId.OR_INTRO_R),
)

_PRIORITY_INDEX = {rule: i for i, tier in enumerate(RULE_PRIORITY) for rule in tier}


def priority_index(rule: RuleId) -> int:
    return _PRIORITY_INDEX[rule]


def action_order_key(s: Sequent, a: Action) -> tuple:
    """Canonical total order on actions: rule priority, then premise index."""
    major_idx = s.premises.index(a.major) if a.major is not None else -1
    term_name = a.instantiation.name if a.instantiation is not None else ""
    return (priority_index(a.rule), major_idx, term_name, a.rule.value)


def rule_ordering(s: Sequent, a: Action) -> float:
    """Preference in [0, 1] for the action's rule; top priority scores 1.0."""
    tiers = len(RULE_PRIORITY)
    return (tiers - 1 - priority_index(a.rule)) / (tiers - 1)


def basic_rule_filter(s: Sequent, a: Action) -> float:
    """+1 if the action passes the hard applicability test, -1 otherwise."""
    return 1.0 if is_applicable(s, a) else -1.0


# Preference tiers for a positively occurring atomic goal, best first.
# Kept in one map so the ranking can be revised in one place.
ACCESSIBILITY_TIERS = {
    "premise": 1.0,  # the goal atom is itself a premise
    "direct": 0.8,  # reachable through conjunction/consequent edges only
    "under_or": 0.5,  # a disjunction must be split on the way down
    "under_quantifier": 0.25,  # a quantifier must be instantiated on the way down
    "blocked": 0.0,  # positive parity, but behind sign-flipping edges
}

_NEGATIVE_STEPS = ("antecedent", "not")


def _occurrence_paths(f: Formula, goal: Atom) -> list[tuple[str, ...]]:
    """Connective-step paths from the formula root to occurrences of the goal atom.

    Occurrences under a binder match with the bound variable as a wildcard,
    so ``P(x)`` inside a quantified premise counts for goal ``P(a)``.
    """
    paths: list[tuple[str, ...]] = []

    def walk(g: Formula, steps: tuple[str, ...]) -> None:
        if isinstance(g, Atom):
            if g.predicate == goal.predicate and (g.arg == goal.arg or g.arg.kind == "variable"):
                paths.append(steps)
            return
        if isinstance(g, Not):
            walk(g.child, steps + ("not",))
        elif isinstance(g, And):
            walk(g.left, steps + ("and",))
            walk(g.right, steps + ("and",))
        elif isinstance(g, Or):
            walk(g.left, steps + ("or",))
            walk(g.right, steps + ("or",))
        elif isinstance(g, Implies):
            walk(g.antecedent, steps + ("antecedent",))
            walk(g.consequent, steps + ("consequent",))
        elif isinstance(g, (ForAll, Exists)):
            walk(g.body, steps + ("quantifier",))

    walk(f, ())
    return paths


@functools.lru_cache(maxsize=32768)
def state_accessibility(s: Sequent) -> float:
    """Accessibility score of the state's conclusion; see ``atomic_accessibility``."""
    goal = s.conclusion
    if not isinstance(goal, Atom):
        return 0.0
    best: float | None = None
    for p in s.premises:
        for steps in _occurrence_paths(p, goal):
            flips = sum(1 for st in steps if st in _NEGATIVE_STEPS)
            if flips % 2:
                continue  # negative occurrence
            if flips:
                tier = ACCESSIBILITY_TIERS["blocked"]
            elif not steps:
                tier = ACCESSIBILITY_TIERS["premise"]
            elif any(st == "quantifier" for st in steps):
                tier = ACCESSIBILITY_TIERS["under_quantifier"]
            elif any(st == "or" for st in steps):
                tier = ACCESSIBILITY_TIERS["under_or"]
            else:
                tier = ACCESSIBILITY_TIERS["direct"]
            best = tier if best is None else max(best, tier)
    return -1.0 if best is None else best


def atomic_accessibility(s: Sequent, a: Action) -> float:
    """0 for non-atomic or falsum goals; -1.0 when the atomic goal occurs
    positively in no premise; otherwise a preference tier in [0, 1]."""
    return state_accessibility(s)


@functools.lru_cache(maxsize=32768)
def _max_premise_complexity(premises: tuple[Formula, ...], weighted: bool) -> int:
    measure = weighted_complexity if weighted else complexity
    return max((measure(p) for p in premises), default=0)


def major_complexity_score(s: Sequent, a: Action) -> float:
    """1 - c(major)/max-premise-complexity; 0 without a major or when all
    premises are atomic.  Simpler majors score higher."""
    if a.major is None:
        return 0.0
    top = _max_premise_complexity(s.premises, False)
    if top == 0:
        return 0.0
    return 1.0 - complexity(a.major) / top


def weighted_major_complexity_score(s: Sequent, a: Action) -> float:
    """As ``major_complexity_score`` with the connective-weighted measure."""
    if a.major is None:
        return 0.0
    top = _max_premise_complexity(s.premises, True)
    if top == 0:
        return 0.0
    return 1.0 - weighted_complexity(a.major) / top


def shortest_path_score(s: Sequent, a: Action, g: ProblemGraph) -> float:
    """1/(1+d) for the graph distance d from the major to the conclusion node;
    0 without a major or when no directed path exists."""
    if a.major is None:
        return 0.0
    d = shortest_distance(g, g.node_of(a.major), g.conclusion_node)
    if d == INFINITY:
        return 0.0
    return 1.0 / (1.0 + d)


_EVALUATORS = {
    FeatureId.RULE_ORDERING: lambda s, a, g: rule_ordering(s, a),
    FeatureId.BASIC_RULE_FILTER: lambda s, a, g: basic_rule_filter(s, a),
    FeatureId.ATOMIC_ACCESSIBILITY: lambda s, a, g: atomic_accessibility(s, a),
    FeatureId.MAJOR_COMPLEXITY: lambda s, a, g: major_complexity_score(s, a),
    FeatureId.WEIGHTED_MAJOR_COMPLEXITY: lambda s, a, g: weighted_major_complexity_score(s, a),
    FeatureId.SHORTEST_PATH_TO_GOAL: lambda s, a, g: shortest_path_score(s, a, g),
}

FeatureVector = tuple[float, ...]


def feature_vector(s: Sequent, a: Action, enabled, g: ProblemGraph) -> FeatureVector:
    """Evaluate the enabled features in canonical FeatureId order."""
    enabled_set = set(enabled)
    return tuple(_EVALUATORS[f](s, a, g) for f in FeatureId if f in enabled_set)
