"""Proof search for a constructive, relevant natural-deduction calculus.

Monadic first-order sentences, a backward-chaining engine with pluggable
strategies (heuristic baseline and linear Q-learning over problem graphs),
plus problem generation, training, and benchmarking tools.
"""

from .formula import (
    FALSUM,
    And,
    Atom,
    CaptureError,
    Exists,
    Falsum,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    ParseError,
    Sequent,
    Term,
    UnboundVariableError,
    canonicalize,
    complexity,
    const,
    format_formula,
    format_sequent,
    parse_formula,
    parse_sequent,
    substitute,
    var,
    weighted_complexity,
)
from .kernel import (
    Action,
    CheckResult,
    Proof,
    RuleId,
    applicable_actions,
    apply_action,
    check_proof,
    proof_length,
)
from .graph import Parity, ProblemGraph, build_graph, parity, shortest_distance, to_dot
from .features import FeatureId, feature_vector, parse_feature_set
from .qlearn import (
    EpsilonSchedule,
    QModel,
    Transition,
    decay,
    load_model,
    order_actions,
    q_value,
    reward,
    save_model,
    tabular_update,
    update,
    zero_model,
)
from .search import (
    BUDGET_EXHAUSTED,
    PROVED,
    REFUTED,
    BaselineStrategy,
    CVConfig,
    QStrategy,
    SearchLimits,
    SearchStats,
    ShuffleStrategy,
    Strategy,
    baseline_strategy,
    cross_validate,
    prove,
    q_strategy,
    train,
)
from .gen import GenConfig, generate_problems, read_problem_file, write_problem_file

__version__ = "0.1.0"
