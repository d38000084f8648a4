"""Backward-chaining proof engine with pluggable strategies.

Depth-first search over sub-problems: the strategy orders the applicable
actions, conjunctive branches are solved in order, and discharge obligations
are threaded down as usage requirements so that every returned proof
satisfies the relevance discipline.  Also home to the baseline heuristic
strategy, the Q-learning strategy, and the training / cross-validation
loops.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass

from .formula import Formula, Sequent, complexity, format_formula
from .features import (
    FeatureId,
    action_order_key,
    priority_index,
    state_accessibility,
)
from .graph import ProblemGraph, build_graph
from .kernel import (
    ELIMINATIONS,
    Action,
    Expansion,
    Proof,
    applicable_actions,
    expansions,
    proof_length,
    proof_node,
    sequent_key,
)
from .qlearn import (
    EpsilonSchedule,
    QModel,
    Transition,
    decay,
    order_actions,
    reward,
    update,
    zero_model,
)

PROVED = "proved"
REFUTED = "refuted"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True, slots=True)
class SearchLimits:
    max_steps: int = 10000  # budget on generated sub-problems (T)
    max_depth: int = 100


@dataclass(frozen=True, slots=True)
class SearchStats:
    outcome: str
    p: int  # inference steps in the returned proof, 0 unless proved
    T: int  # sub-problems generated


class Strategy:
    """Orders candidate actions; learning strategies also observe the engine."""

    name = "strategy"
    uses_graph = True  # set False to skip per-state graph construction

    def order(self, sequent: Sequent, actions, graph: ProblemGraph | None, rng: random.Random):
        raise NotImplementedError

    def on_expand(self, sequent: Sequent, actions) -> None:
        pass

    def on_apply(self, sequent: Sequent, action: Action) -> None:
        pass

    def on_proved(self, p: int, T: int) -> None:
        pass

    def on_finished(self) -> None:
        pass


class _BudgetExhausted(Exception):
    pass


@functools.lru_cache(maxsize=65536)
def _dead_expansion(exp: Expansion) -> bool:
    """True when some sub-problem is provably hopeless, so the whole
    conjunctive expansion can be skipped without losing any proof.

    An atomic, non-falsum goal occurring with positive parity in no premise
    is underivable here: every rule that could conclude it only ever moves
    positive sub-formulas of existing premises into premise position.
    """
    return any(state_accessibility(child) == -1.0 for child in exp.children)


Groups = tuple[frozenset, ...]


def _norm_groups(groups) -> Groups:
    if len(groups) <= 1:
        return tuple(groups)
    return tuple(sorted(set(groups), key=lambda g: sorted(format_formula(f) for f in g)))


class _Engine:
    def __init__(self, strategy: Strategy, limits: SearchLimits, rng: random.Random):
        self.strategy = strategy
        self.limits = limits
        self.rng = rng
        self.generated = 0
        self.limit_pruned = False

    def solve(self, seq: Sequent, groups: Groups, depth: int, path: set) -> Proof | None:
        if depth > self.limits.max_depth:
            self.limit_pruned = True
            return None
        prem_set = set(seq.premises)
        for g in groups:
            if not (g & prem_set):
                return None  # a required assumption is no longer available
        key = (sequent_key(seq), groups)
        if key in path:
            return None  # this problem is already open further up the branch
        graph = build_graph(seq) if self.strategy.uses_graph else None
        actions = applicable_actions(seq)
        self.strategy.on_expand(seq, actions)
        if not actions:
            return None
        path.add(key)
        try:
            for action in self.strategy.order(seq, list(actions), graph, self.rng):
                for exp in expansions(seq, action):
                    if _dead_expansion(exp):
                        continue
                    n = len(exp.children)
                    if n:
                        if self.generated + n > self.limits.max_steps:
                            self.limit_pruned = True
                            raise _BudgetExhausted
                        self.generated += n
                    self.strategy.on_apply(seq, action)
                    proof = self._solve_children(seq, action, exp, groups, depth, path)
                    if proof is not None:
                        return proof
            return None
        finally:
            path.discard(key)

    def _solve_children(
        self, seq: Sequent, action: Action, exp: Expansion, groups: Groups, depth: int, path: set
    ) -> Proof | None:
        if not exp.children:
            # a closing move uses exactly the conclusion it matches
            if all(seq.conclusion in g for g in groups):
                return proof_node(seq, action, (), exp)
            return None
        # groups naming the major premise are satisfied by the elimination itself
        live = [g for g in groups if action.major is None or action.major not in g]
        for child_groups in self._distributions(live, exp):
            proofs = []
            for child, cgroups in zip(exp.children, child_groups):
                pr = self.solve(child, cgroups, depth + 1, path)
                if pr is None:
                    break
                proofs.append(pr)
            else:
                return proof_node(seq, action, tuple(proofs), exp)
        return None

    def _distributions(self, live: list, exp: Expansion):
        """Ways of assigning each pending usage group to one child.

        A group handed to a child drops the formulas that child discharges
        (they do not survive upward) and must remain satisfiable from the
        child's premises.
        """
        if not live:
            yield exp.child_groups
            return
        options: list[list[tuple[int, frozenset]]] = []
        for g in live:
            opts = []
            for i, child in enumerate(exp.children):
                reduced = g - set(exp.discharges[i])
                if reduced and (reduced & set(child.premises)):
                    opts.append((i, reduced))
            if not opts:
                return  # this group can no longer be satisfied anywhere
            options.append(opts)
        for combo in itertools.product(*options):
            per_child: list[list[frozenset]] = [list(gs) for gs in exp.child_groups]
            for i, g in combo:
                per_child[i].append(g)
            yield tuple(_norm_groups(gs) for gs in per_child)


def prove(
    sequent: Sequent,
    strategy: Strategy,
    limits: SearchLimits = SearchLimits(),
    rng: random.Random | None = None,
) -> tuple[Proof | None, SearchStats]:
    """Search for a proof of the sequent under the strategy's ordering.

    Outcomes: proved (with a checkable proof), refuted (the loop-checked
    space was exhausted with no limit ever hit), or budget-exhausted.
    """
    if rng is None:
        rng = random.Random(0)
    eng = _Engine(strategy, limits, rng)
    proof = None
    try:
        proof = eng.solve(sequent, (), 0, set())
    except _BudgetExhausted:
        pass
    if proof is not None:
        p = proof_length(proof)
        strategy.on_proved(p, eng.generated)
        strategy.on_finished()
        return proof, SearchStats(PROVED, p, eng.generated)
    strategy.on_finished()
    outcome = BUDGET_EXHAUSTED if eng.limit_pruned else REFUTED
    return None, SearchStats(outcome, 0, eng.generated)


class BaselineStrategy(Strategy):
    """Deterministic heuristic ordering with hard relevance pruning.

    Keeps applicable actions, drops eliminations every variant of which
    creates a sub-problem whose atomic goal occurs positively in no premise,
    and orders survivors by rule priority, then ascending major complexity,
    then the canonical action order.
    """

    name = "baseline"
    uses_graph = False

    def order(self, sequent, actions, graph, rng):
        return list(_baseline_order(sequent, tuple(actions)))


@functools.lru_cache(maxsize=32768)
def _baseline_order(s: Sequent, actions: tuple) -> tuple:
    kept = [a for a in actions if not (a.rule in ELIMINATIONS and _doomed(s, a))]
    kept.sort(key=lambda a: (priority_index(a.rule), complexity(a.major) if a.major else 0)
              + action_order_key(s, a))
    return tuple(kept)


def _doomed(s: Sequent, a: Action) -> bool:
    return all(_dead_expansion(exp) for exp in expansions(s, a))


def baseline_strategy() -> Strategy:
    return BaselineStrategy()


class ShuffleStrategy(Strategy):
    """Uniformly random ordering; useful for stressing engine soundness."""

    name = "shuffle"

    def order(self, sequent, actions, graph, rng):
        out = list(actions)
        rng.shuffle(out)
        return out


class QStrategy(Strategy):
    """Epsilon-greedy Q-value ordering; optionally updates the model online.

    While learning, every applied action becomes a transition whose successor
    is the next sub-problem the engine actually expands; the terminal
    transition of a successful episode carries the proof-quality reward.
    """

    name = "q"

    def __init__(self, model: QModel, schedule: EpsilonSchedule, learning: bool = False):
        self.model = model
        self.schedule = schedule
        self.learning = learning
        self._pending: list[tuple[Sequent, Action]] = []

    def order(self, sequent, actions, graph, rng):
        return order_actions(self.model, sequent, list(actions), self.schedule, rng, graph=graph)

    def on_expand(self, sequent, actions):
        if not self.learning or not self._pending:
            return
        nxt = tuple((sequent, a) for a in actions)
        for state, action in self._pending:
            self.model = update(self.model, Transition(state, action, 0.0, nxt))
        self._pending.clear()

    def on_apply(self, sequent, action):
        if self.learning:
            self._pending.append((sequent, action))

    def on_proved(self, p, T):
        if not self.learning:
            return
        r = reward(max(p, 1), max(T, 1))
        for state, action in self._pending:
            self.model = update(self.model, Transition(state, action, r, ()))
        self._pending.clear()

    def on_finished(self):
        self._pending.clear()


def q_strategy(model: QModel, schedule: EpsilonSchedule, learning: bool = False) -> QStrategy:
    return QStrategy(model, schedule, learning)


# --- training and evaluation ------------------------------------------------


@dataclass(frozen=True, slots=True)
class EpochStats:
    epoch: int
    solved: int
    total: int
    mean_T: float
    mean_p: float
    max_weight_delta: float
    epsilon: float


def _mean(xs) -> float:
    xs = list(xs)
    return sum(xs) / len(xs) if xs else float("nan")


def train(
    problems,
    model: QModel,
    schedule: EpsilonSchedule,
    limits: SearchLimits,
    epochs: int,
    rng: random.Random,
) -> tuple[QModel, list[EpochStats]]:
    """Run learning episodes over the problems for the given number of epochs.

    Epsilon decays once per problem attempt.  Per-epoch stats report mean T
    and mean p over solved problems plus the largest absolute weight change.
    """
    strat = QStrategy(model, schedule, learning=True)
    history: list[EpochStats] = []
    previous = (model.bias,) + model.weights
    for epoch in range(1, epochs + 1):
        ts: list[int] = []
        ps: list[int] = []
        for problem in problems:
            _, stats = prove(problem, strat, limits, rng)
            if stats.outcome == PROVED:
                ts.append(stats.T)
                ps.append(stats.p)
            strat.schedule = decay(strat.schedule)
        current = (strat.model.bias,) + strat.model.weights
        delta = max((abs(a - b) for a, b in zip(current, previous)), default=0.0)
        history.append(
            EpochStats(epoch, len(ts), len(problems), _mean(ts), _mean(ps), delta, strat.schedule.epsilon)
        )
        previous = current
    return strat.model, history


def first_convergence_epoch(history, tol: float = 1e-6) -> int | None:
    """First epoch whose max absolute weight change fell below tol, if any."""
    for row in history:
        if row.max_weight_delta < tol:
            return row.epoch
    return None


@dataclass(frozen=True, slots=True)
class EvalRecord:
    index: int
    outcome: str
    p: int
    T: int


def evaluate(problems, strategy: Strategy, limits: SearchLimits) -> list[EvalRecord]:
    """Prove each problem with a non-learning strategy; deterministic."""
    rng = random.Random(0)
    out = []
    for i, problem in enumerate(problems):
        _, stats = prove(problem, strategy, limits, rng)
        out.append(EvalRecord(i, stats.outcome, stats.p, stats.T))
    return out


class InsufficientProblemsError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class CVConfig:
    enabled: tuple[FeatureId, ...]
    alpha: float = 1e-4
    gamma: float = 0.9
    epsilon: float = 0.1
    epsilon_decay: float = 0.99
    epochs: int = 3
    limits: SearchLimits = SearchLimits()
    seed: int = 0


@dataclass(frozen=True, slots=True)
class CVRecord:
    fold: int
    phase: str  # "train" or "validate"
    strategy: str  # "q" or "baseline"
    problem: int  # index into the full problem list
    outcome: str
    p: int
    T: int


@dataclass(frozen=True)
class CVResult:
    records: tuple[CVRecord, ...]
    models: tuple[QModel, ...]
    histories: tuple[tuple[EpochStats, ...], ...]
    folds: tuple[tuple[int, ...], ...]  # validation indices per fold

    def mean_T(self, phase: str = "validate", strategy: str = "q", solved_only: bool = False) -> float:
        return _mean(
            r.T
            for r in self.records
            if r.phase == phase and r.strategy == strategy and (not solved_only or r.outcome == PROVED)
        )

    def mean_p(self, phase: str = "validate", strategy: str = "q", solved_only: bool = True) -> float:
        return _mean(
            r.p
            for r in self.records
            if r.phase == phase and r.strategy == strategy and (not solved_only or r.outcome == PROVED)
        )


def partition_folds(n: int, folds: int, rng: random.Random) -> list[list[int]]:
    """Seeded shuffle split into folds whose sizes differ by at most one."""
    idx = list(range(n))
    rng.shuffle(idx)
    base, extra = divmod(n, folds)
    parts = []
    at = 0
    for f in range(folds):
        size = base + (1 if f < extra else 0)
        parts.append(idx[at : at + size])
        at += size
    return parts


def cross_validate(problems, folds: int, config: CVConfig) -> CVResult:
    """k-fold cross-validation of the learning strategy against the baseline.

    Each fold trains a fresh model on the remainder, then evaluates the
    trained model (greedy, learning off) and the baseline on both the
    training and the held-out problems.
    """
    problems = list(problems)
    if folds < 2:
        raise ValueError("cross-validation needs at least 2 folds")
    if len(problems) < folds:
        raise InsufficientProblemsError(f"{len(problems)} problems cannot fill {folds} folds")
    rng = random.Random(config.seed)
    parts = partition_folds(len(problems), folds, rng)
    records: list[CVRecord] = []
    models: list[QModel] = []
    histories = []
    for f, val_idx in enumerate(parts):
        train_idx = [i for g, part in enumerate(parts) if g != f for i in part]
        model0 = zero_model(config.enabled, config.alpha, config.gamma)
        schedule = EpsilonSchedule(config.epsilon, config.epsilon_decay)
        model, history = train(
            [problems[i] for i in train_idx], model0, schedule, config.limits, config.epochs, rng
        )
        models.append(model)
        histories.append(tuple(history))
        greedy = QStrategy(model, EpsilonSchedule(0.0), learning=False)
        base = BaselineStrategy()
        for phase, indices in (("train", train_idx), ("validate", val_idx)):
            for strat_name, strat in (("q", greedy), ("baseline", base)):
                for i in indices:
                    _, stats = prove(problems[i], strat, config.limits, random.Random(0))
                    records.append(CVRecord(f, phase, strat_name, i, stats.outcome, stats.p, stats.T))
    return CVResult(tuple(records), tuple(models), tuple(histories), tuple(tuple(p) for p in parts))


STATS_HEADER = ("problem", "outcome", "p", "T", "wall_ms", "strategy", "features", "seed")
