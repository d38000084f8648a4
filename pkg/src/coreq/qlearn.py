"""Linear Q-value model: TD updates, reward, epsilon-greedy action ordering.

The model is a bias plus one weight per enabled feature.  A tabular variant
is provided as a reference implementation: with one-hot indicator features
and the bias left out, the linear update reduces exactly to the tabular
rule, which the test suite exploits as an oracle.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from .formula import Sequent
from .features import FeatureId, FeatureVector, action_order_key, feature_vector, format_feature_set, parse_feature_set
from .graph import ProblemGraph, build_graph
from .kernel import Action


@dataclass(frozen=True, slots=True)
class QModel:
    """Bias w0 and weights w1..wn aligned with the enabled feature tuple."""

    bias: float
    weights: tuple[float, ...]
    alpha: float
    gamma: float
    enabled: tuple[FeatureId, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.enabled):
            raise ValueError("one weight per enabled feature")
        if not all(math.isfinite(w) for w in (self.bias, *self.weights)):
            raise ValueError("model parameters must be finite")
        if self.alpha < 0:
            raise ValueError("learning rate must be nonnegative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("discount must lie in [0, 1]")


def zero_model(enabled: tuple[FeatureId, ...], alpha: float = 1e-4, gamma: float = 0.9) -> QModel:
    return QModel(0.0, (0.0,) * len(enabled), alpha, gamma, tuple(enabled))


@dataclass(frozen=True, slots=True)
class EpsilonSchedule:
    """Exploration rate with multiplicative decay applied once per episode."""

    epsilon: float
    decay: float = 1.0
    step: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")


def decay(sched: EpsilonSchedule) -> EpsilonSchedule:
    return EpsilonSchedule(sched.epsilon * sched.decay, sched.decay, sched.step + 1)


@dataclass(frozen=True, slots=True)
class Transition:
    """One applied action; terminal exactly when ``next_candidates`` is empty."""

    state: Sequent
    action: Action
    reward: float
    next_candidates: tuple[tuple[Sequent, Action], ...] = ()


def dot(weights: tuple[float, ...], feats: FeatureVector) -> float:
    return sum(w * f for w, f in zip(weights, feats))


def td_update(
    weights: tuple[float, ...],
    feats: FeatureVector,
    reward: float,
    next_feature_vectors,
    alpha: float,
    gamma: float,
) -> tuple[float, ...]:
    """One gradient step on raw feature vectors (no implicit bias term).

    target = reward + gamma * max over successors (0 when there are none);
    each weight moves by alpha * (target - prediction) * feature.
    """
    prediction = dot(weights, feats)
    best = max((dot(weights, nf) for nf in next_feature_vectors), default=None)
    target = reward if best is None else reward + gamma * best
    delta = target - prediction
    return tuple(w + alpha * delta * f for w, f in zip(weights, feats))


def q_value(m: QModel, s: Sequent, a: Action, g: ProblemGraph | None = None) -> float:
    if g is None:
        g = build_graph(s)
    return m.bias + dot(m.weights, feature_vector(s, a, m.enabled, g))


def update(m: QModel, t: Transition) -> QModel:
    """Apply the TD step for one transition; the bias trains as a constant feature."""
    feats = (1.0,) + feature_vector(t.state, t.action, m.enabled, build_graph(t.state))
    nexts = [
        (1.0,) + feature_vector(s2, a2, m.enabled, build_graph(s2))
        for s2, a2 in t.next_candidates
    ]
    new = td_update((m.bias,) + m.weights, feats, t.reward, nexts, m.alpha, m.gamma)
    return replace(m, bias=new[0], weights=new[1:])


QTable = dict


def tabular_update(q: QTable, t: Transition, alpha: float, gamma: float) -> QTable:
    """Reference tabular rule: Q(s,a) <- (1-a)Q(s,a) + a(r + g max Q(s',.))."""
    key = (t.state, t.action)
    best = max((q.get((s2, a2), 0.0) for s2, a2 in t.next_candidates), default=0.0)
    out = dict(q)
    out[key] = (1.0 - alpha) * q.get(key, 0.0) + alpha * (t.reward + gamma * best)
    return out


def reward(p: int, T: int) -> float:
    """1 / (ln(1+p) * ln(1+T)); strictly decreasing in both arguments."""
    if p < 1 or T < 1:
        raise ValueError("reward is defined for p >= 1 and T >= 1")
    return 1.0 / (math.log1p(p) * math.log1p(T))


def order_actions(
    m: QModel,
    s: Sequent,
    actions: list[Action],
    sched: EpsilonSchedule,
    rng: random.Random,
    graph: ProblemGraph | None = None,
) -> list[Action]:
    """Q-descending order with canonical tie-breaks; with probability epsilon,
    a uniformly random permutation instead."""
    if not actions:
        raise ValueError("order_actions requires at least one action")
    if sched.epsilon > 0.0 and rng.random() < sched.epsilon:
        shuffled = list(actions)
        rng.shuffle(shuffled)
        return shuffled
    if graph is None:
        graph = build_graph(s)
    return sorted(actions, key=lambda a: (-q_value(m, s, a, graph),) + action_order_key(s, a))


# --- model files -----------------------------------------------------------

MODEL_HEADER = "coreq-model v1"


class ModelFormatError(Exception):
    pass


def format_model(m: QModel) -> str:
    lines = [
        MODEL_HEADER,
        f"features: {format_feature_set(m.enabled)}",
        f"alpha: {m.alpha!r}",
        f"gamma: {m.gamma!r}",
        f"w0: {m.bias!r}",
    ]
    for i, (fid, w) in enumerate(zip(m.enabled, m.weights), start=1):
        lines.append(f"w{i} {fid.value}: {w!r}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> QModel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != MODEL_HEADER:
        raise ModelFormatError(f"expected header {MODEL_HEADER!r}")

    def take(prefix: str, line: str) -> str:
        if not line.startswith(prefix):
            raise ModelFormatError(f"expected {prefix!r} line, found {line!r}")
        return line[len(prefix):].strip()

    if len(lines) < 5:
        raise ModelFormatError("model file is truncated")
    enabled = parse_feature_set(take("features:", lines[1]))
    alpha = float(take("alpha:", lines[2]))
    gamma = float(take("gamma:", lines[3]))
    bias = float(take("w0:", lines[4]))
    weights = []
    weight_lines = lines[5:]
    if len(weight_lines) != len(enabled):
        raise ModelFormatError(
            f"expected {len(enabled)} weight lines for features "
            f"{format_feature_set(enabled) or '(primitives only)'}, found {len(weight_lines)}"
        )
    for i, (fid, line) in enumerate(zip(enabled, weight_lines), start=1):
        value = take(f"w{i} {fid.value}:", line)
        weights.append(float(value))
    return QModel(bias, tuple(weights), alpha, gamma, enabled)


def save_model(m: QModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_model(m))


def load_model(path) -> QModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())
