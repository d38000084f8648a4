"""Random problem generation with a solvability filter.

Sentences are sampled by depth-bounded recursive descent over a configurable
connective alphabet; candidate sequents are kept only when the baseline
strategy decides them (proof or exhaustive refutation) within a step budget,
and duplicates are dropped by canonical form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formula import And, Atom, Exists, ForAll, Formula, Implies, Not, Or, Sequent, Term, format_sequent, parse_sequent
from .kernel import sequent_key
from .search import BUDGET_EXHAUSTED, PROVED, REFUTED, BaselineStrategy, SearchLimits, prove

KNOWN_CONNECTIVES = ("~", "&", "|", "->", "forall", "exists")
PROVABLE = "provable"
REFUTABLE = "refutable"

_PREDICATE_NAMES = tuple(chr(ord("A") + i) for i in range(26))
_CONSTANT_NAMES = "abcdefghijklmnopqrst"  # u-z is the variable namespace
_BOUND_NAMES = ("x", "y", "z", "u", "v", "w")


class GenError(Exception):
    pass


class InvalidConfigError(GenError, ValueError):
    pass


class SpaceExhaustedError(GenError):
    pass


@dataclass(frozen=True, slots=True)
class GenConfig:
    num_predicates: int = 3
    num_individuals: int = 3
    connectives: tuple[str, ...] = KNOWN_CONNECTIVES
    max_depth: int = 4  # depth bound for every sampled sentence
    max_premises: int = 3
    count: int = 100
    seed: int = 0
    solve_budget: int = 500


def _validate(cfg: GenConfig) -> None:
    if cfg.num_predicates < 1 or cfg.num_predicates > len(_PREDICATE_NAMES):
        raise InvalidConfigError("num_predicates must be in 1..26")
    if cfg.num_individuals < 1 or cfg.num_individuals > len(_CONSTANT_NAMES):
        raise InvalidConfigError("num_individuals must be in 1..20")
    unknown = set(cfg.connectives) - set(KNOWN_CONNECTIVES)
    if unknown:
        raise InvalidConfigError(f"unknown connectives: {sorted(unknown)}")
    if not cfg.connectives:
        raise InvalidConfigError("at least one connective is required")
    if cfg.max_depth < 1 or cfg.max_premises < 0:
        raise InvalidConfigError("max_depth must be >= 1 and max_premises >= 0")
    if cfg.count < 1 or cfg.solve_budget < 1:
        raise InvalidConfigError("count and solve_budget must be >= 1")


def _bound_name(scope: tuple[str, ...]) -> str:
    i = len(scope)
    base = _BOUND_NAMES[i % len(_BOUND_NAMES)]
    return base if i < len(_BOUND_NAMES) else f"{base}{i // len(_BOUND_NAMES)}"


def _sample_formula(rng: random.Random, cfg: GenConfig, depth: int, scope: tuple[str, ...]) -> Formula:
    kinds = ("atom",) if depth <= 0 else ("atom",) + cfg.connectives
    kind = kinds[rng.randrange(len(kinds))]
    if kind == "atom":
        predicate = _PREDICATE_NAMES[rng.randrange(cfg.num_predicates)]
        pool = [Term("constant", _CONSTANT_NAMES[i]) for i in range(cfg.num_individuals)]
        pool += [Term("variable", name) for name in scope]
        return Atom(predicate, pool[rng.randrange(len(pool))])
    if kind == "~":
        return Not(_sample_formula(rng, cfg, depth - 1, scope))
    if kind in ("&", "|", "->"):
        left = _sample_formula(rng, cfg, depth - 1, scope)
        right = _sample_formula(rng, cfg, depth - 1, scope)
        shape = {"&": And, "|": Or, "->": Implies}[kind]
        return shape(left, right)
    name = _bound_name(scope)
    body = _sample_formula(rng, cfg, depth - 1, scope + (name,))
    return (ForAll if kind == "forall" else Exists)(name, body)


def generate_problems(cfg: GenConfig) -> list[tuple[Sequent, str]]:
    """Sample, filter, and label ``cfg.count`` distinct decided problems.

    Deterministic for a fixed config.  Raises SpaceExhaustedError when the
    sampling space cannot yield enough decided, distinct problems.
    """
    _validate(cfg)
    rng = random.Random(cfg.seed)
    baseline = BaselineStrategy()
    limits = SearchLimits(max_steps=cfg.solve_budget, max_depth=50)
    seen: set = set()
    out: list[tuple[Sequent, str]] = []
    attempts = 0
    max_attempts = max(20000, cfg.count * 400)
    while len(out) < cfg.count:
        attempts += 1
        if attempts > max_attempts:
            raise SpaceExhaustedError(
                f"only {len(out)} of {cfg.count} problems found after {attempts - 1} samples"
            )
        n_premises = rng.randint(0, cfg.max_premises)
        premises = tuple(_sample_formula(rng, cfg, cfg.max_depth, ()) for _ in range(n_premises))
        conclusion = _sample_formula(rng, cfg, cfg.max_depth, ())
        seq = Sequent(premises, conclusion)
        key = sequent_key(seq)
        if key in seen:
            continue
        seen.add(key)
        _, stats = prove(seq, baseline, limits, random.Random(0))
        if stats.outcome == PROVED:
            out.append((seq, PROVABLE))
        elif stats.outcome == REFUTED:
            out.append((seq, REFUTABLE))
        # budget-exhausted candidates are undecided and dropped
    return out


# --- problem files ----------------------------------------------------------
#
# One sequent per line: "P1, P2 |- C", optionally tagged "@provable" or
# "@refutable"; "#" starts a comment.


def write_problem_file(path, problems, with_labels: bool = True) -> None:
    lines = []
    for item in problems:
        if isinstance(item, tuple):
            seq, label = item
        else:
            seq, label = item, None
        line = format_sequent(seq)
        if with_labels and label is not None:
            line += f" @{label}"
        lines.append(line)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def read_problem_file(path) -> list[tuple[Sequent, str | None]]:
    out: list[tuple[Sequent, str | None]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            label = None
            if "@" in line:
                line, tag = line.rsplit("@", 1)
                label = tag.strip()
                if label not in (PROVABLE, REFUTABLE):
                    raise GenError(f"unknown label {label!r}")
                line = line.strip()
            out.append((parse_sequent(line), label))
    return out
