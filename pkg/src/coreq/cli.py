"""Command-line interface: prove, check, train, cv, bench, gen, graph.

Every subcommand is deterministic for fixed flags, files, and seed; wall
times are recorded in stats CSVs only when --timing is given so that output
files are byte-stable across runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .formula import FormulaError, Sequent, format_sequent, parse_sequent
from .features import parse_feature_set
from .gen import GenConfig, GenError, generate_problems, read_problem_file, write_problem_file
from .graph import build_graph, to_dot
from .kernel import check_proof, proof_from_dict, proof_to_dict, proof_to_text
from .qlearn import EpsilonSchedule, ModelFormatError, load_model, parse_model, save_model, zero_model
from .search import (
    BUDGET_EXHAUSTED,
    PROVED,
    REFUTED,
    STATS_HEADER,
    BaselineStrategy,
    CVConfig,
    QStrategy,
    SearchLimits,
    cross_validate,
    prove,
    train,
)

EXIT_PROVED = 0
EXIT_REFUTED = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3

_OUTCOME_EXIT = {PROVED: EXIT_PROVED, REFUTED: EXIT_REFUTED, BUDGET_EXHAUSTED: EXIT_BUDGET}


def _default_seed() -> int:
    env = os.environ.get("COREQ_SEED")
    return int(env) if env else 0


def _add_limit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-steps", type=int, default=10000, help="budget on generated sub-problems")
    p.add_argument("--max-depth", type=int, default=100, help="depth bound on the search tree")


def _add_seed_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $COREQ_SEED or 0)")


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", default="", help="selectable feature letters, e.g. A,C")
    p.add_argument("--alpha", type=float, default=1e-4, help="learning rate")
    p.add_argument("--gamma", type=float, default=0.9, help="discount factor")
    p.add_argument("--epsilon", type=float, default=0.1, help="initial exploration rate")
    p.add_argument("--decay", type=float, default=0.99, help="epsilon decay per problem attempt")
    p.add_argument("--epochs", type=int, default=3)


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _limits_of(args) -> SearchLimits:
    return SearchLimits(max_steps=args.max_steps, max_depth=args.max_depth)


def _load_problems(path) -> list[Sequent]:
    return [seq for seq, _ in read_problem_file(path)]


def _strategy_of(args):
    if args.strategy == "baseline":
        return BaselineStrategy(), ""
    if args.model is None:
        raise SystemExit("--strategy q needs --model FILE")
    model = load_model(args.model)
    from .features import format_feature_set

    return QStrategy(model, EpsilonSchedule(0.0), learning=False), format_feature_set(model.enabled)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _now_ms() -> float:
    return time.perf_counter() * 1000.0


# --- prove -------------------------------------------------------------------


def cmd_prove(args) -> int:
    if (args.sequent is None) == (args.problems is None):
        raise SystemExit("prove needs exactly one of --sequent or --problems")
    strategy, features = _strategy_of(args)
    limits = _limits_of(args)
    seed = _seed_of(args)
    if args.sequent is not None:
        problems = [parse_sequent(args.sequent)]
    else:
        problems = _load_problems(args.problems)
    rows = []
    worst = EXIT_PROVED
    for i, seq in enumerate(problems):
        t0 = _now_ms()
        proof, stats = prove(seq, strategy, limits, random.Random(seed))
        wall = int(_now_ms() - t0) if args.timing else 0
        print(f"{format_sequent(seq)}\n  -> {stats.outcome} (p={stats.p}, T={stats.T})")
        if proof is not None and not args.quiet:
            print(proof_to_text(proof))
        if proof is not None and args.proof_out:
            with open(args.proof_out, "w", encoding="utf-8") as fh:
                json.dump(proof_to_dict(proof), fh, indent=2)
        rows.append((i, stats.outcome, stats.p, stats.T, wall, strategy.name, features, seed))
        worst = max(worst, _OUTCOME_EXIT[stats.outcome])
    if args.csv:
        _write_csv(args.csv, STATS_HEADER, rows)
    return worst


# --- check -------------------------------------------------------------------


def cmd_check(args) -> int:
    with open(args.proof, "r", encoding="utf-8") as fh:
        proof = proof_from_dict(json.load(fh))
    result = check_proof(proof)
    if result.valid:
        print("valid")
        return 0
    for v in result.violations:
        print(f"violation: {v}")
    return 1


# --- train -------------------------------------------------------------------


def cmd_train(args) -> int:
    problems = _load_problems(args.problems)
    seed = _seed_of(args)
    enabled = parse_feature_set(args.features)
    model0 = zero_model(enabled, args.alpha, args.gamma)
    schedule = EpsilonSchedule(args.epsilon, args.decay)
    model, history = train(problems, model0, schedule, _limits_of(args), args.epochs, random.Random(seed))
    save_model(model, args.model_out)
    print(f"trained {args.epochs} epoch(s) on {len(problems)} problem(s) -> {args.model_out}")
    for row in history:
        print(
            f"  epoch {row.epoch}: solved {row.solved}/{row.total}"
            f" mean_T={row.mean_T:.2f} mean_p={row.mean_p:.2f}"
            f" max_dw={row.max_weight_delta:.3e} eps={row.epsilon:.4f}"
        )
    if args.csv:
        header = ("epoch", "solved", "total", "mean_T", "mean_p", "max_weight_delta", "epsilon")
        rows = [
            (r.epoch, r.solved, r.total, repr(r.mean_T), repr(r.mean_p), repr(r.max_weight_delta), repr(r.epsilon))
            for r in history
        ]
        _write_csv(args.csv, header, rows)
    return 0


# --- cross-validation ----------------------------------------------------------


def cmd_cv(args) -> int:
    problems = _load_problems(args.problems)
    seed = _seed_of(args)
    config = CVConfig(
        enabled=parse_feature_set(args.features),
        alpha=args.alpha,
        gamma=args.gamma,
        epsilon=args.epsilon,
        epsilon_decay=args.decay,
        epochs=args.epochs,
        limits=_limits_of(args),
        seed=seed,
    )
    result = cross_validate(problems, args.folds, config)
    header = ("fold", "phase", "strategy", "problems", "solved", "mean_T", "mean_p", "mean_T_solved", "mean_p_solved")
    rows = []

    def summary(records):
        total = len(records)
        solved = [r for r in records if r.outcome == PROVED]
        mean = lambda xs: sum(xs) / len(xs) if xs else float("nan")
        return (
            total,
            len(solved),
            repr(mean([r.T for r in records])),
            repr(mean([r.p for r in records])),
            repr(mean([r.T for r in solved])),
            repr(mean([r.p for r in solved])),
        )

    grouped: dict = {}
    for r in result.records:
        grouped.setdefault((r.fold, r.phase, r.strategy), []).append(r)
    for (fold, phase, strat), records in sorted(grouped.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        rows.append((fold, phase, strat) + summary(records))
    overall: dict = {}
    for r in result.records:
        overall.setdefault((r.phase, r.strategy), []).append(r)
    for (phase, strat), records in sorted(overall.items()):
        rows.append(("all", phase, strat) + summary(records))
    _write_csv(args.csv, header, rows)
    q_val = result.mean_T("validate", "q")
    base_val = result.mean_T("validate", "baseline")
    print(f"validation mean T: q={q_val:.2f} baseline={base_val:.2f} -> {args.csv}")
    return 0


# --- bench ---------------------------------------------------------------------


def _bench_one(payload):
    index, seq_text, kind, model_text, max_steps, max_depth, timing = payload
    seq = parse_sequent(seq_text)
    if kind == "baseline":
        strategy = BaselineStrategy()
    else:
        strategy = QStrategy(parse_model(model_text), EpsilonSchedule(0.0), learning=False)
    t0 = _now_ms()
    _, stats = prove(seq, strategy, SearchLimits(max_steps, max_depth), random.Random(0))
    wall = int(_now_ms() - t0) if timing else 0
    return (index, stats.outcome, stats.p, stats.T, wall)


def cmd_bench(args) -> int:
    problems = _load_problems(args.problems)
    seed = _seed_of(args)
    model_text = ""
    features = ""
    if args.strategy == "q":
        if args.model is None:
            raise SystemExit("--strategy q needs --model FILE")
        with open(args.model, "r", encoding="utf-8") as fh:
            model_text = fh.read()
        from .features import format_feature_set

        features = format_feature_set(parse_model(model_text).enabled)
    payloads = [
        (i, format_sequent(seq), args.strategy, model_text, args.max_steps, args.max_depth, args.timing)
        for i, seq in enumerate(problems)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = sorted(pool.map(_bench_one, payloads), key=lambda r: r[0])
    else:
        results = [_bench_one(p) for p in payloads]
    rows = [
        (i, outcome, p, T, wall, args.strategy, features, seed) for (i, outcome, p, T, wall) in results
    ]
    _write_csv(args.csv, STATS_HEADER, rows)
    solved = sum(1 for r in results if r[1] == PROVED)
    mean_T = sum(r[3] for r in results) / len(results) if results else float("nan")
    print(f"{len(results)} problems: {solved} proved, mean T={mean_T:.2f} -> {args.csv}")
    return 0


# --- gen ------------------------------------------------------------------------


def cmd_gen(args) -> int:
    connectives = tuple(c.strip() for c in args.connectives.split(",") if c.strip())
    cfg = GenConfig(
        num_predicates=args.predicates,
        num_individuals=args.individuals,
        connectives=connectives,
        max_depth=args.depth,
        max_premises=args.max_premises,
        count=args.count,
        seed=_seed_of(args),
        solve_budget=args.budget,
    )
    problems = generate_problems(cfg)
    write_problem_file(args.out, problems)
    provable = sum(1 for _, label in problems if label == "provable")
    print(f"{len(problems)} problems ({provable} provable) -> {args.out}")
    return 0


# --- graph ------------------------------------------------------------------------


def cmd_graph(args) -> int:
    seq = parse_sequent(args.sequent)
    dot = to_dot(build_graph(seq))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dot + "\n")
    else:
        print(dot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coreq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="search for a proof of a sequent or a problem file")
    p.add_argument("--sequent", help='inline sequent, e.g. "A(a), A(a) -> B(a) |- B(a)"')
    p.add_argument("--problems", help="problem file, one sequent per line")
    p.add_argument("--strategy", choices=("baseline", "q"), default="baseline")
    p.add_argument("--model", help="model file for --strategy q")
    p.add_argument("--proof-out", help="write the proof as JSON")
    p.add_argument("--csv", help="write a stats CSV")
    p.add_argument("--quiet", action="store_true", help="do not print proof trees")
    p.add_argument("--timing", action="store_true", help="record wall times in the CSV")
    _add_limit_flags(p)
    _add_seed_flag(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="verify a proof JSON file")
    p.add_argument("--proof", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("train", help="train a Q model on a problem file")
    p.add_argument("--problems", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--csv", help="write per-epoch stats")
    _add_hyper_flags(p)
    _add_limit_flags(p)
    _add_seed_flag(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="k-fold cross-validation against the baseline")
    p.add_argument("--problems", required=True)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--csv", required=True)
    _add_hyper_flags(p)
    _add_limit_flags(p)
    _add_seed_flag(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("bench", help="run a strategy over a problem file")
    p.add_argument("--problems", required=True)
    p.add_argument("--strategy", choices=("baseline", "q"), default="baseline")
    p.add_argument("--model")
    p.add_argument("--csv", required=True)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (evaluation only)")
    p.add_argument("--timing", action="store_true", help="record wall times in the CSV")
    _add_limit_flags(p)
    _add_seed_flag(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate a labeled problem file")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--predicates", type=int, default=3)
    p.add_argument("--individuals", type=int, default=3)
    p.add_argument("--connectives", default="~,&,|,->,forall,exists")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--max-premises", type=int, default=3)
    p.add_argument("--budget", type=int, default=500)
    _add_seed_flag(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("graph", help="export a problem graph as DOT")
    p.add_argument("--sequent", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormulaError, GenError, ModelFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
