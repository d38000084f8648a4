"""Random problem generation and problem files."""

import pytest

from coreq.formula import Atom, Exists, Falsum, ForAll, Not, And, Or, Implies, children
from coreq.gen import (
    PROVABLE,
    REFUTABLE,
    GenConfig,
    InvalidConfigError,
    SpaceExhaustedError,
    generate_problems,
    read_problem_file,
    write_problem_file,
)
from coreq.kernel import sequent_key
from coreq.search import PROVED, REFUTED, BaselineStrategy, SearchLimits, prove

import random


def connectives_used(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        out.add(type(g).__name__)
        stack.extend(children(g))
    return out


class TestGenerate:
    def test_deterministic(self):
        cfg = GenConfig(count=30, seed=11)
        assert generate_problems(cfg) == generate_problems(cfg)

    def test_different_seeds_differ(self):
        a = generate_problems(GenConfig(count=30, seed=1))
        b = generate_problems(GenConfig(count=30, seed=2))
        assert a != b

    def test_alphabet_respected(self):
        problems = generate_problems(GenConfig(count=40, num_predicates=2, num_individuals=1, seed=3))
        for s, _ in problems:
            for f in s.premises + (s.conclusion,):
                stack = [f]
                while stack:
                    g = stack.pop()
                    if isinstance(g, Atom):
                        assert g.predicate in ("A", "B")
                        if g.arg.kind == "constant":
                            assert g.arg.name == "a"
                    stack.extend(children(g))

    def test_labels_match_baseline_decision(self):
        cfg = GenConfig(count=40, seed=5)
        baseline = BaselineStrategy()
        limits = SearchLimits(max_steps=cfg.solve_budget, max_depth=50)
        for s, label in generate_problems(cfg):
            _, stats = prove(s, baseline, limits, random.Random(0))
            expected = PROVABLE if stats.outcome == PROVED else REFUTABLE
            assert stats.outcome in (PROVED, REFUTED)
            assert label == expected

    def test_no_duplicates_modulo_canonical_form(self):
        problems = generate_problems(GenConfig(count=60, seed=7))
        keys = [sequent_key(s) for s, _ in problems]
        assert len(set(keys)) == len(keys)

    def test_connective_coverage_smoke(self):
        problems = generate_problems(GenConfig(count=1000, max_depth=3, seed=13))
        seen = set()
        for s, _ in problems:
            for f in s.premises + (s.conclusion,):
                seen |= connectives_used(f)
        assert {"Not", "And", "Or", "Implies", "ForAll", "Exists"} <= seen

    def test_invalid_config_rejected(self):
        with pytest.raises(InvalidConfigError):
            generate_problems(GenConfig(num_predicates=0))
        with pytest.raises(InvalidConfigError):
            generate_problems(GenConfig(connectives=("xor",)))
        with pytest.raises(InvalidConfigError):
            generate_problems(GenConfig(count=0))

    def test_space_exhaustion_detected(self):
        # one predicate, one constant, conjunction only, depth 1: a handful of
        # distinct problems at most
        cfg = GenConfig(
            num_predicates=1,
            num_individuals=1,
            connectives=("&",),
            max_depth=1,
            max_premises=0,
            count=50,
            seed=0,
        )
        with pytest.raises(SpaceExhaustedError):
            generate_problems(cfg)


class TestProblemFiles:
    def test_roundtrip_with_labels(self, tmp_path):
        problems = generate_problems(GenConfig(count=15, seed=21))
        path = tmp_path / "problems.txt"
        write_problem_file(path, problems)
        back = read_problem_file(path)
        assert [(s, lab) for s, lab in back] == problems

    def test_labels_optional_and_comments_ignored(self, tmp_path):
        path = tmp_path / "p.txt"
        path.write_text(
            "# a comment line\n"
            "A(a) |- A(a)\n"
            "\n"
            "|- B(b) @refutable  # trailing note\n"
        )
        out = read_problem_file(path)
        assert len(out) == 2
        assert out[0][1] is None
        assert out[1][1] == "refutable"
