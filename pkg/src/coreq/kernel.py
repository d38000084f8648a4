"""Inference rules of the constructive relevant calculus.

Candidate-action enumeration, sub-problem generation, proof trees, and an
independent proof checker.  Eliminations take their major premise straight
from the premise multiset (no proof work above it) and consume it in the
sub-problems; discharged assumptions must actually be used.
"""

from __future__ import annotations

import enum
import functools
from collections import Counter
from dataclasses import dataclass, field

from .formula import (
    FALSUM,
    And,
    Exists,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    Sequent,
    Term,
    canonicalize,
    const,
    constant_names,
    format_formula,
    parse_formula,
    substitute,
    var,
)


class RuleId(enum.Enum):
    HYPOTHESIS = "Hypothesis"
    AND_INTRO = "AndIntro"
    AND_ELIM = "AndElim"
    OR_INTRO_L = "OrIntroL"
    OR_INTRO_R = "OrIntroR"
    OR_ELIM = "OrElim"
    IMP_INTRO = "ImpIntro"
    IMP_ELIM = "ImpElim"
    NEG_INTRO = "NegIntro"
    NEG_ELIM = "NegElim"
    FORALL_INTRO = "ForAllIntro"
    FORALL_ELIM = "ForAllElim"
    EXISTS_INTRO = "ExistsIntro"
    EXISTS_ELIM = "ExistsElim"


ELIMINATIONS = frozenset(
    {
        RuleId.AND_ELIM,
        RuleId.OR_ELIM,
        RuleId.IMP_ELIM,
        RuleId.NEG_ELIM,
        RuleId.FORALL_ELIM,
        RuleId.EXISTS_ELIM,
    }
)

QUANTIFIER_RULES = frozenset(
    {RuleId.FORALL_INTRO, RuleId.FORALL_ELIM, RuleId.EXISTS_INTRO, RuleId.EXISTS_ELIM}
)


def is_elimination(rule: RuleId) -> bool:
    return rule in ELIMINATIONS


class KernelError(Exception):
    pass


class InapplicableActionError(KernelError):
    pass


@dataclass(frozen=True, slots=True)
class Action:
    """A search move: a rule plus, for eliminations, the major premise.

    ``instantiation`` holds the witness/parameter term of quantifier rules.
    """

    rule: RuleId
    major: Formula | None = None
    instantiation: Term | None = None
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.rule, self.major, self.instantiation)))

    def __hash__(self):
        return self._hash


@functools.lru_cache(maxsize=32768)
def sequent_constants(s: Sequent) -> tuple[str, ...]:
    names: set[str] = set()
    for f in s.premises + (s.conclusion,):
        names |= constant_names(f)
    return tuple(sorted(names))


def fresh_constant(s: Sequent) -> Term:
    used = set(sequent_constants(s))
    i = 1
    while f"c{i}" in used:
        i += 1
    return const(f"c{i}")


def _instantiation_terms(s: Sequent) -> tuple[Term, ...]:
    # every constant already in the problem, plus one fresh parameter
    return tuple(const(n) for n in sequent_constants(s)) + (fresh_constant(s),)


@functools.lru_cache(maxsize=32768)
def applicable_actions(s: Sequent) -> tuple[Action, ...]:
    """Every action passing the hard applicability test, in enumeration order.

    Hypothesis fires iff the conclusion is a premise; introductions fire on
    the conclusion's principal connective (both disjunct choices for a
    disjunction, nothing for falsum); each elimination is paired with every
    premise whose principal connective matches.
    """
    goal = s.conclusion
    acts: list[Action] = []
    if goal in s.premises:
        acts.append(Action(RuleId.HYPOTHESIS))
    if isinstance(goal, And):
        acts.append(Action(RuleId.AND_INTRO))
    elif isinstance(goal, Or):
        acts.append(Action(RuleId.OR_INTRO_L))
        acts.append(Action(RuleId.OR_INTRO_R))
    elif isinstance(goal, Implies):
        acts.append(Action(RuleId.IMP_INTRO))
    elif isinstance(goal, Not):
        acts.append(Action(RuleId.NEG_INTRO))
    elif isinstance(goal, ForAll):
        acts.append(Action(RuleId.FORALL_INTRO, instantiation=fresh_constant(s)))
    elif isinstance(goal, Exists):
        for t in _instantiation_terms(s):
            acts.append(Action(RuleId.EXISTS_INTRO, instantiation=t))
    seen: set[Formula] = set()
    for p in s.premises:
        if p in seen:
            continue
        seen.add(p)
        if isinstance(p, And):
            acts.append(Action(RuleId.AND_ELIM, major=p))
        elif isinstance(p, Or):
            acts.append(Action(RuleId.OR_ELIM, major=p))
        elif isinstance(p, Implies):
            acts.append(Action(RuleId.IMP_ELIM, major=p))
        elif isinstance(p, Not):
            if goal == FALSUM:
                acts.append(Action(RuleId.NEG_ELIM, major=p))
        elif isinstance(p, ForAll):
            for t in _instantiation_terms(s):
                acts.append(Action(RuleId.FORALL_ELIM, major=p, instantiation=t))
        elif isinstance(p, Exists):
            acts.append(Action(RuleId.EXISTS_ELIM, major=p, instantiation=fresh_constant(s)))
    return tuple(acts)


@functools.lru_cache(maxsize=32768)
def _applicable_set(s: Sequent) -> frozenset[Action]:
    return frozenset(applicable_actions(s))


def is_applicable(s: Sequent, a: Action) -> bool:
    return a in _applicable_set(s)


def remove_one(premises: tuple[Formula, ...], f: Formula) -> tuple[Formula, ...]:
    idx = premises.index(f)
    return premises[:idx] + premises[idx + 1 :]


@dataclass(frozen=True, slots=True)
class Expansion:
    """One way of decomposing a sequent under an action.

    ``discharges[i]`` lists the assumptions added to and discharged at child
    ``i``; a valid proof must use at least one formula from each nonempty
    discharge group.  ``child_groups`` carries the same obligations as
    ready-made usage-requirement groups, one tuple per child.
    """

    children: tuple[Sequent, ...]
    discharges: tuple[tuple[Formula, ...], ...]
    child_groups: tuple[tuple[frozenset, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        groups = tuple((frozenset(d),) if d else () for d in self.discharges)
        object.__setattr__(self, "child_groups", groups)


@functools.lru_cache(maxsize=32768)
def expansions(s: Sequent, a: Action) -> tuple[Expansion, ...]:
    """All child-sequent alternatives for an action, preferred first.

    Most rules decompose one way.  An implication goal may be reached by
    deriving the consequent or by refuting the antecedent; a disjunction
    elimination may close one case with the goal and the other with falsum.
    """
    if not is_applicable(s, a):
        raise InapplicableActionError(
            f"action {a.rule.value} is not applicable to {format_sequent_short(s)}"
        )
    prem = s.premises
    goal = s.conclusion
    r = a.rule

    if r == RuleId.HYPOTHESIS:
        return (Expansion((), ()),)
    if r == RuleId.AND_INTRO:
        return (
            Expansion((Sequent(prem, goal.left), Sequent(prem, goal.right)), ((), ())),
        )
    if r == RuleId.OR_INTRO_L:
        return (Expansion((Sequent(prem, goal.left),), ((),)),)
    if r == RuleId.OR_INTRO_R:
        return (Expansion((Sequent(prem, goal.right),), ((),)),)
    if r == RuleId.IMP_INTRO:
        phi, psi = goal.antecedent, goal.consequent
        extended = prem + (phi,)
        primary = Expansion((Sequent(extended, psi),), ((phi,),))
        if psi == FALSUM:
            return (primary,)
        return (primary, Expansion((Sequent(extended, FALSUM),), ((phi,),)))
    if r == RuleId.NEG_INTRO:
        phi = goal.child
        return (Expansion((Sequent(prem + (phi,), FALSUM),), ((phi,),)),)
    if r == RuleId.FORALL_INTRO:
        inst = substitute(goal.body, var(goal.var), a.instantiation)
        return (Expansion((Sequent(prem, inst),), ((),)),)
    if r == RuleId.EXISTS_INTRO:
        inst = substitute(goal.body, var(goal.var), a.instantiation)
        return (Expansion((Sequent(prem, inst),), ((),)),)

    rest = remove_one(prem, a.major)
    if r == RuleId.AND_ELIM:
        l, rgt = a.major.left, a.major.right
        return (Expansion((Sequent(rest + (l, rgt), goal),), ((l, rgt),)),)
    if r == RuleId.OR_ELIM:
        l, rgt = a.major.left, a.major.right
        if goal == FALSUM:
            combos = ((goal, goal),)
        else:
            combos = ((goal, goal), (goal, FALSUM), (FALSUM, goal))
        return tuple(
            Expansion(
                (Sequent(rest + (l,), c1), Sequent(rest + (rgt,), c2)),
                ((l,), (rgt,)),
            )
            for c1, c2 in combos
        )
    if r == RuleId.IMP_ELIM:
        phi, psi = a.major.antecedent, a.major.consequent
        return (
            Expansion(
                (Sequent(rest, phi), Sequent(rest + (psi,), goal)),
                ((), (psi,)),
            ),
        )
    if r == RuleId.NEG_ELIM:
        return (Expansion((Sequent(rest, a.major.child),), ((),)),)
    if r == RuleId.FORALL_ELIM:
        inst = substitute(a.major.body, var(a.major.var), a.instantiation)
        return (Expansion((Sequent(rest + (inst,), goal),), ((inst,),)),)
    if r == RuleId.EXISTS_ELIM:
        inst = substitute(a.major.body, var(a.major.var), a.instantiation)
        return (Expansion((Sequent(rest + (inst,), goal),), ((inst,),)),)
    raise KernelError(f"unhandled rule {r!r}")


def apply_action(s: Sequent, a: Action) -> list[Sequent]:
    """The sub-problems of the action's primary decomposition (all must be solved)."""
    return list(expansions(s, a)[0].children)


def format_sequent_short(s: Sequent) -> str:
    from .formula import format_sequent

    return format_sequent(s)


@dataclass(frozen=True)
class Proof:
    """A derivation tree node; leaves are Hypothesis nodes."""

    sequent: Sequent
    rule: RuleId
    major: Formula | None = None
    term: Term | None = None
    children: tuple["Proof", ...] = ()
    discharged: tuple[Formula, ...] = ()


def proof_node(sequent: Sequent, action: Action, child_proofs: tuple[Proof, ...], expansion: Expansion) -> Proof:
    discharged = tuple(f for per_child in expansion.discharges for f in per_child)
    return Proof(sequent, action.rule, action.major, action.instantiation, child_proofs, discharged)


def proof_length(p: Proof) -> int:
    """Number of inference steps: all nodes except Hypothesis leaves."""
    own = 0 if p.rule == RuleId.HYPOTHESIS else 1
    return own + sum(proof_length(c) for c in p.children)


@dataclass(frozen=True)
class CheckResult:
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def check_proof(proof: Proof) -> CheckResult:
    """Independently validate a proof tree against the rule schemas.

    Checks rule shapes, the stands-proud condition on elimination majors,
    non-vacuous discharge, and freshness side conditions on quantifier
    parameters.  Violations are reported as data, never raised.
    """
    violations: list[str] = []
    _check_node(proof, "root", violations)
    return CheckResult(tuple(violations))


def _multiset_eq(actual: tuple[Formula, ...], expected: Counter) -> bool:
    return Counter(actual) == +expected


def _expected(base: tuple[Formula, ...], removed: tuple[Formula, ...] = (), added: tuple[Formula, ...] = ()) -> Counter:
    c = Counter(base)
    for f in removed:
        c[f] -= 1
    for f in added:
        c[f] += 1
    return c


def _check_node(node: Proof, where: str, out: list[str]) -> frozenset[Formula]:
    """Validate one node; returns the premise formulas its subtree depends on."""
    prem = node.sequent.premises
    goal = node.sequent.conclusion
    rule = node.rule
    kids = node.children

    def bad(msg: str) -> None:
        out.append(f"{where}: {msg}")

    def kid_used(i: int) -> frozenset[Formula]:
        return _check_node(kids[i], f"{where}.{i}", out)

    if rule in ELIMINATIONS:
        if node.major is None:
            bad("elimination rule is missing its major premise")
            return frozenset()
        if node.major not in prem:
            bad("major premise does not stand proud (it is not among the premises)")
            for i in range(len(kids)):
                kid_used(i)
            return frozenset()
    elif node.major is not None:
        bad(f"{rule.value} does not take a major premise")

    if rule in QUANTIFIER_RULES:
        if node.term is None or node.term.kind != "constant":
            bad("quantifier rule needs a constant instantiation term")
            return frozenset()
    elif node.term is not None:
        bad(f"{rule.value} does not take an instantiation term")

    def expect_children(n: int) -> bool:
        if len(kids) != n:
            bad(f"{rule.value} needs {n} subproof(s), found {len(kids)}")
            for i in range(len(kids)):
                kid_used(i)
            return False
        return True

    def check_discharged(expected: tuple[Formula, ...]) -> None:
        if Counter(node.discharged) != Counter(expected):
            bad("discharge bookkeeping does not match the rule schema")

    if rule == RuleId.HYPOTHESIS:
        if kids:
            bad("hypothesis nodes have no subproofs")
        if goal not in prem:
            bad("hypothesis conclusion is not among the premises")
            return frozenset()
        check_discharged(())
        return frozenset({goal})

    if rule == RuleId.AND_INTRO:
        if not isinstance(goal, And) or not expect_children(2):
            if not isinstance(goal, And):
                bad("conclusion of AndIntro must be a conjunction")
            return frozenset()
        u1, u2 = kid_used(0), kid_used(1)
        for i, concl in enumerate((goal.left, goal.right)):
            c = kids[i]
            if c.sequent.conclusion != concl or not _multiset_eq(c.sequent.premises, _expected(prem)):
                bad(f"subproof {i} does not prove the expected conjunct from the same premises")
        check_discharged(())
        return u1 | u2

    if rule in (RuleId.OR_INTRO_L, RuleId.OR_INTRO_R):
        if not isinstance(goal, Or):
            bad("conclusion of OrIntro must be a disjunction")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        side = goal.left if rule == RuleId.OR_INTRO_L else goal.right
        c = kids[0]
        if c.sequent.conclusion != side or not _multiset_eq(c.sequent.premises, _expected(prem)):
            bad("subproof does not prove the chosen disjunct from the same premises")
        check_discharged(())
        return u

    if rule == RuleId.IMP_INTRO:
        if not isinstance(goal, Implies):
            bad("conclusion of ImpIntro must be an implication")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        phi, psi = goal.antecedent, goal.consequent
        c = kids[0]
        if c.sequent.conclusion not in (psi, FALSUM):
            bad("ImpIntro subproof must conclude the consequent or falsum")
        if not _multiset_eq(c.sequent.premises, _expected(prem, added=(phi,))):
            bad("ImpIntro subproof premises must be the premises plus the antecedent")
        if phi not in u:
            bad("vacuous discharge: the assumed antecedent is never used")
        check_discharged((phi,))
        return u - {phi}

    if rule == RuleId.NEG_INTRO:
        if not isinstance(goal, Not):
            bad("conclusion of NegIntro must be a negation")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        phi = goal.child
        c = kids[0]
        if c.sequent.conclusion != FALSUM:
            bad("NegIntro subproof must conclude falsum")
        if not _multiset_eq(c.sequent.premises, _expected(prem, added=(phi,))):
            bad("NegIntro subproof premises must be the premises plus the assumed formula")
        if phi not in u:
            bad("vacuous discharge: the assumed formula is never used")
        check_discharged((phi,))
        return u - {phi}

    if rule == RuleId.FORALL_INTRO:
        if not isinstance(goal, ForAll):
            bad("conclusion of ForAllIntro must be universally quantified")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        p = node.term
        if p.name in sequent_constants(node.sequent):
            bad(f"parameter {p.name!r} of ForAllIntro is not fresh")
        inst = substitute(goal.body, var(goal.var), p)
        c = kids[0]
        if c.sequent.conclusion != inst or not _multiset_eq(c.sequent.premises, _expected(prem)):
            bad("ForAllIntro subproof must prove the instance at the fresh parameter")
        check_discharged(())
        return u

    if rule == RuleId.EXISTS_INTRO:
        if not isinstance(goal, Exists):
            bad("conclusion of ExistsIntro must be existentially quantified")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        inst = substitute(goal.body, var(goal.var), node.term)
        c = kids[0]
        if c.sequent.conclusion != inst or not _multiset_eq(c.sequent.premises, _expected(prem)):
            bad("ExistsIntro subproof must prove the witness instance")
        check_discharged(())
        return u

    # eliminations; the major has already been confirmed to stand proud
    major = node.major
    rest = _expected(prem, removed=(major,))

    if rule == RuleId.AND_ELIM:
        if not isinstance(major, And):
            bad("AndElim major must be a conjunction")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        l, rgt = major.left, major.right
        c = kids[0]
        if c.sequent.conclusion != goal or not _multiset_eq(
            c.sequent.premises, _expected(prem, removed=(major,), added=(l, rgt))
        ):
            bad("AndElim subproof must derive the goal from both conjuncts in place of the major")
        if not ({l, rgt} & u):
            bad("vacuous discharge: neither conjunct assumption is used")
        check_discharged((l, rgt))
        return frozenset({major}) | (u - {l, rgt})

    if rule == RuleId.OR_ELIM:
        if not isinstance(major, Or):
            bad("OrElim major must be a disjunction")
            return frozenset()
        if not expect_children(2):
            return frozenset()
        u1, u2 = kid_used(0), kid_used(1)
        l, rgt = major.left, major.right
        c1, c2 = kids
        for c, case in ((c1, l), (c2, rgt)):
            if not _multiset_eq(c.sequent.premises, _expected(prem, removed=(major,), added=(case,))):
                bad("OrElim case premises must swap the major for the case assumption")
        t1, t2 = c1.sequent.conclusion, c2.sequent.conclusion
        if t1 not in (goal, FALSUM) or t2 not in (goal, FALSUM):
            bad("each OrElim case must conclude the goal or falsum")
        elif t1 == FALSUM and t2 == FALSUM and goal != FALSUM:
            bad("both OrElim cases conclude falsum but the goal does not")
        if l not in u1:
            bad("vacuous discharge: the left case assumption is never used")
        if rgt not in u2:
            bad("vacuous discharge: the right case assumption is never used")
        check_discharged((l, rgt))
        return frozenset({major}) | (u1 - {l}) | (u2 - {rgt})

    if rule == RuleId.IMP_ELIM:
        if not isinstance(major, Implies):
            bad("ImpElim major must be an implication")
            return frozenset()
        if not expect_children(2):
            return frozenset()
        u1, u2 = kid_used(0), kid_used(1)
        phi, psi = major.antecedent, major.consequent
        c1, c2 = kids
        if c1.sequent.conclusion != phi or not _multiset_eq(c1.sequent.premises, rest):
            bad("ImpElim minor subproof must derive the antecedent without the major")
        if c2.sequent.conclusion != goal or not _multiset_eq(
            c2.sequent.premises, _expected(prem, removed=(major,), added=(psi,))
        ):
            bad("ImpElim subproof must derive the goal from the consequent in place of the major")
        if psi not in u2:
            bad("vacuous discharge: the consequent assumption is never used")
        check_discharged((psi,))
        return frozenset({major}) | u1 | (u2 - {psi})

    if rule == RuleId.NEG_ELIM:
        if not isinstance(major, Not):
            bad("NegElim major must be a negation")
            return frozenset()
        if goal != FALSUM:
            bad("NegElim concludes falsum only")
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        c = kids[0]
        if c.sequent.conclusion != major.child or not _multiset_eq(c.sequent.premises, rest):
            bad("NegElim subproof must derive the negated formula without the major")
        check_discharged(())
        return frozenset({major}) | u

    if rule == RuleId.FORALL_ELIM:
        if not isinstance(major, ForAll):
            bad("ForAllElim major must be universally quantified")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        inst = substitute(major.body, var(major.var), node.term)
        c = kids[0]
        if c.sequent.conclusion != goal or not _multiset_eq(
            c.sequent.premises, _expected(prem, removed=(major,), added=(inst,))
        ):
            bad("ForAllElim subproof must derive the goal from the instance in place of the major")
        if inst not in u:
            bad("vacuous discharge: the instantiated assumption is never used")
        check_discharged((inst,))
        return frozenset({major}) | (u - {inst})

    if rule == RuleId.EXISTS_ELIM:
        if not isinstance(major, Exists):
            bad("ExistsElim major must be existentially quantified")
            return frozenset()
        if not expect_children(1):
            return frozenset()
        u = kid_used(0)
        p = node.term
        if p.name in sequent_constants(node.sequent):
            bad(f"parameter {p.name!r} of ExistsElim is not fresh")
        inst = substitute(major.body, var(major.var), p)
        c = kids[0]
        if c.sequent.conclusion != goal or not _multiset_eq(
            c.sequent.premises, _expected(prem, removed=(major,), added=(inst,))
        ):
            bad("ExistsElim subproof must derive the goal from the witness assumption")
        if inst not in u:
            bad("vacuous discharge: the witness assumption is never used")
        check_discharged((inst,))
        return frozenset({major}) | (u - {inst})

    bad(f"unknown rule {rule!r}")
    return frozenset()


@functools.lru_cache(maxsize=65536)
def sequent_key(s: Sequent) -> tuple:
    """Order-insensitive canonical identity of a sequent, for loop checks."""
    prems = tuple(sorted(format_formula(canonicalize(p)) for p in s.premises))
    return (prems, format_formula(canonicalize(s.conclusion)))


# --- serialization --------------------------------------------------------


def proof_to_text(p: Proof) -> str:
    """Human-readable indented tree: one node per line."""
    lines: list[str] = []

    def walk(n: Proof, indent: int) -> None:
        head = f"{n.rule.value}: {format_formula(n.sequent.conclusion)}"
        if n.major is not None:
            head += f"  [major: {format_formula(n.major)}]"
        if n.term is not None:
            head += f"  [term: {n.term.name}]"
        lines.append("  " * indent + head)
        for c in n.children:
            walk(c, indent + 1)

    walk(p, 0)
    return "\n".join(lines)


def proof_to_dict(p: Proof) -> dict:
    """Structured export mirroring the proof tree, for machine checking."""
    return {
        "premises": [format_formula(f) for f in p.sequent.premises],
        "conclusion": format_formula(p.sequent.conclusion),
        "rule": p.rule.value,
        "major": format_formula(p.major) if p.major is not None else None,
        "term": p.term.name if p.term is not None else None,
        "discharged": [format_formula(f) for f in p.discharged],
        "children": [proof_to_dict(c) for c in p.children],
    }


def proof_from_dict(d: dict) -> Proof:
    from .formula import is_variable_name

    term = None
    if d.get("term") is not None:
        name = d["term"]
        term = var(name) if is_variable_name(name) else const(name)
    return Proof(
        sequent=Sequent(
            tuple(parse_formula(t) for t in d["premises"]),
            parse_formula(d["conclusion"]),
        ),
        rule=RuleId(d["rule"]),
        major=parse_formula(d["major"]) if d.get("major") is not None else None,
        term=term,
        children=tuple(proof_from_dict(c) for c in d.get("children", ())),
        discharged=tuple(parse_formula(t) for t in d.get("discharged", ())),
    )
