"""Monadic first-order sentences: AST, text syntax, and complexity measures.

Sentences are built from monadic atoms over a two-sorted term alphabet
(constants start with a..t, variables with u..z), falsum, the connectives
``~ & | ->`` and the quantifiers ``forall``/``exists``.  All values are
immutable and hashable; every operation here is a pure function.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field

VARIABLE_INITIALS = "uvwxyz"


class FormulaError(Exception):
    """Base class for formula-layer failures."""


class ParseError(FormulaError):
    """Malformed input text; carries the offending character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NonMonadicPredicateError(ParseError):
    """A predicate was applied to more than one argument."""


class UnboundVariableError(FormulaError):
    """A variable occurs outside the scope of any binder for it."""


class CaptureError(FormulaError):
    """A substitution would place a variable under a binder that captures it."""


def is_variable_name(name: str) -> bool:
    return bool(name) and name[0] in VARIABLE_INITIALS


@dataclass(frozen=True, slots=True)
class Term:
    kind: str  # "constant" or "variable"
    name: str


def const(name: str) -> Term:
    if is_variable_name(name):
        raise ValueError(f"{name!r} is in the variable namespace (u-z)")
    return Term("constant", name)


def var(name: str) -> Term:
    if not is_variable_name(name):
        raise ValueError(f"{name!r} is in the constant namespace (a-t)")
    return Term("variable", name)


class Formula:
    """Base class for sentence nodes; concrete shapes are the dataclasses below.

    Every node caches its structural hash at construction time, so set and
    dict operations over formulas stay cheap on shared subtrees.
    """

    __slots__ = ()


# Declared once and reused by every node class below.
_HASH_FIELD = field(init=False, repr=False, compare=False)


def _seal(node, *key) -> None:
    object.__setattr__(node, "_hash", hash(key))


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    predicate: str
    arg: Term
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Atom", self.predicate, self.arg)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True)
class Falsum(Formula):
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Falsum")

    def __hash__(self):
        return self._hash


FALSUM = Falsum()


@dataclass(frozen=True, slots=True)
class Not(Formula):
    child: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Not", self.child)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "And", self.left, self.right)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Or", self.left, self.right)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Implies", self.antecedent, self.consequent)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True)
class ForAll(Formula):
    var: str
    body: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "ForAll", self.var, self.body)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Exists", self.var, self.body)

    def __hash__(self):
        return self._hash


BINARY = (And, Or, Implies)
QUANTIFIERS = (ForAll, Exists)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, Falsum)):
        return ()
    if isinstance(f, Not):
        return (f.child,)
    if isinstance(f, And):
        return (f.left, f.right)
    if isinstance(f, Or):
        return (f.left, f.right)
    if isinstance(f, Implies):
        return (f.antecedent, f.consequent)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    raise TypeError(f"not a formula: {f!r}")


@functools.lru_cache(maxsize=65536)
def complexity(f: Formula) -> int:
    """Connective count: 0 for atoms and falsum, else 1 plus the children's sum."""
    kids = children(f)
    if not kids:
        return 0
    return 1 + sum(complexity(c) for c in kids)


# Per-connective weights reflecting how hard each shape is to decompose.
CONNECTIVE_WEIGHTS = {And: 1, Or: 2, Not: 3, Implies: 4, ForAll: 5, Exists: 5}


@functools.lru_cache(maxsize=65536)
def weighted_complexity(f: Formula) -> int:
    """Like ``complexity`` but scales the children's sum by the connective weight."""
    kids = children(f)
    if not kids:
        return 0
    return 1 + CONNECTIVE_WEIGHTS[type(f)] * sum(weighted_complexity(c) for c in kids)


def free_variables(f: Formula) -> frozenset[str]:
    def walk(g: Formula, bound: frozenset[str]) -> frozenset[str]:
        if isinstance(g, Atom):
            if g.arg.kind == "variable" and g.arg.name not in bound:
                return frozenset({g.arg.name})
            return frozenset()
        if isinstance(g, QUANTIFIERS):
            return walk(g.body, bound | {g.var})
        out: frozenset[str] = frozenset()
        for c in children(g):
            out |= walk(c, bound)
        return out

    return walk(f, frozenset())


@functools.lru_cache(maxsize=65536)
def constant_names(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset({f.arg.name}) if f.arg.kind == "constant" else frozenset()
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= constant_names(c)
    return out


def substitute(f: Formula, v: Term, t: Term) -> Formula:
    """Replace every free occurrence of variable ``v`` in ``f`` by term ``t``."""
    if v.kind != "variable":
        raise ValueError("substitution target must be a variable")
    return _subst(f, v.name, t)


def _subst(f: Formula, name: str, t: Term) -> Formula:
    if isinstance(f, Atom):
        if f.arg.kind == "variable" and f.arg.name == name:
            return Atom(f.predicate, t)
        return f
    if isinstance(f, Falsum):
        return f
    if isinstance(f, Not):
        c = _subst(f.child, name, t)
        return f if c is f.child else Not(c)
    if isinstance(f, BINARY):
        l, r = children(f)
        nl, nr = _subst(l, name, t), _subst(r, name, t)
        return f if nl is l and nr is r else type(f)(nl, nr)
    if isinstance(f, QUANTIFIERS):
        if f.var == name:
            return f  # the binder shadows every occurrence below
        if t.kind == "variable" and t.name == f.var and name in free_variables(f.body):
            raise CaptureError(f"substituting {t.name!r} would be captured by the binder on {f.var!r}")
        body = _subst(f.body, name, t)
        return f if body is f.body else type(f)(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


@functools.lru_cache(maxsize=65536)
def canonicalize(f: Formula) -> Formula:
    """Rename bound variables to v0, v1, ... indexed by binder depth.

    Alpha-equivalent closed sentences canonicalize to equal values; free
    variables are left untouched.  Idempotent.
    """
    return _canon(f, {}, 0)


def _canon(f: Formula, env: dict[str, str], depth: int) -> Formula:
    if isinstance(f, Atom):
        if f.arg.kind == "variable":
            return Atom(f.predicate, Term("variable", env.get(f.arg.name, f.arg.name)))
        return f
    if isinstance(f, Falsum):
        return f
    if isinstance(f, Not):
        return Not(_canon(f.child, env, depth))
    if isinstance(f, BINARY):
        l, r = children(f)
        return type(f)(_canon(l, env, depth), _canon(r, env, depth))
    if isinstance(f, QUANTIFIERS):
        fresh = f"v{depth}"
        return type(f)(fresh, _canon(f.body, {**env, f.var: fresh}, depth + 1))
    raise TypeError(f"not a formula: {f!r}")


# --- text syntax ----------------------------------------------------------
#
#   formula := "bot" | IDENT "(" term ")" | "~" formula
#            | formula "&" formula | formula "|" formula | formula "->" formula
#            | "forall" VAR "." formula | "exists" VAR "." formula
#
# Binding tightest to loosest: ~, &, |, ->.  "->" associates right, "&" and
# "|" left; a quantifier's body extends as far right as possible.

_TOKEN = re.compile(r"->|[()~&|.,]|[A-Za-z][A-Za-z0-9_]*")
_KEYWORDS = ("bot", "forall", "exists")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        tokens.append((m.group(), i))
        i = m.end()
    tokens.append(("", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def advance(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, sym: str) -> None:
        if self.peek() != sym:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {sym!r}, found {found!r}", self.pos())
        self.advance()

    def formula(self, scope: tuple[str, ...]) -> Formula:
        left = self.disjunction(scope)
        if self.peek() == "->":
            self.advance()
            return Implies(left, self.formula(scope))
        return left

    def disjunction(self, scope: tuple[str, ...]) -> Formula:
        f = self.conjunction(scope)
        while self.peek() == "|":
            self.advance()
            f = Or(f, self.conjunction(scope))
        return f

    def conjunction(self, scope: tuple[str, ...]) -> Formula:
        f = self.unary(scope)
        while self.peek() == "&":
            self.advance()
            f = And(f, self.unary(scope))
        return f

    def unary(self, scope: tuple[str, ...]) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.advance()
            return Not(self.unary(scope))
        if tok in ("forall", "exists"):
            return self.quantified(scope)
        return self.atom(scope)

    def quantified(self, scope: tuple[str, ...]) -> Formula:
        kw = self.advance()
        name, p = self.peek(), self.pos()
        if not name.isidentifier() or not is_variable_name(name):
            raise ParseError(f"{kw} must bind a variable (u-z names)", p)
        self.advance()
        self.expect(".")
        body = self.formula(scope + (name,))
        return (ForAll if kw == "forall" else Exists)(name, body)

    def atom(self, scope: tuple[str, ...]) -> Formula:
        tok, p = self.peek(), self.pos()
        if tok == "(":
            self.advance()
            f = self.formula(scope)
            self.expect(")")
            return f
        if tok == "bot":
            self.advance()
            return FALSUM
        if tok.isidentifier() and tok[0].isupper():
            self.advance()
            self.expect("(")
            arg = self.term(scope)
            if self.peek() == ",":
                raise NonMonadicPredicateError(
                    f"predicate {tok!r} is monadic and takes exactly one argument", self.pos()
                )
            self.expect(")")
            return Atom(tok, arg)
        found = tok or "end of input"
        raise ParseError(f"expected a formula, found {found!r}", p)

    def term(self, scope: tuple[str, ...]) -> Term:
        tok, p = self.peek(), self.pos()
        if not tok.isidentifier() or not tok[0].islower():
            found = tok or "end of input"
            raise ParseError(f"expected a term, found {found!r}", p)
        if tok in _KEYWORDS:
            raise ParseError(f"{tok!r} is a reserved word", p)
        self.advance()
        if is_variable_name(tok):
            if tok not in scope:
                raise UnboundVariableError(f"unbound variable {tok!r}")
            return Term("variable", tok)
        return Term("constant", tok)

    def expect_end(self) -> None:
        if self.peek() != "":
            raise ParseError(f"unexpected trailing input {self.peek()!r}", self.pos())


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula(())
    p.expect_end()
    return f


_WRAPPED = (And, Or, Implies, ForAll, Exists)


def _paren(f: Formula) -> str:
    s = format_formula(f)
    return f"({s})" if isinstance(f, _WRAPPED) else s


@functools.lru_cache(maxsize=65536)
def format_formula(f: Formula) -> str:
    """Render to the concrete syntax; output re-parses to an equal formula."""
    if isinstance(f, Atom):
        return f"{f.predicate}({f.arg.name})"
    if isinstance(f, Falsum):
        return "bot"
    if isinstance(f, Not):
        return "~" + _paren(f.child)
    if isinstance(f, And):
        return f"{_paren(f.left)} & {_paren(f.right)}"
    if isinstance(f, Or):
        return f"{_paren(f.left)} | {_paren(f.right)}"
    if isinstance(f, Implies):
        return f"{_paren(f.antecedent)} -> {_paren(f.consequent)}"
    if isinstance(f, ForAll):
        return f"forall {f.var}. {format_formula(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {format_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True, slots=True)
class Sequent:
    """A problem state: an ordered multiset of premises and one conclusion."""

    premises: tuple[Formula, ...]
    conclusion: Formula
    _hash: int = _HASH_FIELD

    def __post_init__(self):
        _seal(self, "Sequent", self.premises, self.conclusion)

    def __hash__(self):
        return self._hash


def parse_sequent(text: str) -> Sequent:
    if text.count("|-") != 1:
        raise ParseError("a sequent needs exactly one '|-'", text.find("|-") if "|-" in text else 0)
    left, right = text.split("|-")
    premises: list[Formula] = []
    if left.strip():
        for part in left.split(","):
            if not part.strip():
                raise ParseError("empty premise in sequent", 0)
            premises.append(parse_formula(part))
    return Sequent(tuple(premises), parse_formula(right))


def format_sequent(s: Sequent) -> str:
    concl = format_formula(s.conclusion)
    if not s.premises:
        return f"|- {concl}"
    return ", ".join(format_formula(p) for p in s.premises) + f" |- {concl}"
