"""Shared strategies and helpers for the test suite."""

import hypothesis.strategies as st

from coreq.formula import (
    FALSUM,
    And,
    Atom,
    Exists,
    ForAll,
    Implies,
    Not,
    Or,
    Sequent,
    Term,
)

PREDICATES = ("A", "B", "C")
CONSTANTS = ("a", "b", "c")
BOUND = ("x", "y", "z")


@st.composite
def terms(draw, scope=()):
    pool = [Term("constant", c) for c in CONSTANTS] + [Term("variable", v) for v in scope]
    return draw(st.sampled_from(pool))


@st.composite
def formulas(draw, max_depth=4, scope=(), allow_quantifiers=True, allow_falsum=False):
    """Closed (given empty scope) random sentences over a 3x3 alphabet."""
    leaf_kinds = ["atom", "falsum"] if allow_falsum else ["atom"]
    if max_depth <= 0:
        kind = draw(st.sampled_from(leaf_kinds))
    else:
        kinds = leaf_kinds + ["not", "and", "or", "implies"]
        if allow_quantifiers:
            kinds += ["forall", "exists"]
        kind = draw(st.sampled_from(kinds))
    if kind == "atom":
        return Atom(draw(st.sampled_from(PREDICATES)), draw(terms(scope)))
    if kind == "falsum":
        return FALSUM
    if kind == "not":
        return Not(draw(formulas(max_depth - 1, scope, allow_quantifiers, allow_falsum)))
    if kind in ("and", "or", "implies"):
        left = draw(formulas(max_depth - 1, scope, allow_quantifiers, allow_falsum))
        right = draw(formulas(max_depth - 1, scope, allow_quantifiers, allow_falsum))
        return {"and": And, "or": Or, "implies": Implies}[kind](left, right)
    name = next(v for v in BOUND + ("x1", "y1", "z1") if v not in scope)
    body = draw(formulas(max_depth - 1, scope + (name,), allow_quantifiers, allow_falsum))
    return (ForAll if kind == "forall" else Exists)(name, body)


@st.composite
def sequents(draw, max_depth=3, max_premises=3, allow_quantifiers=True):
    n = draw(st.integers(0, max_premises))
    premises = tuple(
        draw(formulas(max_depth, allow_quantifiers=allow_quantifiers)) for _ in range(n)
    )
    conclusion = draw(formulas(max_depth, allow_quantifiers=allow_quantifiers))
    return Sequent(premises, conclusion)
