"""Problem graphs: shared-subformula DAGs with signed edges.

A problem graph merges the syntax trees of the conclusion and every premise,
sharing structurally identical (canonicalized) subformulas, under a single
root node.  Edges into implication antecedents and negation bodies carry
sign -1; all other edges, including the root's, carry +1.  The graph answers
sub-formula parity queries and unit-weight shortest-distance queries.
"""

from __future__ import annotations

import enum
import functools
import heapq
import math
from dataclasses import dataclass, field

from .formula import (
    And,
    Atom,
    Exists,
    Falsum,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    Sequent,
    canonicalize,
    format_formula,
)

ROOT = 0
INFINITY = math.inf


class GraphError(Exception):
    pass


class UnknownNodeError(GraphError):
    pass


class UnreachableNodeError(GraphError):
    pass


class Parity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"


@dataclass(frozen=True, slots=True)
class Edge:
    src: int
    dst: int
    sign: int
    slot: int


@dataclass(eq=False)
class ProblemGraph:
    """Immutable after construction; queries are pure and cache internally."""

    formulas: tuple[Formula | None, ...]  # index = node id; formulas[ROOT] is None
    edges: tuple[Edge, ...]
    conclusion_node: int
    premise_nodes: tuple[int, ...]
    _index: dict = field(init=False, repr=False)
    _out: list = field(init=False, repr=False)
    _rev: list = field(init=False, repr=False)
    _in_signs: list = field(init=False, repr=False)
    _dist_cache: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._index = {f: i for i, f in enumerate(self.formulas) if f is not None}
        self._out = [[] for _ in self.formulas]
        self._rev = [[] for _ in self.formulas]
        self._in_signs = [set() for _ in self.formulas]
        for e in self.edges:
            self._out[e.src].append(e)
            self._rev[e.dst].append(e.src)
            self._in_signs[e.dst].add(e.sign)
        self._dist_cache = {}

    @property
    def node_count(self) -> int:
        return len(self.formulas)

    def node_of(self, f: Formula) -> int:
        key = canonicalize(f)
        try:
            return self._index[key]
        except KeyError:
            raise UnknownNodeError(f"no node for formula {format_formula(f)!r}") from None

    def _check_node(self, n: int) -> None:
        if not (0 <= n < len(self.formulas)):
            raise UnknownNodeError(f"no node {n} in graph of {len(self.formulas)} nodes")


def _child_edges(f: Formula) -> tuple[tuple[Formula, int], ...]:
    if isinstance(f, (Atom, Falsum)):
        return ()
    if isinstance(f, Not):
        return ((f.child, -1),)
    if isinstance(f, (And, Or)):
        return ((f.left, +1), (f.right, +1))
    if isinstance(f, Implies):
        return ((f.antecedent, -1), (f.consequent, +1))
    if isinstance(f, (ForAll, Exists)):
        return ((f.body, +1),)
    raise TypeError(f"not a formula: {f!r}")


@functools.lru_cache(maxsize=8192)
def build_graph(s: Sequent) -> ProblemGraph:
    """Merge premises and conclusion into one shared-subformula multigraph."""
    formulas: list[Formula | None] = [None]
    index: dict[Formula, int] = {}
    edges: list[Edge] = []

    def add(f: Formula) -> int:
        nid = index.get(f)
        if nid is not None:
            return nid
        nid = len(formulas)
        formulas.append(f)
        index[f] = nid
        for slot, (child, sign) in enumerate(_child_edges(f)):
            cid = add(child)
            edges.append(Edge(nid, cid, sign, slot))
        return nid

    premise_ids = []
    slot = 0
    for p in s.premises:
        pid = add(canonicalize(p))
        premise_ids.append(pid)
        edges.append(Edge(ROOT, pid, +1, slot))
        slot += 1
    cid = add(canonicalize(s.conclusion))
    edges.append(Edge(ROOT, cid, +1, slot))

    return ProblemGraph(tuple(formulas), tuple(edges), cid, tuple(premise_ids))


def _seed_signs(g: ProblemGraph, node: int) -> frozenset[int]:
    """Signs of a node's incoming edges; the root seeds positive."""
    incoming = g._in_signs[node]
    if not incoming:
        return frozenset({+1})
    return frozenset(incoming)


def _sign_products(g: ProblemGraph, src: int, dst: int) -> frozenset[int]:
    """Achievable sign products over all directed paths src -> dst."""
    memo: dict[int, frozenset[int]] = {}

    def rec(n: int) -> frozenset[int]:
        if n == dst:
            return frozenset({+1})
        if n in memo:
            return memo[n]
        memo[n] = frozenset()  # the graph is acyclic; this guards malformed input
        out: set[int] = set()
        for e in g._out[n]:
            for p in rec(e.dst):
                out.add(e.sign * p)
        memo[n] = frozenset(out)
        return memo[n]

    return rec(src)


def parity(g: ProblemGraph, ancestor: int, target: int) -> Parity:
    """Parity of ``target`` with respect to ``ancestor``.

    Starts from the parity of the ancestor's incoming edges (positive for the
    root), inverts along every -1 edge on every descending path to the
    target, and reports mixed when any two contributions disagree.
    """
    g._check_node(ancestor)
    g._check_node(target)
    seeds = _seed_signs(g, ancestor)
    products = _sign_products(g, ancestor, target)
    if not products:
        raise UnreachableNodeError(f"node {target} is not reachable from node {ancestor}")
    total = {a * b for a in seeds for b in products}
    if len(total) > 1:
        return Parity.MIXED
    return Parity.POSITIVE if +1 in total else Parity.NEGATIVE


def _distances_to(g: ProblemGraph, dst: int) -> dict[int, int]:
    # Dijkstra over the reversed graph; unit weights make it breadth-first.
    dist = {dst: 0}
    heap = [(0, dst)]
    while heap:
        d, n = heapq.heappop(heap)
        if d > dist.get(n, INFINITY):
            continue
        for m in g._rev[n]:
            nd = d + 1
            if nd < dist.get(m, INFINITY):
                dist[m] = nd
                heapq.heappush(heap, (nd, m))
    return dist


def shortest_distance(g: ProblemGraph, src: int, dst: int) -> int | float:
    """Edge count of the shortest directed path; 0 if src == dst, inf if none."""
    g._check_node(src)
    g._check_node(dst)
    cache = g._dist_cache.get(dst)
    if cache is None:
        cache = _distances_to(g, dst)
        g._dist_cache[dst] = cache
    return cache.get(src, INFINITY)


def to_dot(g: ProblemGraph) -> str:
    """DOT export with stable node ordering; the root is labeled with a turnstile."""
    lines = ["digraph problem {"]
    for i, f in enumerate(g.formulas):
        label = "⊢?" if i == ROOT else format_formula(f)
        lines.append(f'  n{i} [label="{label}"];')
    for e in g.edges:
        sign = "+1" if e.sign > 0 else "-1"
        lines.append(f'  n{e.src} -> n{e.dst} [label="{sign}"];')
    lines.append("}")
    return "\n".join(lines)
