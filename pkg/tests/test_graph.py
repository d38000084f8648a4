"""Problem graph construction, parity, and shortest distances."""

import math
import random

import pytest
from hypothesis import given, settings

from coreq.formula import Atom, Sequent, const, parse_formula, parse_sequent
from coreq.graph import (
    INFINITY,
    ROOT,
    Edge,
    Parity,
    ProblemGraph,
    UnreachableNodeError,
    build_graph,
    parity,
    shortest_distance,
    to_dot,
)

from conftest import sequents


def seq(text):
    return parse_sequent(text)


def f(text):
    return parse_formula(text)


FIG_SEQ = seq("A(a), A(a) -> (B(a) | C(a)), ~C(a) |- B(a)")


@pytest.fixture
def fig_graph():
    return build_graph(FIG_SEQ)


# --- oracles -----------------------------------------------------------------


def enumerate_paths(g, src, dst):
    """All sign products over directed src->dst paths, by exhaustive DFS."""
    products = []

    def walk(node, sign):
        if node == dst:
            products.append(sign)
            # a path may also continue through dst only in cyclic graphs; DAG stops here
            return
        for e in g._out[node]:
            walk(e.dst, sign * e.sign)

    walk(src, +1)
    return products


def oracle_parity(g, ancestor, target):
    incoming = [e.sign for e in g.edges if e.dst == ancestor]
    seeds = set(incoming) if incoming else {+1}
    products = enumerate_paths(g, ancestor, target)
    if not products:
        return None
    total = {a * b for a in seeds for b in products}
    if len(total) > 1:
        return Parity.MIXED
    return Parity.POSITIVE if +1 in total else Parity.NEGATIVE


def floyd_warshall(n, edges):
    dist = [[0 if i == j else math.inf for j in range(n)] for i in range(n)]
    for e in edges:
        dist[e.src][e.dst] = min(dist[e.src][e.dst], 1)
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == math.inf:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    return dist


def random_dag(rng, max_nodes=50):
    n = rng.randint(2, max_nodes)
    edges = []
    slot = 0
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.15:
                edges.append(Edge(i, j, rng.choice((1, -1)), slot))
                slot += 1
    formulas = (None,) + tuple(Atom(f"P{i}", const("a")) for i in range(1, n))
    return ProblemGraph(formulas, tuple(edges), conclusion_node=n - 1, premise_nodes=())


# --- construction --------------------------------------------------------------


class TestBuildGraph:
    def test_trivial_problem(self):
        g = build_graph(seq("|- A(a)"))
        assert g.node_count == 2
        assert g.edges == (Edge(ROOT, 1, +1, 0),)
        assert g.conclusion_node == 1

    def test_shared_subformulas(self, fig_graph):
        g = fig_graph
        # the premise A(a) and the antecedent of the conditional share one node
        antecedent = f("A(a)")
        assert g.premise_nodes[0] == g.node_of(antecedent)
        # B(a) under the disjunction and the conclusion share one node
        assert g.conclusion_node == g.node_of(f("B(a)"))

    def test_parallel_edges_preserved(self):
        g = build_graph(seq("A(a) & A(a) |- B(a)"))
        conj = g.node_of(f("A(a) & A(a)"))
        atom = g.node_of(f("A(a)"))
        assert sum(1 for e in g.edges if e.src == conj and e.dst == atom) == 2

    def test_edge_signs(self, fig_graph):
        g = fig_graph
        cond = g.node_of(f("A(a) -> (B(a) | C(a))"))
        by_dst = {(e.dst): e.sign for e in g.edges if e.src == cond}
        assert by_dst[g.node_of(f("A(a)"))] == -1
        assert by_dst[g.node_of(f("B(a) | C(a)"))] == +1
        neg = g.node_of(f("~C(a)"))
        (neg_edge,) = [e for e in g.edges if e.src == neg]
        assert neg_edge.sign == -1
        for e in g.edges:
            if e.src == ROOT:
                assert e.sign == +1

    def test_alpha_variant_premises_share_a_node(self):
        g = build_graph(seq("forall x. P(x), forall y. P(y) |- Q(a)"))
        assert g.premise_nodes[0] == g.premise_nodes[1]

    @given(sequents(max_depth=3))
    @settings(max_examples=200, deadline=None)
    def test_acyclic(self, s):
        g = build_graph(s)
        # Kahn's algorithm: all nodes drain iff the graph is acyclic
        indeg = [0] * g.node_count
        for e in g.edges:
            indeg[e.dst] += 1
        queue = [i for i in range(g.node_count) if indeg[i] == 0]
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for e in g._out[n]:
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    queue.append(e.dst)
        assert seen == g.node_count

    @given(sequents(max_depth=3))
    @settings(max_examples=200, deadline=None)
    def test_sharing_never_increases_nodes(self, s):
        def count_subformulas(g):
            from coreq.formula import children

            return 1 + sum(count_subformulas(c) for c in children(g))

        total = sum(count_subformulas(p) for p in s.premises) + count_subformulas(s.conclusion)
        assert build_graph(s).node_count <= total + 1  # +1 for the root


# --- parity ---------------------------------------------------------------------


class TestParity:
    def test_consequent_chain_is_positive(self, fig_graph):
        g = fig_graph
        anc = g.node_of(f("A(a) -> (B(a) | C(a))"))
        assert parity(g, anc, g.node_of(f("B(a)"))) == Parity.POSITIVE

    def test_premise_vs_antecedent_is_mixed(self, fig_graph):
        g = fig_graph
        assert parity(g, ROOT, g.node_of(f("A(a)"))) == Parity.MIXED

    def test_negated_vs_consequent_occurrence_is_mixed(self, fig_graph):
        g = fig_graph
        assert parity(g, ROOT, g.node_of(f("C(a)"))) == Parity.MIXED

    def test_unreachable_target_raises(self, fig_graph):
        g = fig_graph
        with pytest.raises(UnreachableNodeError):
            parity(g, g.node_of(f("A(a)")), g.node_of(f("B(a)")))

    def test_matches_enumeration_oracle_on_random_problem_graphs(self):
        rng = random.Random(4242)
        checked = 0
        graphs = 0
        while graphs < 200:
            s = _random_small_sequent(rng)
            g = build_graph(s)
            if g.node_count > 12:
                continue
            graphs += 1
            for anc in range(g.node_count):
                for tgt in range(g.node_count):
                    expected = oracle_parity(g, anc, tgt)
                    if expected is None:
                        continue
                    assert parity(g, anc, tgt) == expected
                    checked += 1
        assert checked > 200

    def test_mixed_absorption(self):
        rng = random.Random(99)
        for _ in range(100):
            s = _random_small_sequent(rng)
            g = build_graph(s)
            for n in range(1, g.node_count):
                try:
                    if parity(g, ROOT, n) != Parity.MIXED:
                        continue
                except UnreachableNodeError:
                    continue
                for m in range(1, g.node_count):
                    if m == n or not _reaches(g, n, m):
                        continue
                    if _only_through(g, n, m):
                        assert parity(g, ROOT, m) == Parity.MIXED


def _reaches(g, src, dst):
    stack, seen = [src], set()
    while stack:
        x = stack.pop()
        if x == dst:
            return True
        if x in seen:
            continue
        seen.add(x)
        stack.extend(e.dst for e in g._out[x])
    return False


def _only_through(g, n, m):
    """Every ROOT -> m path passes through n: unreachable once n is deleted."""
    stack, seen = [ROOT], set()
    while stack:
        x = stack.pop()
        if x == n or x in seen:
            continue
        if x == m:
            return False
        seen.add(x)
        stack.extend(e.dst for e in g._out[x])
    return True


def _random_small_sequent(rng):
    from coreq.gen import GenConfig, _sample_formula

    cfg = GenConfig(max_depth=3, max_premises=2, seed=0)
    n = rng.randint(0, 2)
    premises = tuple(_sample_formula(rng, cfg, 3, ()) for _ in range(n))
    return Sequent(premises, _sample_formula(rng, cfg, 3, ()))


# --- distances -------------------------------------------------------------------


class TestShortestDistance:
    def test_zero_on_same_node(self, fig_graph):
        g = fig_graph
        n = g.node_of(f("B(a)"))
        assert shortest_distance(g, n, n) == 0

    def test_fig_distance_two(self, fig_graph):
        g = fig_graph
        assert shortest_distance(g, g.node_of(f("A(a) -> (B(a) | C(a))")), g.node_of(f("B(a)"))) == 2

    def test_infinite_when_unreachable(self, fig_graph):
        g = fig_graph
        assert shortest_distance(g, g.node_of(f("A(a)")), g.node_of(f("B(a)"))) == INFINITY

    def test_matches_floyd_warshall_on_random_dags(self):
        rng = random.Random(7)
        for _ in range(200):
            g = random_dag(rng)
            expected = floyd_warshall(g.node_count, g.edges)
            for i in range(g.node_count):
                for j in range(g.node_count):
                    assert shortest_distance(g, i, j) == expected[i][j]


class TestDot:
    def test_stable_and_labeled(self, fig_graph):
        dot = to_dot(fig_graph)
        assert dot == to_dot(fig_graph)
        assert 'n0 [label="⊢?"]' in dot
        assert 'label="+1"' in dot and 'label="-1"' in dot
        assert "A(a) -> (B(a) | C(a))" in dot
