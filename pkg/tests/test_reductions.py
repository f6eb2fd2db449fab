"""Clique reductions: padding, instance shapes and yes/no equivalence on small graphs."""
import os
from fractions import Fraction

import networkx as nx
import pytest

from generators import random_dorm
from matching import Graph
from oracle import brute_clique, decide_ef, decide_pef
from reductions import (
    CliqueInstance,
    ReductionError,
    clique_from_dict,
    pad_clique,
    reduce,
    reduce_clique_to_ef,
    reduce_clique_to_pef,
)


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


K4 = complete(4)
C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
EMPTY4 = Graph.from_edges(4, [])


def _atlas(lo, hi):
    return [Graph.from_edges(h.number_of_nodes(), h.edges()) for h in nx.graph_atlas_g() if lo <= h.number_of_nodes() <= hi]


@pytest.mark.parametrize("k", [0, 5, True, "2"])
def test_clique_instance_rejects_bad_target(k):
    with pytest.raises(ReductionError, match="1 <= k"):
        CliqueInstance(K4, k)


def test_clique_instance_degrees():
    assert CliqueInstance(Graph.from_edges(3, [(0, 1), (1, 2)]), 1).degrees == (1, 2, 1)


def test_pad_cycle():
    padded = pad_clique(CliqueInstance(C4, 2))
    assert padded.graph.n == 8
    assert padded.k == 6
    assert 2 * padded.k > padded.graph.n
    assert brute_clique(padded.graph, 6) is not None
    assert brute_clique(padded.graph, 7) is None


def test_pad_keeps_no_instances():
    padded = pad_clique(CliqueInstance(EMPTY4, 2))
    assert brute_clique(padded.graph, padded.k) is None


@pytest.mark.parametrize("ci", [CliqueInstance(K4, 3), CliqueInstance(Graph.from_edges(1, []), 1)])
def test_pad_is_identity_when_target_is_majority(ci):
    assert pad_clique(ci) is ci


def test_builders_require_majority_target():
    with pytest.raises(ReductionError, match="pad_clique"):
        reduce_clique_to_ef(CliqueInstance(C4, 2))
    with pytest.raises(ReductionError, match="pad_clique"):
        reduce_clique_to_pef(CliqueInstance(C4, 2))


def test_ef_shape_on_k4():
    inst = reduce_clique_to_ef(CliqueInstance(K4, 3))
    assert inst.n == 12
    assert inst.capacities == (6, 6)
    # vertex value 2k - d - 1, twin link both ways, fillers want resource 0
    assert inst.values[0][0] == 2
    assert inst.externalities[0][4] == inst.externalities[4][0] == 1
    assert inst.externalities[0][1] == 1
    assert all(inst.values[f][0] == 1 for f in range(8, 12))
    assert inst.meta["reduction"] == "clique-to-ef"


def test_pef_shape_on_k4():
    inst = reduce_clique_to_pef(CliqueInstance(K4, 3))
    assert inst.n == 10
    assert inst.capacities == (7, 3)
    assert all(tuple(row) == (1, 0) for row in inst.values)
    # d=3, so each vertex links to exactly one filler
    assert [inst.externalities[0][f] for f in range(4, 10)] == [1, 0, 0, 0, 0, 0]
    assert inst.externalities[5][9] == inst.externalities[9][5] == 1


@pytest.mark.parametrize(
    "graph, k, expected",
    [(K4, 3, True), (EMPTY4, 3, False), (complete(2), 2, True), (Graph.from_edges(2, []), 2, False)],
)
def test_ef_reduction_examples(graph, k, expected):
    inst = reduce_clique_to_ef(CliqueInstance(graph, k))
    assert inst.n == 4 * k
    assert (decide_ef(inst) is not None) is expected


@pytest.mark.parametrize(
    "graph, k, expected",
    [(K4, 3, True), (EMPTY4, 3, False), (Graph.from_edges(1, []), 1, True)],
)
def test_pef_reduction_examples(graph, k, expected):
    inst = reduce_clique_to_pef(CliqueInstance(graph, k))
    assert inst.n == 2 * k + graph.n
    assert (decide_pef(inst) is not None) is expected


def test_reduce_pads_and_dispatches():
    inst = reduce(CliqueInstance(Graph.from_edges(2, []), 1), "pef")
    assert inst.n == 2 * 3 + 4
    with pytest.raises(ReductionError, match="unknown reduction target"):
        reduce(CliqueInstance(K4, 3), "prop")


def test_clique_from_dict():
    ci = clique_from_dict({"n": 3, "edges": [[0, 1]]}, 2)
    assert ci.graph.has_edge(1, 0)
    assert ci.k == 2


@pytest.mark.parametrize("target, decide", [("ef", decide_ef), ("pef", decide_pef)])
def test_equivalence_on_graphs_up_to_three_vertices(target, decide):
    for g in _atlas(1, 3):
        for k in range(1, g.n + 1):
            has_clique = brute_clique(g, k) is not None
            assert (decide(reduce(CliqueInstance(g, k), target)) is not None) is has_clique, (g.edges, k)


@pytest.mark.slow
def test_pef_equivalence_on_four_vertex_graphs():
    for g in _atlas(4, 4):
        for k in range(1, 5):
            has_clique = brute_clique(g, k) is not None
            assert (decide_pef(reduce(CliqueInstance(g, k), "pef")) is not None) is has_clique, (g.edges, k)


@pytest.mark.slow
def test_ef_equivalence_on_four_vertex_graphs_without_padding():
    for g in _atlas(4, 4):
        for k in (3, 4):
            has_clique = brute_clique(g, k) is not None
            assert (decide_ef(reduce_clique_to_ef(CliqueInstance(g, k))) is not None) is has_clique, (g.edges, k)


WORKERS = max(2, os.cpu_count() or 1)


def _random_five(seed):
    return random_dorm(seed, 5, 1, Fraction(1, 2), value_max=0).profile.externality_graph


@pytest.mark.slow
def test_padded_ef_equivalence_on_four_vertex_graphs():
    for g in _atlas(4, 4):
        assert decide_ef(reduce(CliqueInstance(g, 1), "ef"), workers=WORKERS) is not None, g.edges
    for g in (EMPTY4, C4):
        has_clique = brute_clique(g, 2) is not None
        assert (decide_ef(reduce(CliqueInstance(g, 2), "ef"), workers=WORKERS) is not None) is has_clique, g.edges


@pytest.mark.slow
def test_equivalence_on_random_five_vertex_graphs():
    # padded EF on five vertices with k <= 2 is past the enumeration limit
    for seed in range(100):
        g = _random_five(seed)
        for k in range(1, 6):
            has_clique = brute_clique(g, k) is not None
            pef = decide_pef(reduce(CliqueInstance(g, k), "pef"), workers=WORKERS)
            assert (pef is not None) is has_clique, (seed, k)
            if k >= 3 and seed % 4 == 0:
                ef = decide_ef(reduce_clique_to_ef(CliqueInstance(g, k)), workers=WORKERS)
                assert (ef is not None) is has_clique, (seed, k)
