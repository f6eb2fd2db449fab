"""Property-based checks of matching structure and fairness metrics."""
from fractions import Fraction
from itertools import combinations

import networkx as nx
from hypothesis import given, settings
import hypothesis.strategies as st

from core import (
    _swapped_utility,
    check_assignment,
    check_ef,
    check_pef,
    prop_share,
    swap,
    utility,
    validate_instance,
)
from matching import (
    Bigraph,
    Graph,
    bipartite_max_matching,
    find_near_tight_set,
    find_tight_set,
    gallai_edmonds,
    max_matching,
    surplus,
    verify_tutte,
)
from oracle import brute_max_matching, brute_missed_set

SETTINGS = settings(max_examples=150, deadline=None)


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


@st.composite
def saturated_bigraphs(draw):
    a = draw(st.integers(min_value=1, max_value=4))
    extra = draw(st.integers(min_value=0, max_value=3))
    left = [f"a{i}" for i in range(a)]
    right = [f"b{i}" for i in range(a + extra)]
    edges = {(left[i], right[i]) for i in range(a)}
    edges.update(draw(st.lists(st.tuples(st.sampled_from(left), st.sampled_from(right)))))
    return Bigraph.build(left, right, edges)


@st.composite
def instances_with_assignment(draw, max_m=3, max_c=3):
    m = draw(st.integers(min_value=1, max_value=max_m))
    capacities = draw(st.lists(st.integers(min_value=1, max_value=max_c), min_size=m, max_size=m))
    n = sum(capacities)
    rationals = st.fractions(min_value=0, max_value=4, max_denominator=3)
    values = draw(st.lists(st.lists(rationals, min_size=m, max_size=m), min_size=n, max_size=n))
    ext = [[Fraction(0) if i == j else draw(rationals) for j in range(n)] for i in range(n)]
    inst = validate_instance({
        "n": n,
        "m": m,
        "capacities": capacities,
        "values": [[str(v) for v in row] for row in values],
        "externalities": [[str(e) for e in row] for row in ext],
    })
    order = draw(st.permutations(range(n)))
    groups, start = [], 0
    for c in capacities:
        groups.append(order[start:start + c])
        start += c
    return inst, check_assignment(inst, groups)


# ---------- matching ----------


@SETTINGS
@given(graphs())
def test_blossom_matches_references(g):
    m = max_matching(g)
    assert len({v for pair in m.pairs for v in pair}) == 2 * m.size
    assert all(g.has_edge(u, v) for u, v in m.pairs)
    assert m.size == brute_max_matching(g).size
    assert m.size == len(nx.max_weight_matching(g.to_networkx(), maxcardinality=True))


@SETTINGS
@given(graphs())
def test_gallai_edmonds_structure(g):
    d = gallai_edmonds(g)
    m = max_matching(g)
    assert d.d == brute_missed_set(g)
    assert d.d | d.a | d.c == set(range(g.n))
    assert not (d.d & d.a) and not (d.d & d.c) and not (d.a & d.c)
    assert g.n - 2 * m.size == d.deficiency()
    assert verify_tutte(g, d, m)


@SETTINGS
@given(saturated_bigraphs())
def test_tight_sets_follow_surplus(b):
    m = bipartite_max_matching(b)
    assert m.size == len(b.left)
    surpluses = {
        len(b.neighborhood(frozenset(s))) - len(s)
        for size in range(1, len(b.left) + 1)
        for s in combinations(b.left, size)
    }
    value, _ = surplus(b)
    assert value == min(surpluses)

    tight = find_tight_set(b, m)
    assert (tight is not None) == (0 in surpluses)
    if tight is not None:
        assert len(b.neighborhood(tight)) == len(tight)

    near = find_near_tight_set(b, m)
    assert (near is not None) == (1 in surpluses)
    if near is not None:
        s, spare = near
        nbrs = b.neighborhood(s)
        assert spare in nbrs
        assert len(nbrs) == len(s) + 1


# ---------- fairness ----------


@SETTINGS
@given(instances_with_assignment())
def test_pef_violations_are_ef_violations(case):
    inst, x = case
    ef = set(check_ef(inst, x).ef_violations)
    pef = set(check_pef(inst, x).pef_violations)
    assert pef <= ef


@SETTINGS
@given(instances_with_assignment(), st.data())
def test_swap_is_an_involution(case, data):
    inst, x = case
    i = data.draw(st.integers(min_value=0, max_value=inst.n - 1))
    j = data.draw(st.integers(min_value=0, max_value=inst.n - 1))
    y = swap(x, i, j)
    assert swap(y, i, j) == x
    assert _swapped_utility(inst, x, i, j) == utility(inst, y, i)


@SETTINGS
@given(instances_with_assignment(), st.fractions(min_value=Fraction(1, 3), max_value=5), st.data())
def test_scaling_one_agent(case, q, data):
    inst, x = case
    i = data.draw(st.integers(min_value=0, max_value=inst.n - 1))
    values = [list(row) for row in inst.values]
    ext = [list(row) for row in inst.externalities]
    values[i] = [v * q for v in values[i]]
    ext[i] = [e * q for e in ext[i]]
    scaled = validate_instance({
        "n": inst.n,
        "m": inst.m,
        "capacities": list(inst.capacities),
        "values": [[str(v) for v in row] for row in values],
        "externalities": [[str(e) for e in row] for row in ext],
    })
    y = check_assignment(scaled, x.to_lists())
    assert utility(scaled, y, i).total == q * utility(inst, x, i).total
    if inst.n >= 2:
        assert prop_share(scaled, i) == q * prop_share(inst, i)

    def own(pairs):
        return {p for p in pairs if p[0] == i}

    assert own(check_ef(scaled, y).ef_violations) == own(check_ef(inst, x).ef_violations)
    assert own(check_pef(scaled, y).pef_violations) == own(check_pef(inst, x).pef_violations)


@SETTINGS
@given(instances_with_assignment())
def test_zero_externalities_prop_share_is_mean_value(case):
    inst, _ = case
    if inst.n < 2:
        return
    bare = validate_instance({
        "n": inst.n,
        "m": inst.m,
        "capacities": list(inst.capacities),
        "values": [[str(v) for v in row] for row in inst.values],
        "externalities": [[0] * inst.n for _ in range(inst.n)],
    })
    for i in range(inst.n):
        assert prop_share(bare, i) == sum(bare.values[i], Fraction(0)) / bare.m
