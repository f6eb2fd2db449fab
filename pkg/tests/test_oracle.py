"""Brute-force deciders and graph references."""
import pytest

import config
from core import check_ef, check_pef, validate_instance
from generators import named_instance, random_dorm, random_general, tight_instance
from matching import Graph, gallai_edmonds, max_matching
from oracle import (
    EnumerationLimitExceeded,
    OracleSizeError,
    brute_clique,
    brute_max_matching,
    brute_missed_set,
    decide_ef,
    decide_pef,
    enumerate_assignments,
    is_ef,
    is_pef,
    multinomial_count,
)

P3 = Graph.from_edges(3, [(0, 1), (1, 2)])
K3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def _caps_instance(capacities):
    n = sum(capacities)
    return validate_instance({
        "n": n,
        "m": len(capacities),
        "capacities": capacities,
        "values": [[0] * len(capacities)] * n,
        "externalities": [[0] * n for _ in range(n)],
    })


@pytest.mark.parametrize("caps, count", [([5, 5], 252), ([3, 3, 3], 1680), ([1, 1], 2), ([2, 1, 1], 12)])
def test_multinomial_count(caps, count):
    assert multinomial_count(caps) == count


def test_enumeration_order_and_count():
    inst = _caps_instance([1, 1])
    count, stream = enumerate_assignments(inst)
    assert count == 2
    assert [x.to_lists() for x in stream] == [[[0], [1]], [[1], [0]]]


def test_enumeration_is_lexicographic_and_complete():
    inst = _caps_instance([2, 1, 1])
    count, stream = enumerate_assignments(inst)
    seen = [tuple(tuple(g) for g in x.to_lists()) for x in stream]
    assert len(seen) == count == 12
    assert seen == sorted(seen)
    assert len(set(seen)) == 12


def test_enumeration_refuses_past_limit():
    inst = _caps_instance([5, 5])
    with pytest.raises(EnumerationLimitExceeded) as exc:
        enumerate_assignments(inst, limit=100)
    assert exc.value.count == 252
    assert exc.value.limit == 100


def test_decide_respects_limit():
    inst, _ = named_instance("no-pef-cap3")
    with pytest.raises(EnumerationLimitExceeded):
        decide_pef(inst, limit=1679)


def test_fast_predicates_agree_with_checkers():
    for seed in range(20):
        inst = random_general(seed, [2, 2, 1], value_max=2, ext_max=2)
        _, stream = enumerate_assignments(inst)
        for x in stream:
            assert is_ef(inst, x) == check_ef(inst, x).is_ef
            assert is_pef(inst, x) == check_pef(inst, x).is_pef


def test_fast_predicates_with_fractions():
    inst = validate_instance({
        "n": 2, "m": 2, "capacities": [1, 1],
        "values": [["1/3", "1/2"], [0, 0]],
        "externalities": [[0, 0], [0, 0]],
    })
    _, stream = enumerate_assignments(inst)
    first, second = list(stream)
    assert not is_ef(inst, first)
    assert is_ef(inst, second)


def test_decide_no_pef_examples():
    assert decide_pef(named_instance("no-pef-cap5")[0]) is None
    assert decide_pef(named_instance("no-pef-cap3")[0]) is None


def test_decide_ef_on_ef_not_prop():
    inst, _ = tight_instance("ef-not-prop", t=3)
    witness = decide_ef(inst)
    assert witness is not None
    assert check_ef(inst, witness).is_ef


def test_decide_zero_instance_returns_first(zero_instance):
    witness = decide_ef(zero_instance)
    assert witness.to_lists() == [[0, 1], [2, 3]]


@pytest.mark.parametrize("seed", range(10))
def test_capacity_two_always_has_pef(seed):
    inst = random_dorm(seed, 3, 2, "1/2")
    assert decide_pef(inst) is not None


def test_ef_implies_pef_witness():
    for seed in range(15):
        inst = random_general(seed, [2, 2], value_max=3, ext_max=1)
        if decide_ef(inst) is not None:
            assert decide_pef(inst) is not None


def test_parallel_witness_matches_serial():
    inst = random_general(3, [3, 3], value_max=3, ext_max=2)
    serial = decide_pef(inst, workers=1)
    assert decide_pef(inst, workers=2) == serial
    assert decide_ef(inst, workers=3) == decide_ef(inst, workers=1)


# ---------- graph references ----------


def test_brute_matching_examples():
    assert brute_max_matching(K3).size == 1
    assert brute_max_matching(P3).size == 1
    assert brute_max_matching(Graph.from_edges(4, [])).size == 0


def test_brute_missed_set_examples():
    assert brute_missed_set(K3) == {0, 1, 2}
    assert brute_missed_set(P3) == {0, 2}
    assert brute_missed_set(Graph.from_edges(3, [])) == {0, 1, 2}


def test_brute_matching_size_ceiling(monkeypatch):
    monkeypatch.setattr(config, "BRUTE_MATCHING_MAX", 4)
    with pytest.raises(OracleSizeError, match="limited to 4"):
        brute_max_matching(Graph.from_edges(5, []))


def test_brute_agrees_with_blossom_on_fixed_graphs():
    graphs = [
        P3,
        K3,
        Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]),
        Graph.from_edges(7, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (6, 3)]),
    ]
    for g in graphs:
        assert brute_max_matching(g).size == max_matching(g).size
        assert brute_missed_set(g) == gallai_edmonds(g).d


def test_brute_clique_examples():
    k4 = Graph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert brute_clique(k4, 3) == {0, 1, 2}
    assert brute_clique(c4, 3) is None
    assert brute_clique(c4, 1) == {0}
    assert brute_clique(c4, 5) is None


def test_brute_clique_size_ceiling(monkeypatch):
    monkeypatch.setattr(config, "BRUTE_CLIQUE_MAX", 3)
    with pytest.raises(OracleSizeError):
        brute_clique(Graph.from_edges(4, []), 2)
