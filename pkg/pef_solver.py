"""Pareto-envy-free assignment for capacity-2 dorm sharing.

Agents matched inside the Gallai-Edmonds components are paired off first; the
Tutte set A and the leftover agents L of odd components are then placed round
by round, each round choosing among four cases by the Hall surplus of the
bipartite graph G* between A and L.
"""
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple
import time
from dataclasses import dataclass, field

from config import log_event
from core import Assignment, Instance, check_assignment
from matching import (
    Bigraph,
    bipartite_max_matching,
    find_near_tight_set,
    find_tight_set,
    gallai_edmonds,
    max_matching,
)


class SolverPreconditionError(ValueError):
    pass


class SolverInvariantError(RuntimeError):
    def __init__(self, message: str, trace: "SolveTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class PlacementRecord:
    """Steps 2-3: one Gallai-Edmonds component placed as matched pairs."""

    step: int
    component: Tuple[int, ...]
    pairs: Tuple[Tuple[int, int], ...]
    dorms: Tuple[int, ...]
    unmatched_agent: Optional[int] = None


@dataclass(frozen=True)
class RoundRecord:
    round: int
    case: int
    pairs: Tuple[Tuple[int, int], ...]
    dorms: Tuple[int, ...]
    hall_saturated: bool
    witness: Optional[Tuple[int, ...]] = None
    designated_agent: Optional[int] = None


@dataclass
class SolveTrace:
    tutte_set: Tuple[int, ...] = ()
    matching: Tuple[Tuple[int, int], ...] = ()
    unmatched: Tuple[int, ...] = ()
    placements: List[PlacementRecord] = field(default_factory=list)
    rounds: List[RoundRecord] = field(default_factory=list)

    def case_counts(self) -> Dict[int, int]:
        counts = {1: 0, 2: 0, 3: 0, 4: 0}
        for r in self.rounds:
            counts[r.case] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tutte_set": list(self.tutte_set),
            "matching": [list(p) for p in self.matching],
            "unmatched": list(self.unmatched),
            "placements": [
                {
                    "step": p.step,
                    "component": list(p.component),
                    "pairs": [list(x) for x in p.pairs],
                    "dorms": list(p.dorms),
                    "unmatched_agent": p.unmatched_agent,
                }
                for p in self.placements
            ],
            "rounds": [
                {
                    "round": r.round,
                    "case": r.case,
                    "pairs": [list(x) for x in r.pairs],
                    "dorms": list(r.dorms),
                    "hall_saturated": r.hall_saturated,
                    "witness": None if r.witness is None else list(r.witness),
                    "designated_agent": r.designated_agent,
                }
                for r in self.rounds
            ],
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SolveTrace":
        def pairs(v) -> Tuple[Tuple[int, int], ...]:
            return tuple((int(a), int(b)) for a, b in v)

        return cls(
            tutte_set=tuple(raw["tutte_set"]),
            matching=pairs(raw["matching"]),
            unmatched=tuple(raw["unmatched"]),
            placements=[
                PlacementRecord(
                    step=p["step"],
                    component=tuple(p["component"]),
                    pairs=pairs(p["pairs"]),
                    dorms=tuple(p["dorms"]),
                    unmatched_agent=p.get("unmatched_agent"),
                )
                for p in raw["placements"]
            ],
            rounds=[
                RoundRecord(
                    round=r["round"],
                    case=r["case"],
                    pairs=pairs(r["pairs"]),
                    dorms=tuple(r["dorms"]),
                    hall_saturated=r["hall_saturated"],
                    witness=None if r.get("witness") is None else tuple(r["witness"]),
                    designated_agent=r.get("designated_agent"),
                )
                for r in raw["rounds"]
            ],
        )


def preference_order(inst: Instance, agent: int, dorms: Sequence[int]) -> List[int]:
    """Most preferred first: descending value, lower index on ties."""
    return sorted(dorms, key=lambda j: (-inst.values[agent][j], j))


def _least_preferred(inst: Instance, agent: int, dorms: Sequence[int], k: int) -> List[int]:
    return list(reversed(preference_order(inst, agent, dorms)))[:k]


class _Placer:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.free: List[int] = list(range(inst.m))
        self.groups: List[Optional[Tuple[int, int]]] = [None] * inst.m

    def put(self, pair: Tuple[int, int], dorm: int) -> None:
        self.free.remove(dorm)
        self.groups[dorm] = pair

    def lowest(self, k: int) -> List[int]:
        return self.free[:k]


def _check_preconditions(inst: Instance) -> None:
    profile = inst.profile
    if profile.externality_graph is None:
        raise SolverPreconditionError("externalities must be symmetric and 0/1")
    if profile.uniform_capacity != 2:
        raise SolverPreconditionError(
            f"every dorm must have capacity 2 (got capacities {list(inst.capacities)})"
        )


def solve_pef_cap2(inst: Instance) -> Tuple[Assignment, SolveTrace]:
    _check_preconditions(inst)
    started = time.perf_counter()
    g = inst.profile.externality_graph

    # Step 1
    m = max_matching(g)
    ge = gallai_edmonds(g, m)
    trace = SolveTrace(tutte_set=tuple(sorted(ge.a)), matching=tuple(sorted(m.pairs)))
    placer = _Placer(inst)

    # Step 2
    for comp in ge.even_components:
        pairs = tuple(sorted(p for p in m.pairs if p[0] in comp.vertices))
        dorms = tuple(placer.lowest(len(pairs)))
        for pair, dorm in zip(pairs, dorms):
            placer.put(pair, dorm)
        trace.placements.append(PlacementRecord(2, tuple(sorted(comp.vertices)), pairs, dorms))

    # Step 3
    leftover: List[int] = []
    for comp in ge.odd_components:
        pairs = tuple(sorted(p for p in m.pairs if p[0] in comp.vertices and p[1] in comp.vertices))
        inside = {v for p in pairs for v in p}
        agent = min(comp.vertices - inside)
        dorms = tuple(_least_preferred(inst, agent, placer.free, len(pairs)))
        for pair, dorm in zip(pairs, dorms):
            placer.put(pair, dorm)
        leftover.append(agent)
        trace.placements.append(
            PlacementRecord(3, tuple(sorted(comp.vertices)), pairs, dorms, unmatched_agent=agent)
        )
    trace.unmatched = tuple(sorted(leftover))

    # Step 4
    a_rest = set(ge.a)
    l_rest = set(leftover)
    round_no = 0
    while a_rest or l_rest:
        round_no += 1
        b = Bigraph.build(
            a_rest, l_rest, [(a, l) for a in a_rest for l in g.neighbors(a) if l in l_rest]
        )
        mstar = bipartite_max_matching(b)
        saturated = mstar.size == len(b.left)
        if not saturated:
            log_event("solver_invariant_breach", round=round_no, remaining_tutte=sorted(a_rest))
            raise SolverInvariantError(
                f"round {round_no}: G* has no matching saturating the remaining Tutte set", trace
            )

        record = _next_round(inst, b, mstar, placer, round_no, saturated)
        if record is None:
            log_event("solver_invariant_breach", round=round_no, reason="no case applies")
            raise SolverInvariantError(f"round {round_no}: none of the four cases applies", trace)
        for pair, dorm in zip(record.pairs, record.dorms):
            placer.put(pair, dorm)
            for v in pair:
                a_rest.discard(v)
                l_rest.discard(v)
        trace.rounds.append(record)

    assignment = check_assignment(inst, placer.groups)
    log_event(
        "solve_finished",
        n=inst.n,
        m=inst.m,
        tutte_set_size=len(ge.a),
        rounds=round_no,
        case_counts=trace.case_counts(),
        duration_ms=round((time.perf_counter() - started) * 1000, 2),
    )
    return assignment, trace


def _next_round(
    inst: Instance, b: Bigraph, mstar, placer: _Placer, round_no: int, saturated: bool
) -> Optional[RoundRecord]:
    # Case 1: two L agents with no edge into A
    isolated = [l for l in b.right if not b.right_neighbors[l]]
    if len(isolated) >= 2:
        pair = (isolated[0], isolated[1])
        return RoundRecord(round_no, 1, (pair,), tuple(placer.lowest(1)), saturated)

    if b.left:
        # Case 2: surplus 0
        tight = find_tight_set(b, mstar)
        if tight is not None:
            pairs = tuple((a, mstar.mate(a)) for a in sorted(tight))
            return RoundRecord(
                round_no, 2, pairs, tuple(placer.lowest(len(pairs))), saturated,
                witness=tuple(sorted(tight)),
            )

        # Case 3: surplus 1; the spare neighbour picks which dorms the pairs take
        near = find_near_tight_set(b, mstar)
        if near is not None:
            s, spare = near
            pairs = tuple((a, mstar.mate(a)) for a in sorted(s))
            dorms = tuple(_least_preferred(inst, spare, placer.free, len(pairs)))
            return RoundRecord(
                round_no, 3, pairs, dorms, saturated,
                witness=tuple(sorted(s)), designated_agent=spare,
            )

    # Case 4: two L agents with the same favourite free dorm
    favourite = {l: preference_order(inst, l, placer.free)[0] for l in b.right}
    ordered = list(b.right)
    for x in range(len(ordered)):
        for y in range(x + 1, len(ordered)):
            i, j = ordered[x], ordered[y]
            if favourite[i] == favourite[j]:
                return RoundRecord(round_no, 4, ((i, j),), (favourite[i],), saturated)
    return None
