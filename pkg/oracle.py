"""Exhaustive reference deciders: EF/PEF existence, matchings, missed vertices, cliques.

Everything here is exponential on purpose. Sizes are capped by config ceilings
and enumeration refuses (never truncates) past the configured limit.
"""
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple
import math
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from itertools import combinations

import config
from config import log_event
from core import Assignment, Instance, check_assignment
from matching import Graph, Matching


class EnumerationLimitExceeded(Exception):
    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} assignments exceed the enumeration limit of {limit}")
        self.count = count
        self.limit = limit


class OracleSizeError(ValueError):
    pass


def multinomial_count(capacities: Sequence[int]) -> int:
    """n! / prod(c_j!) for n = sum(c_j)."""
    count, placed = 1, 0
    for c in capacities:
        placed += c
        count *= math.comb(placed, c)
    return count


def _check_limit(inst: Instance, limit: Optional[int]) -> int:
    limit = config.DEFAULT_ENUM_LIMIT if limit is None else limit
    count = multinomial_count(inst.capacities)
    if count > limit:
        log_event("enumeration_refused", n=inst.n, m=inst.m, count=count, limit=limit)
        raise EnumerationLimitExceeded(count, limit)
    return count


def _group_tuples(
    remaining: Tuple[int, ...], capacities: Sequence[int]
) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    if not capacities:
        yield ()
        return
    for first in combinations(remaining, capacities[0]):
        chosen = set(first)
        rest = tuple(v for v in remaining if v not in chosen)
        for tail in _group_tuples(rest, capacities[1:]):
            yield (first,) + tail


def enumerate_assignments(inst: Instance, limit: Optional[int] = None) -> Tuple[int, Iterator[Assignment]]:
    """(count, stream) with the stream in lexicographic order of sorted groups."""
    count = _check_limit(inst, limit)
    stream = (
        check_assignment(inst, groups)
        for groups in _group_tuples(tuple(range(inst.n)), inst.capacities)
    )
    return count, stream


# ---------- Integer-scaled predicates ----------


class _Scaled:
    """Each agent's row multiplied by the LCM of its denominators.

    Scaling one agent's values and externalities by the same positive factor
    preserves every comparison that agent makes, so EF/PEF are unchanged.
    """

    def __init__(self, inst: Instance):
        self.n = inst.n
        self.values: List[Tuple[int, ...]] = []
        self.ext: List[Tuple[int, ...]] = []
        for i in range(inst.n):
            dens = [x.denominator for x in inst.values[i]] + [x.denominator for x in inst.externalities[i]]
            scale = math.lcm(*dens)
            self.values.append(tuple(int(x * scale) for x in inst.values[i]))
            self.ext.append(tuple(int(x * scale) for x in inst.externalities[i]))


def _first_violation(scaled: _Scaled, groups: Sequence[Sequence[int]], pareto: bool) -> bool:
    n = scaled.n
    where = [0] * n
    for s, g in enumerate(groups):
        for i in g:
            where[i] = s
    for i in range(n):
        row = scaled.ext[i]
        vals = scaled.values[i]
        ext_by_group = [sum(row[l] for l in g) for g in groups]
        r = where[i]
        own_int, own_ext = vals[r], ext_by_group[r]
        for s, g in enumerate(groups):
            if s == r:
                continue
            swap_int = vals[s]
            if pareto:
                if swap_int <= own_int:
                    continue
                for j in g:
                    if ext_by_group[s] - row[j] > own_ext:
                        return True
            else:
                for j in g:
                    if swap_int + ext_by_group[s] - row[j] > own_int + own_ext:
                        return True
    return False


def is_ef(inst: Instance, x: Assignment) -> bool:
    return not _first_violation(_Scaled(inst), x.groups, pareto=False)


def is_pef(inst: Instance, x: Assignment) -> bool:
    return not _first_violation(_Scaled(inst), x.groups, pareto=True)


def _scan(args) -> Optional[Tuple[Tuple[int, ...], ...]]:
    scaled, n, capacities, firsts, pareto = args
    for first in firsts:
        chosen = set(first)
        rest = tuple(v for v in range(n) if v not in chosen)
        for tail in _group_tuples(rest, capacities[1:]):
            groups = (first,) + tail
            if not _first_violation(scaled, groups, pareto):
                return groups
    return None


def _chunks(items: List, parts: int) -> List[List]:
    size = max(1, math.ceil(len(items) / parts))
    return [items[k:k + size] for k in range(0, len(items), size)]


def _decide(inst: Instance, notion: str, limit: Optional[int], workers: Optional[int]) -> Optional[Assignment]:
    started = time.perf_counter()
    count = _check_limit(inst, limit)
    workers = config.DEFAULT_WORKERS if workers is None else workers
    scaled = _Scaled(inst)
    pareto = notion == "pef"
    firsts = list(combinations(range(inst.n), inst.capacities[0]))

    found = None
    if workers > 1 and len(firsts) > 1:
        jobs = [(scaled, inst.n, inst.capacities, chunk, pareto) for chunk in _chunks(firsts, workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map keeps chunk order, so the first hit is the lexicographically first witness
            for result in pool.map(_scan, jobs):
                if result is not None:
                    found = result
                    break
    else:
        found = _scan((scaled, inst.n, inst.capacities, firsts, pareto))

    witness = None if found is None else check_assignment(inst, found)
    log_event(
        "decision_finished",
        notion=notion,
        n=inst.n,
        count=count,
        workers=workers,
        found=witness is not None,
        duration_ms=round((time.perf_counter() - started) * 1000, 2),
    )
    return witness


def decide_ef(inst: Instance, limit: Optional[int] = None, workers: Optional[int] = None) -> Optional[Assignment]:
    return _decide(inst, "ef", limit, workers)


def decide_pef(inst: Instance, limit: Optional[int] = None, workers: Optional[int] = None) -> Optional[Assignment]:
    return _decide(inst, "pef", limit, workers)


# ---------- Graph references ----------


def _require_size(g: Graph, ceiling: int, what: str) -> None:
    if g.n > ceiling:
        raise OracleSizeError(f"{what} is limited to {ceiling} vertices (got {g.n})")


def brute_max_matching(g: Graph) -> Matching:
    _require_size(g, config.BRUTE_MATCHING_MAX, "brute-force matching")
    adjacency = g.adjacency
    full = (1 << g.n) - 1

    @lru_cache(maxsize=None)
    def best(used: int) -> Tuple[Tuple[int, int], ...]:
        if used == full:
            return ()
        v = (~used & (used + 1)).bit_length() - 1
        top = best(used | (1 << v))
        for w in adjacency[v]:
            if used & (1 << w):
                continue
            cand = ((v, w),) + best(used | (1 << v) | (1 << w))
            if len(cand) > len(top):
                top = cand
        return top

    return Matching(frozenset((min(u, v), max(u, v)) for u, v in best(0)))


def brute_missed_set(g: Graph) -> FrozenSet[int]:
    """Vertices v with nu(G - v) = nu(G), i.e. missed by some maximum matching."""
    nu = brute_max_matching(g).size
    return frozenset(v for v in range(g.n) if brute_max_matching(g.isolate(v)).size == nu)


def brute_clique(g: Graph, k: int) -> Optional[FrozenSet[int]]:
    _require_size(g, config.BRUTE_CLIQUE_MAX, "brute-force clique search")
    if k > g.n:
        return None
    for cand in combinations(range(g.n), k):
        if all(g.has_edge(u, v) for u, v in combinations(cand, 2)):
            return frozenset(cand)
    return None
