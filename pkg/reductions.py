"""Clique -> EF / PEF existence reductions, as concrete instance builders."""
from typing import Any, Dict, List, Tuple
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from config import log_event
from core import Instance, validate_instance
from matching import Graph, load_graph


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class CliqueInstance:
    graph: Graph
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or not 1 <= self.k <= self.graph.n:
            raise ReductionError(f"clique target must satisfy 1 <= k <= |V|={self.graph.n} (got {self.k!r})")

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(self.graph.neighbors(v)) for v in range(self.graph.n))


def pad_clique(ci: CliqueInstance) -> CliqueInstance:
    """Ensure k > |V|/2 by adding |V| dummies adjacent to everything; target becomes k + |V|."""
    size = ci.graph.n
    if 2 * ci.k > size:
        return ci
    dummies = range(size, 2 * size)
    edges = set(ci.graph.edges)
    edges.update(combinations(dummies, 2))
    edges.update((v, d) for v in range(size) for d in dummies)
    return CliqueInstance(Graph.from_edges(2 * size, edges), ci.k + size)


def _require_majority_target(ci: CliqueInstance) -> None:
    if 2 * ci.k <= ci.graph.n:
        raise ReductionError(
            f"reduction needs k > |V|/2 (got k={ci.k}, |V|={ci.graph.n}); apply pad_clique first"
        )


def _zeros(n: int, cols: int) -> List[List[int]]:
    return [[0] * cols for _ in range(n)]


def reduce_clique_to_ef(ci: CliqueInstance) -> Instance:
    """4k agents on two resources of capacity 2k.

    Agents 0..|V|-1 are the vertices, |V|..2|V|-1 their twins, the rest are
    fillers that only value resource 0. Vertex i values resource 0 at
    2k - d_i - 1 and each graph neighbour at 1; vertex and twin value each
    other at 1.
    """
    _require_majority_target(ci)
    size, k = ci.graph.n, ci.k
    n = 4 * k
    fillers = range(2 * size, n)
    values = _zeros(n, 2)
    ext = _zeros(n, n)
    for i in range(size):
        values[i][0] = 2 * k - ci.degrees[i] - 1
        for j in ci.graph.neighbors(i):
            ext[i][j] = 1
        ext[i][size + i] = 1
        ext[size + i][i] = 1
    for f in fillers:
        values[f][0] = 1

    inst = validate_instance({
        "n": n,
        "m": 2,
        "capacities": [2 * k, 2 * k],
        "values": values,
        "externalities": ext,
        "meta": {"reduction": "clique-to-ef", "vertices": size, "k": k},
    })
    log_event("reduction_built", target="ef", vertices=size, k=k, agents=n)
    return inst


def reduce_clique_to_pef(ci: CliqueInstance) -> Instance:
    """2k + |V| agents on resources of capacity k + |V| and k.

    Every agent values resource 0 at 1. The 2k fillers value one another at 1.
    Vertex i values its graph neighbours and the first 2k - d_i - 2 fillers at 1.
    """
    _require_majority_target(ci)
    size, k = ci.graph.n, ci.k
    n = 2 * k + size
    fillers = list(range(size, n))
    values = [[1, 0] for _ in range(n)]
    ext = _zeros(n, n)
    for f, g in combinations(fillers, 2):
        ext[f][g] = ext[g][f] = 1
    for i in range(size):
        for j in ci.graph.neighbors(i):
            ext[i][j] = 1
        for f in fillers[: 2 * k - ci.degrees[i] - 2]:
            ext[i][f] = 1

    inst = validate_instance({
        "n": n,
        "m": 2,
        "capacities": [k + size, k],
        "values": values,
        "externalities": ext,
        "meta": {"reduction": "clique-to-pef", "vertices": size, "k": k},
    })
    log_event("reduction_built", target="pef", vertices=size, k=k, agents=n)
    return inst


def reduce(ci: CliqueInstance, target: str) -> Instance:
    """Pad when needed, then build the instance for target 'ef' or 'pef'."""
    builders = {"ef": reduce_clique_to_ef, "pef": reduce_clique_to_pef}
    if target not in builders:
        raise ReductionError(f"unknown reduction target {target!r}; use 'ef' or 'pef'")
    return builders[target](pad_clique(ci))


def clique_from_dict(raw: Dict[str, Any], k: int) -> CliqueInstance:
    return CliqueInstance(load_graph(raw), k)
