"""Maximum matching, Gallai-Edmonds decomposition and bipartite Hall surplus.

Vertices are integers 0..n-1 for general graphs. Every search visits vertices
and neighbours in ascending order so results are reproducible across runs.
"""
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import networkx as nx

import config


class MatchingError(ValueError):
    pass


def _sort_key(v: Any) -> Tuple[str, Any]:
    # Orders labels of one type naturally and keeps mixed types apart
    return (type(v).__name__, v)


# ---------- Graph / Matching ----------


@dataclass(frozen=True)
class Graph:
    n: int
    edges: FrozenSet[Tuple[int, int]]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise MatchingError(f"vertex count must be a non-negative integer (got {n!r})")
        normalized = set()
        for edge in edges:
            if len(edge) != 2:
                raise MatchingError(f"edge must have two endpoints (got {list(edge)!r})")
            u, v = int(edge[0]), int(edge[1])
            if not (0 <= u < n and 0 <= v < n):
                raise MatchingError(f"edge {{{u},{v}}} out of range for n={n}")
            if u == v:
                raise MatchingError(f"self-loop on vertex {u} not allowed")
            normalized.add((min(u, v), max(u, v)))
        return cls(n, frozenset(normalized))

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        nbrs: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def isolate(self, v: int) -> "Graph":
        """Same vertex set with every edge at v removed (G - v for matching purposes)."""
        return Graph(self.n, frozenset(e for e in self.edges if v not in e))

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(sorted(self.edges))
        return h


@dataclass(frozen=True)
class Matching:
    pairs: FrozenSet[Tuple[Hashable, Hashable]]

    @property
    def size(self) -> int:
        return len(self.pairs)

    @cached_property
    def mate_map(self) -> Dict[Hashable, Hashable]:
        mates: Dict[Hashable, Hashable] = {}
        for u, v in self.pairs:
            if u in mates or v in mates:
                raise MatchingError(f"edges of a matching must be vertex-disjoint (vertex in {u!r}-{v!r} reused)")
            mates[u] = v
            mates[v] = u
        return mates

    def mate(self, v: Hashable) -> Optional[Hashable]:
        return self.mate_map.get(v)

    def covers(self, v: Hashable) -> bool:
        return v in self.mate_map


def load_graph(raw: Mapping[str, Any]) -> Graph:
    if not isinstance(raw, Mapping) or "n" not in raw:
        raise MatchingError("graph JSON must be an object with 'n' and 'edges'")
    return Graph.from_edges(raw["n"], raw.get("edges", []))


def graph_to_dict(g: Graph) -> Dict[str, Any]:
    return {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}


# ---------- Blossom search ----------


class _AlternatingForest:
    """Edmonds alternating forest with blossom contraction.

    `outer` marks even vertices (roots, mates of odd vertices, and everything
    absorbed into a blossom). `base[v]` is the base of the blossom holding v.
    """

    def __init__(self, adjacency: Sequence[Sequence[int]], match: List[int], roots: Iterable[int]):
        n = len(adjacency)
        self.adjacency = adjacency
        self.match = match
        self.parent = [-1] * n
        self.base = list(range(n))
        self.outer = [False] * n
        self.queue: deque = deque()
        for r in roots:
            self.outer[r] = True
            self.queue.append(r)

    def grow(self) -> Optional[int]:
        """Grow until an exposed non-root vertex is reached; return it, or None."""
        adjacency, match, base, parent, outer = (
            self.adjacency, self.match, self.base, self.parent, self.outer,
        )
        while self.queue:
            v = self.queue.popleft()
            for w in adjacency[v]:
                if base[v] == base[w] or match[v] == w:
                    continue
                if outer[w]:
                    self._contract(v, w)
                elif parent[w] == -1:
                    parent[w] = v
                    if match[w] == -1:
                        return w
                    mate = match[w]
                    outer[mate] = True
                    self.queue.append(mate)
        return None

    def _lowest_common_base(self, a: int, b: int) -> int:
        match, base, parent = self.match, self.base, self.parent
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            if match[b] == -1:
                raise MatchingError("augmenting path joins two search trees; matching is not maximum")
            b = parent[match[b]]

    def _mark_path(self, v: int, b: int, child: int, in_blossom: List[bool]) -> None:
        match, base, parent = self.match, self.base, self.parent
        while base[v] != b:
            in_blossom[base[v]] = True
            in_blossom[base[match[v]]] = True
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    def _contract(self, v: int, w: int) -> None:
        b = self._lowest_common_base(v, w)
        in_blossom = [False] * len(self.base)
        self._mark_path(v, b, w, in_blossom)
        self._mark_path(w, b, v, in_blossom)
        for i in range(len(self.base)):
            if in_blossom[self.base[i]]:
                self.base[i] = b
                if not self.outer[i]:
                    self.outer[i] = True
                    self.queue.append(i)


def _augment(parent: List[int], match: List[int], end: int) -> None:
    v = end
    while v != -1:
        pv = parent[v]
        nxt = match[pv]
        match[v] = pv
        match[pv] = v
        v = nxt


def _mate_array(g: Graph, m: Matching) -> List[int]:
    match = [-1] * g.n
    for u, v in m.pairs:
        if not g.has_edge(u, v):
            raise MatchingError(f"matching edge {{{u},{v}}} is not an edge of the graph")
        if match[u] != -1 or match[v] != -1:
            raise MatchingError(f"matching edges share a vertex at {{{u},{v}}}")
        match[u], match[v] = v, u
    return match


def _matching_from_array(match: Sequence[int]) -> Matching:
    return Matching(frozenset((v, w) for v, w in enumerate(match) if w > v))


def max_matching(g: Graph) -> Matching:
    """Maximum-cardinality matching by augmenting paths with blossom contraction.

    One search per initially exposed vertex, lowest index first. A vertex with
    no augmenting path stays unmatched for good, so a single pass suffices.
    """
    match = [-1] * g.n
    for root in range(g.n):
        if match[root] != -1:
            continue
        forest = _AlternatingForest(g.adjacency, match, [root])
        end = forest.grow()
        if end is not None:
            _augment(forest.parent, match, end)
    return _matching_from_array(match)


# ---------- Gallai-Edmonds ----------


@dataclass(frozen=True)
class Component:
    vertices: FrozenSet[int]

    @property
    def odd(self) -> bool:
        return len(self.vertices) % 2 == 1


@dataclass(frozen=True)
class GEDecomposition:
    d: FrozenSet[int]
    a: FrozenSet[int]
    c: FrozenSet[int]
    components: Tuple[Component, ...]

    @property
    def odd_components(self) -> Tuple[Component, ...]:
        return tuple(x for x in self.components if x.odd)

    @property
    def even_components(self) -> Tuple[Component, ...]:
        return tuple(x for x in self.components if not x.odd)

    def deficiency(self) -> int:
        """Vertices left exposed by any maximum matching (Berge-Tutte)."""
        return len(self.odd_components) - len(self.a)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "D": sorted(self.d),
            "A": sorted(self.a),
            "C": sorted(self.c),
            "components": [
                {"vertices": sorted(x.vertices), "odd": x.odd} for x in self.components
            ],
        }


def gallai_edmonds(g: Graph, matching: Optional[Matching] = None) -> GEDecomposition:
    """Decompose g into (D, A, C) plus the components of G \\ A.

    D is read off a final blossom search grown from every exposed vertex of a
    maximum matching: the outer vertices of that forest are exactly the
    vertices some maximum matching misses.
    """
    if matching is None:
        matching = max_matching(g)
    match = _mate_array(g, matching)
    exposed = [v for v in range(g.n) if match[v] == -1]
    forest = _AlternatingForest(g.adjacency, match, exposed)
    if forest.grow() is not None:
        raise MatchingError("matching is not maximum")

    d = frozenset(v for v in range(g.n) if forest.outer[v])
    a = frozenset(w for v in d for w in g.adjacency[v] if w not in d)
    c = frozenset(range(g.n)) - d - a

    rest = nx.Graph()
    rest.add_nodes_from(v for v in range(g.n) if v not in a)
    rest.add_edges_from((u, v) for u, v in sorted(g.edges) if u not in a and v not in a)
    comps = sorted((frozenset(x) for x in nx.connected_components(rest)), key=min)
    return GEDecomposition(d, a, c, tuple(Component(x) for x in comps))


def verify_tutte(g: Graph, decomp: GEDecomposition, m: Matching) -> bool:
    """True iff m splits as near-perfect/perfect matchings inside the odd/even
    components of G \\ A plus a matching of A into distinct odd components."""
    _mate_array(g, m)
    if m.size != max_matching(g).size:
        raise MatchingError(f"matching of size {m.size} is not maximum")

    comp_of: Dict[int, int] = {}
    for idx, comp in enumerate(decomp.components):
        for v in comp.vertices:
            comp_of[v] = idx
    if set(comp_of) != set(range(g.n)) - decomp.a:
        return False

    inside = [0] * len(decomp.components)
    a_targets: Dict[int, int] = {}
    for u, v in m.pairs:
        if u in decomp.a and v in decomp.a:
            return False
        if u in decomp.a or v in decomp.a:
            anchor, other = (u, v) if u in decomp.a else (v, u)
            idx = comp_of.get(other)
            if idx is None or not decomp.components[idx].odd:
                return False
            a_targets[anchor] = idx
            continue
        if comp_of.get(u) is None or comp_of.get(u) != comp_of.get(v):
            return False
        inside[comp_of[u]] += 1

    if set(a_targets) != set(decomp.a):
        return False
    if len(set(a_targets.values())) != len(a_targets):
        return False
    for idx, comp in enumerate(decomp.components):
        if inside[idx] != len(comp.vertices) // 2:
            return False
    return True


# ---------- Bipartite side ----------


@dataclass(frozen=True)
class Bigraph:
    left: Tuple[Hashable, ...]
    right: Tuple[Hashable, ...]
    edges: FrozenSet[Tuple[Hashable, Hashable]] = field(default_factory=frozenset)

    @classmethod
    def build(
        cls,
        left: Iterable[Hashable],
        right: Iterable[Hashable],
        edges: Iterable[Tuple[Hashable, Hashable]] = (),
    ) -> "Bigraph":
        left_t = tuple(sorted(set(left), key=_sort_key))
        right_t = tuple(sorted(set(right), key=_sort_key))
        if set(left_t) & set(right_t):
            raise MatchingError("left and right vertex sets must be disjoint")
        lset, rset = set(left_t), set(right_t)
        edge_set = set()
        for l, r in edges:
            if l not in lset or r not in rset:
                raise MatchingError(f"edge ({l!r}, {r!r}) does not cross the sides")
            edge_set.add((l, r))
        return cls(left_t, right_t, frozenset(edge_set))

    @cached_property
    def left_neighbors(self) -> Dict[Hashable, Tuple[Hashable, ...]]:
        nbrs: Dict[Hashable, List[Hashable]] = {x: [] for x in self.left}
        for l, r in self.edges:
            nbrs[l].append(r)
        return {x: tuple(sorted(v, key=_sort_key)) for x, v in nbrs.items()}

    @cached_property
    def right_neighbors(self) -> Dict[Hashable, Tuple[Hashable, ...]]:
        nbrs: Dict[Hashable, List[Hashable]] = {x: [] for x in self.right}
        for l, r in self.edges:
            nbrs[r].append(l)
        return {x: tuple(sorted(v, key=_sort_key)) for x, v in nbrs.items()}

    def neighborhood(self, s: Iterable[Hashable]) -> FrozenSet[Hashable]:
        return frozenset(r for x in s for r in self.left_neighbors[x])


def bipartite_max_matching(b: Bigraph) -> Matching:
    """Hopcroft-Karp on an integer relabelling; pairs come back as (left, right)."""
    index = {x: i for i, x in enumerate(b.left)}
    offset = len(b.left)
    index.update({x: offset + i for i, x in enumerate(b.right)})
    h = nx.Graph()
    h.add_nodes_from(range(offset + len(b.right)))
    h.add_edges_from(
        sorted((index[l], index[r]) for l, r in b.edges)
    )
    mates = nx.bipartite.hopcroft_karp_matching(h, top_nodes=range(offset))
    return Matching(frozenset(
        (b.left[u], b.right[v - offset]) for u, v in mates.items() if u < offset
    ))


def _require_saturating(b: Bigraph, m: Matching) -> None:
    for x in b.left:
        if not m.covers(x):
            raise MatchingError(f"left vertex {x!r} is not saturated by the matching")


def _hall_violator(b: Bigraph, m: Matching) -> FrozenSet[Hashable]:
    """Left vertices reachable by alternating paths from unsaturated left vertices (Koenig)."""
    start = [x for x in b.left if not m.covers(x)]
    seen = set(start)
    frontier = deque(start)
    while frontier:
        x = frontier.popleft()
        for r in b.left_neighbors[x]:
            y = m.mate(r)
            if y is not None and y not in seen:
                seen.add(y)
                frontier.append(y)
    return frozenset(seen)


def _closure(b: Bigraph, m: Matching, seed: Hashable, excluded: Optional[Hashable] = None) -> FrozenSet[Hashable]:
    s = {seed}
    frontier = [seed]
    while frontier:
        x = frontier.pop()
        for r in b.left_neighbors[x]:
            if r == excluded:
                continue
            y = m.mate(r)
            if y is not None and y not in s:
                s.add(y)
                frontier.append(y)
    return frozenset(s)


def find_tight_set(b: Bigraph, m: Matching) -> Optional[FrozenSet[Hashable]]:
    """First closure {M(l)} -> add M(i) for i in N(S) with |S| = |N(S)|, scanning l in order."""
    _require_saturating(b, m)
    for ell in b.right:
        seed = m.mate(ell)
        if seed is None:
            continue
        s = _closure(b, m, seed)
        if len(s) == len(b.neighborhood(s)):
            return s
    return None


def find_near_tight_set(
    b: Bigraph, m: Matching
) -> Optional[Tuple[FrozenSet[Hashable], Hashable]]:
    _require_saturating(b, m)
    for ell in b.right:
        seed = m.mate(ell)
        if seed is None:
            continue
        for star in b.right:
            if star == ell or not b.right_neighbors[star]:
                continue
            s = _closure(b, m, seed, excluded=star)
            nbrs = b.neighborhood(s)
            if star not in nbrs or len(s) != len(nbrs) - 1:
                continue
            if all(m.mate(r) in s for r in nbrs if r != star):
                return s, star
    return None


def _surplus_of(b: Bigraph, s: Iterable[Hashable]) -> int:
    s = frozenset(s)
    return len(b.neighborhood(s)) - len(s)


def _replicated(b: Bigraph, anchor: Hashable, copies: int) -> Bigraph:
    extra = [("__copy__", anchor, k) for k in range(copies)]
    edges = set(b.edges)
    for x in extra:
        edges.update((x, r) for r in b.left_neighbors[anchor])
    return Bigraph.build(list(b.left) + extra, b.right, edges)


def _min_surplus_containing(b: Bigraph, anchor: Hashable, known_floor: int) -> Tuple[int, FrozenSet[Hashable]]:
    """Min |N(S)| - |S| over S containing anchor, given it is >= known_floor.

    Giving anchor t extra copies keeps Hall's condition iff every S containing
    it has surplus >= t; the violator at the first failing t is the witness.
    """
    upper = len(b.left_neighbors[anchor]) - 1
    for t in range(known_floor + 1, upper + 1):
        rep = _replicated(b, anchor, t)
        mm = bipartite_max_matching(rep)
        if mm.size < len(rep.left):
            violator = _hall_violator(rep, mm)
            s = frozenset(x[1] if isinstance(x, tuple) and x[:1] == ("__copy__",) else x for x in violator)
            return _surplus_of(b, s), s
    return upper, frozenset([anchor])


def surplus(b: Bigraph) -> Tuple[Union[int, float], FrozenSet[Hashable]]:
    """min over nonempty S of |N(S)| - |S| with a minimizing S; (inf, {}) when the left side is empty."""
    if not b.left:
        return math.inf, frozenset()

    if len(b.left) <= config.SUBSET_SCAN_MAX:
        best: Optional[Tuple[int, FrozenSet[Hashable]]] = None
        for size in range(1, len(b.left) + 1):
            for s in combinations(b.left, size):
                value = _surplus_of(b, s)
                if best is None or value < best[0]:
                    best = (value, frozenset(s))
        return best

    m = bipartite_max_matching(b)
    if m.size < len(b.left):
        violator = _hall_violator(b, m)
        return _surplus_of(b, violator), violator
    tight = find_tight_set(b, m)
    if tight is not None:
        return 0, tight
    near = find_near_tight_set(b, m)
    if near is not None:
        return 1, near[0]
    best = None
    for x in b.left:
        value, s = _min_surplus_containing(b, x, known_floor=1)
        if best is None or value < best[0]:
            best = (value, s)
    return best
