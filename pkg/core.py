"""Instances, assignments and fairness metrics for resource sharing with externalities.

All quantities are exact `Fraction`s. Agents and resources are 0-indexed.
"""
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from matching import Graph, MatchingError


# ---------- Errors ----------


class InstanceError(ValueError):
    pass


class DimensionMismatchError(InstanceError):
    pass


class CapacityError(InstanceError):
    pass


class CapacitySumError(InstanceError):
    pass


class NegativeValueError(InstanceError):
    pass


class SelfExternalityError(InstanceError):
    pass


class AssignmentError(ValueError):
    pass


class DegenerateInstanceError(ValueError):
    pass


class NotDormSharingError(ValueError):
    pass


# ---------- Rationals ----------


def parse_rational(raw: Any) -> Fraction:
    """Accept an int, a Fraction, or a "p/q" / decimal string. Floats and bools are refused."""
    if isinstance(raw, bool):
        raise InstanceError(f"boolean is not a rational value (got {raw!r})")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"not a rational value: {raw!r}") from None
    raise InstanceError(
        f"rational values must be integers or 'p/q' strings (got {type(raw).__name__} {raw!r})"
    )


def format_rational(q: Fraction) -> Union[int, str]:
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


def nearest_int(x: Fraction) -> int:
    """Nearest integer with halves rounded up: 1/2 -> 1, -1/2 -> 0."""
    return math.floor(Fraction(x) + Fraction(1, 2))


def _jsonify_value(v: Any) -> Any:
    if v is None or isinstance(v, (str, bool, int)):
        return v
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, float):
        return v
    if hasattr(v, "_asdict"):
        return {k: _jsonify_value(x) for k, x in v._asdict().items()}
    if isinstance(v, (list, tuple)):
        return [_jsonify_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonify_value(val) for k, val in v.items()}
    if isinstance(v, (set, frozenset)):
        return [_jsonify_value(x) for x in sorted(v)]
    return str(v)


# ---------- Instance ----------


@dataclass(frozen=True)
class DormProfile:
    is_dorm_sharing: bool
    uniform_capacity: Optional[int]
    externality_graph: Optional[Graph]


@dataclass(frozen=True)
class Instance:
    n: int
    m: int
    capacities: Tuple[int, ...]
    values: Tuple[Tuple[Fraction, ...], ...]
    externalities: Tuple[Tuple[Fraction, ...], ...]
    meta: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @cached_property
    def profile(self) -> DormProfile:
        caps = set(self.capacities)
        uniform = self.capacities[0] if len(caps) == 1 else None
        graph = None
        e = self.externalities
        binary = all(
            e[i][j] in (0, 1) and e[i][j] == e[j][i]
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )
        if binary:
            graph = Graph.from_edges(
                self.n,
                [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if e[i][j] == 1],
            )
        return DormProfile(uniform is not None and graph is not None, uniform, graph)

    def external_total(self, i: int) -> Fraction:
        return sum(self.externalities[i], Fraction(0))


def _expect_int(name: str, raw: Any, minimum: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise DimensionMismatchError(f"{name} must be an integer (got {raw!r})")
    if raw < minimum:
        raise DimensionMismatchError(f"{name} must be >= {minimum} (got {raw})")
    return raw


def _rational_matrix(name: str, raw: Any, rows: int, cols: int) -> Tuple[Tuple[Fraction, ...], ...]:
    if not isinstance(raw, Sequence) or isinstance(raw, str) or len(raw) != rows:
        got = len(raw) if isinstance(raw, Sequence) and not isinstance(raw, str) else type(raw).__name__
        raise DimensionMismatchError(f"{name} must have {rows} rows (got {got})")
    out = []
    for i, row in enumerate(raw):
        if not isinstance(row, Sequence) or isinstance(row, str) or len(row) != cols:
            raise DimensionMismatchError(f"{name} row {i} must have {cols} entries")
        parsed = tuple(parse_rational(x) for x in row)
        for j, x in enumerate(parsed):
            if x < 0:
                raise NegativeValueError(f"{name}[{i}][{j}] is negative ({format_rational(x)})")
        out.append(parsed)
    return tuple(out)


def validate_instance(raw: Mapping[str, Any]) -> Instance:
    """Build an Instance from parsed JSON, enforcing every model constraint."""
    if not isinstance(raw, Mapping):
        raise InstanceError("instance JSON must be an object")
    for key in ("n", "m", "capacities", "values"):
        if key not in raw:
            raise DimensionMismatchError(f"instance is missing '{key}'")
    n = _expect_int("n", raw["n"], 1)
    m = _expect_int("m", raw["m"], 1)

    caps = raw["capacities"]
    if not isinstance(caps, Sequence) or isinstance(caps, str) or len(caps) != m:
        raise DimensionMismatchError(f"capacities must list m={m} entries")
    for j, c in enumerate(caps):
        if isinstance(c, bool) or not isinstance(c, int) or c <= 0:
            raise CapacityError(f"capacity of resource {j} must be a positive integer (got {c!r})")
    if sum(caps) != n:
        raise CapacitySumError(f"capacity sum {sum(caps)} != n={n}")

    values = _rational_matrix("values", raw["values"], n, m)

    if "externalities" in raw:
        ext = _rational_matrix("externalities", raw["externalities"], n, n)
    elif "graph" in raw:
        graph_raw = raw["graph"]
        if not isinstance(graph_raw, Mapping):
            raise DimensionMismatchError("graph must be an object with 'edges'")
        try:
            g = Graph.from_edges(n, graph_raw.get("edges", []))
        except MatchingError as e:
            raise DimensionMismatchError(f"graph: {e}") from None
        rows = [[Fraction(0)] * n for _ in range(n)]
        for u, v in g.edges:
            rows[u][v] = rows[v][u] = Fraction(1)
        ext = tuple(tuple(r) for r in rows)
    else:
        raise DimensionMismatchError("instance needs 'externalities' or 'graph'")

    for i in range(n):
        if ext[i][i] != 0:
            raise SelfExternalityError(f"externalities[{i}][{i}] must be 0 (got {format_rational(ext[i][i])})")

    meta = raw.get("meta") or {}
    return Instance(n, m, tuple(caps), values, ext, dict(meta))


def instance_to_dict(inst: Instance) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "n": inst.n,
        "m": inst.m,
        "capacities": list(inst.capacities),
        "values": _jsonify_value(inst.values),
        "externalities": _jsonify_value(inst.externalities),
    }
    if inst.meta:
        out["meta"] = _jsonify_value(inst.meta)
    return out


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_instance(json.load(fh))


# ---------- Assignment ----------


@dataclass(frozen=True)
class Assignment:
    groups: Tuple[FrozenSet[int], ...]

    @cached_property
    def resource_of(self) -> Tuple[int, ...]:
        where = [0] * sum(len(g) for g in self.groups)
        for j, g in enumerate(self.groups):
            for i in g:
                where[i] = j
        return tuple(where)

    @property
    def n(self) -> int:
        return len(self.resource_of)

    def to_lists(self) -> List[List[int]]:
        return [sorted(g) for g in self.groups]


def check_assignment(inst: Instance, groups: Iterable[Iterable[int]]) -> Assignment:
    """Partition check plus full occupancy |X_j| = c_j."""
    groups = [list(g) for g in groups]
    if len(groups) != inst.m:
        raise AssignmentError(f"assignment lists {len(groups)} groups, instance has m={inst.m}")
    seen = set()
    for j, g in enumerate(groups):
        for i in g:
            if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < inst.n:
                raise AssignmentError(f"agent {i!r} in group {j} is not in 0..{inst.n - 1}")
            if i in seen:
                raise AssignmentError(f"agent {i} is assigned more than once")
            seen.add(i)
        if len(set(g)) != inst.capacities[j]:
            raise AssignmentError(
                f"resource {j} holds {len(set(g))} agents, capacity is {inst.capacities[j]}"
            )
    if len(seen) != inst.n:
        missing = sorted(set(range(inst.n)) - seen)
        raise AssignmentError(f"agents {missing} are unassigned")
    return Assignment(tuple(frozenset(g) for g in groups))


def assignment_to_dict(x: Assignment) -> Dict[str, Any]:
    return {"assignment": x.to_lists()}


def parse_assignment(raw: Any, inst: Instance) -> Assignment:
    if isinstance(raw, Mapping):
        if "assignment" not in raw:
            raise AssignmentError("assignment JSON must carry an 'assignment' key")
        raw = raw["assignment"]
    if not isinstance(raw, Sequence) or isinstance(raw, str):
        raise AssignmentError("assignment must be a list of agent lists")
    for g in raw:
        if not isinstance(g, Sequence) or isinstance(g, str):
            raise AssignmentError("assignment must be a list of agent lists")
    return check_assignment(inst, raw)


def load_assignment(path: str, inst: Instance) -> Assignment:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_assignment(json.load(fh), inst)


def _require_agent(x: Assignment, i: int) -> None:
    if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < x.n:
        raise ValueError(f"agent {i!r} out of range 0..{x.n - 1}")


def swap(x: Assignment, i: int, j: int) -> Assignment:
    """X with agents i and j exchanged; X itself when they share a resource."""
    _require_agent(x, i)
    _require_agent(x, j)
    ri, rj = x.resource_of[i], x.resource_of[j]
    if ri == rj:
        return x
    groups = list(x.groups)
    groups[ri] = (groups[ri] - {i}) | {j}
    groups[rj] = (groups[rj] - {j}) | {i}
    return Assignment(tuple(groups))


# ---------- Utilities ----------


class Utility(NamedTuple):
    internal: Fraction
    external: Fraction
    total: Fraction


def utility(inst: Instance, x: Assignment, i: int) -> Utility:
    _require_agent(x, i)
    r = x.resource_of[i]
    internal = inst.values[i][r]
    external = sum((inst.externalities[i][l] for l in x.groups[r] if l != i), Fraction(0))
    return Utility(internal, external, internal + external)


def _swapped_utility(inst: Instance, x: Assignment, i: int, j: int) -> Utility:
    # u_i after i takes j's place: j's resource, j's roommates
    s = x.resource_of[j]
    if s == x.resource_of[i]:
        return utility(inst, x, i)
    internal = inst.values[i][s]
    external = sum((inst.externalities[i][l] for l in x.groups[s]), Fraction(0)) - inst.externalities[i][j]
    return Utility(internal, external, internal + external)


# ---------- Reports ----------

Pair = Tuple[int, int]


@dataclass(frozen=True)
class FairnessReport:
    """Per-agent utilities and whichever notions were evaluated (None = not evaluated)."""

    utilities: Tuple[Utility, ...]
    ef_violations: Optional[Tuple[Pair, ...]] = None
    pef_violations: Optional[Tuple[Pair, ...]] = None
    prop_shares: Optional[Tuple[Fraction, ...]] = None
    prop_ratios: Optional[Tuple[Optional[Fraction], ...]] = None

    @property
    def is_ef(self) -> Optional[bool]:
        return None if self.ef_violations is None else not self.ef_violations

    @property
    def is_pef(self) -> Optional[bool]:
        return None if self.pef_violations is None else not self.pef_violations

    @property
    def min_prop_ratio(self) -> Optional[Fraction]:
        # PROP_i = 0 counts as satisfied, i.e. ratio 1
        if self.prop_ratios is None:
            return None
        return min((Fraction(1) if r is None else r for r in self.prop_ratios), default=Fraction(1))

    @property
    def is_prop(self) -> Optional[bool]:
        ratio = self.min_prop_ratio
        return None if ratio is None else ratio >= 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "utilities": [_jsonify_value(u._asdict()) for u in self.utilities],
            "ef_violations": _jsonify_value(self.ef_violations),
            "pef_violations": _jsonify_value(self.pef_violations),
            "prop_shares": _jsonify_value(self.prop_shares),
            "prop_ratios": _jsonify_value(self.prop_ratios),
            "min_prop_ratio": _jsonify_value(self.min_prop_ratio),
            "is_ef": self.is_ef,
            "is_pef": self.is_pef,
            "is_prop": self.is_prop,
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "FairnessReport":
        def pairs(v):
            return None if v is None else tuple((int(a), int(b)) for a, b in v)

        def rationals(v):
            return None if v is None else tuple(None if x is None else parse_rational(x) for x in v)

        return cls(
            utilities=tuple(
                Utility(parse_rational(u["internal"]), parse_rational(u["external"]), parse_rational(u["total"]))
                for u in raw["utilities"]
            ),
            ef_violations=pairs(raw.get("ef_violations")),
            pef_violations=pairs(raw.get("pef_violations")),
            prop_shares=rationals(raw.get("prop_shares")),
            prop_ratios=rationals(raw.get("prop_ratios")),
        )


def _violations(inst: Instance, x: Assignment, utils: Sequence[Utility], pareto: bool) -> Tuple[Pair, ...]:
    out = []
    for i in range(inst.n):
        mine = utils[i]
        for j in range(inst.n):
            if i == j or x.resource_of[i] == x.resource_of[j]:
                continue
            other = _swapped_utility(inst, x, i, j)
            if pareto:
                if other.internal > mine.internal and other.external > mine.external:
                    out.append((i, j))
            elif other.total > mine.total:
                out.append((i, j))
    return tuple(out)


def _utilities(inst: Instance, x: Assignment) -> Tuple[Utility, ...]:
    return tuple(utility(inst, x, i) for i in range(inst.n))


def check_ef(inst: Instance, x: Assignment) -> FairnessReport:
    utils = _utilities(inst, x)
    return FairnessReport(utils, ef_violations=_violations(inst, x, utils, pareto=False))


def check_pef(inst: Instance, x: Assignment) -> FairnessReport:
    utils = _utilities(inst, x)
    return FairnessReport(utils, pef_violations=_violations(inst, x, utils, pareto=True))


def prop_share(inst: Instance, i: int) -> Fraction:
    """(1/m) sum_j v_ij + (n/m - 1) * (1/(n-1)) * sum_l e_il."""
    if inst.n < 2:
        raise DegenerateInstanceError("proportional share needs n >= 2 agents")
    internal = Fraction(sum(inst.values[i], Fraction(0)), inst.m)
    external = (Fraction(inst.n, inst.m) - 1) * Fraction(inst.external_total(i), inst.n - 1)
    return internal + external


def _prop_fields(inst: Instance, utils: Sequence[Utility]):
    shares = tuple(prop_share(inst, i) for i in range(inst.n))
    ratios = tuple(None if s == 0 else utils[i].total / s for i, s in enumerate(shares))
    return shares, ratios


def check_prop(inst: Instance, x: Assignment) -> FairnessReport:
    utils = _utilities(inst, x)
    shares, ratios = _prop_fields(inst, utils)
    return FairnessReport(utils, prop_shares=shares, prop_ratios=ratios)


def fairness_report(inst: Instance, x: Assignment) -> FairnessReport:
    """EF, PEF and (for n >= 2) PROP in one report."""
    utils = _utilities(inst, x)
    shares = ratios = None
    if inst.n >= 2:
        shares, ratios = _prop_fields(inst, utils)
    return FairnessReport(
        utils,
        ef_violations=_violations(inst, x, utils, pareto=False),
        pef_violations=_violations(inst, x, utils, pareto=True),
        prop_shares=shares,
        prop_ratios=ratios,
    )


class ParetoPropCheck(NamedTuple):
    cond1: bool
    cond2: bool
    weakly_worse_count: int
    external_threshold: int


def _require_dorm_sharing(inst: Instance) -> int:
    profile = inst.profile
    if not profile.is_dorm_sharing:
        raise NotDormSharingError(
            "Pareto-PROP conditions need uniform capacities and binary symmetric externalities"
        )
    return profile.uniform_capacity


def check_pareto_prop(inst: Instance, x: Assignment, i: int) -> ParetoPropCheck:
    c = _require_dorm_sharing(inst)
    _require_agent(x, i)
    if inst.n < 2:
        raise DegenerateInstanceError("Pareto-PROP conditions need n >= 2 agents")
    own = inst.values[i][x.resource_of[i]]
    count = sum(1 for v in inst.values[i] if own >= v)
    threshold = nearest_int(Fraction(c - 1, inst.n - 1) * inst.external_total(i))
    return ParetoPropCheck(
        cond1=2 * count >= inst.m,
        cond2=utility(inst, x, i).external >= threshold,
        weakly_worse_count=count,
        external_threshold=threshold,
    )


def pareto_prop_failures(inst: Instance, x: Assignment) -> List[int]:
    failing = []
    for i in range(inst.n):
        check = check_pareto_prop(inst, x, i)
        if not (check.cond1 or check.cond2):
            failing.append(i)
    return failing
