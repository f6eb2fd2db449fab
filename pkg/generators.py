"""Named counterexample instances, tightness families and seeded random instances."""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union
import random
from fractions import Fraction
from itertools import combinations

import config
from config import log_event
from core import Assignment, Instance, check_assignment, parse_rational, validate_instance


class GeneratorError(ValueError):
    pass


def _square(n: int, fill: int = 0) -> List[List[int]]:
    return [[fill] * n for _ in range(n)]


def _consecutive_groups(capacities: Sequence[int]) -> List[List[int]]:
    groups, start = [], 0
    for c in capacities:
        groups.append(list(range(start, start + c)))
        start += c
    return groups


def _dorm(n: int, capacities: Sequence[int], values, edges, name: str) -> Instance:
    return validate_instance({
        "n": n,
        "m": len(capacities),
        "capacities": list(capacities),
        "values": values,
        "graph": {"edges": [list(e) for e in edges]},
        "meta": {"name": name},
    })


# ---------- Named instances ----------


def _no_pef_cap5() -> Tuple[Instance, Optional[Assignment]]:
    edges = list(combinations(range(5), 2)) + [(i, i + 5) for i in range(5)]
    values = [[1, 0] if i < 7 else [0, 1] for i in range(10)]
    return _dorm(10, [5, 5], values, edges, "no-pef-cap5"), None


def _no_pef_cap3() -> Tuple[Instance, Optional[Assignment]]:
    edges = [(0, 1), (2, 3), (4, 5), (6, 7)]
    values = [[1, 2, 3] for _ in range(9)]
    return _dorm(9, [3, 3, 3], values, edges, "no-pef-cap3"), None


def _pef_not_pprop() -> Tuple[Instance, Optional[Assignment]]:
    edges = list(combinations(range(4), 2)) + [(4, 5)] + list(combinations(range(6, 9), 2))
    values = [[1, 2, 3] for _ in range(9)]
    inst = _dorm(9, [3, 3, 3], values, edges, "pef-not-pprop")
    return inst, check_assignment(inst, [[0, 1, 2], [3, 4, 5], [6, 7, 8]])


def _prop_not_ef() -> Tuple[Instance, Optional[Assignment]]:
    inst = validate_instance({
        "n": 3,
        "m": 3,
        "capacities": [1, 1, 1],
        "values": [[1, 0, 2], [1, 1, 1], [1, 1, 1]],
        "externalities": _square(3),
        "meta": {"name": "prop-not-ef"},
    })
    return inst, check_assignment(inst, [[0], [1], [2]])


NAMED_INSTANCES: Dict[str, Callable[[], Tuple[Instance, Optional[Assignment]]]] = {
    "no-pef-cap5": _no_pef_cap5,
    "no-pef-cap3": _no_pef_cap3,
    "pef-not-pprop": _pef_not_pprop,
    "prop-not-ef": _prop_not_ef,
}


def named_instance(name: str) -> Tuple[Instance, Optional[Assignment]]:
    builder = NAMED_INSTANCES.get(name)
    if builder is None:
        raise GeneratorError(f"unknown instance {name!r}; choose from {', '.join(NAMED_INSTANCES)}")
    inst, x = builder()
    log_event("instance_generated", kind=name, n=inst.n, m=inst.m)
    return inst, x


# ---------- Tightness families ----------


def _ef_not_prop(c: int, m: int, t: Fraction) -> Tuple[Instance, Assignment]:
    if t <= 0:
        raise GeneratorError(f"T must be positive (got {t})")
    ext: List[List[Any]] = _square(4)
    ext[0][3] = str(t)
    inst = validate_instance({
        "n": 4,
        "m": 2,
        "capacities": [1, 3],
        "values": [[0, 0] for _ in range(4)],
        "externalities": ext,
        "meta": {"name": "ef-not-prop", "T": str(t)},
    })
    return inst, check_assignment(inst, [[3], [0, 1, 2]])


def _check_family(c: int, m: int) -> None:
    if c < 2 or m < 2:
        raise GeneratorError(f"tightness families need c >= 2 and m >= 2 (got c={c}, m={m})")


def _prop4_tight(c: int, m: int, t: Fraction) -> Tuple[Instance, Assignment]:
    _check_family(c, m)
    first = (c - 1) * m * m + 1
    capacities = [first] + [c] * (m - 1)
    n = sum(capacities)
    ext = _square(n)
    for l in range(1, n):
        ext[0][l] = 1 if l < first else m * m
    inst = validate_instance({
        "n": n,
        "m": m,
        "capacities": capacities,
        "values": [[0] * m for _ in range(n)],
        "externalities": ext,
        "meta": {"name": "prop4-tight", "c": c},
    })
    return inst, check_assignment(inst, _consecutive_groups(capacities))


def _prop5_tight(c: int, m: int, t: Fraction) -> Tuple[Instance, Assignment]:
    _check_family(c, m)
    n = c * m
    values = [[0] * m for _ in range(n)]
    values[0][0] = c - 1
    ext = _square(n)
    for l in range(c, n):
        ext[0][l] = 1
    inst = validate_instance({
        "n": n,
        "m": m,
        "capacities": [c] * m,
        "values": values,
        "externalities": ext,
        "meta": {"name": "prop5-tight", "c": c},
    })
    return inst, check_assignment(inst, _consecutive_groups([c] * m))


TIGHT_KINDS = {
    "ef-not-prop": _ef_not_prop,
    "prop4-tight": _prop4_tight,
    "prop5-tight": _prop5_tight,
}


def tight_instance(kind: str, c: int = 2, m: int = 2, t: Union[int, str, Fraction] = 1) -> Tuple[Instance, Assignment]:
    """Instance plus the assignment whose agent 0 realises the bound (T only matters for ef-not-prop)."""
    builder = TIGHT_KINDS.get(kind)
    if builder is None:
        raise GeneratorError(f"unknown family {kind!r}; choose from {', '.join(TIGHT_KINDS)}")
    inst, x = builder(c, m, parse_rational(t))
    log_event("instance_generated", kind=kind, n=inst.n, m=inst.m)
    return inst, x


# ---------- Random ----------


def _generator_meta(seed: int, **params) -> Dict[str, Any]:
    return {"generator": {"scheme": config.RANDOM_SCHEME, "seed": seed, **params}}


def random_dorm(
    seed: int, m: int, c: int, edge_prob: Union[int, str, Fraction] = 0, value_max: int = 3
) -> Instance:
    """n = c*m agents; each pair is friends with probability edge_prob; values uniform in 0..value_max."""
    p = parse_rational(edge_prob)
    if m < 1 or c < 1:
        raise GeneratorError(f"need m >= 1 and c >= 1 (got m={m}, c={c})")
    if not 0 <= p <= 1:
        raise GeneratorError(f"edge probability must lie in [0, 1] (got {p})")
    if value_max < 0:
        raise GeneratorError(f"value_max must be >= 0 (got {value_max})")

    rng = random.Random(seed)
    n = c * m
    edges = [
        (i, j) for i, j in combinations(range(n), 2)
        if rng.randrange(p.denominator) < p.numerator
    ]
    values = [[rng.randint(0, value_max) for _ in range(m)] for _ in range(n)]
    inst = validate_instance({
        "n": n,
        "m": m,
        "capacities": [c] * m,
        "values": values,
        "graph": {"edges": edges},
        "meta": _generator_meta(seed, kind="random-dorm", m=m, c=c, p=str(p), value_max=value_max),
    })
    log_event("instance_generated", kind="random-dorm", seed=seed, n=n, m=m, edges=len(edges))
    return inst


def random_general(seed: int, capacities: Sequence[int], value_max: int = 3, ext_max: int = 2) -> Instance:
    """Integer values in 0..value_max and externalities in 0..ext_max (zero diagonal)."""
    if not capacities or any(c < 1 for c in capacities):
        raise GeneratorError(f"capacities must be positive (got {list(capacities)})")
    if value_max < 0 or ext_max < 0:
        raise GeneratorError("value_max and ext_max must be >= 0")
    rng = random.Random(seed)
    n, m = sum(capacities), len(capacities)
    values = [[rng.randint(0, value_max) for _ in range(m)] for _ in range(n)]
    ext = [[0 if i == j else rng.randint(0, ext_max) for j in range(n)] for i in range(n)]
    return validate_instance({
        "n": n,
        "m": m,
        "capacities": list(capacities),
        "values": values,
        "externalities": ext,
        "meta": _generator_meta(
            seed, kind="random-general", capacities=list(capacities), value_max=value_max, ext_max=ext_max
        ),
    })
