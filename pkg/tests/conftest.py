"""Shared test fixtures + path setup.

Tests live under tests/, source lives at repo root. Prepend repo root to sys.path
so `import core`, `import matching`, ... work regardless of where pytest is invoked.

Exhaustive brute-force sweeps are marked `slow` and only run with DORM_RUN_SLOW=1.
"""
import os
import sys
import pathlib
import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT))


def pytest_collection_modifyitems(config, items):
    if os.environ.get("DORM_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set DORM_RUN_SLOW=1 to run exhaustive sweeps")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def dorm_instance():
    """Build a dorm-sharing Instance from (values, edges, capacity)."""
    from core import validate_instance

    def _build(values, edges, capacity=2):
        n = len(values)
        m = len(values[0])
        return validate_instance({
            "n": n,
            "m": m,
            "capacities": [capacity] * m,
            "values": values,
            "graph": {"edges": [list(e) for e in edges]},
        })

    return _build


@pytest.fixture
def example1():
    """The two-dorm, capacity-5 instance with no PEF assignment, plus X = ({0..4}, {5..9})."""
    from core import check_assignment
    from generators import named_instance

    inst, _ = named_instance("no-pef-cap5")
    return inst, check_assignment(inst, [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]])


@pytest.fixture
def zero_instance():
    from core import validate_instance

    return validate_instance({
        "n": 4,
        "m": 2,
        "capacities": [2, 2],
        "values": [[0, 0]] * 4,
        "externalities": [[0] * 4 for _ in range(4)],
    })


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document under tmp_path and return its path as str."""
    import json

    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return _write
