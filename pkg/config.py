from typing import Dict, Optional
import os
import sys
import json
import logging
from datetime import datetime, timezone

# Structured logging to stderr; stdout carries command results only
_LOG_LEVEL_NAME = (os.getenv("DORM_LOG_LEVEL") or "INFO").strip().upper()
logging.basicConfig(
    level=getattr(logging, _LOG_LEVEL_NAME, logging.INFO),
    format="%(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger("dormshare")


def log_event(event_type: str, **kwargs):
    entry = {
        "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
        "event": event_type,
        **kwargs,
    }
    logger.info(json.dumps(entry, default=str))


def _parse_positive_int(name: str, raw: Optional[str], default: int) -> int:
    """Parse a positive integer setting. Unset/blank → default."""
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        raise ValueError(f"{name} must be an integer (got {raw!r})") from None
    if value <= 0:
        raise ValueError(f"{name} must be > 0 (got {value})")
    return value


def _read_settings(environ: Optional[Dict[str, str]] = None) -> Dict[str, int]:
    env = environ if environ is not None else os.environ
    return {
        "enum_limit": _parse_positive_int(
            "DORM_ENUM_LIMIT", env.get("DORM_ENUM_LIMIT"), 10_000_000
        ),
        "workers": _parse_positive_int("DORM_WORKERS", env.get("DORM_WORKERS"), 1),
        "subset_scan_max": _parse_positive_int(
            "DORM_SUBSET_SCAN_MAX", env.get("DORM_SUBSET_SCAN_MAX"), 20
        ),
        "brute_matching_max": _parse_positive_int(
            "DORM_BRUTE_MATCHING_MAX", env.get("DORM_BRUTE_MATCHING_MAX"), 16
        ),
        "brute_clique_max": _parse_positive_int(
            "DORM_BRUTE_CLIQUE_MAX", env.get("DORM_BRUTE_CLIQUE_MAX"), 20
        ),
        "bench_mean_degree": _parse_positive_int(
            "DORM_BENCH_MEAN_DEGREE", env.get("DORM_BENCH_MEAN_DEGREE"), 2
        ),
    }


_SETTINGS = _read_settings()

DEFAULT_ENUM_LIMIT = _SETTINGS["enum_limit"]
DEFAULT_WORKERS = _SETTINGS["workers"]
SUBSET_SCAN_MAX = _SETTINGS["subset_scan_max"]
BRUTE_MATCHING_MAX = _SETTINGS["brute_matching_max"]
BRUTE_CLIQUE_MAX = _SETTINGS["brute_clique_max"]
BENCH_MEAN_DEGREE = _SETTINGS["bench_mean_degree"]

# Recorded in generated instances so seeded fixtures stay reproducible
RANDOM_SCHEME = "python-random-mt19937/v1"
