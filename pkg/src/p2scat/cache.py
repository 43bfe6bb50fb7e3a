"""Charge results memoized as JSON files under $P2SCAT_CACHE_DIR."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Callable

from p2scat.config import RunConfig, cache_dir
from p2scat.models import ChargeVector

logger = logging.getLogger(__name__)

# output paths and parallelism do not change results
_IGNORED = {"json_path", "svg_path", "jobs", "seed"}


def cache_key(kind: str, gamma: ChargeVector, cfg: RunConfig) -> str:
    echo = {k: v for k, v in cfg.echo().items() if k not in _IGNORED}
    digest = hashlib.sha256(json.dumps(echo, sort_keys=True).encode()).hexdigest()[:16]
    return f"{kind}_{gamma.r}_{gamma.d}_{gamma.chi}_{digest}"


def memoize(
    kind: str, gamma: ChargeVector, cfg: RunConfig, compute: Callable[[], dict[str, Any]]
) -> dict[str, Any]:
    directory = cache_dir()
    if directory is None:
        return compute()
    path = directory / f"{cache_key(kind, gamma, cfg)}.json"
    if path.exists():
        logger.debug("cache hit: %s", path)
        return json.loads(path.read_text())
    result = compute()
    directory.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result, sort_keys=True))
    logger.debug("cached: %s", path)
    return result


def clear(directory: Path | None = None) -> int:
    """Delete cached results; returns how many files were removed."""
    directory = directory or cache_dir()
    if directory is None or not directory.exists():
        return 0
    removed = 0
    for path in directory.glob("*.json"):
        path.unlink()
        removed += 1
    return removed
