from pathlib import Path

import pytest

from p2scat import cache
from p2scat.config import CACHE_ENV, RunConfig
from p2scat.models import ChargeVector

GAMMA = ChargeVector(0, 1, 1)


@pytest.fixture
def cache_path(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Path:
    path = tmp_path / "cache"
    monkeypatch.setenv(CACHE_ENV, str(path))
    return path


def test_no_cache_directory_always_computes() -> None:
    calls = []
    for _ in range(2):
        cache.memoize("betti", GAMMA, RunConfig(), lambda: calls.append(1) or {"dim": 2})
    assert len(calls) == 2


def test_memoize_computes_once(cache_path: Path) -> None:
    calls = []

    def compute() -> dict:
        calls.append(1)
        return {"gamma": [0, 1, 1], "dim": 2}

    first = cache.memoize("betti", GAMMA, RunConfig(), compute)
    second = cache.memoize("betti", GAMMA, RunConfig(), compute)
    assert first == second == {"gamma": [0, 1, 1], "dim": 2}
    assert len(calls) == 1
    assert len(list(cache_path.glob("*.json"))) == 1


def test_cache_key() -> None:
    cfg = RunConfig()
    key = cache.cache_key("betti", GAMMA, cfg)
    assert key.startswith("betti_0_1_1_")
    # output paths and parallelism do not change results
    assert cache.cache_key("betti", GAMMA, RunConfig(json_path=Path("x.json"), jobs=4)) == key
    assert cache.cache_key("trees", GAMMA, cfg) != key
    assert cache.cache_key("betti", GAMMA, RunConfig(markers=True)) != key
    assert cache.cache_key("betti", ChargeVector(0, 1, 2), cfg) != key


def test_clear(cache_path: Path) -> None:
    assert cache.clear() == 0
    for chi in (1, 2):
        cache.memoize("betti", ChargeVector(0, 1, chi), RunConfig(), lambda: {"dim": 2})
    assert cache.clear() == 2
    assert cache.clear() == 0


def test_clear_explicit_directory(tmp_path: Path) -> None:
    (tmp_path / "betti_0_1_1_abc.json").write_text("{}")
    (tmp_path / "notes.txt").write_text("kept")
    assert cache.clear(tmp_path) == 1
    assert (tmp_path / "notes.txt").exists()
