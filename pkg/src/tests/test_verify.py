import copy
import dataclasses
import io
from collections.abc import Callable

import pytest
from rich.console import Console

from p2scat.benchmark import bench
from p2scat.config import RunConfig
from p2scat.diagram import Diagram
from p2scat.exactalg import RatFuncQ
from p2scat.models import LatticeClass
from p2scat.utils import GOLDEN
from p2scat.verify import (
    Check,
    check_diagram_loops,
    check_dt_round_trip,
    check_golden,
    check_pentagon,
    check_ratfunc_canonical,
    check_torus,
    corrupt,
    golden_checks,
    property_checks,
    run_check,
    run_checks,
)


def quiet(buffer: io.StringIO | None = None) -> Console:
    return Console(file=buffer or io.StringIO())


def test_corrupt_changes_one_coefficient() -> None:
    pristine = copy.deepcopy(GOLDEN)
    corrupted = corrupt(GOLDEN, 7)
    assert GOLDEN == pristine
    diffs = [
        (i, j)
        for i, (a, b) in enumerate(zip(GOLDEN, corrupted))
        for j, (x, y) in enumerate(zip(a["poincare"], b["poincare"]))
        if x != y
    ]
    assert len(diffs) == 1
    assert corrupt(GOLDEN, 7) == corrupted


def test_run_check() -> None:
    def fails() -> None:
        raise ValueError("bad value")

    assert run_check(Check("ok", lambda: None)).ok
    result = run_check(Check("bad", fails))
    assert not result.ok
    assert result.message == "bad value"


def test_run_checks_keeps_order() -> None:
    def fails() -> None:
        raise AssertionError

    buffer = io.StringIO()
    console = quiet(buffer)
    checks = [Check("first", fails), Check("second", lambda: None)]
    results = run_checks(checks, console=console)
    assert [(r.name, r.ok) for r in results] == [("first", False), ("second", True)]
    assert results[0].message == "AssertionError"
    assert "1 passed, 1 failed" in buffer.getvalue()


def test_cheap_checks_pass() -> None:
    check_pentagon(4)
    check_ratfunc_canonical(0)


@pytest.mark.parametrize("seed", [0, 1])
def test_seeded_checks_pass(seed: int) -> None:
    check_dt_round_trip(seed)
    check_torus(seed)


@pytest.mark.parametrize("markers", [False, True])
def test_finished_diagram_satisfies_loop_checks(
    scattered: Callable[..., Diagram], markers: bool
) -> None:
    d = scattered(-1, 1, 2, markers=markers)
    assert d.vertex_log
    check_diagram_loops(d)


def test_loop_checks_catch_a_tampered_ray(scattered: Callable[..., Diagram]) -> None:
    d = scattered(-1, 0, 2)
    vertical = LatticeClass(0, -1)
    rays = tuple(
        dataclasses.replace(r, function=RatFuncQ.one()) if r.m == vertical else r for r in d.rays
    )
    assert rays != d.rays
    with pytest.raises(AssertionError, match="loop check failed"):
        check_diagram_loops(dataclasses.replace(d, rays=rays))


def test_golden_check_catches_a_wrong_value(cfg: RunConfig) -> None:
    entry = copy.deepcopy(GOLDEN[0])
    check_golden(entry, cfg)
    entry["poincare"] = [1, 2, 1]
    with pytest.raises(AssertionError, match="expected"):
        check_golden(entry, cfg)


def test_suites_are_named_uniquely(cfg: RunConfig) -> None:
    names = [c.name for c in golden_checks(cfg) + property_checks(cfg)]
    assert len(names) == len(set(names))
    assert "golden (0,1,1)" in names
    assert "trees (0,1,1)" in names


def test_bench(cfg: RunConfig) -> None:
    [timing] = bench(cfg, golden=GOLDEN[:1], console=quiet())
    assert timing.gamma == "(0,1,1)"
    assert timing.correct
