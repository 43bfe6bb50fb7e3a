"""Pytest configuration and fixtures for p2scat tests."""

import functools
import random
from typing import Callable, Generator

import pytest

from p2scat.config import CACHE_ENV, RunConfig
from p2scat.diagram import Convention, Diagram, initial_diagram, scatter
from p2scat.exactalg import HalfLaurent, RatFuncQ
from tests.utils import parse_poly


@pytest.fixture(autouse=True)
def no_cache(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Results are never read from a developer's cache directory."""
    monkeypatch.delenv(CACHE_ENV, raising=False)
    yield


@pytest.fixture
def poly() -> Callable[[str], HalfLaurent]:
    '''
    Usage:

        def test_foo(poly):
            assert poly("q^-1 + 1 + q") == HalfLaurent.from_dict({-2: 1, 0: 1, 2: 1})

    Exponents are in powers of q; half powers are written q^(1/2).
    '''

    return parse_poly


@pytest.fixture
def ratfunc(poly: Callable[[str], HalfLaurent]) -> Callable[[str, str], RatFuncQ]:
    """Canonical numerator / denominator from two poly strings."""

    def fn(num: str, den: str = "1") -> RatFuncQ:
        return RatFuncQ.from_laurent(poly(num)) / poly(den)

    return fn


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0)


@pytest.fixture
def cfg() -> RunConfig:
    return RunConfig()


@functools.cache
def _scattered(
    n_min: int, n_max: int, order: int, convention: Convention, markers: bool
) -> Diagram:
    return scatter(
        initial_diagram(
            n_min, n_max, order, convention=convention, degree_cap=order if markers else None
        )
    )


@pytest.fixture(scope="session")
def scattered() -> Callable[..., Diagram]:
    '''
    Usage:

        def test_foo(scattered):
            d = scattered(-1, 1, 2)
            d = scattered(-1, 1, 2, convention="plus", markers=True)

    Completed diagrams are shared across the session; they are immutable.
    '''

    def fn(
        n_min: int,
        n_max: int,
        order: int,
        convention: Convention = "minus",
        markers: bool = False,
    ) -> Diagram:
        return _scattered(n_min, n_max, order, convention, markers)

    return fn
