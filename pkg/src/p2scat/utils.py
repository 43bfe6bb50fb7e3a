import json
from pathlib import Path
from typing import TypedDict

from p2scat.exactalg import HalfLaurent, Leaves
from p2scat.models import ChargeVector

DATA_DIR = Path(__file__).parent.parent.parent / "data"


class GoldenTree(TypedDict):
    leaves: dict[str, int]
    poly: list[int]


class GoldenClass(TypedDict):
    gamma: list[int]
    poincare: list[int]
    euler: int
    # seconds
    budget: float
    slow: bool
    trees: list[GoldenTree] | None


with open(DATA_DIR / "golden.json") as f:
    GOLDEN: list[GoldenClass] = json.load(f)


def golden_gamma(entry: GoldenClass) -> ChargeVector:
    return ChargeVector(*entry["gamma"])


def golden_poly(coefficients: list[int]) -> HalfLaurent:
    return HalfLaurent.from_q_coefficients(coefficients)


def golden_trees(entry: GoldenClass) -> dict[Leaves, HalfLaurent] | None:
    if entry["trees"] is None:
        return None
    return {
        tuple(sorted((int(n), k) for n, k in tree["leaves"].items())): golden_poly(tree["poly"])
        for tree in entry["trees"]
    }
