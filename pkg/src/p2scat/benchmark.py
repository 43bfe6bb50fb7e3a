"""Time every golden class once against its runtime budget."""

import time
from collections.abc import Sequence
from dataclasses import dataclass

from rich.console import Console

from p2scat.config import RunConfig
from p2scat.invariants import poincare
from p2scat.utils import GOLDEN, GoldenClass, golden_gamma


@dataclass(frozen=True)
class Timing:
    gamma: str
    seconds: float
    budget: float
    correct: bool

    @property
    def within_budget(self) -> bool:
        return self.seconds <= self.budget


def _measure(entry: GoldenClass, cfg: RunConfig) -> Timing:
    gamma = golden_gamma(entry)
    tic = time.time()
    p = poincare(gamma, cfg)
    seconds = time.time() - tic
    return Timing(str(gamma), seconds, entry["budget"], p.coefficients() == entry["poincare"])


def bench(
    cfg: RunConfig,
    golden: Sequence[GoldenClass] = GOLDEN,
    include_slow: bool = True,
    console: Console | None = None,
) -> list[Timing]:
    console = console or Console(stderr=True)
    console.print("\n⏱️  Golden classes")
    timings = []
    for entry in golden:
        if entry["slow"] and not include_slow:
            continue
        timing = _measure(entry, cfg)
        mark = "✓" if timing.correct and timing.within_budget else "✗"
        console.print(
            f"    {mark} {timing.gamma:12} {timing.seconds:8.2f}s "
            f"(budget {timing.budget:.0f}s{'' if timing.correct else ', WRONG VALUE'})",
            highlight=False,
        )
        timings.append(timing)
    total = sum(t.seconds for t in timings)
    console.print(f"\n    total {total:.2f}s")
    return timings


def main() -> None:
    from p2scat.cli import main as cli_main

    cli_main(["bench"])


if __name__ == "__main__":
    main()
