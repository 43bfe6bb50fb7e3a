"""Consistent completion at a single singular point."""

import functools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from p2scat.errors import ConsistencyError, HypothesisError
from p2scat.exactalg import Coefficient
from p2scat.models import ZERO_CLASS, LatticeClass
from p2scat.qtorus import (
    TorusElement,
    TruncationContext,
    ordered_product,
    torus_exp,
    torus_inverse,
    torus_mul,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class LocalRay:
    m: LatticeClass
    outgoing: bool
    coefficient: Coefficient
    grade: Fraction


def _compare(first: LocalRay, second: LocalRay) -> int:
    c = first.m.cross(second.m)
    if c:
        sign = 1 if c > 0 else -1
        return -sign if first.outgoing else sign
    tie_first = (first.grade, first.m.a, first.m.b)
    tie_second = (second.grade, second.m.a, second.m.b)
    return (tie_first > tie_second) - (tie_first < tie_second)


def angular_sort(rays: Iterable[LocalRay]) -> list[LocalRay]:
    """Label rays so that ingoing classes have cross(m, m') <= 0 and outgoing ones >= 0."""
    rays = list(rays)
    if len({r.outgoing for r in rays}) > 1:
        raise ValueError("Cannot sort ingoing and outgoing rays together")
    return sorted(rays, key=functools.cmp_to_key(_compare))


def _product(rays: Iterable[LocalRay], ctx: TruncationContext) -> TorusElement:
    # higher labels sit on the left of the ordered product
    factors = [
        torus_exp(ctx.monomial(r.m, r.coefficient), ctx) for r in reversed(angular_sort(rays))
    ]
    return ordered_product(factors, ctx)


def _merge(rays: Iterable[LocalRay]) -> dict[LatticeClass, LocalRay]:
    merged: dict[LatticeClass, LocalRay] = {}
    for r in rays:
        if r.m in merged:
            previous = merged[r.m]
            r = LocalRay(r.m, r.outgoing, previous.coefficient + r.coefficient, r.grade)
        merged[r.m] = r
    return merged


def complete_vertex(
    ingoing: Iterable[LocalRay], ctx: TruncationContext, seeds: Iterable[LocalRay] = ()
) -> list[LocalRay]:
    """Outgoing rays whose ordered product equals the ingoing one.

    ``seeds`` are outgoing rays already present at the point. They replace the continuation of
    their class and are then corrected, never dropped.
    """
    incoming_rays = list(_merge(ingoing).values())
    for r in incoming_rays:
        if r.grade < 1:
            raise HypothesisError(f"ingoing class ({r.m.a},{r.m.b}) has grade {r.grade}")
    incoming = _product(incoming_rays, ctx)

    outgoing = {r.m: r.coefficient for r in incoming_rays}
    outgoing.update({m: r.coefficient for m, r in _merge(seeds).items()})

    def rays() -> list[LocalRay]:
        return [LocalRay(m, True, c, ctx.grade(m)) for m, c in outgoing.items() if not c.is_zero()]

    for level in ctx.levels():
        local = ctx.restricted(level)
        defect = torus_mul(
            torus_inverse(_product(rays(), local), local), incoming.restrict(local), local
        )
        for m, c in defect.terms.items():
            if m != ZERO_CLASS and local.grades[m] < level:
                raise ConsistencyError(f"non-causal defect at class ({m.a},{m.b})")
        for m, c in defect.component(local, level).items():
            outgoing[m] = outgoing[m] + c if m in outgoing else c

    result = rays()
    logger.debug(
        "completed vertex: %d ingoing, %d outgoing, %d levels",
        len(incoming_rays),
        len(result),
        len(ctx.levels()),
    )
    return result


def loop_check(
    ingoing: Sequence[LocalRay], outgoing: Sequence[LocalRay], ctx: TruncationContext
) -> bool:
    return _product(ingoing, ctx) == _product(outgoing, ctx)
