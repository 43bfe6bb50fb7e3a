"""Tests for the consistent completion at one singular point."""

import random
from collections.abc import Callable
from fractions import Fraction

import pytest

from p2scat.diagram import initial_coefficient
from p2scat.errors import HypothesisError
from p2scat.exactalg import HalfLaurent, MarkerPoly, RatFuncQ
from p2scat.localscat import LocalRay, angular_sort, complete_vertex, loop_check
from p2scat.models import LatticeClass, PointQ
from p2scat.qtorus import Grading, SkewForm, TruncationContext
from p2scat.verify import pentagon_outgoing
from tests.utils import local_ray, over_d1

PolyType = Callable[[str], HalfLaurent]

# the first vertex of the diagram, where the families at s_-1 and s_0 meet
FIRST_VERTEX = Grading.at_point(PointQ(Fraction(-1, 2), Fraction(0)))


def test_angular_sort() -> None:
    g = Grading(Fraction(1), Fraction(1))
    f = initial_coefficient(1)
    ingoing = angular_sort([local_ray(0, 1, f, g), local_ray(1, 0, f, g), local_ray(1, 1, f, g)])
    assert [r.m for r in ingoing] == [LatticeClass(1, 0), LatticeClass(1, 1), LatticeClass(0, 1)]
    outgoing = angular_sort([local_ray(1, 0, f, g, True), local_ray(0, 1, f, g, True)])
    assert [r.m for r in outgoing] == [LatticeClass(0, 1), LatticeClass(1, 0)]


def test_angular_sort_rejects_mixed_directions() -> None:
    g = Grading(Fraction(1), Fraction(1))
    f = initial_coefficient(1)
    with pytest.raises(ValueError, match="Cannot sort"):
        angular_sort([local_ray(1, 0, f, g), local_ray(0, 1, f, g, True)])


def test_no_interaction_below_the_sum_of_grades() -> None:
    f = initial_coefficient(1)
    ingoing = [local_ray(1, 0, f, FIRST_VERTEX), local_ray(-1, -1, f, FIRST_VERTEX)]
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 1, [r.m for r in ingoing])
    outgoing = complete_vertex(ingoing, ctx)
    assert {r.m: r.coefficient for r in outgoing} == {r.m: r.coefficient for r in ingoing}
    assert all(r.outgoing for r in outgoing)


def test_first_vertex_emits_the_vertical_ray(poly: PolyType) -> None:
    f = initial_coefficient(1)
    ingoing = [local_ray(1, 0, f, FIRST_VERTEX), local_ray(-1, -1, f, FIRST_VERTEX)]
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 2, [r.m for r in ingoing])
    outgoing = complete_vertex(ingoing, ctx)
    assert {r.m: r.coefficient for r in outgoing} == {
        LatticeClass(1, 0): f,
        LatticeClass(-1, -1): f,
        LatticeClass(0, -1): over_d1(poly("-q^-1 - 1 - q")),
    }
    assert loop_check(ingoing, outgoing, ctx)


def test_seeds_are_kept_and_corrected(poly: PolyType) -> None:
    f = initial_coefficient(1)
    ingoing = [local_ray(1, 0, f, FIRST_VERTEX), local_ray(-1, -1, f, FIRST_VERTEX)]
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 2, [r.m for r in ingoing])
    outgoing = complete_vertex(ingoing, ctx)

    assert complete_vertex(ingoing, ctx, seeds=outgoing) == outgoing

    # a wrong seed on the emitted class is corrected back to the consistent value
    seed = local_ray(0, -1, over_d1(poly("1")), FIRST_VERTEX, outgoing=True)
    corrected = complete_vertex(ingoing, ctx, seeds=[seed])
    assert {r.m: r.coefficient for r in corrected} == {r.m: r.coefficient for r in outgoing}


def test_ingoing_grade_below_one() -> None:
    g = Grading(Fraction(1, 2), Fraction(1))
    f = initial_coefficient(1)
    ingoing = [local_ray(1, 0, f, g), local_ray(0, 1, f, g)]
    ctx = TruncationContext.generated(SkewForm(), g, 2, [r.m for r in ingoing])
    with pytest.raises(HypothesisError, match="order hypothesis violated"):
        complete_vertex(ingoing, ctx)


def test_loop_check_detects_missing_ray() -> None:
    f = initial_coefficient(1)
    ingoing = [local_ray(1, 0, f, FIRST_VERTEX), local_ray(-1, -1, f, FIRST_VERTEX)]
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 2, [r.m for r in ingoing])
    continuations = [local_ray(r.m.a, r.m.b, f, FIRST_VERTEX, outgoing=True) for r in ingoing]
    assert not loop_check(ingoing, continuations, ctx)


@pytest.mark.parametrize("cap", [2, 4, 6])
def test_pentagon(cap: int) -> None:
    outgoing = pentagon_outgoing(cap)
    interior = {m: f for m, f in outgoing.items() if m.a >= 1 and m.b >= 1}
    assert interior == {
        LatticeClass(ell, ell): initial_coefficient(ell) for ell in range(1, cap // 2 + 1)
    }
    for ell in range(1, cap + 1):
        assert outgoing[LatticeClass(ell, 0)] == initial_coefficient(ell)
        assert outgoing[LatticeClass(0, ell)] == initial_coefficient(ell)


def two_families_ingoing() -> list[LocalRay]:
    return [
        local_ray(ell * a, ell * b, initial_coefficient(ell), FIRST_VERTEX)
        for a, b in ((1, 0), (-1, -1))
        for ell in (1, 2)
    ]


def test_completion_ignores_input_order(rng: random.Random) -> None:
    ingoing = two_families_ingoing()
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 4, [r.m for r in ingoing])
    expected = {r.m: r.coefficient for r in complete_vertex(ingoing, ctx)}
    for _ in range(3):
        rng.shuffle(ingoing)
        assert {r.m: r.coefficient for r in complete_vertex(ingoing, ctx)} == expected


def test_new_classes_lie_in_the_forward_cone() -> None:
    ingoing = two_families_ingoing()
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 4, [r.m for r in ingoing])
    outgoing = complete_vertex(ingoing, ctx)
    new = [r for r in outgoing if r.m not in {s.m for s in ingoing}]
    assert new
    for r in new:
        # m = u*(1,0) + v*(-1,-1)
        u, v = r.m.a - r.m.b, -r.m.b
        assert u >= 1 and v >= 1
        assert r.grade >= 2
    assert loop_check(ingoing, outgoing, ctx)


def test_commuting_walls_pass_through_unchanged() -> None:
    g = Grading(Fraction(1), Fraction(1))
    ingoing = [
        local_ray(ell * a, ell * b, initial_coefficient(ell), g)
        for a, b in ((1, 0), (0, 1))
        for ell in (1, 2, 3)
    ]
    form = SkewForm(kappa=0)
    ctx = TruncationContext.generated(form, g, 6, [r.m for r in ingoing])
    outgoing = complete_vertex(ingoing, ctx)
    assert {r.m: r.coefficient for r in outgoing} == {r.m: r.coefficient for r in ingoing}


def test_markers_are_conserved(poly: PolyType) -> None:
    f = initial_coefficient(1)
    ingoing = [
        local_ray(1, 0, MarkerPoly.marker(0, 1, f, 2), FIRST_VERTEX),
        local_ray(-1, -1, MarkerPoly.marker(-1, 1, f, 2), FIRST_VERTEX),
    ]
    unit = MarkerPoly.constant(RatFuncQ.one(), 2)
    ctx = TruncationContext.generated(SkewForm(), FIRST_VERTEX, 2, [r.m for r in ingoing], unit)
    outgoing = {r.m: r.coefficient for r in complete_vertex(ingoing, ctx)}
    assert outgoing[LatticeClass(1, 0)] == ingoing[0].coefficient
    assert outgoing[LatticeClass(-1, -1)] == ingoing[1].coefficient
    vertical = outgoing[LatticeClass(0, -1)]
    assert isinstance(vertical, MarkerPoly)
    assert vertical.components() == {((-1, 1), (0, 1)): over_d1(poly("-q^-1 - 1 - q"))}
