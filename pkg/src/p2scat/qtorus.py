"""Quantum torus over Z^2, truncated by a linear grading.

Products follow z^m z^m' = (-1)^<m,m'> q^(<m,m'>/2) z^(m+m'); the sign is dropped for the unsigned
convention. Classes outside the truncation support are discarded, which is the quotient by the
ideal of classes graded above the cap.
"""

import functools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

from p2scat.errors import NonNilpotentError, NotUnipotentError
from p2scat.exactalg import Coefficient, RatFuncQ
from p2scat.models import ZERO_CLASS, LatticeClass, PointQ

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class SkewForm:
    kappa: int = 3
    signed: bool = True

    def __call__(self, m: LatticeClass, n: LatticeClass) -> int:
        return self.kappa * m.cross(n)


@dataclass(frozen=True, slots=True)
class Grading:
    """The additive grading m -> alpha*a + beta*b."""

    alpha: Fraction
    beta: Fraction

    @classmethod
    def at_point(cls, sigma: PointQ) -> "Grading":
        return cls(-2 * sigma.x, Fraction(-2))

    def __call__(self, m: LatticeClass) -> Fraction:
        return self.alpha * m.a + self.beta * m.b


@dataclass(frozen=True)
class TruncationContext:
    form: SkewForm
    grade: Grading
    cap: Fraction
    grades: Mapping[LatticeClass, Fraction]
    unit: Coefficient = field(default_factory=RatFuncQ.one)

    @classmethod
    def generated(
        cls,
        form: SkewForm,
        grade: Grading,
        cap: Fraction | int,
        generators: Iterable[LatticeClass],
        unit: Coefficient | None = None,
    ) -> "TruncationContext":
        """The monoid generated by ``generators`` and clipped at ``cap``."""
        cap = Fraction(cap)
        gens = set()
        for g in generators:
            if grade(g) <= 0:
                raise NonNilpotentError(f"class ({g.a},{g.b}) has grade {grade(g)}")
            if grade(g) <= cap:
                gens.add(g)
        grades = {ZERO_CLASS: Fraction(0)}
        frontier = [ZERO_CLASS]
        while frontier:
            new = []
            for m in frontier:
                for g in gens:
                    n = m + g
                    if n not in grades and (value := grade(n)) <= cap:
                        grades[n] = value
                        new.append(n)
            frontier = new
        return cls(form, grade, cap, MappingProxyType(grades), unit or RatFuncQ.one())

    @property
    def support(self) -> frozenset[LatticeClass]:
        return frozenset(self.grades)

    def levels(self) -> list[Fraction]:
        """Distinct positive grades in ascending order."""
        return sorted({g for g in self.grades.values() if g > 0})

    def restricted(self, cap: Fraction) -> "TruncationContext":
        grades = {m: g for m, g in self.grades.items() if g <= cap}
        return TruncationContext(self.form, self.grade, cap, MappingProxyType(grades), self.unit)

    def one(self) -> "TorusElement":
        return TorusElement.from_dict({ZERO_CLASS: self.unit})

    def monomial(self, m: LatticeClass, c: Coefficient) -> "TorusElement":
        return TorusElement.from_dict({m: c} if m in self.grades else {})


@dataclass(frozen=True)
class TorusElement:
    terms: Mapping[LatticeClass, Coefficient]

    @classmethod
    def from_dict(cls, terms: Mapping[LatticeClass, Coefficient]) -> "TorusElement":
        return cls(MappingProxyType({m: c for m, c in terms.items() if not c.is_zero()}))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TorusElement") -> "TorusElement":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc[m] + c if m in acc else c
        return TorusElement.from_dict(acc)

    def __neg__(self) -> "TorusElement":
        return TorusElement.from_dict({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + (-other)

    def scale(self, c: Fraction) -> "TorusElement":
        return TorusElement.from_dict({m: f.scale(c) for m, f in self.terms.items()})

    def restrict(self, ctx: TruncationContext) -> "TorusElement":
        return TorusElement.from_dict({m: c for m, c in self.terms.items() if m in ctx.grades})

    def component(
        self, ctx: TruncationContext, grade: Fraction
    ) -> dict[LatticeClass, Coefficient]:
        return {m: c for m, c in self.terms.items() if ctx.grades.get(m) == grade}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TorusElement) and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))


def torus_mul(a: TorusElement, b: TorusElement, ctx: TruncationContext) -> TorusElement:
    form, grades = ctx.form, ctx.grades
    acc: dict[LatticeClass, Coefficient] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            m = m1 + m2
            if m not in grades:
                continue
            k = form(m1, m2)
            c = c1 * c2
            if k:
                c = c.times_monomial(k, -1 if form.signed and k % 2 else 1)
            acc[m] = acc[m] + c if m in acc else c
    return TorusElement.from_dict(acc)


def torus_exp(x: TorusElement, ctx: TruncationContext) -> TorusElement:
    if ZERO_CLASS in x.terms:
        raise NonNilpotentError()
    result = power = ctx.one()
    k = 0
    while True:
        k += 1
        power = torus_mul(power, x, ctx).scale(Fraction(1, k))
        if power.is_zero():
            return result
        result = result + power


def torus_inverse(a: TorusElement, ctx: TruncationContext) -> TorusElement:
    if a.terms.get(ZERO_CLASS) != ctx.unit:
        raise NotUnipotentError()
    nilpotent = -(a - ctx.one())
    result = power = ctx.one()
    while not (power := torus_mul(power, nilpotent, ctx)).is_zero():
        result = result + power
    return result


def ordered_product(factors: Sequence[TorusElement], ctx: TruncationContext) -> TorusElement:
    return functools.reduce(lambda acc, f: torus_mul(acc, f, ctx), factors, ctx.one())
