"""Exact coefficient arithmetic.

Laurent polynomials in q^(1/2) store exponents in half-units, so ``{3: 1}`` is q^(3/2). Rational
functions are kept in a canonical form so that structural equality is value equality; ray functions
are compared and merged on that basis. Marker polynomials tag contributions with the initial points
they were built from.
"""

import functools
import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from operator import itemgetter
from typing import Any

from sympy import QQ
from sympy.polys.rings import PolyElement, ring

from p2scat.errors import NotLaurentError

logger = logging.getLogger(__name__)

_RING, _T = ring("t", QQ)

type Rational = Fraction | int
type Leaves = tuple[tuple[int, int], ...]


def _fraction(c: Rational) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


@dataclass(frozen=True, slots=True)
class HalfLaurent:
    terms: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, coefficients: Mapping[int, Rational]) -> "HalfLaurent":
        return cls(tuple(sorted((e, _fraction(c)) for e, c in coefficients.items() if c)))

    @classmethod
    def monomial(cls, exponent: int, coefficient: Rational = 1) -> "HalfLaurent":
        return cls(((exponent, _fraction(coefficient)),)) if coefficient else cls()

    @classmethod
    def constant(cls, coefficient: Rational) -> "HalfLaurent":
        return cls.monomial(0, coefficient)

    @classmethod
    def q_integer(cls, n: int) -> "HalfLaurent":
        """[n]_q = 1 + q + ... + q^(n-1)."""
        return cls.from_dict({2 * k: 1 for k in range(n)})

    @classmethod
    def from_q_coefficients(cls, coefficients: Iterable[Rational]) -> "HalfLaurent":
        return cls.from_dict({2 * p: c for p, c in enumerate(coefficients)})

    @classmethod
    def quantum_difference(cls, ell: int) -> "HalfLaurent":
        """q^(l/2) - q^(-l/2)."""
        return cls.from_dict({ell: 1, -ell: -1})

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_exponent(self) -> int:
        return self.terms[0][0]

    @property
    def max_exponent(self) -> int:
        return self.terms[-1][0]

    def __add__(self, other: "HalfLaurent | Rational") -> "HalfLaurent":
        if not isinstance(other, (HalfLaurent, int, Fraction)):
            return NotImplemented
        other = _as_laurent(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return HalfLaurent.from_dict(acc)

    __radd__ = __add__

    def __neg__(self) -> "HalfLaurent":
        return HalfLaurent(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "HalfLaurent | Rational") -> "HalfLaurent":
        if not isinstance(other, (HalfLaurent, int, Fraction)):
            return NotImplemented
        return self + (-_as_laurent(other))

    def __rsub__(self, other: "HalfLaurent | Rational") -> "HalfLaurent":
        return _as_laurent(other) + (-self)

    def __mul__(self, other: "HalfLaurent | Rational") -> "HalfLaurent":
        if isinstance(other, (int, Fraction)):
            if not other:
                return HalfLaurent()
            return HalfLaurent(tuple((e, c * other) for e, c in self.terms))
        if not isinstance(other, HalfLaurent):
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return HalfLaurent.from_dict(acc)

    __rmul__ = __mul__

    def shift(self, k: int) -> "HalfLaurent":
        """Multiply by q^(k/2)."""
        return HalfLaurent(tuple((e + k, c) for e, c in self.terms))

    def scale(self, ell: int) -> "HalfLaurent":
        """Substitute q^(1/2) -> q^(l/2)."""
        if ell < 1:
            raise ValueError(f"Scale factor must be positive, got {ell}")
        return HalfLaurent(tuple((ell * e, c) for e, c in self.terms))

    def bar(self) -> "HalfLaurent":
        """Substitute q^(1/2) -> q^(-1/2)."""
        return HalfLaurent.from_dict({-e: c for e, c in self.terms})

    def is_bar_invariant(self) -> bool:
        return self.bar() == self

    def evaluate(self, value: Rational) -> Fraction:
        value = _fraction(value)
        if any(e % 2 for e, _ in self.terms):
            if value < 0:
                raise ValueError(f"Odd half-power cannot be evaluated at q={value}")
            root = _exact_sqrt(value)
            return sum((c * root**e for e, c in self.terms), Fraction(0))
        return sum((c * value ** (e // 2) for e, c in self.terms), Fraction(0))

    def q_coefficients(self) -> list[Fraction]:
        """Coefficients of q^0, q^1, ... for a polynomial in q."""
        if not self.terms:
            return []
        if self.min_exponent < 0 or any(e % 2 for e, _ in self.terms):
            raise ValueError(f"Not a polynomial in q: {self}")
        coefficients = self.as_dict()
        return [coefficients.get(2 * p, Fraction(0)) for p in range(self.max_exponent // 2 + 1)]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e % 2:
                power = f"q^({e}/2)"
            else:
                power = {0: "", 2: "q"}.get(e, f"q^{e // 2}")
            if not power:
                parts.append(str(c))
            elif c == 1:
                parts.append(power)
            elif c == -1:
                parts.append(f"-{power}")
            else:
                parts.append(f"{c}*{power}")
        return " + ".join(parts).replace("+ -", "- ")


_ONE = HalfLaurent.constant(1)


def _as_laurent(x: HalfLaurent | Rational) -> HalfLaurent:
    return x if isinstance(x, HalfLaurent) else HalfLaurent.constant(x)


def _exact_sqrt(value: Fraction) -> Fraction:
    n, d = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if n * n != value.numerator or d * d != value.denominator:
        raise ValueError(f"q^(1/2) is irrational at q={value}")
    return Fraction(n, d)


def _to_poly(p: HalfLaurent, offset: int) -> PolyElement:
    return _RING.from_dict({(e - offset,): QQ(c.numerator, c.denominator) for e, c in p.terms})


def _from_poly(f: PolyElement, offset: int) -> HalfLaurent:
    return HalfLaurent.from_dict(
        {k + offset: Fraction(int(c.numerator), int(c.denominator)) for (k,), c in f.terms()}
    )


@dataclass(frozen=True, slots=True)
class RatFuncQ:
    """A rational function in q^(1/2). Build through ``ratfunc_normalize``."""

    num: HalfLaurent
    den: HalfLaurent

    @classmethod
    def zero(cls) -> "RatFuncQ":
        return cls(HalfLaurent(), _ONE)

    @classmethod
    def one(cls) -> "RatFuncQ":
        return cls(_ONE, _ONE)

    @classmethod
    def from_laurent(cls, p: HalfLaurent) -> "RatFuncQ":
        return cls(p, _ONE)

    @classmethod
    def constant(cls, c: Rational) -> "RatFuncQ":
        return cls(HalfLaurent.constant(c), _ONE)

    def zero_like(self) -> "RatFuncQ":
        return RatFuncQ.zero()

    def one_like(self) -> "RatFuncQ":
        return RatFuncQ.one()

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_laurent(self) -> bool:
        return self.den == _ONE

    def __add__(self, other: "RatFuncQ | HalfLaurent | Rational") -> "RatFuncQ":
        if isinstance(other, MarkerPoly):
            return NotImplemented
        other = _as_ratfunc(other)
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        if self.den == other.den:
            if self.den == _ONE:
                return RatFuncQ(self.num + other.num, _ONE)
            return ratfunc_normalize(self.num + other.num, self.den)
        return ratfunc_normalize(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> "RatFuncQ":
        return RatFuncQ(-self.num, self.den)

    def __sub__(self, other: "RatFuncQ | HalfLaurent | Rational") -> "RatFuncQ":
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other: "RatFuncQ | HalfLaurent | Rational") -> "RatFuncQ":
        return _as_ratfunc(other) + (-self)

    def __mul__(self, other: "RatFuncQ | HalfLaurent | Rational") -> "RatFuncQ":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, MarkerPoly):
            return NotImplemented
        other = _as_ratfunc(other)
        if not self.num.terms or not other.num.terms:
            return RatFuncQ.zero()
        if self.den == _ONE and other.den == _ONE:
            return RatFuncQ(self.num * other.num, _ONE)
        return ratfunc_normalize(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatFuncQ | HalfLaurent | Rational") -> "RatFuncQ":
        other = _as_ratfunc(other)
        if not other.num.terms:
            raise ZeroDivisionError("division by zero")
        return ratfunc_normalize(self.num * other.den, self.den * other.num)

    def scale(self, c: Rational) -> "RatFuncQ":
        if not c:
            return RatFuncQ.zero()
        return RatFuncQ(self.num * _fraction(c), self.den)

    def shift(self, k: int) -> "RatFuncQ":
        return RatFuncQ(self.num.shift(k), self.den)

    def times_monomial(self, exponent: int, sign: int) -> "RatFuncQ":
        """Multiply by sign * q^(exponent/2); canonical form is preserved."""
        num = self.num.shift(exponent)
        return RatFuncQ(num if sign > 0 else -num, self.den)

    def laurent_scale(self, ell: int) -> "RatFuncQ":
        return ratfunc_normalize(self.num.scale(ell), self.den.scale(ell))

    def to_json(self) -> dict[str, list[list[Any]]]:
        return {"num": _laurent_to_json(self.num), "den": _laurent_to_json(self.den)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "RatFuncQ":
        return ratfunc_normalize(_laurent_from_json(data["num"]), _laurent_from_json(data["den"]))

    def __str__(self) -> str:
        if self.den == _ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _laurent_to_json(p: HalfLaurent) -> list[list[Any]]:
    return [[e, str(c)] for e, c in p.terms]


def _laurent_from_json(data: list[list[Any]]) -> HalfLaurent:
    return HalfLaurent.from_dict({int(e): Fraction(c) for e, c in data})


def _as_ratfunc(x: RatFuncQ | HalfLaurent | Rational) -> RatFuncQ:
    if isinstance(x, RatFuncQ):
        return x
    return RatFuncQ(_as_laurent(x), _ONE)


@functools.lru_cache(maxsize=1 << 16)
def ratfunc_normalize(n: HalfLaurent, d: HalfLaurent) -> RatFuncQ:
    if not d.terms:
        raise ZeroDivisionError("division by zero")
    if not n.terms:
        return RatFuncQ.zero()
    if len(d.terms) == 1:
        e, c = d.terms[0]
        return RatFuncQ((n * (1 / c)).shift(-e), _ONE)

    n0, d0 = n.min_exponent, d.min_exponent
    _, num, den = _to_poly(n, n0).cofactors(_to_poly(d, d0))
    numerator, denominator = _from_poly(num, n0 - d0), _from_poly(den, 0)

    # content 1, positive leading coefficient
    coefficients = [c for _, c in denominator.terms]
    lcm = math.lcm(*(c.denominator for c in coefficients))
    lam = Fraction(lcm, math.gcd(*(c.numerator * (lcm // c.denominator) for c in coefficients)))
    if coefficients[-1] < 0:
        lam = -lam
    return RatFuncQ(numerator * lam, denominator * lam)


def laurent_scale(p: HalfLaurent, ell: int) -> HalfLaurent:
    return p.scale(ell)


def ratfunc_to_laurent(f: RatFuncQ) -> HalfLaurent:
    # canonical denominators of Laurent polynomials are exactly 1
    if f.den != _ONE:
        raise NotLaurentError(str(f))
    return f.num


def evaluate(p: HalfLaurent, value: Rational) -> Fraction:
    return p.evaluate(value)


def leaves_degree(leaves: Leaves) -> int:
    return sum(k for _, k in leaves)


def leaves_union(first: Leaves, second: Leaves) -> Leaves:
    if not first:
        return second
    if not second:
        return first
    acc = dict(first)
    for n, k in second:
        acc[n] = acc.get(n, 0) + k
    return tuple(sorted(acc.items()))


@dataclass(frozen=True, slots=True)
class MarkerPoly:
    """Coefficients tagged by a multiset of initial points, stored as sorted (n, multiplicity)."""

    terms: tuple[tuple[Leaves, RatFuncQ], ...]
    degree_cap: int

    @classmethod
    def from_dict(cls, terms: Mapping[Leaves, RatFuncQ], degree_cap: int) -> "MarkerPoly":
        return cls(
            tuple(
                sorted(
                    (
                        (leaves, f)
                        for leaves, f in terms.items()
                        if not f.is_zero() and leaves_degree(leaves) <= degree_cap
                    ),
                    key=itemgetter(0),
                )
            ),
            degree_cap,
        )

    @classmethod
    def constant(cls, f: RatFuncQ, degree_cap: int) -> "MarkerPoly":
        return cls.from_dict({(): f}, degree_cap)

    @classmethod
    def marker(cls, n: int, power: int, f: RatFuncQ, degree_cap: int) -> "MarkerPoly":
        return cls.from_dict({((n, power),): f}, degree_cap)

    def zero_like(self) -> "MarkerPoly":
        return MarkerPoly((), self.degree_cap)

    def one_like(self) -> "MarkerPoly":
        return MarkerPoly.constant(RatFuncQ.one(), self.degree_cap)

    def is_zero(self) -> bool:
        return not self.terms

    def components(self) -> dict[Leaves, RatFuncQ]:
        return dict(self.terms)

    def total(self) -> RatFuncQ:
        return sum((f for _, f in self.terms), RatFuncQ.zero())

    def _map(self, fn: Any) -> "MarkerPoly":
        return MarkerPoly.from_dict({leaves: fn(f) for leaves, f in self.terms}, self.degree_cap)

    def __add__(self, other: "MarkerPoly") -> "MarkerPoly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for leaves, f in other.terms:
            acc[leaves] = acc[leaves] + f if leaves in acc else f
        return MarkerPoly.from_dict(acc, min(self.degree_cap, other.degree_cap))

    def __neg__(self) -> "MarkerPoly":
        return MarkerPoly(tuple((leaves, -f) for leaves, f in self.terms), self.degree_cap)

    def __sub__(self, other: "MarkerPoly") -> "MarkerPoly":
        return self + (-other)

    def __mul__(self, other: "MarkerPoly | RatFuncQ | HalfLaurent | Rational") -> "MarkerPoly":
        if not isinstance(other, MarkerPoly):
            return self._map(lambda f: f * other)
        cap = min(self.degree_cap, other.degree_cap)
        acc: dict[Leaves, RatFuncQ] = {}
        for leaves1, f1 in self.terms:
            for leaves2, f2 in other.terms:
                if leaves_degree(leaves1) + leaves_degree(leaves2) > cap:
                    continue
                leaves = leaves_union(leaves1, leaves2)
                product = f1 * f2
                acc[leaves] = acc[leaves] + product if leaves in acc else product
        return MarkerPoly.from_dict(acc, cap)

    def __truediv__(self, other: RatFuncQ | HalfLaurent | Rational) -> "MarkerPoly":
        return self._map(lambda f: f / other)

    def scale(self, c: Rational) -> "MarkerPoly":
        return self._map(lambda f: f.scale(c))

    def shift(self, k: int) -> "MarkerPoly":
        return MarkerPoly(tuple((leaves, f.shift(k)) for leaves, f in self.terms), self.degree_cap)

    def times_monomial(self, exponent: int, sign: int) -> "MarkerPoly":
        return MarkerPoly(
            tuple((leaves, f.times_monomial(exponent, sign)) for leaves, f in self.terms),
            self.degree_cap,
        )

    def laurent_scale(self, ell: int) -> "MarkerPoly":
        """q^(1/2) -> q^(l/2) together with every marker raised to the l-th power."""
        return MarkerPoly.from_dict(
            {
                tuple((n, ell * k) for n, k in leaves): f.laurent_scale(ell)
                for leaves, f in self.terms
            },
            self.degree_cap,
        )

    def shift_markers(self, k: int, sign: int = 1) -> "MarkerPoly":
        """Relabel markers n -> sign*n + k."""
        return MarkerPoly.from_dict(
            {tuple(sorted((sign * n + k, m) for n, m in leaves)): f for leaves, f in self.terms},
            self.degree_cap,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "degree_cap": self.degree_cap,
            "terms": [
                {"leaves": {str(n): k for n, k in leaves}, **f.to_json()}
                for leaves, f in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "MarkerPoly":
        return cls.from_dict(
            {
                tuple(sorted((int(n), int(k)) for n, k in term["leaves"].items())): (
                    RatFuncQ.from_json(term)
                )
                for term in data["terms"]
            },
            int(data["degree_cap"]),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"[{', '.join(f'e{n}^{k}' for n, k in leaves)}]({f})" for leaves, f in self.terms
        )


type Coefficient = RatFuncQ | MarkerPoly


def coefficient_from_json(data: Mapping[str, Any]) -> Coefficient:
    return MarkerPoly.from_json(data) if "terms" in data else RatFuncQ.from_json(data)
