import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True, slots=True, order=True)
class LatticeClass:
    a: int
    b: int

    def __add__(self, other: "LatticeClass") -> "LatticeClass":
        return LatticeClass(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "LatticeClass") -> "LatticeClass":
        return LatticeClass(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "LatticeClass":
        return LatticeClass(-self.a, -self.b)

    def __mul__(self, k: int) -> "LatticeClass":
        return LatticeClass(k * self.a, k * self.b)

    __rmul__ = __mul__

    def cross(self, other: "LatticeClass") -> int:
        """a'b - ab'; the skew form is kappa times this."""
        return other.a * self.b - self.a * other.b

    def is_collinear(self, other: "LatticeClass") -> bool:
        return self.cross(other) == 0

    @property
    def divisibility(self) -> int:
        return math.gcd(self.a, self.b)

    def primitive(self) -> "LatticeClass":
        g = self.divisibility
        return LatticeClass(self.a // g, self.b // g) if g else self

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0


ZERO_CLASS = LatticeClass(0, 0)


@dataclass(frozen=True, slots=True, order=True)
class PointQ:
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: Fraction | int | str, y: Fraction | int | str) -> "PointQ":
        return cls(Fraction(x), Fraction(y))

    @property
    def s(self) -> Fraction:
        """x^2 + 2y, the sweep key. Positive exactly on U."""
        return self.x * self.x + 2 * self.y

    def in_u(self) -> bool:
        return self.s > 0

    def moved(self, m: LatticeClass, t: Fraction) -> "PointQ":
        """The point self - t*m."""
        return PointQ(self.x - t * m.a, self.y - t * m.b)

    def sort_key(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.s, self.x, self.y)


@dataclass(frozen=True, slots=True, order=True)
class ChargeVector:
    r: int
    d: int
    chi: int

    @classmethod
    def parse(cls, text: str) -> "ChargeVector":
        try:
            r, d, chi = (int(part) for part in text.split(","))
        except ValueError as e:
            raise ValueError(f"Invalid class: {text!r}. Use format like '0,3,1'") from e
        return cls(r, d, chi)

    @property
    def m(self) -> LatticeClass:
        return LatticeClass(self.r, -self.d)

    @property
    def divisibility(self) -> int:
        return math.gcd(self.r, self.d, self.chi)

    def __floordiv__(self, ell: int) -> "ChargeVector":
        if self.r % ell or self.d % ell or self.chi % ell:
            raise ValueError(f"{ell} does not divide {self}")
        return ChargeVector(self.r // ell, self.d // ell, self.chi // ell)

    def primitive(self) -> "ChargeVector":
        return self // self.divisibility

    def is_torsion_point_class(self) -> bool:
        """Classes (0, 0, chi) of zero-dimensional support."""
        return self.r == 0 and self.d == 0

    def as_list(self) -> list[int]:
        return [self.r, self.d, self.chi]

    def __str__(self) -> str:
        return f"({self.r},{self.d},{self.chi})"
