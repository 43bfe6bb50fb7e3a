"""Charges on Z^3, central charges on the slice x^2 + 2y > 0 and their imaginary loci."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from p2scat.errors import EmptyRayLocusError, NoStableObjectsError, NoWallError
from p2scat.models import ChargeVector, PointQ

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class ChargeValue:
    """Z = re + i * im_coeff * sqrt(x^2 + 2y)."""

    re: Fraction
    im_coeff: Fraction

    def is_imaginary_positive(self) -> bool:
        return self.re == 0 and self.im_coeff > 0


def euler_form(gamma: ChargeVector, other: ChargeVector) -> int:
    r, d, chi = gamma.r, gamma.d, gamma.chi
    r2, d2, chi2 = other.r, other.d, other.chi
    return -3 * d * r2 - r * r2 - d * d2 + r * chi2 + chi * r2


def moduli_dimension(gamma: ChargeVector) -> int:
    if gamma.is_torsion_point_class():
        if gamma == ChargeVector(0, 0, 1):
            return 2
        raise NoStableObjectsError(str(gamma))
    return 1 - euler_form(gamma, gamma)


def central_charge(gamma: ChargeVector, sigma: PointQ) -> ChargeValue:
    r, d, chi = gamma.r, gamma.d, gamma.chi
    re = r * sigma.y + d * sigma.x + r + Fraction(3 * d, 2) - chi
    return ChargeValue(re, d - r * sigma.x)


def on_ray_locus(gamma: ChargeVector, sigma: PointQ) -> bool:
    return sigma.in_u() and central_charge(gamma, sigma).is_imaginary_positive()


def line_of_sheaf(n: int) -> ChargeVector:
    """The class of O(n)."""
    return ChargeVector(1, n, (n + 1) * (n + 2) // 2)


def twist(gamma: ChargeVector, k: int = 1) -> ChargeVector:
    """The class of E(k) for E of class gamma."""
    r, d, chi = gamma.r, gamma.d, gamma.chi
    for _ in range(abs(k)):
        if k > 0:
            r, d, chi = r, d + r, chi + d + 2 * r
        else:
            r, d, chi = r, d - r, chi - r - d
    return ChargeVector(r, d, chi)


def serre_dual(gamma: ChargeVector) -> ChargeVector:
    if gamma.r != 0:
        raise ValueError(f"Serre duality is only tabulated for one-dimensional classes: {gamma}")
    return ChargeVector(0, gamma.d, -gamma.chi)


def divisors(gamma: ChargeVector) -> list[int]:
    g = gamma.divisibility
    return [ell for ell in range(1, g + 1) if g % ell == 0]


def _ceil_sqrt(value: Fraction) -> int:
    """Smallest positive integer t with t^2 >= value."""
    if value <= 1:
        return 1
    t = math.isqrt(math.ceil(value))
    while t * t < value:
        t += 1
    return t


def default_probe_height(gamma: ChargeVector) -> Fraction:
    if gamma.r == 0:
        x = Fraction(gamma.chi, gamma.d) - Fraction(3, 2)
        return x * x + 2 * max(1, gamma.d**2)
    return Fraction(max(1, gamma.d**2, gamma.r**2, (gamma.chi - gamma.r) ** 2))


def probe_point(gamma: ChargeVector, s_target: Fraction) -> PointQ:
    """A point of the ray locus of gamma with x^2 + 2y >= s_target."""
    r, d, chi = gamma.r, gamma.d, gamma.chi
    if r == 0:
        if d <= 0:
            raise EmptyRayLocusError(str(gamma))
        x = Fraction(chi, d) - Fraction(3, 2)
        return PointQ(x, (s_target - x * x) / 2)

    # along the line, x^2 + 2y = (x - d/r)^2 + offset
    center = Fraction(d, r)
    offset = -center * center + 2 * (chi - r - Fraction(3 * d, 2)) / r
    t = _ceil_sqrt(s_target - offset)
    x = center - t if r > 0 else center + t
    return PointQ(x, _line_y(gamma, x))


def _line_y(gamma: ChargeVector, x: Fraction) -> Fraction:
    return (gamma.chi - gamma.r - Fraction(3 * gamma.d, 2) - gamma.d * x) / gamma.r


def perturb_probe(gamma: ChargeVector, sigma: PointQ, step: Fraction) -> PointQ:
    """Slide the probe along the ray locus, further from the boundary."""
    if gamma.r == 0:
        return PointQ(sigma.x, sigma.y + step)
    x = sigma.x - step if gamma.r > 0 else sigma.x + step
    return PointQ(x, _line_y(gamma, x))


@dataclass(frozen=True, slots=True)
class PotentialWall:
    """F(x, y) = xx*x^2 + xy*x*y + x*x + y*y + c, vanishing where the two charges align."""

    xx: Fraction
    xy: Fraction
    x: Fraction
    y: Fraction
    c: Fraction

    def __call__(self, sigma: PointQ) -> Fraction:
        return (
            self.xx * sigma.x * sigma.x
            + self.xy * sigma.x * sigma.y
            + self.x * sigma.x
            + self.y * sigma.y
            + self.c
        )

    def tangent_line(self, sigma: PointQ) -> tuple[Fraction, Fraction, Fraction]:
        """(A, B, C) with A*x + B*y + C = 0 the tangent line at sigma."""
        a = 2 * self.xx * sigma.x + self.xy * sigma.y + self.x
        b = self.xy * sigma.x + self.y
        if a == 0 and b == 0:
            raise ValueError(f"Singular point of the wall: {sigma}")
        return a, b, -(a * sigma.x + b * sigma.y)


def potential_wall(gamma: ChargeVector, other: ChargeVector) -> PotentialWall:
    """Im Z_gamma * Re Z_other - Im Z_other * Re Z_gamma as a conic in (x, y)."""
    if gamma.m.is_collinear(other.m):
        raise NoWallError(f"{gamma} and {other} have collinear classes")

    def re(g: ChargeVector) -> tuple[Fraction, Fraction, Fraction]:
        # coefficients of x, y, 1
        return Fraction(g.d), Fraction(g.r), g.r + Fraction(3 * g.d, 2) - g.chi

    def im(g: ChargeVector) -> tuple[Fraction, Fraction]:
        # coefficients of x, 1
        return Fraction(-g.r), Fraction(g.d)

    (ix1, i01), (ix2, i02) = im(gamma), im(other)
    (rx1, ry1, r01), (rx2, ry2, r02) = re(gamma), re(other)
    return PotentialWall(
        xx=ix1 * rx2 - ix2 * rx1,
        xy=ix1 * ry2 - ix2 * ry1,
        x=ix1 * r02 + i01 * rx2 - ix2 * r01 - i02 * rx1,
        y=i01 * ry2 - i02 * ry1,
        c=i01 * r02 - i02 * r01,
    )
