import re
from fractions import Fraction
from typing import Any
from unittest import mock

from p2scat.exactalg import Coefficient, HalfLaurent, RatFuncQ
from p2scat.localscat import LocalRay
from p2scat.models import LatticeClass
from p2scat.qtorus import Grading

TERM = re.compile(r"(?P<coef>\d+(?:/\d+)?)?\*?(?P<q>q(?:\^\(?(?P<exp>-?\d+(?:/\d+)?)\)?)?)?")


def parse_poly(text: str) -> HalfLaurent:
    """'q^-1 + 1 + q', 'q^(1/2) - q^(-1/2)', '2*q^3', '1/3*q' and so on."""
    text = text.replace(" ", "").replace("^-", "^~").replace("(-", "(~")
    coefficients: dict[int, Fraction] = {}
    for sign, term in re.findall(r"([+-]?)([^+-]+)", text):
        match = TERM.fullmatch(term.replace("~", "-"))
        if match is None or (match["coef"] is None and match["q"] is None):
            raise ValueError(f"Invalid term: {term!r}")
        coefficient = Fraction(match["coef"] or 1)
        exponent = Fraction(match["exp"] or 1) if match["q"] else Fraction(0)
        if (2 * exponent).denominator != 1:
            raise ValueError(f"Exponent is not a half-integer: {term!r}")
        half = int(2 * exponent)
        coefficients[half] = coefficients.get(half, Fraction(0)) + (
            -coefficient if sign == "-" else coefficient
        )
    return HalfLaurent.from_dict(coefficients)


def over_d1(p: HalfLaurent) -> RatFuncQ:
    """p / (q^(1/2) - q^(-1/2))."""
    return RatFuncQ.from_laurent(p) / HalfLaurent.quantum_difference(1)


def local_ray(
    a: int, b: int, f: Coefficient, grading: Grading, outgoing: bool = False
) -> LocalRay:
    m = LatticeClass(a, b)
    return LocalRay(m, outgoing, f, grading(m))


def mock_report(**kwargs: Any) -> dict[str, Any]:
    return {
        "gamma": mock.ANY,
        "dim": mock.ANY,
        "poincare": mock.ANY,
        "hodge": mock.ANY,
        "euler": mock.ANY,
        "classical_dt": mock.ANY,
        "stabilized": mock.ANY,
        "probe": mock.ANY,
        "order_cap": mock.ANY,
        "rounds": mock.ANY,
        "config": mock.ANY,
        **kwargs,
    }
