"""Random exact inputs for the property suite. Generators take an explicit ``random.Random``."""

import random
from fractions import Fraction

from p2scat.exactalg import HalfLaurent, RatFuncQ, ratfunc_normalize
from p2scat.models import ZERO_CLASS, LatticeClass
from p2scat.qtorus import TorusElement, TruncationContext


def random_fraction(rng: random.Random, bound: int = 5) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_laurent(
    rng: random.Random, max_exponent: int = 4, bound: int = 5, terms: int = 3
) -> HalfLaurent:
    exponents = [rng.randint(-max_exponent, max_exponent) for _ in range(terms)]
    return HalfLaurent.from_dict({e: random_fraction(rng, bound) for e in exponents})


def random_nonzero_laurent(rng: random.Random, max_exponent: int = 4) -> HalfLaurent:
    while (p := random_laurent(rng, max_exponent)).is_zero():
        pass
    return p


def random_palindromic(rng: random.Random, half_width: int = 3, bound: int = 4) -> HalfLaurent:
    """A bar-invariant polynomial in q^(1/2) with integer coefficients and uniform parity."""
    parity = rng.randint(0, 1)
    coefficients = {}
    for e in range(parity, 2 * half_width + 1, 2):
        c = rng.randint(0, bound)
        coefficients[e] = c
        coefficients[-e] = c
    return HalfLaurent.from_dict(coefficients)


def random_ratfunc(rng: random.Random, max_exponent: int = 3) -> RatFuncQ:
    return ratfunc_normalize(
        random_laurent(rng, max_exponent), random_nonzero_laurent(rng, max_exponent)
    )


def random_nilpotent(rng: random.Random, ctx: TruncationContext, terms: int = 3) -> TorusElement:
    """A torus element supported on classes of positive grade."""
    support = sorted(m for m in ctx.grades if m != ZERO_CLASS)
    chosen: dict[LatticeClass, RatFuncQ] = {}
    for _ in range(min(terms, len(support))):
        m = rng.choice(support)
        chosen[m] = RatFuncQ.from_laurent(random_nonzero_laurent(rng, 2))
    return TorusElement.from_dict(chosen)
