"""Refined DT invariants read off the completed diagram.

The wall function of class m_gamma at a point of the ray locus of gamma is

    H = -sum_{l | gamma} (1/l) Ib_{gamma/l}(q^(l/2)) / (q^(l/2) - q^(-l/2))

so the symmetrized polynomials Ib are recovered by inverting over the divisors, smallest class
first. Poincare polynomials are P(q) = (-1)^dim q^(dim/2) Ib(q^(1/2)).
"""

import itertools
import logging
import math
import time
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from p2scat.config import RunConfig
from p2scat.diagram import (
    Diagram,
    function_at,
    initial_for,
    phi,
    quadratic_refinement,
    region_for,
    scatter,
)
from p2scat.errors import (
    EmptyRayLocusError,
    NotLaurentError,
    NotStabilizedError,
    SingularProbeError,
    UnderConvergedError,
)
from p2scat.exactalg import (
    Coefficient,
    HalfLaurent,
    Leaves,
    MarkerPoly,
    RatFuncQ,
    leaves_degree,
    ratfunc_to_laurent,
)
from p2scat.models import ChargeVector, PointQ
from p2scat.stability import (
    default_probe_height,
    divisors,
    moduli_dimension,
    on_ray_locus,
    perturb_probe,
    probe_point,
)

logger = logging.getLogger(__name__)

PERTURB_STEP = Fraction(1, 101)
PERTURB_ATTEMPTS = 5

POINT_CLASS = ChargeVector(0, 0, 1)


@dataclass(frozen=True)
class BettiPolynomial:
    poly: HalfLaurent
    gamma: ChargeVector
    dim: int
    note: str | None = None

    def coefficients(self) -> list[int]:
        """Coefficients of q^0, q^1, ...; [0] for empty moduli."""
        coefficients = self.poly.q_coefficients()
        if not coefficients:
            return [0]
        if any(c.denominator != 1 for c in coefficients):
            raise ValueError(f"Non-integral Betti numbers for {self.gamma}: {self.poly}")
        return [int(c) for c in coefficients]

    def is_palindromic(self) -> bool:
        coefficients = self.coefficients()
        return coefficients == coefficients[::-1]

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coefficients())

    @property
    def degree(self) -> int | None:
        return None if self.poly.is_zero() else self.poly.max_exponent // 2

    def at(self, value: int) -> int:
        return int(self.poly.evaluate(value))


@dataclass(frozen=True)
class TreeReport:
    gamma: ChargeVector
    pieces: dict[Leaves, HalfLaurent] = field(default_factory=dict)

    def total(self) -> HalfLaurent:
        return sum(self.pieces.values(), HalfLaurent())

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {
                "leaves": {str(n): k for n, k in leaves},
                "poly": [int(c) for c in poly.q_coefficients()],
            }
            for leaves, poly in self.pieces.items()
        ]


@dataclass(frozen=True)
class EulerNumbers:
    plus: int
    minus: int
    real: int
    # the real-locus interpretation of P(-1) is only a theorem for primitive classes
    primitive: bool


@dataclass(frozen=True)
class Extraction:
    gamma: ChargeVector
    dim: int
    ib: HalfLaurent
    pieces: dict[Leaves, HalfLaurent] | None
    probe: PointQ
    order_cap: Fraction
    rounds: int = 1


def _divisors_of(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _invert(h: Mapping[int, Coefficient], gamma: ChargeVector) -> dict[int, Coefficient]:
    """Ib of gamma/l for every divisor l, as coefficients of the same kind as ``h``."""
    g = gamma.divisibility
    zero = next(iter(h.values())).zero_like() if h else RatFuncQ.zero()
    d1 = HalfLaurent.quantum_difference(1)
    ib: dict[int, Coefficient] = {}
    for ell in sorted(_divisors_of(g), reverse=True):
        acc = h.get(ell, zero)
        for k in _divisors_of(g // ell)[1:]:
            term = ib[ell * k].laurent_scale(k) / HalfLaurent.quantum_difference(k)
            acc = acc + term.scale(Fraction(1, k))
        ib[ell] = -(acc * d1)
    return ib


def _to_laurent(f: RatFuncQ, gamma: ChargeVector) -> HalfLaurent:
    try:
        return ratfunc_to_laurent(f)
    except NotLaurentError as e:
        raise UnderConvergedError(f"{gamma}: {f}") from e


def dt_invert(h: Mapping[int, RatFuncQ], gamma: ChargeVector) -> HalfLaurent:
    """Symmetrized Ib_gamma from the wall functions h[l] of the classes m_(gamma/l)."""
    if all(f.is_zero() for f in h.values()):
        return HalfLaurent()
    ib = _invert(h, gamma)[1]
    assert isinstance(ib, RatFuncQ)
    result = _to_laurent(ib, gamma)
    if not result.is_bar_invariant():
        raise UnderConvergedError(f"{gamma}: {result} is not symmetric")
    return result


def dt_forward(ib: Mapping[int, HalfLaurent], gamma: ChargeVector) -> dict[int, RatFuncQ]:
    """Wall functions h[l] from the polynomials ib[l] = Ib_(gamma/l)."""
    g = gamma.divisibility
    h = {}
    for ell in _divisors_of(g):
        acc = RatFuncQ.zero()
        for k in _divisors_of(g // ell):
            term = RatFuncQ.from_laurent(ib.get(ell * k, HalfLaurent()).scale(k))
            acc = acc - (term / HalfLaurent.quantum_difference(k)).scale(Fraction(1, k))
        h[ell] = acc
    return h


def to_poincare(ib: HalfLaurent, dim: int) -> HalfLaurent:
    return ib.shift(dim) * (-1 if dim % 2 else 1)


def is_class_balanced(leaves: Leaves, gamma: ChargeVector) -> bool:
    """Whether the tangent classes at the leaves can add up to m_gamma."""
    choices = [range(-k, k + 1, 2) for _, k in leaves]
    for signs in itertools.product(*choices):
        if sum(signs) == gamma.r and sum(c * n for c, (n, _) in zip(signs, leaves)) == gamma.d:
            return True
    return False


def _diagram_at(gamma: ChargeVector, sigma: PointQ, cfg: RunConfig, markers: bool) -> Diagram:
    cap = cfg.order_cap if cfg.order_cap is not None else phi(sigma, gamma.m)
    region = cfg.region or region_for(sigma.x, cap, sigma.s + 1)
    degree_cap = math.floor(cap) if markers else None
    tic = time.time()
    d = scatter(initial_for(region, cap, convention=cfg.convention, degree_cap=degree_cap))
    logger.info(
        "%s: scattered at (%s, %s), order %s, %d rays in %.2fs",
        gamma,
        sigma.x,
        sigma.y,
        cap,
        len(d.rays),
        time.time() - tic,
    )
    return d


def _read(d: Diagram, gamma: ChargeVector, sigma: PointQ) -> dict[int, Coefficient]:
    h = {}
    for ell in divisors(gamma):
        m = (gamma // ell).m
        f = function_at(d, sigma, m)
        if not d.form.signed:
            f = f.scale(quadratic_refinement(m))
        h[ell] = f
    return h


def _extract_at(
    gamma: ChargeVector, sigma: PointQ, cfg: RunConfig, markers: bool
) -> tuple[PointQ, Fraction, HalfLaurent, dict[Leaves, HalfLaurent] | None]:
    for _ in range(PERTURB_ATTEMPTS):
        d = _diagram_at(gamma, sigma, cfg, markers)
        try:
            h = _read(d, gamma, sigma)
            break
        except SingularProbeError:
            logger.debug("%s: probe (%s, %s) is singular, perturbing", gamma, sigma.x, sigma.y)
            sigma = perturb_probe(gamma, sigma, PERTURB_STEP)
    else:
        raise SingularProbeError(f"{gamma} after {PERTURB_ATTEMPTS} perturbations")

    ib = _invert(h, gamma)[1]
    match ib:
        case MarkerPoly():
            pieces = {leaves: _to_laurent(f, gamma) for leaves, f in ib.components().items()}
            total = sum(pieces.values(), HalfLaurent())
        case RatFuncQ():
            pieces, total = None, _to_laurent(ib, gamma)
    if not total.is_bar_invariant():
        raise UnderConvergedError(f"{gamma}: {total} is not symmetric")
    return sigma, d.order_cap, total, pieces


def extract(
    gamma: ChargeVector, cfg: RunConfig = RunConfig(), markers: bool = False
) -> Extraction:
    """Ib_gamma at a probe on the ray locus, raising the probe until two heights agree."""
    dim = moduli_dimension(gamma)
    if cfg.probe is not None:
        if not on_ray_locus(gamma, cfg.probe):
            probe = f"({cfg.probe.x}, {cfg.probe.y})"
            raise EmptyRayLocusError(f"{probe} is not on the locus of {gamma}")
        sigma, cap, ib, pieces = _extract_at(gamma, cfg.probe, cfg, markers)
        return Extraction(gamma, dim, ib, pieces, sigma, cap)

    height = default_probe_height(gamma)
    previous = None
    for rounds in range(1, cfg.retry_limit + 2):
        try:
            result = _extract_at(gamma, probe_point(gamma, height), cfg, markers)
        except UnderConvergedError as e:
            logger.debug("%s: %s at height %s", gamma, e, height)
            result = None
        if result is not None and previous is not None and result[2:] == previous[2:]:
            sigma, cap, ib, pieces = previous
            logger.info("%s: stabilized after %d rounds", gamma, rounds)
            return Extraction(gamma, dim, ib, pieces, sigma, cap, rounds)
        previous = result
        height *= 2
    if previous is None:
        raise UnderConvergedError(str(gamma))
    raise NotStabilizedError(f"{gamma} after {cfg.retry_limit} retries")


def poincare(gamma: ChargeVector, cfg: RunConfig = RunConfig()) -> BettiPolynomial:
    if gamma.is_torsion_point_class():
        if gamma == POINT_CLASS:
            return BettiPolynomial(HalfLaurent.from_q_coefficients([1, 1, 1]), gamma, 2)
        return BettiPolynomial(HalfLaurent(), gamma, 0, note="no stable objects")
    extraction = extract(gamma, cfg)
    return BettiPolynomial(to_poincare(extraction.ib, extraction.dim), gamma, extraction.dim)


def hodge_table(gamma: ChargeVector, cfg: RunConfig = RunConfig()) -> dict[tuple[int, int], int]:
    p = poincare(gamma, cfg)
    if p.poly.is_zero():
        return {}
    return {(k, k): c for k, c in enumerate(p.coefficients())}


def _euler(p: BettiPolynomial) -> EulerNumbers:
    plus = p.at(1)
    return EulerNumbers(
        plus=plus,
        minus=-plus if p.dim % 2 else plus,
        real=p.at(-1),
        primitive=p.gamma.primitive() == p.gamma,
    )


def euler_numbers(gamma: ChargeVector, cfg: RunConfig = RunConfig()) -> EulerNumbers:
    return _euler(poincare(gamma, cfg))


def classical_dt(gamma: ChargeVector, cfg: RunConfig = RunConfig()) -> int:
    """The q -> 1 specialization of Ib_gamma."""
    return _euler(poincare(gamma, cfg)).minus


def _tree_report(extraction: Extraction) -> TreeReport:
    gamma, dim = extraction.gamma, extraction.dim
    assert extraction.pieces is not None
    pieces = {
        leaves: to_poincare(ib, dim)
        for leaves, ib in sorted(extraction.pieces.items(), key=lambda item: item[0])
    }
    report = TreeReport(gamma, pieces)
    for leaves, poly in pieces.items():
        if not is_class_balanced(leaves, gamma):
            raise ValueError(f"Leaves {dict(leaves)} do not add up to {gamma}")
        coefficients = poly.q_coefficients()
        if any(c < 0 for c in coefficients):
            logger.warning("%s: piece %s has negative coefficients: %s", gamma, dict(leaves), poly)
        shift = min(poly.as_dict()) // 2 if not poly.is_zero() else 0
        body = coefficients[shift:]
        if body != body[::-1]:
            logger.warning("%s: piece %s is not palindromic: %s", gamma, dict(leaves), poly)
    if report.total() != to_poincare(extraction.ib, dim):
        raise ValueError(f"Tree pieces of {gamma} do not add up to the total")
    logger.debug(
        "%s: %d pieces, leaf degrees %s",
        gamma,
        len(pieces),
        [leaves_degree(leaves) for leaves in pieces],
    )
    return report


def tree_decomposition(gamma: ChargeVector, cfg: RunConfig = RunConfig()) -> TreeReport:
    if gamma.is_torsion_point_class():
        moduli_dimension(gamma)
        return TreeReport(gamma)
    return _tree_report(extract(gamma, cfg, markers=True))


@dataclass(frozen=True)
class ChiReport:
    d: int
    results: dict[int, BettiPolynomial]

    @property
    def independent(self) -> bool:
        return len({p.poly for p in self.results.values()}) <= 1


def chi_independence(d: int, cfg: RunConfig = RunConfig()) -> ChiReport:
    """One chi per value of gcd(d, chi): the divisors of d."""
    if d < 1:
        raise ValueError(f"Degree must be positive, got {d}")
    return ChiReport(d, {chi: poincare(ChargeVector(0, d, chi), cfg) for chi in _divisors_of(d)})


def hilbert_poincare(n: int) -> HalfLaurent:
    """Poincare polynomial of the Hilbert scheme of n points on the plane.

    Coefficient of t^n in prod_k 1/((1 - q^(k-1) t^k)(1 - q^k t^k)(1 - q^(k+1) t^k)).
    """
    series = [HalfLaurent.constant(1)] + [HalfLaurent()] * n
    for k in range(1, n + 1):
        for shift in (k - 1, k, k + 1):
            q_power = HalfLaurent.monomial(2 * shift)
            # multiply by 1/(1 - q^shift t^k) in place
            for i in range(k, n + 1):
                series[i] = series[i] + q_power * series[i - k]
    return series[n]


def _fraction_json(v: Fraction) -> list[int]:
    return [v.numerator, v.denominator]


def betti_report(gamma: ChargeVector, cfg: RunConfig = RunConfig()) -> dict[str, Any]:
    """The JSON report of one class; trees are included when markers are on."""
    report: dict[str, Any] = {"gamma": gamma.as_list()}
    if gamma.is_torsion_point_class():
        p = poincare(gamma, cfg)
        extraction = None
    else:
        extraction = extract(gamma, cfg, markers=cfg.markers)
        p = BettiPolynomial(to_poincare(extraction.ib, extraction.dim), gamma, extraction.dim)
    euler = _euler(p)
    report |= {
        "dim": p.dim,
        "poincare": p.coefficients(),
        "hodge": {f"{k},{k}": c for k, c in enumerate(p.coefficients()) if not p.poly.is_zero()},
        "euler": {
            "plus": euler.plus,
            "minus": euler.minus,
            "real": euler.real,
            "primitive": euler.primitive,
        },
        "classical_dt": euler.minus,
        "stabilized": extraction is None or cfg.probe is None,
    }
    if p.note:
        report["note"] = p.note
    if extraction is not None:
        if extraction.pieces is not None:
            report["trees"] = _tree_report(extraction).to_json()
        report["probe"] = {
            "x": _fraction_json(extraction.probe.x),
            "y": _fraction_json(extraction.probe.y),
        }
        report["order_cap"] = _fraction_json(extraction.order_cap)
        report["rounds"] = extraction.rounds
    report["config"] = cfg.echo()
    return report
