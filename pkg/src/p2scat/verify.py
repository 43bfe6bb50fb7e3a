"""Named checks: golden values from the literature and structural properties of the engine."""

import copy
import functools
import math
import random
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from rich.console import Console

from p2scat.config import RunConfig
from p2scat.diagram import (
    Diagram,
    initial_coefficient,
    initial_diagram,
    mirror,
    phi,
    psi_translate,
    scatter,
    sign_twist,
)
from p2scat.exactalg import RatFuncQ, ratfunc_normalize
from p2scat.generate import (
    random_nilpotent,
    random_nonzero_laurent,
    random_palindromic,
    random_ratfunc,
)
from p2scat.invariants import (
    chi_independence,
    dt_forward,
    dt_invert,
    euler_numbers,
    hilbert_poincare,
    poincare,
    tree_decomposition,
)
from p2scat.localscat import LocalRay, complete_vertex, loop_check
from p2scat.models import ChargeVector, LatticeClass
from p2scat.qtorus import (
    Grading,
    SkewForm,
    TruncationContext,
    torus_exp,
    torus_inverse,
    torus_mul,
)
from p2scat.stability import moduli_dimension, serre_dual, twist
from p2scat.utils import GOLDEN, GoldenClass, golden_gamma, golden_trees

STRUCTURE_SWEEP = [
    ChargeVector(0, 1, -1),
    ChargeVector(0, 1, 0),
    ChargeVector(0, 1, 1),
    ChargeVector(0, 1, 2),
    ChargeVector(0, 2, -1),
    ChargeVector(0, 2, 0),
    ChargeVector(0, 2, 1),
    ChargeVector(0, 2, 2),
    ChargeVector(0, 2, 3),
    ChargeVector(0, 3, -1),
    ChargeVector(0, 3, 0),
    ChargeVector(0, 3, 2),
    ChargeVector(1, 0, 1),
    ChargeVector(1, 0, 0),
    ChargeVector(1, 0, -1),
    ChargeVector(1, 0, -2),
    ChargeVector(1, 1, 3),
    ChargeVector(1, 1, 2),
    ChargeVector(1, 1, 1),
    ChargeVector(1, -1, 0),
    ChargeVector(1, -1, -1),
    ChargeVector(1, 2, 6),
]

# (n_min, n_max, order cap)
EQUIVARIANCE_CONFIGS = [(-1, 1, 2), (-2, 1, 3), (0, 2, 4)]


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[], None]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    seconds: float
    message: str = ""


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise AssertionError(message)


def check_golden(entry: GoldenClass, cfg: RunConfig) -> None:
    gamma = golden_gamma(entry)
    p = poincare(gamma, cfg)
    _expect(
        p.coefficients() == entry["poincare"],
        f"{gamma}: got {p.coefficients()}, expected {entry['poincare']}",
    )
    _expect(p.at(1) == entry["euler"], f"{gamma}: Euler number {p.at(1)} != {entry['euler']}")


def check_trees(entry: GoldenClass, cfg: RunConfig) -> None:
    gamma = golden_gamma(entry)
    expected = golden_trees(entry)
    got = tree_decomposition(gamma, cfg).pieces
    _expect(got == expected, f"{gamma}: got {len(got)} pieces, expected {len(expected or {})}")


def check_chi_independence(d: int, cfg: RunConfig) -> None:
    report = chi_independence(d, cfg)
    _expect(report.independent, f"d={d}: {[str(p.poly) for p in report.results.values()]}")


def check_hilbert(n: int, cfg: RunConfig) -> None:
    gamma = ChargeVector(1, 0, 1 - n)
    got, expected = poincare(gamma, cfg).poly, hilbert_poincare(n)
    _expect(got == expected, f"{gamma}: got {got}, expected {expected}")


def check_structure(gamma: ChargeVector, cfg: RunConfig) -> None:
    p = poincare(gamma, cfg)
    if p.poly.is_zero():
        return
    _expect(p.is_nonnegative(), f"{gamma}: negative coefficients {p.coefficients()}")
    _expect(p.is_palindromic(), f"{gamma}: not palindromic {p.coefficients()}")
    _expect(p.degree == moduli_dimension(gamma), f"{gamma}: degree {p.degree} != {p.dim}")


def check_real_locus(gamma: ChargeVector, expected: int | None, cfg: RunConfig) -> None:
    euler = euler_numbers(gamma, cfg)
    _expect(euler.primitive, f"{gamma} is not primitive")
    _expect(abs(euler.real) <= euler.plus, f"{gamma}: |e_real| {euler.real} > {euler.plus}")
    if expected is not None:
        _expect(euler.real == expected, f"{gamma}: e_real {euler.real} != {expected}")


def check_psi_equivariance(n_min: int, n_max: int, order: int) -> None:
    d = initial_diagram(n_min, n_max, order)
    left, right = scatter(psi_translate(d, 1)), psi_translate(scatter(d), 1)
    _expect(left == right, f"[{n_min}, {n_max}] order {order}: diagrams differ")


def check_sign_twist(order: int) -> None:
    minus = scatter(initial_diagram(-1, 1, order))
    plus = scatter(initial_diagram(-1, 1, order, convention="plus"))
    _expect(sign_twist(minus) == plus, f"order {order}: twisted diagram differs")


def check_mirror(order: int) -> None:
    d = scatter(initial_diagram(-2, 2, order))
    _expect(mirror(d).rays == d.rays, f"order {order}: diagram is not mirror symmetric")


def check_diagram_loops(d: Diagram) -> None:
    """Re-run the loop check at every logged vertex from the finished rays alone."""
    cap = d.order_cap
    for v in d.vertex_log:
        p = v.point
        if p.s >= d.region.s_max:
            continue
        grading = Grading.at_point(p)
        ingoing, outgoing = [], []
        for ray in d.rays:
            t = ray.parameter_of(p)
            if t is None or phi(p, ray.m) > cap:
                continue
            if t > 0:
                ingoing.append(LocalRay(ray.m, False, ray.function, grading(ray.m)))
            if t == 0 or ray.extent is None or t < ray.extent:
                outgoing.append(LocalRay(ray.m, True, ray.function, grading(ray.m)))
        ctx = TruncationContext.generated(
            d.form, grading, cap, (r.m for r in ingoing + outgoing), d.unit()
        )
        _expect(loop_check(ingoing, outgoing, ctx), f"loop check failed at ({p.x}, {p.y})")


def check_loop(order: int) -> None:
    d = scatter(initial_diagram(-2, 2, order))
    _expect(len(d.vertex_log) > 0, f"order {order}: no vertex processed")
    check_diagram_loops(d)


def pentagon_outgoing(cap: int) -> dict[LatticeClass, RatFuncQ]:
    """Complete two full walls of classes (1,0) and (0,1) with kappa = 1."""
    form, grading = SkewForm(kappa=1), Grading(Fraction(1), Fraction(1))
    ingoing = [
        LocalRay(m * ell, False, initial_coefficient(ell), grading(m * ell))
        for m in (LatticeClass(1, 0), LatticeClass(0, 1))
        for ell in range(1, cap + 1)
    ]
    ctx = TruncationContext.generated(form, grading, cap, (r.m for r in ingoing))
    outgoing = complete_vertex(ingoing, ctx)
    _expect(loop_check(ingoing, outgoing, ctx), "pentagon loop check failed")
    result = {}
    for r in outgoing:
        assert isinstance(r.coefficient, RatFuncQ)
        result[r.m] = r.coefficient
    return result


def check_pentagon(cap: int) -> None:
    outgoing = pentagon_outgoing(cap)
    diagonal = {
        LatticeClass(ell, ell): initial_coefficient(ell) for ell in range(1, cap // 2 + 1)
    }
    interior = {m: f for m, f in outgoing.items() if m.a >= 1 and m.b >= 1}
    _expect(interior == diagonal, f"cap {cap}: {sorted(interior)}")


def check_ratfunc_canonical(seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(50):
        n, d = random_nonzero_laurent(rng), random_nonzero_laurent(rng)
        c = random_nonzero_laurent(rng, 2)
        _expect(ratfunc_normalize(n * c, d * c) == ratfunc_normalize(n, d), f"{n} / {d}")
        f, g = random_ratfunc(rng), random_ratfunc(rng)
        _expect((f + g) - g == f, f"({f}) + ({g})")


def check_dt_round_trip(seed: int) -> None:
    rng = random.Random(seed)
    for gamma in (ChargeVector(0, 1, 1), ChargeVector(0, 2, 2), ChargeVector(0, 4, 4)):
        ib = {
            ell: random_palindromic(rng)
            for ell in range(1, gamma.divisibility + 1)
            if gamma.divisibility % ell == 0
        }
        h = dt_forward(ib, gamma)
        _expect(dt_invert(h, gamma) == ib[1], f"{gamma}: round trip failed")


def check_torus(seed: int) -> None:
    rng = random.Random(seed)
    form, grading = SkewForm(), Grading(Fraction(1), Fraction(2))
    generators = [LatticeClass(1, 0), LatticeClass(0, 1), LatticeClass(-1, 1)]
    ctx = TruncationContext.generated(form, grading, 4, generators)
    for _ in range(10):
        x, y, z = (random_nilpotent(rng, ctx) for _ in range(3))
        _expect(
            torus_mul(torus_mul(x, y, ctx), z, ctx) == torus_mul(x, torus_mul(y, z, ctx), ctx),
            "product is not associative",
        )
        e = torus_exp(x, ctx)
        _expect(torus_mul(e, torus_inverse(e, ctx), ctx) == ctx.one(), "exp has no inverse")
        _expect(torus_mul(e, torus_exp(-x, ctx), ctx) == ctx.one(), "exp(-x) is not the inverse")


def check_idempotent(order: int) -> None:
    d = scatter(initial_diagram(-1, 1, order))
    _expect(scatter(d).rays == d.rays, f"order {order}: second scatter changed the diagram")
    _expect(Diagram.from_json(d.to_json()) == d, f"order {order}: JSON round trip changed it")


def check_twist_invariance(gamma: ChargeVector, cfg: RunConfig) -> None:
    p, p_twisted = poincare(gamma, cfg), poincare(twist(gamma), cfg)
    _expect(p.poly == p_twisted.poly, f"{gamma} vs {twist(gamma)}")


def check_serre_duality(gamma: ChargeVector, cfg: RunConfig) -> None:
    p, p_dual = poincare(gamma, cfg), poincare(serre_dual(gamma), cfg)
    _expect(p.poly == p_dual.poly, f"{gamma} vs {serre_dual(gamma)}")


def golden_checks(cfg: RunConfig, golden: Sequence[GoldenClass] = GOLDEN) -> list[Check]:
    checks = []
    for entry in golden:
        gamma = golden_gamma(entry)
        checks.append(Check(f"golden {gamma}", functools.partial(check_golden, entry, cfg)))
        if entry["trees"] is not None:
            checks.append(Check(f"trees {gamma}", functools.partial(check_trees, entry, cfg)))
    for d in range(1, 5):
        checks.append(
            Check(f"chi-independence d={d}", functools.partial(check_chi_independence, d, cfg))
        )
    for n in range(1, 4):
        checks.append(Check(f"hilbert n={n}", functools.partial(check_hilbert, n, cfg)))
    for gamma in STRUCTURE_SWEEP:
        checks.append(Check(f"structure {gamma}", functools.partial(check_structure, gamma, cfg)))
    checks.append(
        Check(
            "real-locus (0,1,1)",
            functools.partial(check_real_locus, ChargeVector(0, 1, 1), 1, cfg),
        )
    )
    checks.append(
        Check(
            "real-locus (0,2,1)",
            functools.partial(check_real_locus, ChargeVector(0, 2, 1), None, cfg),
        )
    )
    for n_min, n_max, order in EQUIVARIANCE_CONFIGS:
        checks.append(
            Check(
                f"psi-equivariance [{n_min}, {n_max}] order {order}",
                functools.partial(check_psi_equivariance, n_min, n_max, order),
            )
        )
    checks.append(Check("sign-twist order 4", functools.partial(check_sign_twist, 4)))
    checks.append(Check("mirror order 3", functools.partial(check_mirror, 3)))
    checks.append(Check("loop-check order 4", functools.partial(check_loop, 4)))
    checks.append(Check("pentagon cap 8", functools.partial(check_pentagon, 8)))
    return checks


def property_checks(cfg: RunConfig) -> list[Check]:
    seed = cfg.seed
    return [
        Check("ratfunc canonical form", functools.partial(check_ratfunc_canonical, seed)),
        Check("dt round trip", functools.partial(check_dt_round_trip, seed)),
        Check("quantum torus", functools.partial(check_torus, seed)),
        Check("scatter idempotent", functools.partial(check_idempotent, 3)),
        Check(
            "twist invariance (0,1,1)",
            functools.partial(check_twist_invariance, ChargeVector(0, 1, 1), cfg),
        ),
        Check(
            "twist invariance (1,0,0)",
            functools.partial(check_twist_invariance, ChargeVector(1, 0, 0), cfg),
        ),
        Check(
            "serre duality (0,2,1)",
            functools.partial(check_serre_duality, ChargeVector(0, 2, 1), cfg),
        ),
    ]


def corrupt(golden: Sequence[GoldenClass], seed: int) -> list[GoldenClass]:
    """A copy with one Poincare coefficient off by one, for exercising the harness."""
    rng = random.Random(seed)
    result = copy.deepcopy(list(golden))
    entry = rng.choice(result)
    index = rng.randrange(len(entry["poincare"]))
    entry["poincare"][index] += 1
    return result


def run_check(check: Check) -> CheckResult:
    tic = time.time()
    try:
        check.run()
    except (AssertionError, ArithmeticError, ValueError) as e:
        return CheckResult(check.name, False, time.time() - tic, str(e) or type(e).__name__)
    return CheckResult(check.name, True, time.time() - tic)


def run_checks(
    checks: Sequence[Check], jobs: int = 1, console: Console | None = None
) -> list[CheckResult]:
    """Run ``checks`` and report each one; results keep the input order."""
    console = console or Console(stderr=True)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(run_check, checks))
    else:
        results = [run_check(check) for check in checks]
    width = max((len(r.name) for r in results), default=0)
    for r in results:
        mark = "[green]✓[/green]" if r.ok else "[red]✗[/red]"
        line = f"    {mark} {r.name:{width}} {r.seconds:6.2f}s"
        console.print(line if r.ok else f"{line}  {r.message}", highlight=False)
    total = math.fsum(r.seconds for r in results)
    failed = sum(not r.ok for r in results)
    console.print(f"\n{len(results) - failed} passed, {failed} failed in {total:.2f}s")
    return results
