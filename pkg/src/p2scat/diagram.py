"""Global scattering on the slice x^2 + 2y > 0.

Singular points are processed in increasing x^2 + 2y, which strictly increases along every ray, so
the ingoing data at a point is final when the point is popped from the queue.
"""

import heapq
import itertools
import logging
import math
import time
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Literal

from p2scat.errors import ConsistencyError, HypothesisError, SingularProbeError
from p2scat.exactalg import (
    Coefficient,
    HalfLaurent,
    MarkerPoly,
    RatFuncQ,
    coefficient_from_json,
)
from p2scat.localscat import LocalRay, complete_vertex, loop_check
from p2scat.models import LatticeClass, PointQ
from p2scat.qtorus import Grading, SkewForm, TruncationContext

logger = logging.getLogger(__name__)

# rays are drawn until their grade exceeds the order cap by this much
GRADE_SLACK = Fraction(1)

type Convention = Literal["minus", "plus"]


def phi(sigma: PointQ, m: LatticeClass) -> Fraction:
    return 2 * (-m.a * sigma.x - m.b)


def tangency_point(n: int) -> PointQ:
    return PointQ(Fraction(n), Fraction(-n * n, 2))


def initial_classes(n: int) -> tuple[LatticeClass, LatticeClass]:
    """(m_n^-, m_n^+)."""
    return LatticeClass(1, -n), LatticeClass(-1, n)


def initial_coefficient(ell: int, convention: Convention = "minus") -> RatFuncQ:
    sign = -1 if convention == "minus" or ell % 2 == 0 else 1
    return RatFuncQ.constant(Fraction(sign, ell)) / HalfLaurent.quantum_difference(ell)


def _fraction_json(v: Fraction) -> list[int]:
    return [v.numerator, v.denominator]


def _point_json(p: PointQ) -> list[list[int]]:
    return [_fraction_json(p.x), _fraction_json(p.y)]


def _point_from_json(data: list[list[int]]) -> PointQ:
    return PointQ(Fraction(*data[0]), Fraction(*data[1]))


@dataclass(frozen=True, slots=True)
class Region:
    x_min: Fraction
    x_max: Fraction
    s_max: Fraction

    def contains(self, p: PointQ) -> bool:
        return self.x_min < p.x < self.x_max and 0 < p.s <= self.s_max

    def translated(self, k: int) -> "Region":
        return Region(self.x_min + k, self.x_max + k, self.s_max)

    def mirrored(self) -> "Region":
        return Region(-self.x_max, -self.x_min, self.s_max)

    def to_json(self) -> dict[str, list[int]]:
        return {
            "x_min": _fraction_json(self.x_min),
            "x_max": _fraction_json(self.x_max),
            "s_max": _fraction_json(self.s_max),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, list[int]]) -> "Region":
        return cls(*(Fraction(*data[k]) for k in ("x_min", "x_max", "s_max")))


@dataclass(frozen=True, slots=True)
class Ray:
    init: PointQ
    m: LatticeClass
    function: Coefficient
    extent: Fraction | None = None

    @property
    def end(self) -> PointQ | None:
        return None if self.extent is None else self.init.moved(self.m, self.extent)

    def parameter_of(self, p: PointQ) -> Fraction | None:
        """t with init - t*m = p on the support, else None."""
        m = self.m
        if m.a:
            t = (self.init.x - p.x) / m.a
            if self.init.y - t * m.b != p.y:
                return None
        else:
            if self.init.x != p.x:
                return None
            t = (self.init.y - p.y) / m.b
        if t < 0 or (self.extent is not None and t > self.extent):
            return None
        return t

    def sort_key(self) -> tuple[Any, ...]:
        return (*self.init.sort_key(), self.m.a, self.m.b)

    def to_json(self) -> dict[str, Any]:
        return {
            "init": _point_json(self.init),
            "class": [self.m.a, self.m.b],
            "T": "inf" if self.extent is None else _fraction_json(self.extent),
            "function": self.function.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Ray":
        return cls(
            _point_from_json(data["init"]),
            LatticeClass(*data["class"]),
            coefficient_from_json(data["function"]),
            None if data["T"] == "inf" else Fraction(*data["T"]),
        )


@dataclass(frozen=True, slots=True)
class VertexRecord:
    point: PointQ
    ingoing: tuple[LatticeClass, ...]
    outgoing: tuple[LatticeClass, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "point": _point_json(self.point),
            "ingoing": [[m.a, m.b] for m in self.ingoing],
            "outgoing": [[m.a, m.b] for m in self.outgoing],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "VertexRecord":
        return cls(
            _point_from_json(data["point"]),
            tuple(LatticeClass(*m) for m in data["ingoing"]),
            tuple(LatticeClass(*m) for m in data["outgoing"]),
        )


@dataclass(frozen=True)
class Diagram:
    rays: tuple[Ray, ...]
    region: Region
    order_cap: Fraction
    vertex_log: tuple[VertexRecord, ...] = ()
    form: SkewForm = field(default_factory=SkewForm)
    degree_cap: int | None = None

    @property
    def markers(self) -> bool:
        return self.degree_cap is not None

    def zero(self) -> Coefficient:
        if self.degree_cap is None:
            return RatFuncQ.zero()
        return MarkerPoly((), self.degree_cap)

    def unit(self) -> Coefficient:
        if self.degree_cap is None:
            return RatFuncQ.one()
        return MarkerPoly.constant(RatFuncQ.one(), self.degree_cap)

    def rays_of_class(self, m: LatticeClass) -> list[Ray]:
        return [r for r in self.rays if r.m == m]

    def to_json(self) -> dict[str, Any]:
        return {
            "region": self.region.to_json(),
            "order_cap": _fraction_json(self.order_cap),
            "form": {"kappa": self.form.kappa, "signed": self.form.signed},
            "degree_cap": self.degree_cap,
            "rays": [r.to_json() for r in self.rays],
            "vertex_log": [v.to_json() for v in self.vertex_log],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Diagram":
        return cls(
            rays=tuple(Ray.from_json(r) for r in data["rays"]),
            region=Region.from_json(data["region"]),
            order_cap=Fraction(*data["order_cap"]),
            vertex_log=tuple(VertexRecord.from_json(v) for v in data["vertex_log"]),
            form=SkewForm(data["form"]["kappa"], data["form"]["signed"]),
            degree_cap=data["degree_cap"],
        )


def initial_diagram(
    n_min: int,
    n_max: int,
    ell_max: int,
    *,
    region: Region | None = None,
    order_cap: Fraction | int | None = None,
    convention: Convention = "minus",
    degree_cap: int | None = None,
) -> Diagram:
    """Tangent segments at s_n for n_min <= n <= n_max, with all multiples up to ell_max.

    A ``degree_cap`` turns markers on: the class l*m drawn from s_n carries e_n^l.
    """
    if n_min > n_max or ell_max < 1:
        raise ValueError(f"Empty initial data: n in [{n_min}, {n_max}], ell_max={ell_max}")
    rays = []
    for n in range(n_min, n_max + 1):
        for m, ell in itertools.product(initial_classes(n), range(1, ell_max + 1)):
            f: Coefficient = initial_coefficient(ell, convention)
            if degree_cap is not None:
                f = MarkerPoly.marker(n, ell, f, degree_cap)
            rays.append(Ray(tangency_point(n), m * ell, f, Fraction(1, 2 * ell)))
    return Diagram(
        rays=tuple(sorted(rays, key=Ray.sort_key)),
        region=region or Region(Fraction(n_min - 1), Fraction(n_max + 1), Fraction(4)),
        order_cap=Fraction(ell_max if order_cap is None else order_cap),
        form=SkewForm(3, signed=convention == "minus"),
        degree_cap=degree_cap,
    )


@dataclass
class _Track:
    """A ray while the sweep is running; ``init`` moves forward when the function jumps."""

    ident: int
    init: PointQ
    m: LatticeClass
    function: Coefficient
    extent: Fraction
    end_key: Fraction = Fraction(0)
    bbox: tuple[Fraction, Fraction, Fraction, Fraction] = (Fraction(0),) * 4

    def __post_init__(self) -> None:
        self.reshape()

    def reshape(self) -> None:
        end = self.init.moved(self.m, self.extent)
        self.end_key = end.s
        self.bbox = (
            min(self.init.x, end.x),
            max(self.init.x, end.x),
            min(self.init.y, end.y),
            max(self.init.y, end.y),
        )

    def parameter_at(self, p: PointQ) -> Fraction:
        if self.m.a:
            return (self.init.x - p.x) / self.m.a
        return (self.init.y - p.y) / self.m.b

    def ray(self, extent: Fraction | None = None) -> Ray:
        return Ray(self.init, self.m, self.function, self.extent if extent is None else extent)


class _Sweep:
    def __init__(self, d: Diagram) -> None:
        self.d = d
        self.cap = d.order_cap
        self.tracks: dict[int, _Track] = {}
        self.finished: list[Ray] = []
        self.log: list[VertexRecord] = []
        self.queue: list[tuple[Fraction, Fraction, Fraction]] = []
        self.events: dict[PointQ, set[int]] = {}
        self.now = Fraction(0)
        self._ids = itertools.count()

    def clip(self, p: PointQ, m: LatticeClass) -> Fraction:
        """Largest parameter keeping the ray useful inside the region."""
        region = self.d.region
        if m.a == 0:
            return (region.s_max - p.s) / phi(p, m)
        limit = (self.cap + GRADE_SLACK - phi(p, m)) / (2 * m.a * m.a)
        if m.a > 0:
            limit = min(limit, (p.x - region.x_min) / m.a)
        else:
            limit = min(limit, (region.x_max - p.x) / -m.a)
        return limit

    def add(self, init: PointQ, m: LatticeClass, f: Coefficient, extent: Fraction | None) -> None:
        if extent is None:
            extent = self.clip(init, m)
        if extent <= 0:
            return
        track = _Track(next(self._ids), init, m, f, extent)
        self.tracks[track.ident] = track
        if init.s > self.now and self.d.region.contains(init):
            self.schedule(init, track.ident)
        self.intersect(track)

    def schedule(self, p: PointQ, *idents: int) -> None:
        if p not in self.events:
            self.events[p] = set()
            heapq.heappush(self.queue, p.sort_key())
        self.events[p].update(idents)

    def intersect(self, u: _Track) -> None:
        region = self.d.region
        for v in list(self.tracks.values()):
            if v.ident == u.ident or v.end_key <= self.now:
                continue
            if (
                u.bbox[1] < v.bbox[0]
                or v.bbox[1] < u.bbox[0]
                or u.bbox[3] < v.bbox[2]
                or v.bbox[3] < u.bbox[2]
            ):
                continue
            det = u.m.cross(v.m)
            if det == 0:
                continue
            dx, dy = u.init.x - v.init.x, u.init.y - v.init.y
            t = (v.m.a * dy - v.m.b * dx) / det
            s = (u.m.a * dy - u.m.b * dx) / det
            if not (0 <= t <= u.extent and 0 <= s <= v.extent):
                continue
            p = u.init.moved(u.m, t)
            if p.s > self.now and region.contains(p):
                self.schedule(p, u.ident, v.ident)

    def run(self) -> Diagram:
        tic = time.time()
        for ray in sorted(self.d.rays, key=Ray.sort_key):
            self.add(ray.init, ray.m, ray.function, ray.extent)
        while self.queue:
            s, x, y = heapq.heappop(self.queue)
            p = PointQ(x, y)
            self.now = s
            self.process(p, self.events.pop(p))

        rays = self.finished + [t.ray() for t in self.tracks.values()]
        result = replace(self.d, rays=_normalize(rays), vertex_log=tuple(self.log))
        logger.info(
            "scattered %d vertices into %d rays in %.2fs",
            len(self.log),
            len(result.rays),
            time.time() - tic,
        )
        return result

    def process(self, p: PointQ, idents: set[int]) -> None:
        starting: dict[int, Fraction] = {}
        ingoing: dict[int, Fraction] = {}
        for ident in idents:
            track = self.tracks.get(ident)
            if track is None:
                continue
            t = track.parameter_at(p)
            if phi(p, track.m) > self.cap:
                continue
            if t == 0:
                starting[ident] = t
            else:
                ingoing[ident] = t
        if not ingoing:
            return

        grading = Grading.at_point(p)
        local_in = [
            LocalRay(self.tracks[i].m, False, self.tracks[i].function, grading(self.tracks[i].m))
            for i in ingoing
        ]
        seeds = [
            LocalRay(self.tracks[i].m, True, self.tracks[i].function, grading(self.tracks[i].m))
            for i in starting
        ]
        for r in local_in:
            if r.grade < 1:
                raise HypothesisError(f"class ({r.m.a},{r.m.b}) has grade {r.grade} at {p}")

        if _interacting(local_in + seeds, self.cap):
            ctx = TruncationContext.generated(
                self.d.form, grading, self.cap, (r.m for r in local_in + seeds), self.d.unit()
            )
            out_rays = complete_vertex(local_in, ctx, seeds)
            if not loop_check(local_in, out_rays, ctx):
                raise ConsistencyError(f"loop check failed at ({p.x}, {p.y})")
            self.log.append(
                VertexRecord(
                    p,
                    tuple(sorted({r.m for r in local_in})),
                    tuple(sorted(r.m for r in out_rays)),
                )
            )
            out = {r.m: r.coefficient for r in out_rays}
        else:
            out = {r.m: r.coefficient for r in local_in}
            out.update({r.m: r.coefficient for r in seeds})

        for ident, t in ingoing.items():
            track = self.tracks[ident]
            new = out.pop(track.m, None)
            if t < track.extent:
                if new is not None and new == track.function:
                    continue
                self.finished.append(track.ray(t))
                if new is None or new.is_zero():
                    del self.tracks[ident]
                    continue
                track.init, track.function, track.extent = p, new, track.extent - t
                track.reshape()
            else:
                self.finished.append(track.ray())
                del self.tracks[ident]
                if new is not None:
                    out[track.m] = new

        for ident in starting:
            track = self.tracks[ident]
            new = out.pop(track.m, None)
            if new is None or new.is_zero():
                del self.tracks[ident]
            else:
                track.function = new

        for m in sorted(out):
            if not out[m].is_zero():
                self.add(p, m, out[m], None)


def _interacting(rays: list[LocalRay], cap: Fraction) -> bool:
    """Whether some non-collinear pair can produce a class within the cap."""
    return any(
        r1.grade + r2.grade <= cap and not r1.m.is_collinear(r2.m)
        for r1, r2 in itertools.combinations(rays, 2)
    )


def _normalize(rays: Iterable[Ray]) -> tuple[Ray, ...]:
    """Merge abutting rays of equal class and function, then sort."""
    starts: dict[tuple[PointQ, LatticeClass], Ray] = {}
    for ray in rays:
        starts[(ray.init, ray.m)] = ray
    heads = sorted(starts.values(), key=Ray.sort_key)
    merged: list[Ray] = []
    absorbed: set[tuple[PointQ, LatticeClass]] = set()
    for ray in heads:
        if (ray.init, ray.m) in absorbed:
            continue
        while ray.extent is not None:
            nxt = starts.get((ray.end, ray.m))
            if nxt is None or nxt.function != ray.function:
                break
            absorbed.add((nxt.init, nxt.m))
            extent = None if nxt.extent is None else ray.extent + nxt.extent
            ray = Ray(ray.init, ray.m, ray.function, extent)
        merged.append(ray)
    return tuple(sorted(merged, key=Ray.sort_key))


def scatter(d: Diagram) -> Diagram:
    """Consistent completion of ``d`` inside its region up to its order cap."""
    return _Sweep(d).run()


def psi_point(p: PointQ, k: int) -> PointQ:
    return PointQ(p.x + k, p.y - k * p.x - Fraction(k * k, 2))


def psi_class(m: LatticeClass, k: int) -> LatticeClass:
    return LatticeClass(m.a, m.b - k * m.a)


def _relabel(f: Coefficient, k: int, sign: int = 1) -> Coefficient:
    return f.shift_markers(k, sign) if isinstance(f, MarkerPoly) else f


def _transformed(
    d: Diagram,
    point: Callable[[PointQ], PointQ],
    cls: Callable[[LatticeClass], LatticeClass],
    relabel: Callable[[Coefficient], Coefficient],
    region: Region,
) -> Diagram:
    rays = [Ray(point(r.init), cls(r.m), relabel(r.function), r.extent) for r in d.rays]
    log = [
        VertexRecord(
            point(v.point),
            tuple(sorted(cls(m) for m in v.ingoing)),
            tuple(sorted(cls(m) for m in v.outgoing)),
        )
        for v in d.vertex_log
    ]
    return replace(
        d, rays=tuple(sorted(rays, key=Ray.sort_key)), region=region, vertex_log=tuple(log)
    )


def psi_translate(d: Diagram, k: int) -> Diagram:
    """Apply (x, y) -> (x + 1, y - x - 1/2) k times."""
    return _transformed(
        d,
        lambda p: psi_point(p, k),
        lambda m: psi_class(m, k),
        lambda f: _relabel(f, k),
        d.region.translated(k),
    )


def mirror(d: Diagram) -> Diagram:
    """The reflection x -> -x, (a, b) -> (-a, b)."""
    return _transformed(
        d,
        lambda p: PointQ(-p.x, p.y),
        lambda m: LatticeClass(-m.a, m.b),
        lambda f: _relabel(f, 0, -1),
        d.region.mirrored(),
    )


def quadratic_refinement(m: LatticeClass) -> int:
    return -1 if (m.a * m.b + m.a + m.b) % 2 else 1


def sign_twist(d: Diagram) -> Diagram:
    """Switch between the signed and unsigned conventions by z^m -> (-1)^(ab+a+b) z^m."""
    rays = [
        Ray(r.init, r.m, r.function.scale(quadratic_refinement(r.m)), r.extent) for r in d.rays
    ]
    return replace(
        d, rays=tuple(rays), form=SkewForm(d.form.kappa, signed=not d.form.signed)
    )


def function_at(d: Diagram, sigma: PointQ, m: LatticeClass) -> Coefficient:
    for ray in d.rays_of_class(m):
        t = ray.parameter_of(sigma)
        if t is None:
            continue
        if t == 0 or t == ray.extent:
            raise SingularProbeError(f"({sigma.x}, {sigma.y}) on class ({m.a},{m.b})")
        return ray.function
    return d.zero()


def region_for(center: Fraction, grade: Fraction, s_max: Fraction) -> Region:
    """Descendants of rays starting further than grade/2 away cannot reach ``center``."""
    half = grade / 2 + Fraction(1, 4)
    return Region(center - half, center + half, s_max)


def initial_for(region: Region, order_cap: Fraction, **kwargs: Any) -> Diagram:
    n_min, n_max = math.ceil(region.x_min), math.floor(region.x_max)
    return initial_diagram(
        n_min, n_max, max(1, math.ceil(order_cap)), region=region, order_cap=order_cap, **kwargs
    )
