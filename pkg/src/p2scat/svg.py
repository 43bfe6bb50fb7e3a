"""SVG rendering of a diagram. Geometry is exact until the final coordinate formatting."""

import math
from fractions import Fraction
from pathlib import Path
from typing import Any

from jinja2 import Template

from p2scat.diagram import Diagram, Ray, phi
from p2scat.models import LatticeClass, PointQ

TEMPLATE = Path(__file__).parent / "templates" / "diagram.svg.j2"

PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#e377c2",
    "#17becf",
    "#bcbd22",
    "#7f7f7f",
]
MARGIN = 20
PARABOLA_SAMPLES = 200


def _fmt(value: float) -> str:
    return f"{value:.3f}"


class _Viewport:
    def __init__(self, d: Diagram, scale: float) -> None:
        region = d.region
        self.x_min = region.x_min
        self.y_top = region.s_max / 2
        widest = max(abs(region.x_min), abs(region.x_max))
        self.y_bottom = -widest * widest / 2
        self.scale = scale
        self.width = _fmt(float(region.x_max - region.x_min) * scale + 2 * MARGIN)
        self.height = _fmt(float(self.y_top - self.y_bottom) * scale + 2 * MARGIN)

    def __call__(self, p: PointQ) -> tuple[str, str]:
        x = float(p.x - self.x_min) * self.scale + MARGIN
        y = float(self.y_top - p.y) * self.scale + MARGIN
        return _fmt(x), _fmt(y)


def _visible_extent(ray: Ray, d: Diagram) -> Fraction:
    """Parameter where an unbounded ray leaves the drawing."""
    if ray.extent is not None:
        return ray.extent
    m, p, region = ray.m, ray.init, d.region
    if m.a == 0:
        return (region.s_max - p.s) / phi(p, m)
    bound = p.x - region.x_min if m.a > 0 else region.x_max - p.x
    return max(Fraction(0), bound / abs(m.a))


def render_svg(d: Diagram, scale: float = 100.0) -> str:
    view = _Viewport(d, scale)
    primitives = sorted({r.m.primitive() for r in d.rays})
    colors: dict[LatticeClass, str] = {
        m: PALETTE[i % len(PALETTE)] for i, m in enumerate(primitives)
    }

    rays: list[dict[str, Any]] = []
    for ray in d.rays:
        end = ray.init.moved(ray.m, _visible_extent(ray, d))
        (x1, y1), (x2, y2) = view(ray.init), view(end)
        grade = phi(ray.init, ray.m)
        rays.append(
            {
                "x1": x1,
                "y1": y1,
                "x2": x2,
                "y2": y2,
                "a": ray.m.a,
                "b": ray.m.b,
                "color": colors[ray.m.primitive()],
                "width": _fmt(max(0.5, 3.0 / (1.0 + float(grade)))),
                "initial": ray.init.s == 0,
            }
        )

    tangency = []
    for n in range(math.ceil(d.region.x_min), math.floor(d.region.x_max) + 1):
        cx, cy = view(PointQ(Fraction(n), Fraction(-n * n, 2)))
        tangency.append({"cx": cx, "cy": cy, "n": n})

    step = (d.region.x_max - d.region.x_min) / PARABOLA_SAMPLES
    parabola = " ".join(
        ",".join(view(PointQ(x, -x * x / 2)))
        for x in (d.region.x_min + k * step for k in range(PARABOLA_SAMPLES + 1))
    )

    return Template(TEMPLATE.read_text()).render(
        width=view.width,
        height=view.height,
        region=d.region,
        order_cap=d.order_cap,
        parabola=parabola,
        rays=rays,
        tangency=tangency,
    )
