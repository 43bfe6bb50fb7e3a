"""Run configuration: defaults, a flat key=value file, and command-line flags (flags win)."""

import dataclasses
import os
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from p2scat.diagram import Convention, Region
from p2scat.models import PointQ

CACHE_ENV = "P2SCAT_CACHE_DIR"


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Invalid rational: {text!r}. Use format like '3/2' or '4'") from e


def _parse_tuple(text: str, size: int, example: str) -> list[Fraction]:
    parts = text.split(",")
    if len(parts) != size:
        raise ValueError(f"Invalid value: {text!r}. Use format like '{example}'")
    return [parse_fraction(part) for part in parts]


def parse_region(text: str) -> Region:
    x_min, x_max, s_max = _parse_tuple(text, 3, "-3/2,3/2,4")
    if x_min >= x_max or s_max <= 0:
        raise ValueError(f"Empty region: {text!r}")
    return Region(x_min, x_max, s_max)


def parse_probe(text: str) -> PointQ:
    return PointQ(*_parse_tuple(text, 2, "-1/2,5"))


def parse_bool(text: str) -> bool:
    match text.strip().lower():
        case "1" | "true" | "yes" | "on":
            return True
        case "0" | "false" | "no" | "off":
            return False
        case _:
            raise ValueError(f"Invalid boolean: {text!r}")


def parse_convention(text: str) -> Convention:
    match text.strip():
        case "minus":
            return "minus"
        case "plus":
            return "plus"
        case _:
            raise ValueError(f"Invalid convention: {text!r}. Use 'minus' or 'plus'")


@dataclass(frozen=True)
class RunConfig:
    order_cap: Fraction | None = None
    region: Region | None = None
    probe: PointQ | None = None
    markers: bool = False
    retry_limit: int = 3
    convention: Convention = "minus"
    json_path: Path | None = None
    svg_path: Path | None = None
    seed: int = 0
    jobs: int = 1

    def echo(self) -> dict[str, Any]:
        """The configuration as JSON-ready values; feeding them back reproduces the run."""

        def show(value: Any) -> Any:
            match value:
                case Fraction():
                    return str(value)
                case Region(x_min=x_min, x_max=x_max, s_max=s_max):
                    return f"{x_min},{x_max},{s_max}"
                case PointQ(x=x, y=y):
                    return f"{x},{y}"
                case Path():
                    return str(value)
                case _:
                    return value

        return {f.name: show(getattr(self, f.name)) for f in dataclasses.fields(self)}


# config file key -> (RunConfig field, parser)
FIELDS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "order": ("order_cap", parse_fraction),
    "region": ("region", parse_region),
    "probe": ("probe", parse_probe),
    "markers": ("markers", parse_bool),
    "retry_limit": ("retry_limit", int),
    "convention": ("convention", parse_convention),
    "json": ("json_path", Path),
    "svg": ("svg_path", Path),
    "seed": ("seed", int),
    "jobs": ("jobs", int),
}


def read_config_file(path: Path) -> dict[str, str]:
    values = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in FIELDS:
            raise ValueError(f"Invalid config line {number} in {path}: {line!r}")
        values[key] = value.strip()
    return values


def build_config(file_values: Mapping[str, str], flags: Mapping[str, Any]) -> RunConfig:
    """Merge file values (strings) with already-parsed flags; ``None`` flags are unset."""
    kwargs: dict[str, Any] = {}
    for key, text in file_values.items():
        name, parse = FIELDS[key]
        try:
            kwargs[name] = parse(text)
        except ValueError as e:
            raise ValueError(f"Invalid value for {key!r}: {e}") from e
    kwargs.update({name: value for name, value in flags.items() if value is not None})
    return RunConfig(**kwargs)


def cache_dir() -> Path | None:
    if value := os.environ.get(CACHE_ENV):
        return Path(value)
    return None
