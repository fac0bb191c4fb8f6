"""Value-to-visual mappings shared by every encoder."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import MalformedInput


@dataclass(frozen=True)
class LinearScale:
    d0: float
    d1: float
    r0: float
    r1: float

    def __post_init__(self):
        if not (math.isfinite(self.d0) and math.isfinite(self.d1)) or self.d0 >= self.d1:
            raise MalformedInput(f"degenerate scale domain [{self.d0}, {self.d1}]")


def linear_map(v: float, s: LinearScale) -> float:
    """Linear interpolation with clamping to the range ends."""
    t = (v - s.d0) / (s.d1 - s.d0)
    t = max(0.0, min(1.0, t))
    return s.r0 + t * (s.r1 - s.r0)


class RampMode(Enum):
    RAMP = "ramp"
    CATEGORICAL = "categorical"


def parse_hex(color: str) -> tuple[int, int, int]:
    if len(color) != 7 or not color.startswith("#"):
        raise MalformedInput(f"bad hex color {color!r}")
    try:
        return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)
    except ValueError:
        raise MalformedInput(f"bad hex color {color!r}") from None


def format_hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


@dataclass(frozen=True)
class ColorRamp:
    stops: tuple[str, ...]
    mode: RampMode = RampMode.RAMP

    def __post_init__(self):
        need = 2 if self.mode is RampMode.RAMP else 1
        if len(self.stops) < need:
            raise MalformedInput(f"{self.mode.value} ramp needs at least {need} stops")
        for s in self.stops:
            parse_hex(s)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def color_at(t: float, ramp: ColorRamp) -> str:
    """Piecewise-linear sRGB interpolation; components round half up."""
    if ramp.mode is not RampMode.RAMP:
        raise MalformedInput("color_at requires a ramp, not a categorical palette")
    t = max(0.0, min(1.0, t))
    stops = [parse_hex(s) for s in ramp.stops]
    if t >= 1.0:
        return format_hex(stops[-1])
    scaled = t * (len(stops) - 1)
    i = int(math.floor(scaled))
    frac = scaled - i
    a, b = stops[i], stops[i + 1]
    rgb = tuple(_round_half_up(a[c] + frac * (b[c] - a[c])) for c in range(3))
    return format_hex(rgb)


def symbol_radius(v: float, v_max: float, r_max: float) -> float:
    """Area-proportional symbol sizing (square-root law)."""
    if v_max <= 0:
        raise MalformedInput("symbol_radius needs v_max > 0")
    if v < 0:
        raise MalformedInput("symbol_radius needs v >= 0")
    return r_max * math.sqrt(v / v_max)
