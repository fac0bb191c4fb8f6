from __future__ import annotations

import math
import random

import pytest

from geoglyph.geodata import (
    GeoPoint,
    Projection,
    ProjectionKind,
    Region,
    RegionSet,
    Ring,
)


def identity_projection(width: float = 100.0, height: float = 100.0) -> Projection:
    """Maps (lon, lat) to screen (lon, -lat) unchanged."""
    return Projection(kind=ProjectionKind.EQUIRECTANGULAR, width=width, height=height,
                      margin=0.0, scale=1.0, ox=0.0, oy=0.0)


def ring_from_screen(points) -> Ring:
    """Build a ring whose identity-projected screen coords equal `points`."""
    return Ring(tuple(GeoPoint(x, -y) for x, y in points))


def region_from_screen(name: str, rings, holes=()) -> Region:
    return Region.build(name, [(ring_from_screen(rings), [ring_from_screen(h) for h in holes])])


def star_polygon(rng: random.Random, n: int = 12, cx: float = 50.0, cy: float = 50.0,
                 r_min: float = 8.0, r_max: float = 40.0):
    """Random star-shaped (hence simple) polygon in screen coordinates."""
    pts = []
    for i in range(n):
        a = 2.0 * math.pi * i / n
        r = rng.uniform(r_min, r_max)
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return pts


@pytest.fixture(scope="session")
def world_regions() -> RegionSet:
    from geoglyph.cli import load_regions

    return load_regions(None)
