"""Bottom-layer base map generation.

Shape-based maps rasterize each region into a square dot lattice anchored at
the region's own bounding box, so dot patterns are stable under viewport
changes.  Varied-size dots draw radii from a seeded 64-bit mix hash of
(seed, region key, i, j); the generator is fixed here so output is
bit-reproducible.
"""
from __future__ import annotations

from typing import Sequence

from .designspace import BaseMapKind, InfographicSpec
from .errors import UnsupportedBaseMap
from .geodata import Projection, Region, RegionSet, bounding_box, point_in_rings, project_region
from .scene import CircleMark, Mark, PathMark, Style, path_from_rings

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_hash(seed: int, key: str, i: int, j: int) -> int:
    """Deterministic 64-bit hash of (seed, region key, lattice i, lattice j)."""
    h = _splitmix64(seed & _MASK64)
    for byte in key.encode("utf-8"):
        h = _splitmix64(h ^ byte)
    h = _splitmix64(h ^ (i & _MASK64))
    h = _splitmix64(h ^ (j & _MASK64))
    return h


def dot_grid(region: Region, proj: Projection, spacing: float, radius: float
             ) -> list[CircleMark]:
    """Uniform dot lattice clipped to the region interior.

    Lattice origin is the region bbox top-left; the first center sits half a
    spacing in.  Requires spacing > 2*radius so dots cannot touch.
    """
    if not (spacing > 2.0 * radius > 0.0):
        raise ValueError("dot_grid requires spacing > 2*radius > 0")
    box = bounding_box(region, proj)
    rings = [ring for poly in project_region(region, proj) for ring in poly]
    dots = []
    j = 0
    cy = box.y + spacing / 2.0
    while cy < box.y1:
        i = 0
        cx = box.x + spacing / 2.0
        while cx < box.x1:
            if point_in_rings((cx, cy), rings):
                dots.append(CircleMark(cx=cx, cy=cy, r=radius, region=region.key))
            cx += spacing
            i += 1
        cy += spacing
        j += 1
    return dots


def _dot_grid_varied(region: Region, proj: Projection, spacing: float, radius: float,
                     seed: int) -> list[CircleMark]:
    """Same lattice as dot_grid; per-dot radius in [0.5r, 1.5r) from the hash."""
    if not (spacing > 2.0 * radius > 0.0):
        raise ValueError("dot_grid requires spacing > 2*radius > 0")
    box = bounding_box(region, proj)
    rings = [ring for poly in project_region(region, proj) for ring in poly]
    dots = []
    j = 0
    cy = box.y + spacing / 2.0
    while cy < box.y1:
        i = 0
        cx = box.x + spacing / 2.0
        while cx < box.x1:
            if point_in_rings((cx, cy), rings):
                u = mix_hash(seed, region.key, i, j) / float(1 << 64)
                dots.append(CircleMark(cx=cx, cy=cy, r=radius * (0.5 + u), region=region.key))
            cx += spacing
            i += 1
        cy += spacing
        j += 1
    return dots


def render_base(kind: BaseMapKind, regions: RegionSet, proj: Projection,
                fill: str = "#eceff1", stroke: str = "#90a4ae",
                dot_spacing: float = 8.0, dot_radius: float = 2.5,
                seed: int = 0) -> list[Mark]:
    """Marks for the bottom layer, ordered by region key."""
    if kind in (BaseMapKind.TOPOGRAPHIC, BaseMapKind.STREET):
        raise UnsupportedBaseMap(f"base map {kind.value} is not renderable")
    if kind is BaseMapKind.IMPLICIT:
        return []
    ordered = sorted(regions.regions, key=lambda r: r.key)
    marks: list[Mark] = []
    if kind is BaseMapKind.MINIMAL_POLITICAL:
        for region in ordered:
            rings = [ring for poly in project_region(region, proj) for ring in poly]
            marks.append(PathMark(
                segments=path_from_rings(rings),
                style=Style(fill=fill, stroke=stroke, stroke_width=0.75),
                region=region.key,
            ))
        return marks
    dot_style = Style(fill=fill)
    for region in ordered:
        if kind is BaseMapKind.SHAPE_BASED_UNIFORM:
            dots = dot_grid(region, proj, dot_spacing, dot_radius)
        else:
            dots = _dot_grid_varied(region, proj, dot_spacing, dot_radius, seed)
        marks.extend(
            CircleMark(cx=d.cx, cy=d.cy, r=d.r, style=dot_style, region=d.region)
            for d in dots
        )
    return marks


def render_base_from_spec(spec: InfographicSpec, regions: RegionSet, proj: Projection
                          ) -> list[Mark]:
    return render_base(
        spec.basemap, regions, proj,
        fill=spec.basemap_fill, stroke=spec.basemap_stroke,
        dot_spacing=spec.dot_spacing, dot_radius=spec.dot_radius, seed=spec.seed,
    )
