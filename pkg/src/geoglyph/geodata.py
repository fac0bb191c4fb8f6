"""Region boundaries, projections, and polygon primitives.

Everything downstream (base maps, encodings, labels, highlights) works in
screen space produced here.  All types are immutable after construction and
all operations are pure.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import DegenerateRegion, DuplicateRegion, MalformedInput, UnsupportedGeometry

MERCATOR_LAT_LIMIT = 85.051129


def normalize_key(name: str) -> str:
    """Join key: trimmed + Unicode case fold."""
    return name.strip().casefold()


@dataclass(frozen=True)
class GeoPoint:
    lon: float
    lat: float

    def __post_init__(self):
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise MalformedInput("coordinates must be finite")
        if not (-180.0 <= self.lon <= 180.0 and -90.0 <= self.lat <= 90.0):
            raise MalformedInput(f"coordinate out of range: ({self.lon}, {self.lat})")


@dataclass(frozen=True, eq=False)
class Ring:
    """Closed ring stored open (last point != first)."""

    points: tuple[GeoPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 3:
            raise MalformedInput("ring needs at least 3 points")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            if a.lon == b.lon and a.lat == b.lat:
                raise MalformedInput("ring has consecutive identical points")
        if self.signed_area() == 0.0:
            raise MalformedInput("ring has zero area")

    def signed_area(self) -> float:
        """Shoelace in lon/lat with y up; positive = counterclockwise."""
        pts = self.points
        total = 0.0
        for a, b in zip(pts, pts[1:] + pts[:1]):
            total += a.lon * b.lat - b.lon * a.lat
        return total / 2.0

    def reversed(self) -> "Ring":
        return Ring(tuple(reversed(self.points)))


@dataclass(frozen=True, eq=False)
class Region:
    name: str
    key: str
    polygons: tuple[tuple[Ring, tuple[Ring, ...]], ...]  # (outer, holes)

    @staticmethod
    def build(name: str, polygons: Iterable[tuple[Ring, Sequence[Ring]]]) -> "Region":
        """Normalize winding (outer CCW, holes CW) and derive the join key."""
        normed = []
        for outer, holes in polygons:
            if outer.signed_area() < 0:
                outer = outer.reversed()
            fixed_holes = tuple(h.reversed() if h.signed_area() > 0 else h for h in holes)
            normed.append((outer, fixed_holes))
        if not normed:
            raise MalformedInput(f"region {name!r} has no polygons")
        return Region(name=name, key=normalize_key(name), polygons=tuple(normed))

    def rings(self) -> Iterable[Ring]:
        for outer, holes in self.polygons:
            yield outer
            yield from holes

    def lonlat_bbox(self) -> tuple[float, float, float, float]:
        lons = [p.lon for r in self.rings() for p in r.points]
        lats = [p.lat for r in self.rings() for p in r.points]
        return min(lons), min(lats), max(lons), max(lats)


@dataclass(frozen=True, eq=False)
class RegionSet:
    regions: tuple[Region, ...]
    bbox: tuple[float, float, float, float]  # lon0, lat0, lon1, lat1

    @staticmethod
    def build(regions: Sequence[Region]) -> "RegionSet":
        keys = set()
        for r in regions:
            if r.key in keys:
                raise DuplicateRegion(f"duplicate region key {r.key!r}")
            keys.add(r.key)
        boxes = [r.lonlat_bbox() for r in regions]
        bbox = (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )
        return RegionSet(regions=tuple(regions), bbox=bbox)

    def get(self, key: str) -> Optional[Region]:
        for r in self.regions:
            if r.key == key:
                return r
        return None


class ProjectionKind(Enum):
    EQUIRECTANGULAR = "equirectangular"
    MERCATOR = "mercator"


def _raw(kind: ProjectionKind, lon: float, lat: float) -> tuple[float, float]:
    """Unfitted projection coordinates, y growing downward."""
    if kind is ProjectionKind.EQUIRECTANGULAR:
        return lon, -lat
    lat = max(-MERCATOR_LAT_LIMIT, min(MERCATOR_LAT_LIMIT, lat))
    phi = math.radians(lat)
    return math.radians(lon), -math.log(math.tan(math.pi / 4.0 + phi / 2.0))


@dataclass(frozen=True)
class Projection:
    """A projection kind plus the fit (scale + offset) into a viewport."""

    kind: ProjectionKind
    width: float
    height: float
    margin: float = 0.04
    scale: float = 1.0
    ox: float = 0.0
    oy: float = 0.0

    @staticmethod
    def fit(
        bbox: tuple[float, float, float, float],
        kind: ProjectionKind = ProjectionKind.EQUIRECTANGULAR,
        width: float = 800.0,
        height: float = 600.0,
        margin: float = 0.04,
    ) -> "Projection":
        lon0, lat0, lon1, lat1 = bbox
        x0, y1 = _raw(kind, lon0, lat0)
        x1, y0 = _raw(kind, lon1, lat1)
        bw, bh = x1 - x0, y1 - y0
        avail_w = width * (1.0 - 2.0 * margin)
        avail_h = height * (1.0 - 2.0 * margin)
        candidates = []
        if bw > 0:
            candidates.append(avail_w / bw)
        if bh > 0:
            candidates.append(avail_h / bh)
        scale = min(candidates) if candidates else 1.0
        ox = (width - scale * (x0 + x1)) / 2.0
        oy = (height - scale * (y0 + y1)) / 2.0
        return Projection(kind=kind, width=width, height=height, margin=margin,
                          scale=scale, ox=ox, oy=oy)


def project(p: GeoPoint, proj: Projection) -> tuple[float, float]:
    rx, ry = _raw(proj.kind, p.lon, p.lat)
    return rx * proj.scale + proj.ox, ry * proj.scale + proj.oy


def project_ring(ring: Ring, proj: Projection) -> list[tuple[float, float]]:
    return [project(p, proj) for p in ring.points]


def project_region(region: Region, proj: Projection) -> list[list[list[tuple[float, float]]]]:
    """Screen-space rings per polygon: [[outer, hole, hole...], ...]."""
    out = []
    for outer, holes in region.polygons:
        out.append([project_ring(outer, proj)] + [project_ring(h, proj) for h in holes])
    return out


# -- screen-space polygon primitives ----------------------------------------

def polygon_area(points: Sequence[tuple[float, float]]) -> float:
    """Absolute shoelace area of a closed ring given open."""
    total = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0


def _signed_area_centroid(points: Sequence[tuple[float, float]]) -> tuple[float, tuple[float, float]]:
    a = 0.0
    cx = cy = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        a += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    a /= 2.0
    if a == 0.0:
        return 0.0, (points[0][0], points[0][1])
    return a, (cx / (6.0 * a), cy / (6.0 * a))


_EDGE_EPS = 1e-12


def _on_segment(px, py, x0, y0, x1, y1) -> bool:
    dx, dy = x1 - x0, y1 - y0
    cross = (px - x0) * dy - (py - y0) * dx
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return (px - x0) ** 2 + (py - y0) ** 2 <= _EDGE_EPS
    if cross * cross > _EDGE_EPS * seg2:
        return False
    dot = (px - x0) * dx + (py - y0) * dy
    return -_EDGE_EPS <= dot <= seg2 + _EDGE_EPS


def point_in_rings(p: tuple[float, float], rings: Iterable[Sequence[tuple[float, float]]]) -> bool:
    """Even-odd rule across all rings; on-edge points count as outside."""
    px, py = p
    inside = False
    for ring in rings:
        n = len(ring)
        for i in range(n):
            x0, y0 = ring[i]
            x1, y1 = ring[(i + 1) % n]
            if _on_segment(px, py, x0, y0, x1, y1):
                return False
            if (y0 > py) != (y1 > py):
                xt = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
                if px < xt:
                    inside = not inside
    return inside


def point_in_region(p: tuple[float, float], region: Region, proj: Projection) -> bool:
    rings = [ring for poly in project_region(region, proj) for ring in poly]
    return point_in_rings(p, rings)


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    def intersects(self, other: "Rect", eps: float = 0.0) -> bool:
        return not (
            self.x1 <= other.x + eps
            or other.x1 <= self.x + eps
            or self.y1 <= other.y + eps
            or other.y1 <= self.y + eps
        )

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x1 and self.y <= py <= self.y1


def bounding_box(region: Region, proj: Projection) -> Rect:
    xs, ys = [], []
    for poly in project_region(region, proj):
        for ring in poly:
            for x, y in ring:
                xs.append(x)
                ys.append(y)
    return Rect(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def centroid(region: Region, proj: Projection) -> tuple[float, float]:
    """Area-weighted screen centroid, snapped inside when it falls outside."""
    projected = project_region(region, proj)
    total_area = 0.0
    acc_x = acc_y = 0.0
    for poly in projected:
        outer = poly[0]
        a, (cx, cy) = _signed_area_centroid(outer)
        w = abs(a)
        acc_x += cx * w
        acc_y += cy * w
        total_area += w
        for hole in poly[1:]:
            a, (cx, cy) = _signed_area_centroid(hole)
            w = abs(a)
            acc_x -= cx * w
            acc_y -= cy * w
            total_area -= w
    if total_area < 1e-9:
        raise DegenerateRegion(f"region {region.key!r} has no projected area")
    cx, cy = acc_x / total_area, acc_y / total_area
    rings = [ring for poly in projected for ring in poly]
    if point_in_rings((cx, cy), rings):
        return cx, cy
    box = bounding_box(region, proj)
    spacing = max(box.w, box.h) / 64.0
    for _ in range(4):
        best = None
        gx = box.x + spacing / 2.0
        while gx < box.x1:
            gy = box.y + spacing / 2.0
            while gy < box.y1:
                if point_in_rings((gx, gy), rings):
                    d = (gx - cx) ** 2 + (gy - cy) ** 2
                    if best is None or d < best[0]:
                        best = (d, gx, gy)
                gy += spacing
            gx += spacing
        if best is not None:
            return best[1], best[2]
        spacing /= 2.0
    raise DegenerateRegion(f"region {region.key!r} has no interior grid point")


# -- GeoJSON subset parsing --------------------------------------------------

def _parse_ring(coords, what: str) -> Ring:
    if not isinstance(coords, list) or len(coords) < 4:
        raise MalformedInput(f"{what}: ring must list at least 4 positions")
    pts = []
    for pos in coords:
        if not (isinstance(pos, list) and len(pos) >= 2):
            raise MalformedInput(f"{what}: bad position {pos!r}")
        pts.append(GeoPoint(float(pos[0]), float(pos[1])))
    if pts[0].lon == pts[-1].lon and pts[0].lat == pts[-1].lat:
        pts = pts[:-1]
    deduped = [pts[0]]
    for p in pts[1:]:
        if p.lon != deduped[-1].lon or p.lat != deduped[-1].lat:
            deduped.append(p)
    return Ring(tuple(deduped))


def parse_boundaries(data: bytes | str, name_property: str = "name") -> RegionSet:
    """Parse a GeoJSON FeatureCollection of Polygon/MultiPolygon features."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise MalformedInput("expected a FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list) or not features:
        raise MalformedInput("FeatureCollection has no features")
    regions = []
    for i, feat in enumerate(features):
        if not isinstance(feat, dict):
            raise MalformedInput(f"feature {i} is not an object")
        props = feat.get("properties") or {}
        name = props.get(name_property)
        if not isinstance(name, str) or not name.strip():
            raise MalformedInput(f"feature {i} lacks a {name_property!r} property")
        geom = feat.get("geometry")
        if not isinstance(geom, dict):
            raise MalformedInput(f"feature {i} ({name}) has no geometry")
        gtype = geom.get("type")
        coords = geom.get("coordinates")
        if gtype == "Polygon":
            poly_list = [coords]
        elif gtype == "MultiPolygon":
            poly_list = coords
        else:
            raise UnsupportedGeometry(f"feature {i} ({name}): geometry type {gtype!r}")
        if not isinstance(poly_list, list) or not poly_list:
            raise MalformedInput(f"feature {i} ({name}): empty coordinates")
        polygons = []
        for poly in poly_list:
            if not isinstance(poly, list) or not poly:
                raise MalformedInput(f"feature {i} ({name}): bad polygon")
            outer = _parse_ring(poly[0], name)
            holes = [_parse_ring(h, name) for h in poly[1:]]
            polygons.append((outer, holes))
        regions.append(Region.build(name, polygons))
    return RegionSet.build(regions)
