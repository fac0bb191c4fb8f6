from __future__ import annotations

import json
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import identity_projection, region_from_screen, star_polygon
from geoglyph.errors import DuplicateRegion, MalformedInput, UnsupportedGeometry
from geoglyph.geodata import (
    GeoPoint,
    Projection,
    ProjectionKind,
    Rect,
    bounding_box,
    centroid,
    parse_boundaries,
    point_in_region,
    point_in_rings,
    polygon_area,
    project,
)

SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def fc(features):
    return json.dumps({"type": "FeatureCollection", "features": features})


def square_feature(name, x0=0.0, y0=0.0, size=1.0):
    ring = [[x0, y0], [x0 + size, y0], [x0 + size, y0 + size], [x0, y0 + size], [x0, y0]]
    return {"type": "Feature", "properties": {"name": name},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


class TestParseBoundaries:
    def test_single_polygon(self):
        rs = parse_boundaries(fc([square_feature("A")]))
        assert len(rs.regions) == 1
        assert rs.regions[0].key == "a"

    def test_linestring_rejected(self):
        bad = fc([{"type": "Feature", "properties": {"name": "A"},
                   "geometry": {"type": "LineString",
                                "coordinates": [[0, 0], [1, 1]]}}])
        with pytest.raises(UnsupportedGeometry):
            parse_boundaries(bad)

    def test_duplicate_keys_rejected(self):
        doc = fc([square_feature("France"), square_feature(" FRANCE ", x0=2.0)])
        with pytest.raises(DuplicateRegion):
            parse_boundaries(doc)

    def test_not_json(self):
        with pytest.raises(MalformedInput):
            parse_boundaries(b"not json")

    def test_winding_normalized(self):
        # clockwise input ring gets flipped to counterclockwise
        ring = [[0, 0], [0, 1], [1, 1], [1, 0], [0, 0]]
        rs = parse_boundaries(fc([{
            "type": "Feature", "properties": {"name": "A"},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}]))
        outer = rs.regions[0].polygons[0][0]
        assert outer.signed_area() > 0

    def test_roundtrip_counts(self):
        doc = fc([square_feature("A"), square_feature("B", x0=3.0)])
        rs = parse_boundaries(doc)
        # serialize back and reparse
        features = []
        for region in rs.regions:
            coords = []
            for outer, holes in region.polygons:
                rings = [[[p.lon, p.lat] for p in r.points] + [[r.points[0].lon, r.points[0].lat]]
                         for r in (outer, *holes)]
                coords.append(rings)
            features.append({"type": "Feature", "properties": {"name": region.name},
                             "geometry": {"type": "MultiPolygon", "coordinates": coords}})
        rs2 = parse_boundaries(fc(features))
        assert len(rs2.regions) == len(rs.regions)
        for a, b in zip(rs.regions, rs2.regions):
            assert [len(r.points) for r in a.rings()] == [len(r.points) for r in b.rings()]


class TestProject:
    def test_world_center(self):
        proj = Projection.fit((-180, -90, 180, 90), ProjectionKind.EQUIRECTANGULAR,
                              800, 400, margin=0.0)
        assert project(GeoPoint(0, 0), proj) == (400.0, 200.0)

    def test_world_corner(self):
        proj = Projection.fit((-180, -90, 180, 90), ProjectionKind.EQUIRECTANGULAR,
                              800, 400, margin=0.0)
        x, y = project(GeoPoint(-180, 90), proj)
        assert x == pytest.approx(0.0)
        assert y == pytest.approx(0.0)

    def test_mercator_clamp(self):
        proj = Projection.fit((-180, -80, 180, 80), ProjectionKind.MERCATOR, 800, 600)
        assert project(GeoPoint(10, 89), proj) == project(GeoPoint(10, 85.051129), proj)

    @given(lon1=st.floats(-180, 179), lat1=st.floats(-84, 83),
           dlon=st.floats(0.001, 1), dlat=st.floats(0.001, 1),
           kind=st.sampled_from(list(ProjectionKind)))
    def test_monotone(self, lon1, lat1, dlon, dlat, kind):
        # latitudes stay below the web mercator clamp
        proj = Projection.fit((-180, -90, 180, 90), kind, 800, 600)
        x1, y1 = project(GeoPoint(lon1, lat1), proj)
        x2, y2 = project(GeoPoint(min(180, lon1 + dlon), min(84, lat1 + dlat)), proj)
        assert x1 < x2
        assert y2 < y1  # larger latitude is higher on screen

    def test_fit_margin(self):
        proj = Projection.fit((-180, -90, 180, 90), ProjectionKind.EQUIRECTANGULAR,
                              800, 400, margin=0.04)
        x0, _ = project(GeoPoint(-180, 0), proj)
        x1, _ = project(GeoPoint(180, 0), proj)
        assert x0 == pytest.approx(800 * 0.04)
        assert x1 == pytest.approx(800 * 0.96)


class TestPolygonArea:
    def test_unit_square(self):
        assert polygon_area(SQUARE) == 1.0

    def test_reversed(self):
        assert polygon_area(list(reversed(SQUARE))) == 1.0

    def test_l_shape_against_raster_oracle(self):
        # concave L-shaped hexagon
        pts = [(0, 0), (10, 0), (10, 4), (4, 4), (4, 10), (0, 10)]
        assert polygon_area(pts) == pytest.approx(64.0)
        assert polygon_area(pts) == pytest.approx(raster_area(pts), rel=0.01)

    @given(dx=st.floats(-50, 50), dy=st.floats(-50, 50), s=st.floats(0.1, 10))
    def test_translation_and_scaling(self, dx, dy, s):
        pts = [(0, 0), (3, 0), (3, 2), (1, 2), (1, 1), (0, 1)]
        base = polygon_area(pts)
        moved = [(x + dx, y + dy) for x, y in pts]
        assert polygon_area(moved) == pytest.approx(base, rel=1e-9)
        scaled = [(x * s, y * s) for x, y in pts]
        assert polygon_area(scaled) == pytest.approx(base * s * s, rel=1e-9)


def raster_area(pts, n=1000):
    """Independent oracle: count cell centers inside via matplotlib."""
    from matplotlib.path import Path as MplPath

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    path = MplPath(pts + [pts[0]])
    import numpy as np

    gx = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
    gy = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
    xx, yy = np.meshgrid(gx, gy)
    inside = path.contains_points(np.column_stack([xx.ravel(), yy.ravel()]))
    cell = (x1 - x0) / n * (y1 - y0) / n
    return inside.sum() * cell


def winding_number_inside(p, pts):
    """Independent point-in-polygon oracle (winding number)."""
    wn = 0
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        if y0 <= p[1]:
            if y1 > p[1] and (x1 - x0) * (p[1] - y0) - (p[0] - x0) * (y1 - y0) > 0:
                wn += 1
        elif y1 <= p[1] and (x1 - x0) * (p[1] - y0) - (p[0] - x0) * (y1 - y0) < 0:
            wn -= 1
    return wn != 0


def dist_to_edges(p, pts):
    best = math.inf
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        dx, dy = x1 - x0, y1 - y0
        t = max(0.0, min(1.0, ((p[0] - x0) * dx + (p[1] - y0) * dy) / (dx * dx + dy * dy)))
        best = min(best, math.hypot(p[0] - (x0 + t * dx), p[1] - (y0 + t * dy)))
    return best


class TestPointInRegion:
    def test_inside_unit_square(self):
        region = region_from_screen("a", SQUARE)
        assert point_in_region((0.5, 0.5), region, identity_projection())

    def test_outside_unit_square(self):
        region = region_from_screen("a", SQUARE)
        assert not point_in_region((2.0, 2.0), region, identity_projection())

    def test_on_edge_is_outside(self):
        region = region_from_screen("a", SQUARE)
        assert not point_in_region((0.5, 0.0), region, identity_projection())
        assert not point_in_region((0.0, 0.5), region, identity_projection())

    def test_hole(self):
        region = region_from_screen(
            "a", [(0, 0), (10, 0), (10, 10), (0, 10)],
            holes=[[(4, 4), (6, 4), (6, 6), (4, 6)]])
        proj = identity_projection()
        assert point_in_region((1, 1), region, proj)
        assert not point_in_region((5, 5), region, proj)

    def test_against_winding_oracle(self):
        rng = random.Random(42)
        pts = star_polygon(rng, n=17)
        rng2 = random.Random(7)
        checked = 0
        for _ in range(1000):
            p = (rng2.uniform(0, 100), rng2.uniform(0, 100))
            if dist_to_edges(p, pts) < 1e-9:
                continue
            checked += 1
            assert point_in_rings(p, [pts]) == winding_number_inside(p, pts)
        assert checked > 900


class TestCentroid:
    def test_unit_square(self):
        region = region_from_screen("a", SQUARE)
        cx, cy = centroid(region, identity_projection())
        assert (cx, cy) == pytest.approx((0.5, 0.5))

    def test_disjoint_squares_snap(self):
        from geoglyph.geodata import Region

        from conftest import ring_from_screen

        region = Region.build("a", [
            (ring_from_screen(SQUARE), []),
            (ring_from_screen([(2, 0), (3, 0), (3, 1), (2, 1)]), []),
        ])
        proj = identity_projection()
        cx, cy = centroid(region, proj)
        # naive centroid x=1.5 lies between the squares; result must be interior
        assert point_in_region((cx, cy), region, proj)

    def test_crescent_interior(self):
        # crescent: big circle minus offset hole bite, approximated by arcs
        outer = []
        for i in range(24):
            a = 2 * math.pi * i / 24
            outer.append((50 + 30 * math.cos(a), 50 + 30 * math.sin(a)))
        region = region_from_screen(
            "c", outer, holes=[[(45 + 22 * math.cos(2 * math.pi * i / 24),
                                 50 + 22 * math.sin(2 * math.pi * i / 24))
                                for i in range(24)]])
        proj = identity_projection()
        p = centroid(region, proj)
        assert point_in_region(p, region, proj)

    def test_convex_no_snap(self):
        rng = random.Random(3)
        for _ in range(10):
            # random triangle is convex
            pts = star_polygon(rng, n=3)
            region = region_from_screen("t", pts)
            proj = identity_projection()
            p = centroid(region, proj)
            assert point_in_region(p, region, proj)


class TestBoundingBox:
    def test_unit_square(self):
        region = region_from_screen("a", SQUARE)
        assert bounding_box(region, identity_projection()) == Rect(0.0, 0.0, 1.0, 1.0)

    def test_two_squares(self):
        from geoglyph.geodata import Region

        from conftest import ring_from_screen

        region = Region.build("a", [
            (ring_from_screen(SQUARE), []),
            (ring_from_screen([(2, 2), (3, 2), (3, 3), (2, 3)]), []),
        ])
        assert bounding_box(region, identity_projection()) == Rect(0.0, 0.0, 3.0, 3.0)

    def test_all_vertices_inside(self):
        rng = random.Random(9)
        pts = star_polygon(rng)
        region = region_from_screen("s", pts)
        proj = identity_projection()
        box = bounding_box(region, proj)
        from geoglyph.geodata import project_region

        for poly in project_region(region, proj):
            for ring in poly:
                for x, y in ring:
                    assert box.x <= x <= box.x1
                    assert box.y <= y <= box.y1
