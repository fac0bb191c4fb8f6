from __future__ import annotations

import pytest

from conftest import identity_projection, region_from_screen
from geoglyph.basemap import dot_grid, mix_hash, render_base
from geoglyph.designspace import BaseMapKind
from geoglyph.errors import UnsupportedBaseMap
from geoglyph.geodata import RegionSet, point_in_rings, project_region
from geoglyph.scene import CircleMark, PathMark


def square_region(name="sq", size=50.0):
    return region_from_screen(name, [(0, 0), (size, 0), (size, size), (0, size)])


def square_set():
    return RegionSet.build([square_region()])


class TestDotGrid:
    def test_square_lattice_count(self):
        # 50x50 square, spacing 10: centers at 5,15,25,35,45 in each axis
        dots = dot_grid(square_region(), identity_projection(), spacing=10.0, radius=2.0)
        assert len(dots) == 25
        xs = sorted({d.cx for d in dots})
        assert xs == [5.0, 15.0, 25.0, 35.0, 45.0]

    def test_dots_never_touch(self):
        dots = dot_grid(square_region(), identity_projection(), spacing=10.0, radius=2.0)
        for i, a in enumerate(dots):
            for b in dots[i + 1:]:
                d2 = (a.cx - b.cx) ** 2 + (a.cy - b.cy) ** 2
                assert d2 > (a.r + b.r) ** 2

    def test_all_centers_inside(self):
        region = region_from_screen(
            "holed", [(0, 0), (50, 0), (50, 50), (0, 50)],
            holes=[[(10, 10), (40, 10), (40, 40), (10, 40)]])
        proj = identity_projection()
        dots = dot_grid(region, proj, spacing=7.0, radius=2.0)
        rings = [r for poly in project_region(region, proj) for r in poly]
        assert dots
        for d in dots:
            assert point_in_rings((d.cx, d.cy), rings)

    def test_spacing_guard(self):
        with pytest.raises(ValueError):
            dot_grid(square_region(), identity_projection(), spacing=4.0, radius=2.0)
        with pytest.raises(ValueError):
            dot_grid(square_region(), identity_projection(), spacing=4.0, radius=0.0)


class TestMixHash:
    def test_deterministic(self):
        assert mix_hash(7, "france", 3, 4) == mix_hash(7, "france", 3, 4)

    def test_sensitive_to_every_input(self):
        base = mix_hash(7, "france", 3, 4)
        assert mix_hash(8, "france", 3, 4) != base
        assert mix_hash(7, "franc", 3, 4) != base
        assert mix_hash(7, "france", 4, 3) != base

    def test_64_bit_range(self):
        for seed in range(20):
            h = mix_hash(seed, "x", 0, 0)
            assert 0 <= h < 1 << 64


class TestRenderBase:
    def test_implicit_is_empty(self):
        assert render_base(BaseMapKind.IMPLICIT, square_set(), identity_projection()) == []

    def test_minimal_political_paths(self):
        marks = render_base(BaseMapKind.MINIMAL_POLITICAL, square_set(), identity_projection())
        assert len(marks) == 1
        assert isinstance(marks[0], PathMark)
        assert marks[0].region == "sq"

    def test_region_key_ordering(self):
        rs = RegionSet.build([
            region_from_screen("zeta", [(60, 0), (70, 0), (70, 10), (60, 10)]),
            region_from_screen("alpha", [(0, 0), (10, 0), (10, 10), (0, 10)]),
        ])
        marks = render_base(BaseMapKind.MINIMAL_POLITICAL, rs, identity_projection())
        assert [m.region for m in marks] == ["alpha", "zeta"]

    def test_uniform_dots(self):
        marks = render_base(BaseMapKind.SHAPE_BASED_UNIFORM, square_set(),
                            identity_projection(), dot_spacing=10.0, dot_radius=2.0)
        assert len(marks) == 25
        assert all(isinstance(m, CircleMark) and m.r == 2.0 for m in marks)

    def test_varied_dots_seeded(self):
        kw = dict(dot_spacing=10.0, dot_radius=2.0)
        a = render_base(BaseMapKind.SHAPE_BASED_VARIED, square_set(),
                        identity_projection(), seed=1, **kw)
        b = render_base(BaseMapKind.SHAPE_BASED_VARIED, square_set(),
                        identity_projection(), seed=1, **kw)
        c = render_base(BaseMapKind.SHAPE_BASED_VARIED, square_set(),
                        identity_projection(), seed=2, **kw)
        assert [m.r for m in a] == [m.r for m in b]
        assert [m.r for m in a] != [m.r for m in c]
        for m in a:
            assert 1.0 <= m.r < 3.0  # radius stays in [0.5r, 1.5r)

    def test_unsupported_kinds(self):
        for kind in (BaseMapKind.TOPOGRAPHIC, BaseMapKind.STREET):
            with pytest.raises(UnsupportedBaseMap):
                render_base(kind, square_set(), identity_projection())
