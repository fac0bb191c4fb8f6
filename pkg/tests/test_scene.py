from __future__ import annotations

import re
import xml.etree.ElementTree as ET

import pytest

from geoglyph.errors import MalformedInput
from geoglyph.scene import (
    CircleMark,
    DefsMark,
    GradientStop,
    IconRefMark,
    LAYER_ORDER,
    PathMark,
    RadialGradientDef,
    RectMark,
    Style,
    TextMark,
    compose,
    fmt_num,
    path_from_rings,
    to_svg,
)


class TestFmtNum:
    def test_two_decimals(self):
        assert fmt_num(3) == "3.00"
        assert fmt_num(3.456) == "3.46"

    def test_half_up(self):
        assert fmt_num(1.005) == "1.01"
        assert fmt_num(2.675) == "2.68"
        assert fmt_num(0.125) == "0.13"

    def test_no_negative_zero(self):
        assert fmt_num(-0.0001) == "0.00"
        assert fmt_num(-0.0) == "0.00"

    def test_negative(self):
        assert fmt_num(-1.005) == "-1.01"  # half rounds away from zero

    def test_non_finite_rejected(self):
        with pytest.raises(MalformedInput):
            fmt_num(float("nan"))
        with pytest.raises(MalformedInput):
            fmt_num(float("inf"))


class TestCompose:
    def test_id_scheme(self):
        scene = compose((100, 100), base=[
            RectMark(0, 0, 1, 1, region="fr"),
            RectMark(1, 0, 1, 1, region="fr"),
            RectMark(2, 0, 1, 1, region="de"),
            CircleMark(5, 5, 1),
        ])
        ids = [m.id for m in scene.layer("base")]
        assert ids == ["base-fr-0", "base-fr-1", "base-de-0", "base-0"]

    def test_layer_order_fixed(self):
        scene = compose((100, 100),
                        legend=[RectMark(0, 0, 1, 1)],
                        base=[RectMark(0, 0, 1, 1)])
        assert [name for name, _ in scene.layers] == list(LAYER_ORDER)

    def test_unknown_layer_rejected(self):
        with pytest.raises(MalformedInput):
            compose((100, 100), sparkles=[RectMark(0, 0, 1, 1)])

    def test_ids_unique_across_layers(self):
        scene = compose(
            (100, 100),
            base=[RectMark(0, 0, 1, 1, region="a"), RectMark(0, 0, 1, 1, region="a-0")],
            encoding=[CircleMark(0, 0, 1, region="a"), CircleMark(0, 0, 1)],
            labels=[TextMark(0, 0, ("x",), region="a")])
        ids = [m.id for m in scene.all_marks()]
        assert len(ids) == len(set(ids))


def svg_of(**layers) -> bytes:
    return to_svg(compose((100.0, 50.0), **layers))


class TestToSvg:
    def test_empty_scene(self):
        out = svg_of()
        assert out == (b'<?xml version="1.0" encoding="UTF-8"?>\n'
                       b'<svg height="50" viewBox="0 0 100 50" width="100" '
                       b'xmlns="http://www.w3.org/2000/svg"></svg>\n')

    def test_alphabetical_attributes(self):
        out = svg_of(base=[RectMark(1, 2, 3, 4, style=Style(fill="#FF0000"))]).decode()
        m = re.search(r"<rect ([^/]*)/>", out)
        keys = [kv.split("=")[0] for kv in m.group(1).split()]
        assert keys == sorted(keys)

    def test_lowercase_colors(self):
        out = svg_of(base=[CircleMark(1, 2, 3, style=Style(fill="#AABBCC", stroke="#DDEEFF"))])
        assert b"#aabbcc" in out and b"#ddeeff" in out
        assert b"AABBCC" not in out

    def test_deterministic_bytes(self):
        layers = dict(base=[PathMark(path_from_rings([[(0, 0), (10, 0), (5, 8)]]))],
                      labels=[TextMark(5, 5, ("hi",))])
        assert svg_of(**layers) == svg_of(**layers)

    def test_coordinates_two_decimals(self):
        out = svg_of(base=[CircleMark(1.005, 2, 3)]).decode()
        assert 'cx="1.01"' in out

    def test_valid_xml(self):
        out = svg_of(base=[PathMark(path_from_rings([[(0, 0), (10, 0), (5, 8)]]))],
                     labels=[TextMark(5, 5, ("a", "b"), font_size=10)])
        root = ET.fromstring(out)
        assert root.tag.endswith("svg")

    def test_layer_groups_in_order(self):
        out = svg_of(base=[RectMark(0, 0, 1, 1)],
                     labels=[TextMark(1, 1, ("x",))],
                     legend=[RectMark(0, 0, 1, 1)]).decode()
        assert out.index('id="layer-base"') < out.index('id="layer-labels"') \
            < out.index('id="layer-legend"')

    def test_empty_layers_omitted(self):
        out = svg_of(base=[RectMark(0, 0, 1, 1)]).decode()
        assert "layer-encoding" not in out

    def test_multiline_text_tspans(self):
        out = svg_of(labels=[TextMark(10, 20, ("one", "two"), font_size=10)]).decode()
        assert out.count("<tspan") == 2
        assert 'dy="12.00"' in out  # 1.2 * font size

    def test_text_escaped(self):
        out = svg_of(labels=[TextMark(0, 0, ('a<b & "c"',))]).decode()
        assert "a&lt;b &amp;" in out

    def test_dangling_icon_ref_rejected(self):
        with pytest.raises(MalformedInput):
            svg_of(encoding=[IconRefMark(ref="icon-ghost", x=0, y=0, w=8, h=8)])

    def test_icon_ref_resolves(self):
        from geoglyph.icons import icon_symbol

        out = svg_of(defs=[DefsMark((icon_symbol("person"),))],
                     encoding=[IconRefMark(ref="icon-person", x=0, y=0, w=8, h=8)])
        assert b'href="#icon-person"' in out
        assert b'<symbol id="icon-person"' in out

    def test_gradient_serialized(self):
        grad = RadialGradientDef("halo-0", (
            GradientStop(0.0, "#ffcc00", 0.9),
            GradientStop(1.0, "#ffcc00", 0.0)))
        out = svg_of(defs=[DefsMark((grad,))]).decode()
        assert '<radialGradient id="halo-0">' in out
        assert 'stop-opacity="0.90"' in out
