"""Scene-graph model and byte-deterministic SVG serialization.

Marks are plain dataclasses; `compose` slots them into the fixed layer order
and assigns stable ids; `to_svg` emits a standalone SVG 1.1 document with
alphabetical attribute order and fixed 2-decimal coordinate formatting, so
identical scenes always serialize to identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape

from .errors import DuplicateId, MalformedInput

# segment commands: ("M", x, y) ("L", x, y) ("Q", cx, cy, x, y) ("Z",)
Segment = tuple


@dataclass(frozen=True)
class Style:
    fill: Optional[str] = None
    stroke: Optional[str] = None
    stroke_width: Optional[float] = None
    opacity: Optional[float] = None


@dataclass(frozen=True)
class PathMark:
    segments: tuple[Segment, ...]
    style: Style = Style()
    region: Optional[str] = None
    id: str = ""


@dataclass(frozen=True)
class RectMark:
    x: float
    y: float
    w: float
    h: float
    rx: float = 0.0
    style: Style = Style()
    region: Optional[str] = None
    id: str = ""


@dataclass(frozen=True)
class CircleMark:
    cx: float
    cy: float
    r: float
    style: Style = Style()
    region: Optional[str] = None
    id: str = ""


@dataclass(frozen=True)
class TextMark:
    x: float
    y: float
    lines: tuple[str, ...]
    font_size: float = 10.0
    anchor: str = "middle"  # start | middle | end
    style: Style = Style()
    region: Optional[str] = None
    id: str = ""


@dataclass(frozen=True)
class IconRefMark:
    ref: str
    x: float
    y: float
    w: float
    h: float
    style: Style = Style()
    region: Optional[str] = None
    id: str = ""


@dataclass(frozen=True)
class GroupMark:
    children: tuple["Mark", ...]
    translate: tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0
    style: Style = Style()
    region: Optional[str] = None
    id: str = ""


@dataclass(frozen=True)
class GradientStop:
    offset: float
    color: str
    opacity: float = 1.0


@dataclass(frozen=True)
class RadialGradientDef:
    def_id: str
    stops: tuple[GradientStop, ...]


@dataclass(frozen=True)
class SymbolDef:
    """Named reusable symbol: path data in a unit viewBox."""

    def_id: str
    segments: tuple[Segment, ...]
    view_box: tuple[float, float, float, float] = (0.0, 0.0, 24.0, 24.0)
    fill: Optional[str] = None


@dataclass(frozen=True)
class DefsMark:
    defs: tuple[Union[RadialGradientDef, SymbolDef], ...]
    region: Optional[str] = None
    id: str = ""


Mark = Union[PathMark, RectMark, CircleMark, TextMark, IconRefMark, GroupMark, DefsMark]

LAYER_ORDER = (
    "defs",
    "base",
    "encoding",
    "highlight_under",
    "flow",
    "highlight_over",
    "labels",
    "legend",
    "insets",
)

_LAYER_PREFIX = {
    "defs": "def",
    "base": "base",
    "encoding": "enc",
    "highlight_under": "hlu",
    "flow": "flow",
    "highlight_over": "hlo",
    "labels": "lab",
    "legend": "leg",
    "insets": "inset",
}


@dataclass(frozen=True)
class SceneGraph:
    viewport: tuple[float, float]
    layers: tuple[tuple[str, tuple[Mark, ...]], ...]  # (layer name, marks) in LAYER_ORDER

    def all_marks(self):
        for _, marks in self.layers:
            yield from marks

    def layer(self, name: str) -> tuple[Mark, ...]:
        for n, marks in self.layers:
            if n == name:
                return marks
        return ()


def path_from_rings(rings: Sequence[Sequence[tuple[float, float]]]) -> tuple[Segment, ...]:
    segs: list[Segment] = []
    for ring in rings:
        segs.append(("M", ring[0][0], ring[0][1]))
        for x, y in ring[1:]:
            segs.append(("L", x, y))
        segs.append(("Z",))
    return tuple(segs)


def polyline_segments(points: Sequence[tuple[float, float]]) -> tuple[Segment, ...]:
    segs: list[Segment] = [("M", points[0][0], points[0][1])]
    for x, y in points[1:]:
        segs.append(("L", x, y))
    return tuple(segs)


def compose(viewport: tuple[float, float], **layer_marks: Sequence[Mark]) -> SceneGraph:
    """Slot marks into the fixed layer order and assign deterministic ids."""
    if viewport[0] <= 0 or viewport[1] <= 0:
        raise MalformedInput("viewport must be positive")
    unknown = set(layer_marks) - set(LAYER_ORDER)
    if unknown:
        raise MalformedInput(f"unknown layers: {sorted(unknown)}")
    seen_ids: set[str] = set()
    layers = []
    for name in LAYER_ORDER:
        prefix = _LAYER_PREFIX[name]
        out = []
        region_counts: dict[str, int] = {}
        anon = 0
        for mark in layer_marks.get(name, ()):
            if mark.region is not None:
                n = region_counts.get(mark.region, 0)
                region_counts[mark.region] = n + 1
                mark_id = f"{prefix}-{mark.region}-{n}"
            else:
                mark_id = f"{prefix}-{anon}"
                anon += 1
            if mark_id in seen_ids:
                raise DuplicateId(f"duplicate mark id {mark_id!r}")
            seen_ids.add(mark_id)
            out.append(replace(mark, id=mark_id))
        layers.append((name, tuple(out)))
    return SceneGraph(viewport=(float(viewport[0]), float(viewport[1])), layers=tuple(layers))


# -- serialization -----------------------------------------------------------

_TWO_PLACES = Decimal("0.01")


def fmt_num(x: float) -> str:
    """Exactly 2 decimal places, half-up, no negative zero."""
    if not math.isfinite(x):
        raise MalformedInput(f"non-finite coordinate {x!r}")
    d = Decimal(repr(float(x))).quantize(_TWO_PLACES, rounding=ROUND_HALF_UP)
    if d == 0:
        d = abs(d)
    return f"{d:.2f}"


def _fmt_dim(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else fmt_num(x)


def _style_attrs(style: Style) -> dict[str, str]:
    attrs = {}
    if style.fill is not None:
        attrs["fill"] = style.fill.lower()
    if style.stroke is not None:
        attrs["stroke"] = style.stroke.lower()
    if style.stroke_width is not None:
        attrs["stroke-width"] = fmt_num(style.stroke_width)
    if style.opacity is not None:
        attrs["opacity"] = fmt_num(style.opacity)
    return attrs


def _tag(name: str, attrs: dict[str, str], content: Optional[str] = None) -> str:
    parts = [name]
    for k in sorted(attrs):
        parts.append(f'{k}="{escape(attrs[k], {chr(34): "&quot;"})}"')
    head = " ".join(parts)
    if content is None:
        return f"<{head}/>"
    return f"<{head}>{content}</{name}>"


def _segments_to_d(segments: Sequence[Segment]) -> str:
    out = []
    for seg in segments:
        cmd = seg[0]
        if cmd == "Z":
            out.append("Z")
        else:
            out.append(cmd + " " + " ".join(fmt_num(v) for v in seg[1:]))
    return " ".join(out)


def _serialize_def(d) -> str:
    if isinstance(d, RadialGradientDef):
        stops = "".join(
            _tag("stop", {
                "offset": fmt_num(s.offset),
                "stop-color": s.color.lower(),
                "stop-opacity": fmt_num(s.opacity),
            })
            for s in d.stops
        )
        return _tag("radialGradient", {"id": d.def_id}, stops)
    if isinstance(d, SymbolDef):
        attrs = {} if d.fill is None else {"fill": d.fill.lower()}
        inner = _tag("path", {"d": _segments_to_d(d.segments), **attrs})
        vb = " ".join(_fmt_dim(v) for v in d.view_box)
        return _tag("symbol", {"id": d.def_id, "viewBox": vb}, inner)
    raise MalformedInput(f"unknown definition {d!r}")


def _serialize_mark(mark: Mark) -> str:
    ident = {"id": mark.id} if mark.id else {}
    if isinstance(mark, DefsMark):
        return _tag("defs", ident, "".join(_serialize_def(d) for d in mark.defs))
    if isinstance(mark, PathMark):
        return _tag("path", {**ident, "d": _segments_to_d(mark.segments),
                             **_style_attrs(mark.style)})
    if isinstance(mark, RectMark):
        attrs = {**ident, "x": fmt_num(mark.x), "y": fmt_num(mark.y),
                 "width": fmt_num(mark.w), "height": fmt_num(mark.h),
                 **_style_attrs(mark.style)}
        if mark.rx:
            attrs["rx"] = fmt_num(mark.rx)
        return _tag("rect", attrs)
    if isinstance(mark, CircleMark):
        return _tag("circle", {**ident, "cx": fmt_num(mark.cx), "cy": fmt_num(mark.cy),
                               "r": fmt_num(mark.r), **_style_attrs(mark.style)})
    if isinstance(mark, TextMark):
        spans = []
        for i, line in enumerate(mark.lines):
            dy = "0" if i == 0 else fmt_num(mark.font_size * 1.2)
            spans.append(_tag("tspan", {"dy": dy, "x": fmt_num(mark.x)}, escape(line)))
        return _tag("text", {
            **ident, "x": fmt_num(mark.x), "y": fmt_num(mark.y),
            "font-family": "sans-serif", "font-size": fmt_num(mark.font_size),
            "text-anchor": mark.anchor, **_style_attrs(mark.style),
        }, "".join(spans))
    if isinstance(mark, IconRefMark):
        return _tag("use", {**ident, "href": f"#{mark.ref}",
                            "x": fmt_num(mark.x), "y": fmt_num(mark.y),
                            "width": fmt_num(mark.w), "height": fmt_num(mark.h),
                            **_style_attrs(mark.style)})
    if isinstance(mark, GroupMark):
        attrs = {**ident, **_style_attrs(mark.style)}
        tx, ty = mark.translate
        transforms = []
        if tx or ty:
            transforms.append(f"translate({fmt_num(tx)} {fmt_num(ty)})")
        if mark.scale != 1.0:
            transforms.append(f"scale({fmt_num(mark.scale)})")
        if transforms:
            attrs["transform"] = " ".join(transforms)
        return _tag("g", attrs, "".join(_serialize_mark(c) for c in mark.children))
    raise MalformedInput(f"unknown mark {mark!r}")


def collect_def_ids(scene: SceneGraph) -> set[str]:
    ids: set[str] = set()

    def walk(mark: Mark):
        if isinstance(mark, DefsMark):
            ids.update(d.def_id for d in mark.defs)
        elif isinstance(mark, GroupMark):
            for c in mark.children:
                walk(c)

    for mark in scene.all_marks():
        walk(mark)
    return ids


def _check_refs(scene: SceneGraph):
    def_ids = collect_def_ids(scene)

    def walk(mark: Mark):
        if isinstance(mark, IconRefMark) and mark.ref not in def_ids:
            raise MalformedInput(f"icon reference {mark.ref!r} has no definition")
        if isinstance(mark, GroupMark):
            for c in mark.children:
                walk(c)

    for mark in scene.all_marks():
        walk(mark)


def to_svg(scene: SceneGraph) -> bytes:
    """Serialize to a standalone, byte-deterministic SVG document."""
    _check_refs(scene)
    w, h = scene.viewport
    body = []
    for name, marks in scene.layers:
        if not marks:
            continue
        inner = "".join(_serialize_mark(m) for m in marks)
        body.append(_tag("g", {"id": f"layer-{name.replace('_', '-')}"}, inner))
    root_attrs = {
        "height": _fmt_dim(h),
        "viewBox": f"0 0 {_fmt_dim(w)} {_fmt_dim(h)}",
        "width": _fmt_dim(w),
        "xmlns": "http://www.w3.org/2000/svg",
    }
    doc = '<?xml version="1.0" encoding="UTF-8"?>\n' + _tag("svg", root_attrs, "".join(body)) + "\n"
    return doc.encode("utf-8")
