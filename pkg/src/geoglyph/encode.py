"""Encoders: joined data -> marks, one per channel, plus dual-encoding.

All encoders are pure and emit marks in a fixed order (sorted by region key
unless a channel defines its own painter order), so identical inputs always
produce identical mark lists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .dataio import DataRow, FieldKind, JoinedData
from .designspace import ChannelKind, ChannelSpec, check_compatibility
from .errors import (
    IncompatiblePair,
    MissingSeries,
    TooManyIcons,
    UnresolvedEndpoint,
    WrongDataKind,
)
from .geodata import Projection, Region, RegionSet, centroid, project_region
from .icons import icon_ref_id, icon_symbol
from .scales import ColorRamp, LinearScale, RampMode, color_at, format_hex, linear_map, parse_hex, symbol_radius
from .scene import (
    CircleMark,
    IconRefMark,
    Mark,
    PathMark,
    RectMark,
    Style,
    SymbolDef,
    TextMark,
    path_from_rings,
)


@dataclass(frozen=True)
class LegendEntry:
    swatch: str            # hex color, icon ref id, or "" for text-only entries
    caption: str
    kind: str = "swatch"   # swatch | icon | size | note


@dataclass(frozen=True)
class EncodedLayer:
    channel: ChannelKind
    marks: tuple[Mark, ...]
    legend: tuple[LegendEntry, ...] = ()
    defs: tuple[SymbolDef, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class FlowEdge:
    src: str
    dst: str
    magnitude: float

    def __post_init__(self):
        if self.src == self.dst:
            raise UnresolvedEndpoint(f"flow edge {self.src!r} loops onto itself")
        if not math.isfinite(self.magnitude) or self.magnitude < 0:
            raise UnresolvedEndpoint(f"flow edge {self.src}->{self.dst}: bad magnitude")


def format_value(v: float) -> str:
    """Half-up to at most 2 decimals, with thousands separators."""
    if float(v).is_integer():
        return f"{int(v):,}"
    sign = "-" if v < 0 else ""
    scaled = math.floor(abs(v) * 100 + 0.5)
    whole, frac = divmod(scaled, 100)
    if frac == 0:
        return f"{sign}{whole:,}"
    return f"{sign}{whole:,}.{frac:02d}".rstrip("0")


def compute_anchors(joined: JoinedData, proj: Projection) -> dict[str, tuple[float, float]]:
    return {region.key: centroid(region, proj) for region, _ in joined.matched}


def _require_quantitative(joined: JoinedData, kind: ChannelKind):
    if joined.field_kind is not FieldKind.QUANTITATIVE:
        raise WrongDataKind(f"{kind.value} requires quantitative data")


def _sorted_rows(joined: JoinedData) -> list[tuple[Region, DataRow]]:
    return sorted(joined.matched, key=lambda pair: pair[0].key)


def darken(color: str, factor: float) -> str:
    r, g, b = parse_hex(color)
    return format_hex(tuple(math.floor(c * factor + 0.5) for c in (r, g, b)))


# -- color -------------------------------------------------------------------

def color_fill_map(joined: JoinedData, spec: ChannelSpec, mode: str
                   ) -> tuple[dict[str, str], tuple[LegendEntry, ...]]:
    """Per-region fill assignment shared by encode_color and apply_dual."""
    if mode == "intensity":
        _require_quantitative(joined, ChannelKind.COLOR_INTENSITY)
        ramp = ColorRamp(stops=spec.palette, mode=RampMode.RAMP)
        values = {r.key: row.quantity for r, row in joined.matched}
        lo, hi = min(values.values()), max(values.values())
        fills = {}
        for key, v in values.items():
            t = 0.5 if lo == hi else (v - lo) / (hi - lo)
            fills[key] = color_at(t, ramp)
        legend = (
            LegendEntry(color_at(0.0, ramp), format_value(lo)),
            LegendEntry(color_at(1.0, ramp), format_value(hi)),
        )
        return fills, legend
    if joined.field_kind is FieldKind.QUANTITATIVE:
        # ordered hue ramp over numeric values
        ramp = ColorRamp(stops=spec.palette, mode=RampMode.RAMP)
        values = {r.key: row.quantity for r, row in joined.matched}
        lo, hi = min(values.values()), max(values.values())
        fills = {}
        for key, v in values.items():
            t = 0.5 if lo == hi else (v - lo) / (hi - lo)
            fills[key] = color_at(t, ramp)
        legend = (
            LegendEntry(color_at(0.0, ramp), format_value(lo)),
            LegendEntry(color_at(1.0, ramp), format_value(hi)),
        )
        return fills, legend
    if joined.field_kind is not FieldKind.CATEGORICAL:
        raise WrongDataKind("color_hue requires categorical or quantitative data")
    categories: list[str] = []
    for _, row in joined.matched:  # first-appearance order fixes the palette mapping
        if row.category not in categories:
            categories.append(row.category)
    palette = spec.palette
    assignment = {cat: palette[i % len(palette)] for i, cat in enumerate(categories)}
    fills = {r.key: assignment[row.category] for r, row in joined.matched}
    legend = tuple(LegendEntry(assignment[c], c) for c in categories)
    return fills, legend


def encode_color(joined: JoinedData, spec: ChannelSpec, proj: Projection, mode: str
                 ) -> EncodedLayer:
    """Choropleth fills; mode is "intensity" or "hue"."""
    fills, legend = color_fill_map(joined, spec, mode)
    marks = []
    for region, _ in _sorted_rows(joined):
        rings = [ring for poly in project_region(region, proj) for ring in poly]
        marks.append(PathMark(
            segments=path_from_rings(rings),
            style=Style(fill=fills[region.key], stroke="#ffffff", stroke_width=0.5),
            region=region.key,
        ))
    kind = ChannelKind.COLOR_INTENSITY if mode == "intensity" else ChannelKind.COLOR_HUE
    return EncodedLayer(channel=kind, marks=tuple(marks), legend=legend)


# -- length ------------------------------------------------------------------

def _length_scale(joined: JoinedData, extent: float) -> Optional[LinearScale]:
    values = [row.quantity for _, row in joined.matched]
    vmax = max(values)
    if vmax <= 0:
        return None
    return LinearScale(0.0, vmax, 0.0, extent)


def encode_length2d(joined: JoinedData, spec: ChannelSpec, proj: Projection) -> EncodedLayer:
    """One vertical bar per region, bottom edge centered on the anchor."""
    _require_quantitative(joined, ChannelKind.LENGTH_2D)
    anchors = compute_anchors(joined, proj)
    scale = _length_scale(joined, spec.max_bar_height)
    fill = spec.palette[0] if spec.palette else "#4e79a7"
    marks = []
    for region, row in _sorted_rows(joined):
        if scale is None or row.quantity <= 0:
            continue  # zero-height bars are suppressed
        h = linear_map(row.quantity, scale)
        ax, ay = anchors[region.key]
        marks.append(RectMark(
            x=ax - spec.bar_width / 2.0, y=ay - h, w=spec.bar_width, h=h,
            style=Style(fill=fill), region=region.key,
        ))
    legend = (LegendEntry(fill, f"bar height ∝ value (max {format_value(scale.d1)})")
              if scale else LegendEntry(fill, "no positive values"),)
    return EncodedLayer(channel=ChannelKind.LENGTH_2D, marks=tuple(marks), legend=legend)


PRISM_TOP_FACTOR = 1.0
PRISM_FRONT_FACTOR = 0.6
PRISM_SIDE_FACTOR = 0.75


def encode_length3d(joined: JoinedData, spec: ChannelSpec, proj: Projection) -> EncodedLayer:
    """Axonometric prisms, three faces each, painted back-to-front."""
    _require_quantitative(joined, ChannelKind.LENGTH_3D)
    anchors = compute_anchors(joined, proj)
    scale = _length_scale(joined, spec.max_bar_height)
    base = spec.palette[0] if spec.palette else "#4e79a7"
    w = spec.bar_width
    dx, dy = 0.5 * w, -0.5 * w  # 45 degree depth offset
    marks = []
    ordered = sorted(joined.matched, key=lambda pair: (anchors[pair[0].key][1], pair[0].key))
    for region, row in ordered:
        if scale is None or row.quantity <= 0:
            continue
        h = linear_map(row.quantity, scale)
        ax, ay = anchors[region.key]
        x0, y0 = ax - w / 2.0, ay - h  # front-face top-left
        top = [(x0, y0), (x0 + w, y0), (x0 + w + dx, y0 + dy), (x0 + dx, y0 + dy)]
        front = [(x0, y0), (x0 + w, y0), (x0 + w, ay), (x0, ay)]
        side = [(x0 + w, y0), (x0 + w + dx, y0 + dy), (x0 + w + dx, ay + dy), (x0 + w, ay)]
        for pts, factor in ((top, PRISM_TOP_FACTOR), (front, PRISM_FRONT_FACTOR),
                            (side, PRISM_SIDE_FACTOR)):
            marks.append(PathMark(
                segments=path_from_rings([pts]),
                style=Style(fill=darken(base, factor)),
                region=region.key,
            ))
    legend = (LegendEntry(base, f"prism height ∝ value (max {format_value(scale.d1)})")
              if scale else LegendEntry(base, "no positive values"),)
    return EncodedLayer(channel=ChannelKind.LENGTH_3D, marks=tuple(marks), legend=legend)


# -- size / cartogram --------------------------------------------------------

@dataclass(frozen=True)
class DorlingCircle:
    key: str
    cx: float
    cy: float
    r: float


DORLING_MAX_PASSES = 512
DORLING_TOLERANCE = 0.005  # fraction of the smaller radius
_COINCIDENT_EPS = 1e-9


def dorling_relax(circles: list[DorlingCircle]) -> tuple[list[DorlingCircle], bool]:
    """Push overlapping circles apart until residual overlap is negligible.

    Weight is r^2, so light circles move more.  Pair order is sorted key
    pairs; coincident centers are broken by nudging the lexicographically
    larger key along +x.  Returns (circles, converged).
    """
    if not circles:
        return [], True
    state = {c.key: [c.cx, c.cy, c.r] for c in circles}
    keys = sorted(state)
    # tie-break exact coincidences before relaxing
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            ax, ay, _ = state[a]
            bx, by, _ = state[b]
            if abs(ax - bx) < _COINCIDENT_EPS and abs(ay - by) < _COINCIDENT_EPS:
                state[b][0] += max(state[a][2], state[b][2]) * 1e-6 + _COINCIDENT_EPS

    def max_overlap() -> float:
        worst = 0.0
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                ax, ay, ar = state[a]
                bx, by, br = state[b]
                d = math.hypot(bx - ax, by - ay)
                depth = (ar + br) - d
                if depth > 0:
                    worst = max(worst, depth / min(ar, br))
        return worst

    converged = False
    for _ in range(DORLING_MAX_PASSES):
        if max_overlap() <= DORLING_TOLERANCE:
            converged = True
            break
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                ax, ay, ar = state[a]
                bx, by, br = state[b]
                ddx, ddy = bx - ax, by - ay
                d = math.hypot(ddx, ddy)
                if d >= ar + br:
                    continue
                if d < _COINCIDENT_EPS:
                    ddx, ddy, d = 1.0, 0.0, _COINCIDENT_EPS
                overlap = (ar + br) - d
                ux, uy = ddx / d, ddy / d
                wa, wb = ar * ar, br * br
                total = wa + wb
                state[a][0] -= ux * overlap * (wb / total)
                state[a][1] -= uy * overlap * (wb / total)
                state[b][0] += ux * overlap * (wa / total)
                state[b][1] += uy * overlap * (wa / total)
    else:
        converged = max_overlap() <= DORLING_TOLERANCE
    return ([DorlingCircle(k, state[k][0], state[k][1], state[k][2]) for k in keys],
            converged)


def encode_size(joined: JoinedData, spec: ChannelSpec, proj: Projection,
                cartogram: Optional[bool] = None) -> EncodedLayer:
    """Proportional circles at anchors; cartogram mode relaxes them apart."""
    _require_quantitative(joined, ChannelKind.SIZE)
    if cartogram is None:
        cartogram = spec.cartogram
    anchors = compute_anchors(joined, proj)
    vmax = max(row.quantity for _, row in joined.matched)
    fill = spec.palette[0] if spec.palette else "#4e79a7"
    warnings: list[str] = []
    circles = []
    for region, row in _sorted_rows(joined):
        if vmax <= 0 or row.quantity <= 0:
            continue  # zero-radius circles are suppressed
        r = symbol_radius(row.quantity, vmax, spec.max_symbol_radius)
        ax, ay = anchors[region.key]
        circles.append(DorlingCircle(region.key, ax, ay, r))
    if cartogram:
        circles, converged = dorling_relax(circles)
        if not converged:
            warnings.append("cartogram relaxation did not fully converge")
    style = Style(fill=fill, stroke="#ffffff", stroke_width=0.75,
                  opacity=None if cartogram else 0.85)
    marks = tuple(CircleMark(cx=c.cx, cy=c.cy, r=c.r, style=style, region=c.key)
                  for c in circles)
    legend = (LegendEntry(fill, f"circle area ∝ value (max {format_value(vmax)})",
                          kind="size"),)
    return EncodedLayer(channel=ChannelKind.SIZE, marks=marks, legend=legend,
                        warnings=tuple(warnings))


# -- quantity ----------------------------------------------------------------

MAX_ICONS = 200


def round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def encode_quantity(joined: JoinedData, spec: ChannelSpec, proj: Projection,
                    icon_size: float = 10.0) -> EncodedLayer:
    """Repeated unit icons, row-major blocks centered on each anchor."""
    _require_quantitative(joined, ChannelKind.QUANTITY)
    if spec.icon_unit <= 0:
        raise WrongDataKind("quantity channel needs a positive icon_unit")
    anchors = compute_anchors(joined, proj)
    ref = icon_ref_id(spec.icon_name)
    fill = spec.palette[0] if spec.palette else "#4e79a7"
    k = max(1, spec.icons_per_row)
    marks = []
    below_unit: list[str] = []
    for region, row in _sorted_rows(joined):
        n = round_half_away(row.quantity / spec.icon_unit)
        if n > MAX_ICONS:
            raise TooManyIcons(
                f"{region.name}: {n} icons exceeds {MAX_ICONS}; raise icon_unit")
        if n <= 0:
            below_unit.append(region.name)
            continue
        ax, ay = anchors[region.key]
        cols = min(n, k)
        start_x = ax - cols * icon_size / 2.0
        for idx in range(n):
            r, c = divmod(idx, k)
            marks.append(IconRefMark(
                ref=ref, x=start_x + c * icon_size, y=ay + r * icon_size,
                w=icon_size, h=icon_size, style=Style(fill=fill), region=region.key,
            ))
    legend = [LegendEntry(ref, f"1 icon = {format_value(spec.icon_unit)}", kind="icon")]
    if below_unit:
        legend.append(LegendEntry("", "below unit: " + ", ".join(sorted(below_unit)),
                                  kind="note"))
    defs = (icon_symbol(spec.icon_name),)
    return EncodedLayer(channel=ChannelKind.QUANTITY, marks=tuple(marks),
                        legend=tuple(legend), defs=defs)


# -- glyph -------------------------------------------------------------------

def pie_sector_points(cx: float, cy: float, r: float, a0: float, a1: float,
                      step_deg: float = 5.0) -> list[tuple[float, float]]:
    """Polygonal pie sector; angles in degrees clockwise from 12 o'clock."""
    pts = [(cx, cy)]
    steps = max(1, int(math.ceil((a1 - a0) / step_deg)))
    for s in range(steps + 1):
        a = math.radians(a0 + (a1 - a0) * s / steps)
        pts.append((cx + r * math.sin(a), cy - r * math.cos(a)))
    return pts


def encode_glyph(joined: JoinedData, spec: ChannelSpec, proj: Projection) -> EncodedLayer:
    """Named icons or inline mini bar/pie charts at region anchors."""
    g = spec.glyph
    if g is None or (g.icon is None and g.chart is None):
        raise MissingSeries("glyph channel needs an icon name or a mini-chart descriptor")
    anchors = compute_anchors(joined, proj)
    fill = spec.palette[0] if spec.palette else "#4e79a7"
    marks: list[Mark] = []
    defs: tuple[SymbolDef, ...] = ()
    if g.icon is not None:
        ref = icon_ref_id(g.icon)
        defs = (icon_symbol(g.icon),)
        style = Style(fill=fill) if spec.glyph_monochrome else Style()
        for region, _ in _sorted_rows(joined):
            ax, ay = anchors[region.key]
            marks.append(IconRefMark(
                ref=ref, x=ax - g.box / 2.0, y=ay - g.box / 2.0,
                w=g.box, h=g.box, style=style, region=region.key,
            ))
        legend = (LegendEntry(ref, g.icon, kind="icon"),)
        return EncodedLayer(channel=ChannelKind.GLYPH, marks=tuple(marks),
                            legend=legend, defs=defs)

    palette = spec.palette
    for region, _ in _sorted_rows(joined):
        series = g.series_for(region.key)
        if series is None:
            raise MissingSeries(f"glyph mini-chart: no series for region {region.key!r}")
        ax, ay = anchors[region.key]
        if g.chart == "bar":
            smax = max(series)
            bw = g.box / len(series)
            x0, y1 = ax - g.box / 2.0, ay + g.box / 2.0
            for i, v in enumerate(series):
                h = 0.0 if smax <= 0 else (v / smax) * g.box
                if h <= 0:
                    continue
                bar_fill = fill if spec.glyph_monochrome else palette[i % len(palette)]
                marks.append(RectMark(
                    x=x0 + i * bw, y=y1 - h, w=bw, h=h,
                    style=Style(fill=bar_fill), region=region.key,
                ))
        else:  # pie, sectors clockwise from 12 o'clock
            total = sum(series)
            if total <= 0:
                raise MissingSeries(f"glyph pie: series for {region.key!r} sums to zero")
            angle = 0.0
            r = g.box / 2.0
            for i, v in enumerate(series):
                if v <= 0:
                    continue
                sweep = 360.0 * v / total
                sector_fill = fill if spec.glyph_monochrome else palette[i % len(palette)]
                pts = pie_sector_points(ax, ay, r, angle, angle + sweep)
                marks.append(PathMark(
                    segments=path_from_rings([pts]),
                    style=Style(fill=sector_fill), region=region.key,
                ))
                angle += sweep
    legend = tuple(
        LegendEntry(fill if spec.glyph_monochrome else palette[i % len(palette)],
                    f"series {i + 1}")
        for i in range(max((len(g.series_for(r.key) or ()) for r, _ in joined.matched),
                           default=0))
    )
    return EncodedLayer(channel=ChannelKind.GLYPH, marks=tuple(marks), legend=legend)


# -- flow --------------------------------------------------------------------

FLOW_CURVE_OFFSET = 0.2  # control point offset as a fraction of chord length


def flow_edges(joined: JoinedData, regions: RegionSet,
               aliases: Optional[dict[str, str]] = None) -> tuple[list[FlowEdge], list[str]]:
    """Resolve flow rows to edges; unresolved or degenerate rows become warnings."""
    from .dataio import resolve_key

    by_key = {r.key: r for r in regions.regions}
    edges: list[FlowEdge] = []
    warnings: list[str] = []
    for region, row in joined.matched:
        dst = resolve_key(row.flow_to, aliases)
        if dst not in by_key:
            warnings.append(f"flow destination {row.flow_to!r} matches no region; edge skipped")
            continue
        if dst == region.key:
            warnings.append(f"flow edge {region.key!r} loops onto itself; edge skipped")
            continue
        edges.append(FlowEdge(src=region.key, dst=dst, magnitude=row.flow_magnitude or 0.0))
    return edges, warnings


def flow_control_point(p0: tuple[float, float], p1: tuple[float, float]
                       ) -> tuple[float, float]:
    """Chord midpoint pushed left of the src->dst direction (screen coords)."""
    mx, my = (p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    chord = math.hypot(dx, dy)
    if chord == 0:
        return mx, my
    # left of direction (dx, dy) with y growing downward
    lx, ly = dy / chord, -dx / chord
    return mx + lx * FLOW_CURVE_OFFSET * chord, my + ly * FLOW_CURVE_OFFSET * chord


def encode_flow(edges: list[FlowEdge], directional: bool, spec: ChannelSpec,
                regions: RegionSet, proj: Projection) -> EncodedLayer:
    """Quadratic flow curves; directional mode adds destination arrowheads."""
    anchors: dict[str, tuple[float, float]] = {}
    for edge in edges:
        for key in (edge.src, edge.dst):
            if key in anchors:
                continue
            region = regions.get(key)
            if region is None:
                raise UnresolvedEndpoint(f"flow endpoint {key!r} matches no region")
            anchors[key] = centroid(region, proj)
    stroke = spec.palette[0] if spec.palette else "#4e79a7"
    vmax = max((e.magnitude for e in edges), default=0.0)
    width_scale = LinearScale(0.0, vmax, 1.0, spec.max_stroke_width) if vmax > 0 else None
    marks: list[Mark] = []
    for edge in sorted(edges, key=lambda e: (e.src, e.dst)):
        p0, p1 = anchors[edge.src], anchors[edge.dst]
        c = flow_control_point(p0, p1)
        width = linear_map(edge.magnitude, width_scale) if width_scale else 1.0
        marks.append(PathMark(
            segments=(("M", p0[0], p0[1]), ("Q", c[0], c[1], p1[0], p1[1])),
            style=Style(fill="none", stroke=stroke, stroke_width=width),
            region=edge.src,
        ))
        if directional:
            marks.append(_arrowhead(c, p1, width, stroke, edge.src))
    kind = (ChannelKind.DIRECTIONAL_FLOW if directional
            else ChannelKind.NON_DIRECTIONAL_FLOW)
    caption = ("arrow width ∝ magnitude" if directional
               else "line width ∝ magnitude")
    return EncodedLayer(channel=kind, marks=tuple(marks),
                        legend=(LegendEntry(stroke, caption),))


def _arrowhead(control: tuple[float, float], tip: tuple[float, float],
               width: float, color: str, region: str) -> PathMark:
    # oriented along the curve's end tangent (control -> tip)
    dx, dy = tip[0] - control[0], tip[1] - control[1]
    d = math.hypot(dx, dy) or 1.0
    ux, uy = dx / d, dy / d
    px, py = -uy, ux
    size = max(6.0, 3.0 * width)
    bx, by = tip[0] - ux * size, tip[1] - uy * size
    half = size * 0.5
    pts = [tip, (bx + px * half, by + py * half), (bx - px * half, by - py * half)]
    return PathMark(segments=path_from_rings([pts]), style=Style(fill=color), region=region)


# -- text --------------------------------------------------------------------

def encode_text(joined: JoinedData, spec: ChannelSpec, proj: Projection,
                font_size: float = 10.0) -> EncodedLayer:
    """One value/category text mark per region at its anchor."""
    anchors = compute_anchors(joined, proj)
    marks = []
    for region, row in _sorted_rows(joined):
        content = row.category if row.category is not None else format_value(row.quantity)
        ax, ay = anchors[region.key]
        marks.append(TextMark(
            x=ax, y=ay, lines=(content,), font_size=font_size, anchor="middle",
            style=Style(fill="#212121"), region=region.key,
        ))
    return EncodedLayer(channel=ChannelKind.TEXT, marks=tuple(marks))


# -- dual encoding -----------------------------------------------------------

DUAL_STACK_OFFSET = 4.0  # px shift applied to the second geometric layer

_PRISM_FACTORS = (PRISM_TOP_FACTOR, PRISM_FRONT_FACTOR, PRISM_SIDE_FACTOR)


def _restyle_with_fills(first: EncodedLayer, fills: dict[str, str]) -> tuple[Mark, ...]:
    prism_counts: dict[str, int] = {}
    out = []
    for mark in first.marks:
        key = mark.region
        if key is None or key not in fills:
            out.append(mark)
            continue
        color = fills[key]
        if first.channel is ChannelKind.LENGTH_3D:
            n = prism_counts.get(key, 0)
            prism_counts[key] = n + 1
            color = darken(color, _PRISM_FACTORS[n % 3])
        if first.channel in (ChannelKind.DIRECTIONAL_FLOW, ChannelKind.NON_DIRECTIONAL_FLOW):
            if mark.style.fill == "none":
                out.append(replace(mark, style=replace(mark.style, stroke=color)))
            else:  # arrowhead
                out.append(replace(mark, style=replace(mark.style, fill=color)))
            continue
        out.append(replace(mark, style=replace(mark.style, fill=color)))
    return tuple(out)


def apply_dual(first: EncodedLayer, second: ChannelSpec, joined: JoinedData,
               proj: Projection, regions: Optional[RegionSet] = None,
               glyph_monochrome: bool = False) -> EncodedLayer:
    """Overlay a second channel on an already encoded first layer.

    Color channels restyle the first layer's marks; Text adds annotations at
    the anchors; any other (validated) pair emits both mark sets with the
    second shifted down to dodge the shared anchor.
    """
    comp = check_compatibility(first.channel, second.kind, glyph_monochrome)
    if not comp.allowed:
        raise IncompatiblePair(
            f"{first.channel.value} + {second.kind.value}: {comp.reason}")

    if second.kind in (ChannelKind.COLOR_INTENSITY, ChannelKind.COLOR_HUE):
        mode = "intensity" if second.kind is ChannelKind.COLOR_INTENSITY else "hue"
        fills, legend = color_fill_map(joined, second, mode)
        return replace(first, marks=_restyle_with_fills(first, fills),
                       legend=first.legend + legend)

    if second.kind is ChannelKind.TEXT:
        text_layer = encode_text(joined, second, proj)
        return replace(first, marks=first.marks + text_layer.marks)

    second_layer = encode_channel(second, joined, proj, regions)
    shifted = tuple(_shift_mark(m, 0.0, DUAL_STACK_OFFSET) for m in second_layer.marks)
    return replace(first,
                   marks=first.marks + shifted,
                   legend=first.legend + second_layer.legend,
                   defs=first.defs + second_layer.defs,
                   warnings=first.warnings + second_layer.warnings)


def _shift_mark(mark: Mark, dx: float, dy: float) -> Mark:
    if isinstance(mark, RectMark):
        return replace(mark, x=mark.x + dx, y=mark.y + dy)
    if isinstance(mark, CircleMark):
        return replace(mark, cx=mark.cx + dx, cy=mark.cy + dy)
    if isinstance(mark, TextMark):
        return replace(mark, x=mark.x + dx, y=mark.y + dy)
    if isinstance(mark, IconRefMark):
        return replace(mark, x=mark.x + dx, y=mark.y + dy)
    if isinstance(mark, PathMark):
        segs = []
        for seg in mark.segments:
            if seg[0] == "Z":
                segs.append(seg)
            else:
                moved = [seg[0]]
                for i in range(1, len(seg), 2):
                    moved.extend((seg[i] + dx, seg[i + 1] + dy))
                segs.append(tuple(moved))
        return replace(mark, segments=tuple(segs))
    return mark


def encode_channel(spec: ChannelSpec, joined: JoinedData, proj: Projection,
                   regions: Optional[RegionSet] = None,
                   aliases: Optional[dict[str, str]] = None) -> EncodedLayer:
    """Dispatch one channel spec to its encoder."""
    kind = spec.kind
    if kind is ChannelKind.COLOR_INTENSITY:
        return encode_color(joined, spec, proj, "intensity")
    if kind is ChannelKind.COLOR_HUE:
        return encode_color(joined, spec, proj, "hue")
    if kind is ChannelKind.LENGTH_2D:
        return encode_length2d(joined, spec, proj)
    if kind is ChannelKind.LENGTH_3D:
        return encode_length3d(joined, spec, proj)
    if kind is ChannelKind.SIZE:
        return encode_size(joined, spec, proj)
    if kind is ChannelKind.QUANTITY:
        return encode_quantity(joined, spec, proj)
    if kind is ChannelKind.GLYPH:
        return encode_glyph(joined, spec, proj)
    if kind in (ChannelKind.DIRECTIONAL_FLOW, ChannelKind.NON_DIRECTIONAL_FLOW):
        if regions is None:
            raise UnresolvedEndpoint("flow encoding needs the region set")
        if joined.field_kind is not FieldKind.FLOW:
            raise WrongDataKind(f"{kind.value} requires flow data")
        edges, warnings = flow_edges(joined, regions, aliases)
        layer = encode_flow(edges, kind is ChannelKind.DIRECTIONAL_FLOW, spec,
                            regions, proj)
        return replace(layer, warnings=layer.warnings + tuple(warnings))
    return encode_text(joined, spec, proj)
