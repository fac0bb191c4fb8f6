"""End-to-end orchestration: parse -> join -> validate -> encode -> label ->
highlight -> compose -> serialize.  The single entry point shared by the CLI
and the HTTP service."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import basemap, dataio, designspace, encode, geodata, highlight, labels, scene
from .dataio import FieldKind, JoinedData
from .designspace import (
    ChannelKind,
    ChannelSpec,
    HighlightKind,
    InfographicSpec,
    Issue,
    LabelStrategyKind,
    ValidationReport,
)
from .errors import GeoglyphError, StageError
from .geodata import Projection, Rect, RegionSet
from .labels import DoesNotFit, LabelItem, ObstacleSet, PlacedLabel
from .scene import (
    CircleMark,
    DefsMark,
    GroupMark,
    IconRefMark,
    Mark,
    PathMark,
    RectMark,
    SceneGraph,
    Style,
    TextMark,
    polyline_segments,
)

LEGEND_ROW_H = 18.0
LEGEND_SWATCH = 12.0
LEGEND_FONT = 10.0
LEGEND_MARGIN = 10.0


@dataclass(frozen=True)
class RenderResult:
    svg: Optional[bytes]
    report: ValidationReport

    @property
    def ok(self) -> bool:
        return self.svg is not None


def _failure(stage: str, exc: GeoglyphError) -> RenderResult:
    issue = Issue(code=exc.code, severity="error", message=exc.message, element=stage)
    return RenderResult(svg=None, report=ValidationReport(verdict="invalid",
                                                          issues=(issue,)))


def render(spec_bytes: bytes | str, data_bytes: bytes | str,
           boundaries: bytes | str | RegionSet) -> RenderResult:
    """Full render.  Never raises on malformed input; failures land in the report."""
    try:
        spec = designspace.parse_spec(spec_bytes)
    except GeoglyphError as exc:
        return _failure("spec", exc)
    try:
        table = dataio.parse_data(data_bytes)
    except GeoglyphError as exc:
        return _failure("data", exc)
    if isinstance(boundaries, RegionSet):
        regions = boundaries
    else:
        try:
            regions = geodata.parse_boundaries(boundaries)
        except GeoglyphError as exc:
            return _failure("boundaries", exc)
    try:
        joined = dataio.join(regions, table, spec.alias_map())
    except GeoglyphError as exc:
        return _failure("join", exc)

    report = designspace.validate(spec, joined)
    if not report.is_valid:
        return RenderResult(svg=None, report=report)

    try:
        graph = build_scene(spec, joined, regions)
    except GeoglyphError as exc:
        wrapped = StageError("render", exc)
        return _failure("render", wrapped)
    return RenderResult(svg=scene.to_svg(graph), report=report)


# -- scene assembly ----------------------------------------------------------

def _channel_order(channels: Sequence[ChannelSpec]) -> list[ChannelSpec]:
    """Geometric channel first; color and text overlays second."""
    overlay_kinds = (ChannelKind.COLOR_INTENSITY, ChannelKind.COLOR_HUE, ChannelKind.TEXT)
    if len(channels) == 2 and channels[0].kind in overlay_kinds \
            and channels[1].kind not in overlay_kinds:
        return [channels[1], channels[0]]
    return list(channels)


def build_scene(spec: InfographicSpec, joined: JoinedData, regions: RegionSet
                ) -> SceneGraph:
    proj = Projection.fit(regions.bbox, spec.projection,
                          spec.viewport[0], spec.viewport[1])
    glyph_mono = any(c.kind is ChannelKind.GLYPH and c.glyph_monochrome
                     for c in spec.channels)

    base_marks = basemap.render_base_from_spec(spec, regions, proj)

    ordered = _channel_order(spec.channels)
    primary = encode.encode_channel(ordered[0], joined, proj, regions, spec.alias_map())
    if len(ordered) == 2:
        primary = encode.apply_dual(primary, ordered[1], joined, proj, regions,
                                    glyph_monochrome=glyph_mono)
    flow_channel = primary.channel in (ChannelKind.DIRECTIONAL_FLOW,
                                       ChannelKind.NON_DIRECTIONAL_FLOW)
    encoding_marks = [] if flow_channel else list(primary.marks)
    flow_marks = list(primary.marks) if flow_channel else []

    defs = list(primary.defs)
    anchors = encode.compute_anchors(joined, proj)

    # current per-region fill, used by contrasting-color highlights
    fills: dict[str, str] = {region.key: spec.basemap_fill for region, _ in joined.matched}
    color_spec = next((c for c in spec.channels
                       if c.kind in (ChannelKind.COLOR_INTENSITY, ChannelKind.COLOR_HUE)),
                      None)
    if color_spec is not None and not flow_channel \
            and len(spec.channels) == 1:
        mode = "intensity" if color_spec.kind is ChannelKind.COLOR_INTENSITY else "hue"
        fills, _ = encode.color_fill_map(joined, color_spec, mode)

    hl_under: list[Mark] = []
    hl_over: list[Mark] = []
    inset_specs = []
    for i, hl in enumerate(spec.highlights):
        if hl.kind in (HighlightKind.GLOW, HighlightKind.PIN):
            if hl.region is not None:
                target = anchors[hl.region]
            else:
                target = geodata.project(geodata.GeoPoint(*hl.point), proj)
            new_defs, marks = highlight.apply_point_highlight(
                hl.kind.value, target, radius=hl.radius, pin_height=hl.pin_height,
                gradient_index=i)
            defs.extend(new_defs)
            hl_over.extend(marks)
        elif hl.kind is HighlightKind.ZOOMED_INSET:
            inset_specs.append(hl)
        else:
            region = regions.get(hl.region)
            marks = highlight.apply_region_highlight(
                hl.kind.value, region, proj,
                current_fill=fills.get(hl.region, spec.basemap_fill),
                stroke_width=hl.stroke_width)
            if hl.kind is HighlightKind.CONTOUR:
                hl_over.extend(marks)
            else:
                hl_under.extend(marks)

    legend_marks = _legend_marks(primary.legend, spec.viewport)

    label_marks, placed_labels = _label_marks(spec, joined, regions, proj, anchors,
                                              encoding_marks + flow_marks, fills)

    inset_marks: list[Mark] = []
    if inset_specs:
        occupied = [b for m in (base_marks + encoding_marks + flow_marks
                                + hl_under + hl_over + label_marks + legend_marks)
                    if (b := mark_bbox(m)) is not None]
        for hl in inset_specs:
            region = regions.get(hl.region)
            content = tuple(
                m for m in base_marks + encoding_marks + flow_marks + label_marks
                if getattr(m, "region", None) == hl.region)
            marks = highlight.build_inset(region, proj, content, hl.scale_factor,
                                          hl.placement, occupied, spec.viewport)
            inset_marks.extend(marks)
            occupied.extend(b for m in marks if (b := mark_bbox(m)) is not None)

    defs_marks = [_dedupe_defs(defs)] if defs else []
    return scene.compose(
        spec.viewport,
        defs=defs_marks,
        base=base_marks,
        encoding=encoding_marks,
        highlight_under=hl_under,
        flow=flow_marks,
        highlight_over=hl_over,
        labels=label_marks,
        legend=legend_marks,
        insets=inset_marks,
    )


def _dedupe_defs(defs) -> DefsMark:
    seen = {}
    for d in defs:
        seen.setdefault(d.def_id, d)
    return DefsMark(defs=tuple(seen[k] for k in sorted(seen)))


def mark_bbox(mark: Mark) -> Optional[Rect]:
    if isinstance(mark, RectMark):
        return Rect(mark.x, mark.y, mark.w, mark.h)
    if isinstance(mark, CircleMark):
        return Rect(mark.cx - mark.r, mark.cy - mark.r, 2 * mark.r, 2 * mark.r)
    if isinstance(mark, IconRefMark):
        return Rect(mark.x, mark.y, mark.w, mark.h)
    if isinstance(mark, TextMark):
        w = labels.CHAR_WIDTH_RATIO * mark.font_size * max(len(l) for l in mark.lines)
        h = labels.LINE_HEIGHT_RATIO * mark.font_size * len(mark.lines)
        x = {"start": mark.x, "middle": mark.x - w / 2.0, "end": mark.x - w}[mark.anchor]
        return Rect(x, mark.y - mark.font_size, w, h)
    if isinstance(mark, PathMark):
        xs, ys = [], []
        for seg in mark.segments:
            for i in range(1, len(seg), 2):
                xs.append(seg[i])
                ys.append(seg[i + 1])
        if not xs:
            return None
        return Rect(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
    if isinstance(mark, GroupMark):
        boxes = [b for c in mark.children if (b := mark_bbox(c)) is not None]
        if not boxes:
            return None
        x0 = min(b.x for b in boxes)
        y0 = min(b.y for b in boxes)
        x1 = max(b.x1 for b in boxes)
        y1 = max(b.y1 for b in boxes)
        s, (tx, ty) = mark.scale, mark.translate
        return Rect(x0 * s + tx, y0 * s + ty, (x1 - x0) * s, (y1 - y0) * s)
    return None


# -- legend ------------------------------------------------------------------

def _legend_marks(entries, viewport: tuple[float, float]) -> list[Mark]:
    if not entries:
        return []
    w, h = viewport
    y = h - LEGEND_MARGIN - len(entries) * LEGEND_ROW_H
    marks: list[Mark] = []
    for entry in entries:
        if entry.kind == "icon" and entry.swatch:
            marks.append(IconRefMark(ref=entry.swatch, x=LEGEND_MARGIN, y=y,
                                     w=LEGEND_SWATCH, h=LEGEND_SWATCH,
                                     style=Style(fill="#616161")))
        elif entry.kind in ("swatch", "size") and entry.swatch:
            marks.append(RectMark(x=LEGEND_MARGIN, y=y, w=LEGEND_SWATCH, h=LEGEND_SWATCH,
                                  style=Style(fill=entry.swatch)))
        marks.append(TextMark(
            x=LEGEND_MARGIN + LEGEND_SWATCH + 6.0, y=y + LEGEND_SWATCH - 2.0,
            lines=(entry.caption,), font_size=LEGEND_FONT, anchor="start",
            style=Style(fill="#212121")))
        y += LEGEND_ROW_H
    return marks


# -- labels ------------------------------------------------------------------

def _label_items(joined: JoinedData, anchors) -> list[LabelItem]:
    """Rows carrying explicit label text become label items."""
    items = []
    for region, row in joined.matched:
        if not row.label or not row.label.strip():
            continue
        priority = row.quantity if row.quantity is not None else 0.0
        items.append(LabelItem(anchor=anchors[region.key], region_key=region.key,
                               text=row.label, priority=priority))
    return items


def _label_marks(spec: InfographicSpec, joined: JoinedData, regions: RegionSet,
                 proj: Projection, anchors, encoding_marks: list[Mark],
                 fills: dict[str, str]) -> tuple[list[Mark], list[PlacedLabel]]:
    if spec.labels is None:
        return [], []
    strategy = spec.labels
    fs = strategy.font_size
    items = _label_items(joined, anchors)
    if not items:
        return [], []
    region_by_key = {r.key: r for r in regions.regions}
    placed: list[PlacedLabel] = []
    extra_marks: list[Mark] = []

    if strategy.kind in (LabelStrategyKind.MATCHED_TEXT, LabelStrategyKind.MATCHED_ICON,
                         LabelStrategyKind.MATCHED_COLOR):
        mode = strategy.kind.value.split("_", 1)[1]
        panel = (Rect(*strategy.matched_mode_panel) if strategy.matched_mode_panel
                 else Rect(spec.viewport[0] - 230.0, 20.0, 220.0,
                           spec.viewport[1] - 40.0))
        entries = []
        for item in items:
            region = region_by_key[item.region_key]
            entries.append(labels.MatchedEntry(
                region_key=item.region_key, anchor=item.anchor, keyword=region.name,
                caption=item.text, color=fills.get(item.region_key, "#4e79a7"),
                icon_ref="icon-pin"))
        layout = labels.build_matched_legend(entries, mode, panel, fs)
        marks = _matched_marks(layout)
        if mode == "icon":
            from .icons import icon_symbol
            extra_marks.append(DefsMark(defs=(icon_symbol("pin"),)))
        return extra_marks + marks, []

    if strategy.kind is LabelStrategyKind.SITUATED:
        fallback: list[LabelItem] = []
        for item in items:
            region = region_by_key[item.region_key]
            try:
                placed.append(labels.place_situated(region, item, proj, fs))
            except DoesNotFit:
                fallback.append(item)
        if fallback:
            obstacles = _obstacles(encoding_marks, placed)
            more, _dropped = labels.place_linked_convenient(fallback, obstacles, fs)
            placed.extend(more)
    elif strategy.kind is LabelStrategyKind.LINKED_CONVENIENT:
        obstacles = _obstacles(encoding_marks, [])
        placed, _dropped = labels.place_linked_convenient(items, obstacles, fs)
    elif strategy.kind is LabelStrategyKind.LINKED_ALIGNED:
        map_rect = Rect(spec.viewport[0] * proj.margin, spec.viewport[1] * proj.margin,
                        spec.viewport[0] * (1 - 2 * proj.margin),
                        spec.viewport[1] * (1 - 2 * proj.margin))
        placed = labels.place_linked_aligned(items, strategy.sides, map_rect, fs)
    else:  # linked_ordered
        placed = labels.place_linked_ordered(items, strategy.guide, fs)

    return extra_marks + [m for label in placed for m in _placed_label_marks(label)], placed


def _obstacles(encoding_marks: list[Mark], placed: list[PlacedLabel]) -> ObstacleSet:
    rects = []
    for m in encoding_marks:
        if isinstance(m, (RectMark, CircleMark, IconRefMark)):
            b = mark_bbox(m)
            if b is not None:
                rects.append(b)
    rects.extend(p.rect for p in placed)
    return ObstacleSet(rects=rects)


def _placed_label_marks(label: PlacedLabel) -> list[Mark]:
    marks: list[Mark] = []
    if label.leader is not None:
        marks.append(PathMark(
            segments=polyline_segments(label.leader),
            style=Style(fill="none", stroke="#616161", stroke_width=0.75),
            region=label.region_key))
    marks.append(RectMark(
        x=label.rect.x, y=label.rect.y, w=label.rect.w, h=label.rect.h, rx=2.0,
        style=Style(fill="#ffffff", stroke="#b0bec5", stroke_width=0.5, opacity=0.9),
        region=label.region_key))
    marks.append(TextMark(
        x=label.rect.cx, y=label.rect.y + label.font_size,
        lines=label.lines, font_size=label.font_size, anchor="middle",
        style=Style(fill="#212121"), region=label.region_key))
    return marks


def _matched_marks(layout: labels.MatchedLayout) -> list[Mark]:
    marks: list[Mark] = []
    for prompt in layout.prompts:
        if layout.mode == "icon":
            marks.append(IconRefMark(
                ref=prompt.lines[0], x=prompt.rect.x, y=prompt.rect.y,
                w=prompt.rect.w, h=prompt.rect.h, style=Style(fill="#37474f"),
                region=prompt.region_key))
        else:
            marks.append(TextMark(
                x=prompt.rect.cx, y=prompt.rect.y + prompt.font_size,
                lines=prompt.lines, font_size=prompt.font_size, anchor="middle",
                style=Style(fill="#212121"), region=prompt.region_key))
    panel = layout.panel
    marks.append(RectMark(x=panel.x, y=panel.y,
                          w=panel.w, h=min(panel.h, len(layout.rows) * (layout.rows[0].rect.h if layout.rows else 0.0)),
                          rx=3.0,
                          style=Style(fill="#fafafa", stroke="#b0bec5", stroke_width=0.5)))
    for row in layout.rows:
        sx, sy = row.rect.x + labels.MATCHED_ROW_PAD, row.rect.y + labels.MATCHED_ROW_PAD
        if layout.mode == "color":
            marks.append(RectMark(x=sx, y=sy, w=labels.MATCHED_SWATCH,
                                  h=labels.MATCHED_SWATCH, style=Style(fill=row.color)))
        elif layout.mode == "icon":
            marks.append(IconRefMark(ref=row.icon_ref, x=sx, y=sy,
                                     w=labels.MATCHED_SWATCH, h=labels.MATCHED_SWATCH,
                                     style=Style(fill="#37474f")))
        marks.append(TextMark(
            x=sx + labels.MATCHED_SWATCH + 6.0, y=sy + labels.MATCHED_SWATCH - 2.0,
            lines=(row.caption,), font_size=LEGEND_FONT, anchor="start",
            style=Style(fill="#212121")))
    return marks
