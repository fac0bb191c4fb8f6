"""Label design and placement: situated, matched, and linked strategies.

Text metrics are synthetic (fixed width/height ratios) so placement is
deterministic across platforms.  Placement itself is greedy and sequential;
placed labels immediately become obstacles for the ones that follow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import MalformedInput, PanelOverflow, SideOverflow
from .geodata import Projection, Rect, Region, point_in_region

CHAR_WIDTH_RATIO = 0.60
LINE_HEIGHT_RATIO = 1.2
WRAP_COLUMN = 24
OVERLAP_EPS = 0.01


@dataclass(frozen=True)
class LabelItem:
    anchor: tuple[float, float]
    region_key: str
    text: str
    priority: float = 0.0

    def __post_init__(self):
        if not self.text.strip():
            raise MalformedInput(f"label for {self.region_key!r} is empty")


@dataclass(frozen=True)
class PlacedLabel:
    rect: Rect
    lines: tuple[str, ...]
    anchor: tuple[float, float]
    region_key: str
    strategy: str
    leader: Optional[tuple[tuple[float, float], ...]] = None
    font_size: float = 10.0


class DoesNotFit(Exception):
    """Signal (not an error): a situated label cannot fit its region."""


def wrap_text(text: str) -> tuple[str, ...]:
    """Greedy whitespace wrap at WRAP_COLUMN codepoints."""
    words = text.split()
    lines: list[str] = []
    current = ""
    for word in words:
        candidate = word if not current else current + " " + word
        if len(candidate) <= WRAP_COLUMN or not current:
            current = candidate
        else:
            lines.append(current)
            current = word
    if current:
        lines.append(current)
    return tuple(lines)


def measure_text(text: str, font_size: float) -> tuple[tuple[str, ...], float, float]:
    """(wrapped lines, width, height) under the synthetic metrics."""
    if font_size <= 0:
        raise MalformedInput("font_size must be positive")
    lines = wrap_text(text)
    width = CHAR_WIDTH_RATIO * font_size * max(len(l) for l in lines)
    height = LINE_HEIGHT_RATIO * font_size * len(lines)
    return lines, width, height


def segments_intersect(a0, a1, b0, b1) -> bool:
    """Proper or touching intersection of two closed segments."""

    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    def on_seg(p, q, r):
        return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
                and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))

    d1 = orient(a0, a1, b0)
    d2 = orient(a0, a1, b1)
    d3 = orient(b0, b1, a0)
    d4 = orient(b0, b1, a1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True
    if d1 == 0 and on_seg(a0, a1, b0):
        return True
    if d2 == 0 and on_seg(a0, a1, b1):
        return True
    if d3 == 0 and on_seg(b0, b1, a0):
        return True
    if d4 == 0 and on_seg(b0, b1, a1):
        return True
    return False


def segment_hits_rect(p0, p1, rect: Rect) -> bool:
    if rect.contains(*p0) or rect.contains(*p1):
        return True
    corners = [(rect.x, rect.y), (rect.x1, rect.y), (rect.x1, rect.y1), (rect.x, rect.y1)]
    for i in range(4):
        if segments_intersect(p0, p1, corners[i], corners[(i + 1) % 4]):
            return True
    return False


class ObstacleSet:
    """Rectangles and segments that labels must stay clear of."""

    def __init__(self, rects: Sequence[Rect] = (), segments: Sequence[tuple] = ()):
        self.rects: list[Rect] = list(rects)
        self.segments: list[tuple] = list(segments)

    def add_rect(self, rect: Rect):
        self.rects.append(rect)

    def add_segment(self, p0, p1):
        self.segments.append((p0, p1))

    def blocks(self, rect: Rect, eps: float = OVERLAP_EPS) -> bool:
        for r in self.rects:
            if rect.intersects(r, eps=eps):
                return True
        for p0, p1 in self.segments:
            if segment_hits_rect(p0, p1, rect):
                return True
        return False


def nearest_point_on_rect(rect: Rect, p: tuple[float, float]) -> tuple[float, float]:
    """Closest point on the rect boundary to p (p assumed outside)."""
    cx = max(rect.x, min(rect.x1, p[0]))
    cy = max(rect.y, min(rect.y1, p[1]))
    if cx in (rect.x, rect.x1) or cy in (rect.y, rect.y1):
        return cx, cy
    # p is inside: project to the nearest edge
    dists = [(abs(p[0] - rect.x), (rect.x, p[1])), (abs(rect.x1 - p[0]), (rect.x1, p[1])),
             (abs(p[1] - rect.y), (p[0], rect.y)), (abs(rect.y1 - p[1]), (p[0], rect.y1))]
    return min(dists)[1]


# -- situated ----------------------------------------------------------------

def place_situated(region: Region, item: LabelItem, proj: Projection,
                   font_size: float = 10.0) -> PlacedLabel:
    """Center the label on the anchor; all corners and the center must be inside."""
    lines, w, h = measure_text(item.text, font_size)
    ax, ay = item.anchor
    rect = Rect(ax - w / 2.0, ay - h / 2.0, w, h)
    probes = [(rect.x, rect.y), (rect.x1, rect.y), (rect.x1, rect.y1), (rect.x, rect.y1),
              (rect.cx, rect.cy)]
    for p in probes:
        if not point_in_region(p, region, proj):
            raise DoesNotFit(item.region_key)
    return PlacedLabel(rect=rect, lines=lines, anchor=item.anchor,
                       region_key=item.region_key, strategy="situated",
                       font_size=font_size)


# -- matched -----------------------------------------------------------------

@dataclass(frozen=True)
class MatchedEntry:
    region_key: str
    anchor: tuple[float, float]
    keyword: str
    caption: str
    color: str = "#4e79a7"
    icon_ref: str = ""


@dataclass(frozen=True)
class MatchedRow:
    rect: Rect
    keyword: str
    caption: str
    color: str
    icon_ref: str


@dataclass(frozen=True)
class MatchedLayout:
    mode: str  # text | icon | color
    prompts: tuple[PlacedLabel, ...]        # on-map keyword/icon prompts (text/icon modes)
    rows: tuple[MatchedRow, ...]            # panel rows, top to bottom in data order
    panel: Rect


MATCHED_ROW_PAD = 4.0
MATCHED_SWATCH = 12.0


def build_matched_legend(entries: Sequence[MatchedEntry], mode: str, panel: Rect,
                         font_size: float = 10.0) -> MatchedLayout:
    """Panel rows keyed to on-map prompts by keyword, icon, or color."""
    if mode not in ("text", "icon", "color"):
        raise MalformedInput(f"unknown matched mode {mode!r}")
    row_h = LINE_HEIGHT_RATIO * font_size + 2 * MATCHED_ROW_PAD
    if len(entries) * row_h > panel.h + OVERLAP_EPS:
        raise PanelOverflow(
            f"{len(entries)} rows need {len(entries) * row_h:.0f}px, panel has {panel.h:.0f}px")
    rows = []
    prompts = []
    y = panel.y
    for entry in entries:
        caption = f"{entry.keyword}: {entry.caption}" if mode != "text" else (
            f"{entry.keyword} — {entry.caption}")
        lines, w, h = measure_text(caption, font_size)
        if MATCHED_SWATCH + 2 * MATCHED_ROW_PAD + w > panel.w + OVERLAP_EPS:
            raise PanelOverflow(f"row {entry.keyword!r} wider than panel")
        rows.append(MatchedRow(
            rect=Rect(panel.x, y, panel.w, row_h),
            keyword=entry.keyword, caption=caption,
            color=entry.color, icon_ref=entry.icon_ref,
        ))
        y += row_h
        if mode == "text":
            p_lines, pw, ph = measure_text(entry.keyword, font_size)
            prompts.append(PlacedLabel(
                rect=Rect(entry.anchor[0] - pw / 2.0, entry.anchor[1] - ph / 2.0, pw, ph),
                lines=p_lines, anchor=entry.anchor, region_key=entry.region_key,
                strategy="matched_text", font_size=font_size))
        elif mode == "icon":
            size = font_size * 1.4
            prompts.append(PlacedLabel(
                rect=Rect(entry.anchor[0] - size / 2.0, entry.anchor[1] - size / 2.0,
                          size, size),
                lines=(entry.icon_ref,), anchor=entry.anchor,
                region_key=entry.region_key, strategy="matched_icon",
                font_size=font_size))
    return MatchedLayout(mode=mode, prompts=tuple(prompts), rows=tuple(rows), panel=panel)


# -- linked ------------------------------------------------------------------

# clockwise from East in screen coordinates (y grows downward)
_SQ = math.sqrt(0.5)
COMPASS = (
    (1.0, 0.0), (_SQ, _SQ), (0.0, 1.0), (-_SQ, _SQ),
    (-1.0, 0.0), (-_SQ, -_SQ), (0.0, -1.0), (_SQ, -_SQ),
)
RING_RADII = (12.0, 20.0, 28.0, 36.0, 44.0)


def _candidate_rect(anchor, direction, radius, w, h) -> Rect:
    # near edge of the rect sits at `radius` from the anchor along `direction`
    dx, dy = direction
    reach = radius + abs(dx) * w / 2.0 + abs(dy) * h / 2.0
    cx, cy = anchor[0] + dx * reach, anchor[1] + dy * reach
    return Rect(cx - w / 2.0, cy - h / 2.0, w, h)


def place_linked_convenient(items: Sequence[LabelItem], obstacles: ObstacleSet,
                            font_size: float = 10.0
                            ) -> tuple[list[PlacedLabel], list[str]]:
    """Greedy ring search; high-priority items claim space first.

    Returns (placed, dropped region keys).  Placed labels are appended to the
    obstacle set as a side effect of the greedy definition.
    """
    ordered = sorted(items, key=lambda it: (-it.priority, it.region_key))
    placed: list[PlacedLabel] = []
    dropped: list[str] = []
    for item in ordered:
        lines, w, h = measure_text(item.text, font_size)
        chosen = None
        for radius in RING_RADII:
            for direction in COMPASS:
                rect = _candidate_rect(item.anchor, direction, radius, w, h)
                if obstacles.blocks(rect):
                    continue
                end = nearest_point_on_rect(rect, item.anchor)
                if any(segment_hits_rect(item.anchor, end, p.rect) for p in placed):
                    continue
                chosen = (rect, end)
                break
            if chosen:
                break
        if chosen is None:
            dropped.append(item.region_key)
            continue
        rect, end = chosen
        label = PlacedLabel(rect=rect, lines=lines, anchor=item.anchor,
                            region_key=item.region_key, strategy="linked_convenient",
                            leader=(item.anchor, end), font_size=font_size)
        placed.append(label)
        obstacles.add_rect(rect)
        # later rects must not cover this leader either
        obstacles.add_segment(item.anchor, end)
    return placed, dropped


ALIGNED_GAP = 18.0
ALIGNED_ELBOW = 8.0


def _uncross_slots(group: list[LabelItem], measured: list, elbows: list) -> None:
    """Swap slot assignments until no two anchor-elbow legs cross.

    A swap of a crossing pair strictly shortens the total leg length, so
    the loop terminates; the cap is a safety net for degenerate overlaps.
    """
    n = len(group)
    for _ in range(n * n + 1):
        crossing = None
        for i in range(n):
            for j in range(i + 1, n):
                if group[i].anchor == group[j].anchor:
                    continue
                if segments_intersect(group[i].anchor, elbows[i],
                                      group[j].anchor, elbows[j]):
                    crossing = (i, j)
                    break
            if crossing:
                break
        if crossing is None:
            return
        i, j = crossing
        group[i], group[j] = group[j], group[i]
        measured[i], measured[j] = measured[j], measured[i]


def place_linked_aligned(items: Sequence[LabelItem], sides: Sequence[str],
                         map_rect: Rect, font_size: float = 10.0
                         ) -> list[PlacedLabel]:
    """Perimeter labels stacked evenly along each selected side."""
    valid = ("left", "right", "top", "bottom")
    sides = tuple(s for s in valid if s in sides)
    if not sides:
        raise MalformedInput("aligned placement needs at least one side")

    def side_distance(item: LabelItem, side: str) -> float:
        ax, ay = item.anchor
        return {
            "left": ax - map_rect.x,
            "right": map_rect.x1 - ax,
            "top": ay - map_rect.y,
            "bottom": map_rect.y1 - ay,
        }[side]

    buckets: dict[str, list[LabelItem]] = {s: [] for s in sides}
    for item in items:
        best = min(sides, key=lambda s: (side_distance(item, s), valid.index(s)))
        buckets[best].append(item)

    placed: list[PlacedLabel] = []
    for side in sides:
        group = buckets[side]
        if not group:
            continue
        horizontal = side in ("left", "right")
        group.sort(key=lambda it: (it.anchor[1] if horizontal else it.anchor[0],
                                   it.region_key))
        measured = [measure_text(it.text, font_size) for it in group]
        extent = map_rect.h if horizontal else map_rect.w
        need = sum((m[2] if horizontal else m[1]) for m in measured)
        if need > extent + OVERLAP_EPS:
            raise SideOverflow(
                f"{len(group)} labels need {need:.0f}px on side {side!r}, have {extent:.0f}px")
        slot = extent / len(group)
        slot_centers = [(map_rect.y if horizontal else map_rect.x) + (i + 0.5) * slot
                        for i in range(len(group))]
        if side == "right":
            elbows = [(map_rect.x1 + ALIGNED_GAP - ALIGNED_ELBOW, c) for c in slot_centers]
        elif side == "left":
            elbows = [(map_rect.x - ALIGNED_GAP + ALIGNED_ELBOW, c) for c in slot_centers]
        elif side == "top":
            elbows = [(c, map_rect.y - ALIGNED_GAP + ALIGNED_ELBOW) for c in slot_centers]
        else:
            elbows = [(c, map_rect.y1 + ALIGNED_GAP - ALIGNED_ELBOW) for c in slot_centers]
        _uncross_slots(group, measured, elbows)
        for i, (item, (lines, w, h)) in enumerate(zip(group, measured)):
            along = slot_centers[i]
            if side == "right":
                rect = Rect(map_rect.x1 + ALIGNED_GAP, along - h / 2.0, w, h)
                edge = (rect.x, rect.cy)
                elbow = (rect.x - ALIGNED_ELBOW, rect.cy)
            elif side == "left":
                rect = Rect(map_rect.x - ALIGNED_GAP - w, along - h / 2.0, w, h)
                edge = (rect.x1, rect.cy)
                elbow = (rect.x1 + ALIGNED_ELBOW, rect.cy)
            elif side == "top":
                rect = Rect(along - w / 2.0, map_rect.y - ALIGNED_GAP - h, w, h)
                edge = (rect.cx, rect.y1)
                elbow = (rect.cx, rect.y1 + ALIGNED_ELBOW)
            else:
                rect = Rect(along - w / 2.0, map_rect.y1 + ALIGNED_GAP, w, h)
                edge = (rect.cx, rect.y)
                elbow = (rect.cx, rect.y - ALIGNED_ELBOW)
            placed.append(PlacedLabel(
                rect=rect, lines=lines, anchor=item.anchor, region_key=item.region_key,
                strategy="linked_aligned", leader=(item.anchor, elbow, edge),
                font_size=font_size))
    return placed


def polyline_point_at(guide: Sequence[tuple[float, float]], s: float
                      ) -> tuple[float, float]:
    """Point at arc length s along the polyline (clamped to its ends)."""
    remaining = max(0.0, s)
    for p0, p1 in zip(guide, guide[1:]):
        seg = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
        if remaining <= seg or seg == 0:
            t = 0.0 if seg == 0 else remaining / seg
            return p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])
        remaining -= seg
    return guide[-1]


def place_linked_ordered(items: Sequence[LabelItem],
                         guide: Sequence[tuple[float, float]],
                         font_size: float = 10.0) -> list[PlacedLabel]:
    """Labels spaced at (i+0.5)/n of the guide's arc length, priority order."""
    if len(guide) < 2:
        raise MalformedInput("ordered placement needs a guide of at least 2 points")
    total = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(guide, guide[1:]))
    if total <= 0:
        raise MalformedInput("guide has zero length")
    ordered = sorted(items, key=lambda it: (-it.priority, it.region_key))
    n = len(ordered)
    placed = []
    for i, item in enumerate(ordered):
        lines, w, h = measure_text(item.text, font_size)
        cx, cy = polyline_point_at(guide, (i + 0.5) / n * total)
        rect = Rect(cx - w / 2.0, cy - h / 2.0, w, h)
        end = nearest_point_on_rect(rect, item.anchor)
        placed.append(PlacedLabel(
            rect=rect, lines=lines, anchor=item.anchor, region_key=item.region_key,
            strategy="linked_ordered", leader=(item.anchor, end), font_size=font_size))
    return placed
