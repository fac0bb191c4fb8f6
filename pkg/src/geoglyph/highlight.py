"""The six attention-guiding techniques: glow, pin, contrasting color,
2.5D extrusion, contour, and zoomed insets."""
from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import NoRoom, UnknownRegion, UnresolvedTarget
from .geodata import Projection, Rect, Region, bounding_box, project_region
from .icons import icon_ref_id, icon_symbol
from .scales import format_hex, parse_hex
from .scene import (
    CircleMark,
    DefsMark,
    GradientStop,
    GroupMark,
    IconRefMark,
    Mark,
    PathMark,
    RadialGradientDef,
    RectMark,
    Style,
    SymbolDef,
    TextMark,
    path_from_rings,
)

GLOW_FADE_FACTOR = 3.0
EXTRUDE_OFFSET = (3.0, -3.0)
EXTRUDE_DARKEN = 0.6
INSET_GRID = 16
INSET_PADDING = 6.0


def contrasting_color(fill: str) -> str:
    """Hue rotated 180 degrees, saturation 0.9, lightness 0.5 (HSL)."""
    r, g, b = (c / 255.0 for c in parse_hex(fill))
    h, _l, _s = colorsys.rgb_to_hls(r, g, b)
    h = (h + 0.5) % 1.0
    nr, ng, nb = colorsys.hls_to_rgb(h, 0.5, 0.9)
    return format_hex(tuple(math.floor(c * 255.0 + 0.5) for c in (nr, ng, nb)))


def glow_gradient_id(index: int) -> str:
    return f"glow-gradient-{index}"


def apply_point_highlight(kind: str, target: tuple[float, float], *,
                          color: str = "#ffd54f", radius: float = 4.0,
                          pin_height: float = 18.0, gradient_index: int = 0
                          ) -> tuple[list, list[Mark]]:
    """Glow or pin marks at a screen point.  Returns (defs, marks)."""
    if kind == "glow":
        grad_id = glow_gradient_id(gradient_index)
        grad = RadialGradientDef(def_id=grad_id, stops=(
            GradientStop(0.0, color, 1.0),
            GradientStop(1.0 / GLOW_FADE_FACTOR, color, 1.0),  # opaque core
            GradientStop(1.0, color, 0.0),
        ))
        mark = CircleMark(cx=target[0], cy=target[1], r=radius * GLOW_FADE_FACTOR,
                          style=Style(fill=f"url(#{grad_id})"))
        return [grad], [mark]
    if kind == "pin":
        # pin symbol tip is at the bottom center of its viewBox
        w = pin_height * 24.0 / 24.0
        mark = IconRefMark(ref=icon_ref_id("pin"), x=target[0] - w / 2.0,
                           y=target[1] - pin_height, w=w, h=pin_height,
                           style=Style(fill=color))
        return [icon_symbol("pin")], [mark]
    raise UnresolvedTarget(f"unknown point highlight {kind!r}")


def apply_region_highlight(kind: str, region: Region, proj: Projection, *,
                           current_fill: str = "#eceff1",
                           stroke_width: float = 2.5) -> list[Mark]:
    """Contrasting color, contour, or 2.5D extrusion for one region."""
    rings = [ring for poly in project_region(region, proj) for ring in poly]
    segments = path_from_rings(rings)
    if kind == "contrasting_color":
        return [PathMark(segments=segments,
                         style=Style(fill=contrasting_color(current_fill)),
                         region=region.key)]
    if kind == "contour":
        return [PathMark(segments=segments,
                         style=Style(fill="none", stroke="#212121",
                                     stroke_width=stroke_width),
                         region=region.key)]
    if kind == "extrude_3d":
        dx, dy = EXTRUDE_OFFSET
        shadow_fill = _darken(current_fill, EXTRUDE_DARKEN)
        shadow_rings = [[(x + dx, y + dy) for x, y in ring] for ring in rings]
        marks: list[Mark] = [PathMark(segments=path_from_rings(shadow_rings),
                                      style=Style(fill=shadow_fill), region=region.key)]
        # connecting edge quads between original and lifted outline
        for ring, shadow in zip(rings, shadow_rings):
            n = len(ring)
            for i in range(n):
                quad = [ring[i], ring[(i + 1) % n], shadow[(i + 1) % n], shadow[i]]
                marks.append(PathMark(segments=path_from_rings([quad]),
                                      style=Style(fill=shadow_fill), region=region.key))
        # original path last, on top of the lift
        marks.append(PathMark(segments=segments, style=Style(fill=current_fill),
                              region=region.key))
        return marks
    raise UnknownRegion(f"unknown region highlight {kind!r}")


def find_empty_block(occupied: Sequence[Rect], viewport: tuple[float, float],
                     need_w: float, need_h: float) -> tuple[float, float]:
    """Top-left of the first free cell block on a 16x16 occupancy grid."""
    vw, vh = viewport
    cw, ch = vw / INSET_GRID, vh / INSET_GRID
    grid = [[False] * INSET_GRID for _ in range(INSET_GRID)]
    for rect in occupied:
        c0 = max(0, int(rect.x // cw))
        c1 = min(INSET_GRID - 1, int(rect.x1 // cw))
        r0 = max(0, int(rect.y // ch))
        r1 = min(INSET_GRID - 1, int(rect.y1 // ch))
        if rect.x1 < 0 or rect.y1 < 0 or rect.x > vw or rect.y > vh:
            continue
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                grid[r][c] = True
    need_cols = min(INSET_GRID, max(1, int(math.ceil(need_w / cw))))
    need_rows = min(INSET_GRID, max(1, int(math.ceil(need_h / ch))))
    for r in range(INSET_GRID - need_rows + 1):
        for c in range(INSET_GRID - need_cols + 1):
            if all(not grid[r + dr][c + dc]
                   for dr in range(need_rows) for dc in range(need_cols)):
                return c * cw, r * ch
    raise NoRoom(f"no free {need_cols}x{need_rows} cell block for the inset")


def build_inset(region: Region, proj: Projection, content: Sequence[Mark],
                scale_factor: float, placement: str,
                occupied: Sequence[Rect], viewport: tuple[float, float]
                ) -> list[Mark]:
    """Scaled copy of the region's marks in a framed group.

    `content` is the subset of scene marks belonging to the region; they are
    scaled uniformly about the region bbox center.  Adjacent placement finds
    a free block via the occupancy grid and adds two connector lines.
    """
    if not (1.0 < scale_factor <= 8.0):
        raise UnknownRegion(f"inset scale_factor {scale_factor} outside (1, 8]")
    box = bounding_box(region, proj)
    cx, cy = box.cx, box.cy
    frame_w = box.w * scale_factor + 2 * INSET_PADDING
    frame_h = box.h * scale_factor + 2 * INSET_PADDING

    if placement == "overlay":
        # scaled about the bbox center, frame centered on the original spot
        offset = (0.0, 0.0)
    else:
        bx, by = find_empty_block(occupied, viewport, frame_w, frame_h)
        # move the frame's top-left corner to the free block
        offset = (bx + INSET_PADDING + box.w * scale_factor / 2.0 - cx,
                  by + INSET_PADDING + box.h * scale_factor / 2.0 - cy)

    # group transform: v -> scale*(v - c) + c + offset
    tx = cx + offset[0] - scale_factor * cx
    ty = cy + offset[1] - scale_factor * cy
    frame = Rect(cx + offset[0] - frame_w / 2.0, cy + offset[1] - frame_h / 2.0,
                 frame_w, frame_h)
    marks: list[Mark] = [
        RectMark(x=frame.x, y=frame.y, w=frame.w, h=frame.h, rx=4.0,
                 style=Style(fill="#ffffff", stroke="#455a64", stroke_width=1.0),
                 region=region.key),
        GroupMark(children=tuple(content), translate=(tx, ty), scale=scale_factor,
                  region=region.key),
    ]
    if placement != "overlay":
        for corner in ((box.x, box.y), (box.x1, box.y1)):
            fx = corner[0] + offset[0] + (corner[0] - cx) * (scale_factor - 1.0) \
                + (INSET_PADDING if corner[0] > cx else -INSET_PADDING)
            fy = corner[1] + offset[1] + (corner[1] - cy) * (scale_factor - 1.0) \
                + (INSET_PADDING if corner[1] > cy else -INSET_PADDING)
            marks.append(PathMark(
                segments=(("M", corner[0], corner[1]), ("L", fx, fy)),
                style=Style(fill="none", stroke="#455a64", stroke_width=0.75),
                region=region.key))
    return marks


def _darken(color: str, factor: float) -> str:
    r, g, b = parse_hex(color)
    return format_hex(tuple(math.floor(c * factor + 0.5) for c in (r, g, b)))
