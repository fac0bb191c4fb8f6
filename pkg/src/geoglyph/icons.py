"""Built-in icon symbol library.

Each icon is path data inside a 24x24 viewBox.  The pin's tip sits at the
bottom center (12, 24) so highlight placement can anchor it exactly.
"""
from __future__ import annotations

from .errors import UnknownIcon
from .scene import Segment, SymbolDef

_Q = "Q"
_M = "M"
_L = "L"
_Z = "Z"


def _poly(*pts) -> tuple[Segment, ...]:
    segs = [(_M, pts[0][0], pts[0][1])]
    segs += [(_L, x, y) for x, y in pts[1:]]
    segs.append((_Z,))
    return tuple(segs)


_ICONS: dict[str, tuple[Segment, ...]] = {
    # head diamond over a triangular body
    "person": _poly((12, 1), (16, 5), (12, 9), (8, 5)) + _poly((12, 9), (19, 23), (5, 23)),
    # teardrop: round top, tip at (12, 24)
    "pin": (
        (_M, 12, 24),
        (_Q, 4, 12, 4, 9),
        (_Q, 4, 1, 12, 1),
        (_Q, 20, 1, 20, 9),
        (_Q, 20, 12, 12, 24),
        (_Z,),
    ),
    # canopy triangle over a trunk
    "tree": _poly((12, 1), (21, 15), (3, 15)) + _poly((10, 15), (14, 15), (14, 23), (10, 23)),
    # building block with a sawtooth roof and a chimney
    "factory": _poly((2, 23), (2, 12), (8, 16), (8, 12), (14, 16), (14, 12), (22, 12), (22, 23))
    + _poly((17, 3), (20, 3), (20, 11), (17, 11)),
    # droplet: tip at top, round bottom
    "drop": (
        (_M, 12, 1),
        (_Q, 20, 12, 20, 16),
        (_Q, 20, 23, 12, 23),
        (_Q, 4, 23, 4, 16),
        (_Q, 4, 12, 12, 1),
        (_Z,),
    ),
}

ICON_NAMES = tuple(sorted(_ICONS))


def icon_symbol(name: str, fill: str | None = None) -> SymbolDef:
    if name not in _ICONS:
        raise UnknownIcon(f"unknown icon {name!r} (have {', '.join(ICON_NAMES)})")
    return SymbolDef(def_id=f"icon-{name}", segments=_ICONS[name],
                     view_box=(0.0, 0.0, 24.0, 24.0), fill=fill)


def icon_ref_id(name: str) -> str:
    if name not in _ICONS:
        raise UnknownIcon(f"unknown icon {name!r} (have {', '.join(ICON_NAMES)})")
    return f"icon-{name}"
